#include <doctest.h>

#include <cmath>

#include "povm/calculus.hpp"
#include "povm/complexity.hpp"
#include "povm/errors.hpp"
#include "povm/linalg.hpp"
#include "povm/tolerances.hpp"
#include "test_util.hpp"

using namespace povm;
using povm::testing::diag2;

namespace {

std::vector<Povm> diag_family(double step) {
    std::vector<Povm> out;
    const int n = static_cast<int>(std::lround(1.0 / step));
    for (int i = 0; i <= n; ++i) out.push_back(Povm::binary(i * step * ComplexMatrix::Identity(2, 2)));
    return out;
}

std::vector<Povm> qutrit_projectors() {
    std::vector<Povm> out;
    for (std::size_t i = 0; i < 3; ++i) out.push_back(Povm::binary(basis_projector(3, i)));
    return out;
}

// Random pure-state maximization of |Tr(rho (A - B))|: a lower estimate of
// the all-states distance that must approach it from below.
double random_state_dtv(const Povm& a, const Povm& b, std::size_t samples, Rng& rng) {
    double best = 0.0;
    const ComplexMatrix delta = a.effect(0) - b.effect(0);
    for (std::size_t i = 0; i < samples; ++i) {
        const ComplexVector v = povm::testing::random_vector(a.dim(), rng);
        best = std::max(best, std::abs((v.adjoint() * delta * v)(0, 0).real()));
    }
    return best;
}

} // namespace

TEST_CASE("channel validation and factories") {
    Eigen::MatrixXd bad(2, 2);
    bad << 0.5, 0.6, 0.0, 1.0;
    CHECK_THROWS_AS(ClassicalChannel{bad}, InvariantError);
    bad << -0.1, 1.1, 0.0, 1.0;
    CHECK_THROWS_AS(ClassicalChannel{bad}, InvariantError);
    const auto bsc = ClassicalChannel::binary_symmetric(0.1);
    CHECK(bsc.prob(0, 0) == doctest::Approx(0.9));
    CHECK(bsc.prob(1, 0) == doctest::Approx(0.1));
    CHECK(bsc.prob(0, 1) == doctest::Approx(0.1));
    const auto c = ClassicalChannel::constant(3, 0);
    for (std::size_t z = 0; z < 3; ++z) CHECK(c.prob(0, z) == 1.0);
}

TEST_CASE("dtv examples") {
    const auto all2 = DomainSpec::all_states(2);
    const Povm a = Povm::binary(diag2(1.0, 0.0));
    const Povm b = Povm::binary(diag2(0.5, 0.5));
    CHECK(dtv_povm(a, a, all2) == 0.0);
    CHECK(dtv_povm(a, b, all2) == doctest::Approx(0.5).epsilon(1e-12));
    for (double t : {0.0, 0.2, 0.7}) {
        for (double s : {0.1, 0.5, 1.0}) {
            const Povm pt = Povm::binary(t * ComplexMatrix::Identity(2, 2));
            const Povm ps = Povm::binary(s * ComplexMatrix::Identity(2, 2));
            CHECK(std::abs(dtv_povm(pt, ps, all2) - std::abs(t - s)) < 1e-12);
        }
    }
}

TEST_CASE("all-states dtv is approached from below by random states") {
    Rng rng(3);
    const Povm a = Povm::binary(diag2(1.0, 0.0));
    const Povm b = Povm::binary(diag2(0.5, 0.5));
    const double approx = random_state_dtv(a, b, 10000, rng);
    CHECK(approx <= 0.5 + 1e-12);
    CHECK(approx >= 0.49);
    for (int t = 0; t < 20; ++t) {
        const Povm p = povm::testing::random_povm(3, 2, rng);
        const Povm q = povm::testing::random_povm(3, 2, rng);
        const double exact = dtv_povm(p, q, DomainSpec::all_states(3));
        const double lower = random_state_dtv(p, q, 4000, rng);
        CHECK(lower <= exact + 1e-12);
        CHECK(lower >= exact - 0.05);
    }
}

TEST_CASE("dtv errors") {
    Rng rng(1);
    const Povm three = povm::testing::random_povm(2, 3, rng);
    CHECK_THROWS_AS(dtv_povm(three, three, DomainSpec::all_states(2)), UsageError);
    CHECK_THROWS_AS(dtv_povm(Povm::computational_basis(2), Povm::computational_basis(3), DomainSpec::all_states(2)),
                    DimensionError);
    CHECK_THROWS(DomainSpec::finite({}));
}

TEST_CASE("property: finite-domain dtv is a pseudometric dominated by the all-states value") {
    Rng rng(8);
    for (int t = 0; t < 100; ++t) {
        const std::size_t dim = 2 + rng.index(3);
        std::vector<DensityMatrix> xs;
        for (int i = 0; i < 4; ++i) xs.push_back(povm::testing::random_state(dim, rng));
        const auto fin = DomainSpec::finite(xs);
        const auto all = DomainSpec::all_states(dim);
        const Povm a = povm::testing::random_povm(dim, 2, rng);
        const Povm b = povm::testing::random_povm(dim, 2, rng);
        const Povm c = povm::testing::random_povm(dim, 2, rng);
        const double ab = dtv_povm(a, b, fin), ba = dtv_povm(b, a, fin);
        CHECK(std::abs(ab - ba) < 1e-12);
        CHECK(dtv_povm(a, a, fin) < 1e-12);
        CHECK(ab <= dtv_povm(a, c, fin) + dtv_povm(c, b, fin) + 1e-12);
        CHECK(ab <= dtv_povm(a, b, all) + 1e-12);
        CHECK(ab >= 0.0);
        CHECK(dtv_povm(a, b, all) <= 1.0);
        // Three-outcome finite-domain distance is also symmetric.
        const Povm p3 = povm::testing::random_povm(dim, 3, rng);
        const Povm q3 = povm::testing::random_povm(dim, 3, rng);
        CHECK(std::abs(dtv_povm(p3, q3, fin) - dtv_povm(q3, p3, fin)) < 1e-12);
    }
}

TEST_CASE("fine-graining examples") {
    const Povm root = Povm::computational_basis(2);
    Rng rng(4);
    const DensityMatrix rho = povm::testing::random_state(2, rng);
    const auto direct = born_distribution(root, rho);
    const auto via_id = apply_fine_graining({root, ClassicalChannel::identity(2)}, rho);
    CHECK(std::abs(direct[0] - via_id[0]) < 1e-12);

    const auto bsc = apply_fine_graining({root, ClassicalChannel::binary_symmetric(0.1)}, DensityMatrix::basis(2, 0));
    CHECK(bsc[0] == doctest::Approx(0.9));
    CHECK(bsc[1] == doctest::Approx(0.1));

    const Povm rand_root = povm::testing::random_povm(3, 4, rng);
    const auto constant = apply_fine_graining({rand_root, ClassicalChannel::constant(4, 0)}, povm::testing::random_state(3, rng));
    CHECK(constant[0] == doctest::Approx(1.0));
    CHECK(constant[1] == doctest::Approx(0.0));

    CHECK_THROWS_AS(apply_fine_graining({rand_root, ClassicalChannel::identity(2)}, povm::testing::random_state(3, rng)),
                    DimensionError);
}

TEST_CASE("induced POVM examples") {
    const Povm root = Povm::computational_basis(2);
    const Povm same = induced_povm({root, ClassicalChannel::identity(2)});
    CHECK(max_abs_entry(same.effect(0) - root.effect(0)) < 1e-12);
    const Povm mixed = induced_povm({root, ClassicalChannel::binary_symmetric(0.1)});
    CHECK(max_abs_entry(mixed.effect(0) - diag2(0.9, 0.1)) < 1e-12);
    const Povm det = induced_povm({root, ClassicalChannel::constant(2, 0)});
    CHECK(max_abs_entry(det.effect(0) - ComplexMatrix::Identity(2, 2)) < 1e-12);
}

TEST_CASE("property: induced POVMs are valid and obey data processing") {
    Rng rng(10);
    for (int t = 0; t < 100; ++t) {
        const std::size_t dim = 2 + rng.index(3);
        const std::size_t k = 2 + rng.index(3);
        Eigen::MatrixXd m(k, 2);
        for (std::size_t z = 0; z < k; ++z) {
            const double p = rng.uniform();
            m(z, 0) = p;
            m(z, 1) = 1 - p;
        }
        const ClassicalChannel ch(m);
        const Povm r1 = povm::testing::random_povm(dim, k, rng);
        const Povm r2 = povm::testing::random_povm(dim, k, rng);
        const Povm i1 = induced_povm({r1, ch});
        const Povm i2 = induced_povm({r2, ch});
        std::vector<DensityMatrix> xs;
        for (int i = 0; i < 5; ++i) xs.push_back(povm::testing::random_state(dim, rng));
        const auto dom = DomainSpec::finite(xs);
        CHECK(dtv_povm(i1, i2, dom) <= dtv_povm(r1, r2, dom) + 1e-12);
        for (const auto& x : xs) {
            const auto a = born_distribution(i1, x);
            const auto b = apply_fine_graining({r1, ch}, x);
            CHECK(std::abs(a[0] - b[0]) <= tolerances().dtv);
        }
    }
}

TEST_CASE("jm smoothing") {
    const Povm root = Povm::computational_basis(2);
    const auto all = DomainSpec::all_states(2);
    const std::vector<ClassicalChannel> chans{ClassicalChannel::identity(2), ClassicalChannel::binary_symmetric(0.2),
                                              ClassicalChannel::constant(2, 1)};
    const auto exact = ApproxJmElement::exact(root, chans, all);
    CHECK(exact.gamma() == 0.0);
    for (std::size_t h = 0; h < chans.size(); ++h) {
        CHECK(dtv_povm(induced_povm(jm_smooth(exact, h)), exact.members()[h].member, all) < 1e-12);
    }
    CHECK_THROWS(jm_smooth(exact, 3));

    // Member root displaced by 0.05 from the center, identity channel.
    const Povm displaced = Povm::binary(diag2(0.95, 0.05));
    const ApproxJmElement near(root, {JmMember{displaced, displaced, ClassicalChannel::identity(2)}}, 0.05, all);
    CHECK(dtv_povm(induced_povm(jm_smooth(near, 0)), displaced, all) <= 0.05 + 1e-12);
    CHECK_THROWS_AS(ApproxJmElement(root, {JmMember{displaced, displaced, ClassicalChannel::identity(2)}}, 0.01, all),
                    InvariantError);
    // A member whose channel does not realize it.
    CHECK_THROWS_AS(ApproxJmElement(root, {JmMember{root, displaced, ClassicalChannel::binary_symmetric(0.3)}}, 0.05, all),
                    InvariantError);

    // Commuting projective qubit POVMs, shared eigenbasis center: relabelings.
    const Povm z0 = Povm::computational_basis(2);
    const Povm z1 = Povm::binary(basis_projector(2, 1));
    const auto both = ApproxJmElement::exact(root, {ClassicalChannel::identity(2), ClassicalChannel::binary_symmetric(1.0)}, all);
    CHECK(dtv_povm(induced_povm(jm_smooth(both, 0)), z0, all) < 1e-12);
    CHECK(dtv_povm(induced_povm(jm_smooth(both, 1)), z1, all) < 1e-12);
}

TEST_CASE("tv cover examples") {
    const auto all2 = DomainSpec::all_states(2);
    CHECK(tv_cover({Povm::computational_basis(2)}, 0.1, all2).size() == 1);
    const auto fam = diag_family(0.01);
    const auto centers = tv_cover(fam, 0.1, all2);
    CHECK(centers.size() >= 5);
    CHECK(centers.size() <= 6);
    const auto dist = dtv_matrix(fam, all2);
    const auto assign = assign_to_centers(dist, centers);
    for (std::size_t i = 0; i < fam.size(); ++i) CHECK(dist(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(centers[assign[i]])) <= 0.1 + 1e-8);
    CHECK(tv_cover(qutrit_projectors(), 0.5, DomainSpec::all_states(3)).size() == 3);
    CHECK_THROWS(tv_cover(std::vector<Povm>{}, 0.1, all2));
    CHECK_THROWS(tv_cover(fam, 0.0, all2));
}

TEST_CASE("property: cover size is at most the strict packing number and covers everything") {
    Rng rng(12);
    for (int t = 0; t < 40; ++t) {
        std::vector<Povm> pts;
        const std::size_t n = 3 + rng.index(12);
        for (std::size_t i = 0; i < n; ++i) pts.push_back(povm::testing::random_povm(2, 2, rng));
        const auto dom = DomainSpec::all_states(2);
        const double gamma = 0.05 + 0.3 * rng.uniform();
        const auto dist = dtv_matrix(pts, dom);
        const auto centers = tv_cover(dist, gamma);
        for (std::size_t i = 0; i < n; ++i) {
            double best = 1.0;
            for (auto c : centers) best = std::min(best, dist(Eigen::Index(i), Eigen::Index(c)));
            CHECK(best <= gamma + tolerances().dtv);
        }
        CHECK(centers.size() <= packing_number(dist, gamma, PackingMode::Exhaustive));
        CHECK(centers.size() >= min_cover_size_exhaustive(dist, gamma));
    }
}
