#include <doctest.h>

#include <cmath>

#include "povm/errors.hpp"
#include "povm/linalg.hpp"
#include "povm/quantum.hpp"
#include "povm/tolerances.hpp"
#include "test_util.hpp"

using namespace povm;
using povm::testing::diag2;

namespace {

DensityMatrix plus_state() {
    ComplexVector v(2);
    v << 1.0, 1.0;
    return DensityMatrix::pure(v);
}

// Forces outcome j by measuring with a rigged generator: retry fresh seeds
// until the sampled outcome is j.
DensityMatrix forced_post_state(const DensityMatrix& rho, const Povm& p, std::size_t j) {
    for (std::uint64_t s = 0; s < 1000; ++s) {
        QuantumRegister reg(rho);
        Rng rng(s);
        if (reg.measure(p, rng) == j) return reg.oracle_state();
    }
    FAIL("outcome never sampled");
    return rho;
}

} // namespace

TEST_CASE("born distribution on basis and plus states") {
    const Povm z = Povm::computational_basis(2);
    const auto plus = born_distribution(z, plus_state());
    CHECK(plus[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(plus[1] == doctest::Approx(0.5).epsilon(1e-12));
    const auto zero = born_distribution(z, DensityMatrix::basis(2, 0));
    CHECK(zero[0] == 1.0);
    CHECK(zero[1] == 0.0);
}

TEST_CASE("born distribution trace arithmetic") {
    const Povm p = Povm::binary(diag2(0.8, 0.2));
    const auto d = born_distribution(p, DensityMatrix(diag2(0.3, 0.7)));
    CHECK(std::abs(d[0] - 0.38) < 1e-12);
    CHECK(std::abs(d[1] - 0.62) < 1e-12);
}

TEST_CASE("born distribution rejects dimension mismatch") {
    CHECK_THROWS_AS(born_distribution(Povm::computational_basis(3), DensityMatrix::basis(2, 0)), DimensionError);
}

TEST_CASE("invalid inputs are rejected") {
    ComplexMatrix nonherm = diag2(0.5, 0.5);
    nonherm(0, 1) = 0.3;
    CHECK_THROWS_AS(DensityMatrix{nonherm}, InvariantError);
    CHECK_THROWS_AS(DensityMatrix{diag2(1.2, -0.2)}, InvariantError);
    CHECK_THROWS_AS(DensityMatrix{diag2(0.5, 0.6)}, InvariantError);
    CHECK_THROWS_AS(Povm::binary(diag2(1.1, 0.5)), InvariantError);
    CHECK_THROWS_AS(Povm(std::vector<ComplexMatrix>{diag2(0.5, 0.5), diag2(0.4, 0.5)}), InvariantError);
    CHECK_THROWS_AS(DensityMatrix{ComplexMatrix::Zero(2, 3)}, DimensionError);
}

TEST_CASE("projective collapse of plus state") {
    const DensityMatrix post = forced_post_state(plus_state(), Povm::computational_basis(2), 0);
    CHECK(max_abs_entry(post.op() - basis_projector(2, 0)) < 1e-12);
}

TEST_CASE("eigenstate is a fixed point") {
    const Povm p = Povm::binary(diag2(1.0, 0.0));
    for (std::uint64_t s = 0; s < 50; ++s) {
        QuantumRegister reg(DensityMatrix::basis(2, 0));
        Rng rng(s);
        CHECK(reg.measure(p, rng) == 0);
        CHECK(max_abs_entry(reg.oracle_state().op() - basis_projector(2, 0)) < 1e-12);
    }
}

TEST_CASE("principal square root Kraus update") {
    const Povm p = Povm::binary(diag2(0.64, 0.04));
    CHECK(max_abs_entry(p.kraus(0) - diag2(0.8, 0.2)) < 1e-12);
    const DensityMatrix post = post_measurement_state(p, DensityMatrix::maximally_mixed(2), 0);
    CHECK(max_abs_entry(post.op() - diag2(16.0 / 17.0, 1.0 / 17.0)) < 1e-12);
    const DensityMatrix forced = forced_post_state(DensityMatrix::maximally_mixed(2), p, 0);
    CHECK(max_abs_entry(forced.op() - diag2(16.0 / 17.0, 1.0 / 17.0)) < 1e-12);
}

TEST_CASE("zero probability outcomes") {
    const Povm p = Povm::binary(diag2(1.0, 0.0));
    CHECK_THROWS_AS(post_measurement_state(p, DensityMatrix::basis(2, 0), 1), UsageError);
    std::vector<double> probs{0.0, 1.0, 0.0};
    Rng rng(3);
    for (int i = 0; i < 1000; ++i) CHECK(sample_outcome(probs, rng) == 1);
}

TEST_CASE("register access contract") {
    const Povm z = Povm::computational_basis(2);
    Rng rng(1);
    QuantumRegister once(plus_state(), QuantumRegister::Policy::SingleShot);
    once.measure(z, rng);
    CHECK(once.consumed());
    CHECK_THROWS_AS(once.measure(z, rng), RegisterError);
    QuantumRegister gone(plus_state());
    gone.destroy();
    CHECK_THROWS_AS(gone.measure(z, rng), RegisterError);
    QuantumRegister reuse(plus_state());
    reuse.measure(z, rng);
    reuse.measure(z, rng);
    CHECK(reuse.measurement_count() == 2);
    QuantumRegister wrong(DensityMatrix::basis(3, 0));
    CHECK_THROWS_AS(wrong.measure(z, rng), DimensionError);
}

TEST_CASE("spectral decomposition examples") {
    auto s = spectral_decompose(ComplexMatrix::Identity(2, 2));
    CHECK(s.values(0) == doctest::Approx(1.0));
    CHECK(s.values(1) == doctest::Approx(1.0));
    s = spectral_decompose(diag2(0.9, 0.2));
    CHECK(s.values(0) == doctest::Approx(0.2));
    CHECK(s.values(1) == doctest::Approx(0.9));

    ComplexMatrix x = ComplexMatrix::Zero(2, 2);
    x(0, 1) = x(1, 0) = 1.0;
    s = spectral_decompose(x);
    CHECK(s.values(0) == doctest::Approx(-1.0));
    CHECK(s.values(1) == doctest::Approx(1.0));
    // eigenvector for -1 is |->, for +1 is |+>, up to phase
    CHECK(std::abs(std::abs(s.vectors(0, 0) + s.vectors(1, 0))) < 1e-12);
    CHECK(std::abs(std::abs(s.vectors(0, 1) - s.vectors(1, 1))) < 1e-12);
    const ComplexMatrix rec = s.vectors * s.values.cast<Complex>().asDiagonal() * s.vectors.adjoint();
    CHECK(max_abs_entry(rec - x) < tolerances().eig);

    ComplexMatrix bad = x;
    bad(0, 1) = 2.0;
    CHECK_THROWS_AS(spectral_decompose(bad), InvariantError);
}

TEST_CASE("random spectral reconstruction") {
    Rng rng(11);
    for (int t = 0; t < 50; ++t) {
        const std::size_t dim = 2 + rng.index(7);
        const DensityMatrix rho = povm::testing::random_state(dim, rng);
        const auto s = spectral_decompose(rho.op());
        for (Eigen::Index i = 1; i < s.values.size(); ++i) CHECK(s.values(i - 1) <= s.values(i));
        const ComplexMatrix rec = s.vectors * s.values.cast<Complex>().asDiagonal() * s.vectors.adjoint();
        CHECK(max_abs_entry(rec - rho.op()) < tolerances().eig);
    }
}

TEST_CASE("property: born distribution is a probability vector and post states are valid") {
    Rng rng(2024);
    for (int t = 0; t < 200; ++t) {
        const std::size_t dim = 1 + rng.index(6);
        const std::size_t k = 2 + rng.index(3);
        const Povm p = povm::testing::random_povm(dim, k, rng);
        const DensityMatrix rho = povm::testing::random_state(dim, rng);
        const auto d = born_distribution(p, rho);
        double sum = 0.0;
        for (double v : d) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
            sum += v;
        }
        CHECK(std::abs(sum - 1.0) <= tolerances().prob);
        QuantumRegister reg(rho);
        const std::size_t j = reg.measure(p, rng);
        CHECK(d[j] > 0.0);
        CHECK_NOTHROW(DensityMatrix(reg.oracle_state().op()));
    }
}

TEST_CASE("property: scalar effects leave the state unchanged") {
    Rng rng(5);
    for (int t = 0; t < 50; ++t) {
        const std::size_t dim = 1 + rng.index(5);
        const double c = rng.uniform();
        const auto d = static_cast<Eigen::Index>(dim);
        const Povm p(std::vector<ComplexMatrix>{c * ComplexMatrix::Identity(d, d),
                                                (1.0 - c) * ComplexMatrix::Identity(d, d)});
        const DensityMatrix rho = povm::testing::random_state(dim, rng);
        QuantumRegister reg(rho);
        reg.measure(p, rng);
        CHECK(max_abs_entry(reg.oracle_state().op() - rho.op()) < 1e-9);
    }
}

TEST_CASE("empirical frequencies match the Born rule") {
    Rng rng(77);
    const Povm p = povm::testing::random_povm(3, 3, rng);
    const DensityMatrix rho = povm::testing::random_state(3, rng);
    const auto probs = born_distribution(p, rho);
    const int n = 100000;
    std::vector<int> counts(3, 0);
    for (int i = 0; i < n; ++i) {
        QuantumRegister reg(rho, QuantumRegister::Policy::SingleShot);
        ++counts[reg.measure(p, rng)];
    }
    for (std::size_t j = 0; j < 3; ++j) {
        const double sigma = std::sqrt(probs[j] * (1 - probs[j]) / n);
        CHECK(std::abs(counts[j] / double(n) - probs[j]) <= 4 * sigma + 1e-12);
    }
}

TEST_CASE("tolerance overrides are scoped") {
    const double before = tolerances().psd;
    {
        Tolerances t = tolerances();
        t.psd = 0.5;
        ScopedTolerances scope(t);
        CHECK_NOTHROW(DensityMatrix{diag2(1.2, -0.2)});
    }
    CHECK(tolerances().psd == before);
}

TEST_CASE("rng streams are deterministic and distinct") {
    Rng a(42), b(42);
    for (int i = 0; i < 100; ++i) CHECK(a() == b());
    CHECK(Rng(42).substream(1)() != Rng(42).substream(2)());
    CHECK(Rng(42).stream("data")() != Rng(42).stream("learner")());
    CHECK(Rng(42).stream("data")() == Rng(42).stream("data")());
    Rng r(9);
    for (int i = 0; i < 1000; ++i) {
        const double u = r.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        CHECK(r.index(7) < 7);
    }
}
