#include <doctest.h>

#include <cmath>
#include <functional>
#include <numbers>

#include "povm/complexity.hpp"
#include "povm/errors.hpp"
#include "povm/learners.hpp"
#include "test_util.hpp"

using namespace povm;

namespace {

// Naive fat-shattering check: every subset, every witness vector on the
// grid, every pattern. Shares nothing with the search in the library.
std::size_t naive_fat_dim(const std::vector<std::vector<double>>& f, double gamma, double res) {
    const std::size_t members = f.size(), n = f.front().size();
    std::vector<double> grid;
    for (int k = -100; k <= 100; ++k) {
        const double r = 0.5 + k * res;
        if (r >= gamma - 1e-12 && r <= 1 - gamma + 1e-12) grid.push_back(r);
    }
    std::size_t best = 0;
    for (std::size_t subset = 1; subset < (std::size_t{1} << n); ++subset) {
        std::vector<std::size_t> pts;
        for (std::size_t i = 0; i < n; ++i)
            if (subset >> i & 1U) pts.push_back(i);
        if (pts.size() <= best) continue;
        const std::size_t s = pts.size();
        std::vector<std::size_t> w(s, 0);
        bool found = false;
        while (!found) {
            bool all_patterns = true;
            for (std::size_t b = 0; b < (std::size_t{1} << s) && all_patterns; ++b) {
                bool realized = false;
                for (std::size_t h = 0; h < members && !realized; ++h) {
                    bool ok = true;
                    for (std::size_t i = 0; i < s && ok; ++i) {
                        const double v = f[h][pts[i]], r = grid[w[i]];
                        ok = (b >> i & 1U) ? v >= r + gamma - 1e-12 : v <= r - gamma + 1e-12;
                    }
                    realized = ok;
                }
                all_patterns = realized;
            }
            if (all_patterns) found = true;
            std::size_t i = 0;
            while (i < s && ++w[i] == grid.size()) w[i++] = 0;
            if (i == s) break;
        }
        if (found) best = s;
    }
    return best;
}

std::vector<std::vector<double>> f_table(const HypothesisClass& cls, const std::vector<DensityMatrix>& xs) {
    std::vector<std::vector<double>> f(cls.size(), std::vector<double>(xs.size()));
    for (std::size_t h = 0; h < cls.size(); ++h)
        for (std::size_t i = 0; i < xs.size(); ++i) f[h][i] = outcome_one_probability(cls.member(h), xs[i]);
    return f;
}

// Exact maximum strict packing on a line: longest chain with gaps > gamma.
std::size_t line_packing_dp(const std::vector<double>& t, double gamma) {
    std::vector<std::size_t> best(t.size(), 1);
    std::size_t out = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        for (std::size_t j = 0; j < i; ++j)
            if (t[i] - t[j] > gamma + 1e-8) best[i] = std::max(best[i], best[j] + 1);
        out = std::max(out, best[i]);
    }
    return out;
}

// Exact Rademacher value by enumeration over all per-sample (atom, label,
// root outcome) triples and sign vectors.
double exact_rademacher(const ApproxJmElement& el, const DataDistribution& d, std::size_t m) {
    struct Triple {
        double p;
        std::size_t z;
        int y;
    };
    std::vector<Triple> triples;
    for (const auto& a : d.atoms()) {
        const auto pz = born_distribution(el.center(), a.state);
        for (int y = 0; y < 2; ++y)
            for (std::size_t z = 0; z < pz.size(); ++z)
                triples.push_back({a.prob * (y ? a.p_label1 : 1 - a.p_label1) * pz[z], z, y});
    }
    double total = 0;
    std::vector<std::size_t> idx(m, 0);
    while (true) {
        double p = 1;
        for (auto i : idx) p *= triples[i].p;
        if (p > 0) {
            double avg = 0;
            for (std::size_t s = 0; s < (std::size_t{1} << m); ++s) {
                double sup = -1e9;
                for (std::size_t h = 0; h < el.size(); ++h) {
                    double acc = 0;
                    for (std::size_t j = 0; j < m; ++j) {
                        const auto& t = triples[idx[j]];
                        acc += ((s >> j & 1U) ? 1.0 : -1.0) * el.members()[h].channel.prob(1 - t.y, t.z);
                    }
                    sup = std::max(sup, acc / m);
                }
                avg += sup;
            }
            total += p * avg / (1U << m);
        }
        std::size_t j = 0;
        while (j < m && ++idx[j] == triples.size()) idx[j++] = 0;
        if (j == m) break;
    }
    return total;
}

std::vector<double> diag_grid(double step) {
    std::vector<double> t;
    const int n = static_cast<int>(std::lround(1.0 / step));
    for (int i = 0; i <= n; ++i) t.push_back(i * step);
    return t;
}

} // namespace

TEST_CASE("fat dimension examples") {
    const auto all = DomainSpec::all_states(2);
    const auto two = HypothesisClass::finite(
        {Povm::binary(0.1 * ComplexMatrix::Identity(2, 2)), Povm::binary(0.9 * ComplexMatrix::Identity(2, 2))}, all);
    const std::vector<DensityMatrix> one{DensityMatrix::basis(2, 0)};
    auto r = fat_dim(two, one, 0.3);
    CHECK(r.dimension == 1);
    CHECK(r.certificate.witnesses == std::vector<double>{0.5});
    CHECK(validate_certificate(two, one, r.certificate));
    const std::vector<DensityMatrix> pair{DensityMatrix::basis(2, 0), DensityMatrix::basis(2, 1)};
    CHECK(fat_dim(two, pair, 0.3).dimension == 1);

    const auto ex = make_example1_class(std::vector<double>(5, 0.8));
    r = fat_dim(ex, ex.domain().states(), 0.25);
    CHECK(r.dimension == 5);
    for (double w : r.certificate.witnesses) CHECK(w == 0.5);
    CHECK(r.certificate.realizers.size() == 32);
    CHECK(validate_certificate(ex, ex.domain().states(), r.certificate));

    CHECK_THROWS(fat_dim(two, one, 0.0));
    CHECK_THROWS(fat_dim(two, one, 0.6));
    FatDimOptions tiny;
    tiny.max_candidates = 1;
    CHECK_THROWS(fat_dim(two, pair, 0.3, tiny));
}

TEST_CASE("certificate validation rejects tampering") {
    const auto ex = make_example1_class(std::vector<double>(3, 0.8));
    auto r = fat_dim(ex, ex.domain().states(), 0.25);
    REQUIRE(validate_certificate(ex, ex.domain().states(), r.certificate));
    auto bad = r.certificate;
    std::swap(bad.realizers[0], bad.realizers[7]);
    CHECK_FALSE(validate_certificate(ex, ex.domain().states(), bad));
    bad = r.certificate;
    bad.witnesses[0] = 0.7;
    CHECK_FALSE(validate_certificate(ex, ex.domain().states(), bad));
}

TEST_CASE("fat dimension agrees with the naive brute force") {
    Rng rng(13);
    for (std::size_t n = 1; n <= 4; ++n) {
        const auto ex = make_example1_class(std::vector<double>(n, 0.8));
        CHECK(fat_dim(ex, ex.domain().states(), 0.25).dimension == naive_fat_dim(f_table(ex, ex.domain().states()), 0.25, 0.125));
    }
    for (int t = 0; t < 30; ++t) {
        std::vector<Povm> members;
        const std::size_t k = 2 + rng.index(10);
        for (std::size_t h = 0; h < k; ++h) members.push_back(povm::testing::random_povm(2, 2, rng));
        std::vector<DensityMatrix> xs;
        for (int i = 0; i < 3; ++i) xs.push_back(povm::testing::random_state(2, rng, 1));
        const auto cls = HypothesisClass::finite(members, DomainSpec::all_states(2));
        const double gamma = 0.05 + 0.1 * rng.uniform();
        const auto r = fat_dim(cls, xs, gamma);
        CHECK(r.dimension == naive_fat_dim(f_table(cls, xs), gamma, gamma / 2));
        if (r.dimension > 0) CHECK(validate_certificate(cls, xs, r.certificate));
    }
}

TEST_CASE("packing examples") {
    const auto all2 = DomainSpec::all_states(2);
    CHECK(packing_number({Povm::computational_basis(2)}, 0.1, all2) == 1);
    const auto q = make_orthogonal_projectors(3);
    CHECK(packing_number(q.members(), 0.5, q.domain(), PackingMode::Exhaustive) == 3);
    CHECK(packing_number(q.members(), 0.5, q.domain()) == 3);

    const auto fine = diag_grid(0.01);
    const auto fam = make_diag_family(fine);
    const std::size_t greedy = packing_number(fam.members(), 0.1, fam.domain());
    CHECK(greedy == 10);
    CHECK(greedy == line_packing_dp(fine, 0.1));

    // Strict separation on the step-0.1 subgrid: 0, 0.2, ..., 1.0.
    const auto coarse = diag_grid(0.1);
    const auto sub = make_diag_family(coarse);
    CHECK(packing_number(sub.members(), 0.1, sub.domain(), PackingMode::Exhaustive) == 6);
    CHECK(line_packing_dp(coarse, 0.1) == 6);
    CHECK_THROWS(packing_number(std::vector<Povm>{}, 0.1, all2));
    CHECK_THROWS(packing_number(fam.members(), 0.1, fam.domain(), PackingMode::Exhaustive));
}

TEST_CASE("property: exhaustive packing matches the line oracle on random 1-D sets") {
    Rng rng(91);
    for (int t = 0; t < 30; ++t) {
        std::vector<double> ts;
        const std::size_t n = 5 + rng.index(20);
        for (std::size_t i = 0; i < n; ++i) ts.push_back(rng.uniform());
        std::sort(ts.begin(), ts.end());
        const auto fam = make_diag_family(ts);
        const double gamma = 0.02 + 0.2 * rng.uniform();
        CHECK(packing_number(fam.members(), gamma, fam.domain(), PackingMode::Exhaustive) == line_packing_dp(ts, gamma));
    }
}

TEST_CASE("jm covering bound") {
    const auto jm = HypothesisClass::jointly_measurable(
        Povm::computational_basis(2), {ClassicalChannel::identity(2), ClassicalChannel::binary_symmetric(1.0)},
        DomainSpec::all_states(2));
    const auto r = jm_covering_bound(jm, 0.1);
    CHECK(r.dtv_bound == 2);
    REQUIRE(r.structural.has_value());
    CHECK(*r.structural == 1);

    const auto fam = make_diag_family(diag_grid(0.01));
    CHECK(jm_covering_bound(fam, 0.1).dtv_bound <= 6);
    const auto q = make_orthogonal_projectors(3);
    const auto qr = jm_covering_bound(q, 0.4);
    CHECK(qr.dtv_bound <= 3);
    CHECK(qr.dtv_bound >= 1);
    CHECK_FALSE(qr.structural.has_value());
}

TEST_CASE("rademacher estimates") {
    Rng rng(6);
    const auto d = noisy_basis_distribution(0.2);
    const auto single = ApproxJmElement::exact(Povm::computational_basis(2), {ClassicalChannel::binary_symmetric(0.3)},
                                               DomainSpec::all_states(2));
    const auto e0 = rademacher_mc(single, d, 25, 4000, rng);
    CHECK(std::abs(e0.mean) <= 3 * e0.std_error);

    const auto consts = ApproxJmElement::exact(Povm::computational_basis(2),
                                               {ClassicalChannel::constant(2, 0), ClassicalChannel::constant(2, 1)},
                                               DomainSpec::all_states(2));
    double prev = 1e9, prev_se = 0;
    for (std::size_t m : {25, 100, 400}) {
        const auto e = rademacher_mc(consts, d, m, 2000, rng);
        CHECK(e.mean <= prev + 3 * (e.std_error + prev_se));
        prev = e.mean;
        prev_se = e.std_error;
    }

    const auto mixed = ApproxJmElement::exact(
        Povm::computational_basis(2),
        {ClassicalChannel::identity(2), ClassicalChannel::binary_symmetric(0.3), ClassicalChannel::constant(2, 1)},
        DomainSpec::all_states(2));
    const double exact = exact_rademacher(mixed, d, 3);
    const auto mc = rademacher_mc(mixed, d, 3, 20000, rng);
    CHECK(std::abs(mc.mean - exact) <= 3 * mc.std_error);

    CHECK_THROWS(rademacher_mc(mixed, d, 3, 0, rng));
    const Povm displaced = Povm::binary(povm::testing::diag2(0.95, 0.05));
    const ApproxJmElement near(Povm::computational_basis(2), {JmMember{displaced, displaced, ClassicalChannel::identity(2)}},
                               0.05, DomainSpec::all_states(2));
    CHECK_THROWS(rademacher_mc(near, d, 3, 10, rng));
}

TEST_CASE("generalization gap") {
    Rng rng(44);
    const auto d = noisy_basis_distribution(0.2);
    const auto single = ApproxJmElement::exact(Povm::computational_basis(2), {ClassicalChannel::identity(2)},
                                               DomainSpec::all_states(2));
    for (int t = 0; t < 20; ++t) {
        auto ds = sample_dataset(d, 10000, rng);
        std::vector<std::size_t> z(ds.size());
        std::vector<int> y(ds.size());
        for (std::size_t j = 0; j < ds.size(); ++j) {
            z[j] = ds.reg(j).measure(single.center(), rng);
            y[j] = ds.label(j);
        }
        CHECK(std::abs(generalization_gap(single, z, y, d)) <= 0.02);
    }

    // Deterministic channels on deterministic data: zero on every pattern.
    const auto det = ApproxJmElement::exact(Povm::computational_basis(2), {ClassicalChannel::identity(2)},
                                            DomainSpec::all_states(2));
    const auto dd = noisy_basis_distribution(0.0);
    for (std::size_t mask = 0; mask < 8; ++mask) {
        std::vector<std::size_t> z(3);
        std::vector<int> y(3);
        for (std::size_t j = 0; j < 3; ++j) z[j] = y[j] = static_cast<int>(mask >> j & 1U);
        CHECK(generalization_gap(det, z, y, dd) == 0.0);
    }
}

TEST_CASE("property: generalization gap has bounded differences") {
    Rng rng(45);
    const auto el = ApproxJmElement::exact(
        Povm::computational_basis(2),
        {ClassicalChannel::identity(2), ClassicalChannel::binary_symmetric(0.3), ClassicalChannel::constant(2, 0)},
        DomainSpec::all_states(2));
    const auto d = noisy_basis_distribution(0.25);
    const std::size_t m = 3;
    // Enumerate all (z, y) patterns of 3 samples and every single swap.
    for (std::size_t a = 0; a < 64; ++a) {
        std::vector<std::size_t> z(m);
        std::vector<int> y(m);
        for (std::size_t j = 0; j < m; ++j) {
            z[j] = a >> (2 * j) & 1U;
            y[j] = static_cast<int>(a >> (2 * j + 1) & 1U);
        }
        const double phi = generalization_gap(el, z, y, d);
        CHECK(phi >= -1.0);
        CHECK(phi <= 1.0);
        for (std::size_t j = 0; j < m; ++j) {
            for (std::size_t alt = 0; alt < 4; ++alt) {
                auto z2 = z;
                auto y2 = y;
                z2[j] = alt & 1U;
                y2[j] = static_cast<int>(alt >> 1);
                CHECK(std::abs(generalization_gap(el, z2, y2, d) - phi) <= 1.0 / m + 1e-12);
            }
        }
    }
}

TEST_CASE("finite partition bound") {
    CHECK(bound_heidari_finite({1}, 0.1, 0.05).value == doctest::Approx(800 * std::log(40.0)));
    CHECK(std::abs(bound_heidari_finite({1}, 0.1, 0.05).value - 2951.1) < 0.05);
    for (std::size_t n : {2, 5, 10}) {
        const double formula = 8.0 * n / 0.04 * std::log(2.0 * n / 0.2);
        CHECK(bound_heidari_finite(std::vector<std::size_t>(n, 1), 0.2, 0.2).value == doctest::Approx(formula));
    }
    CHECK(bound_heidari_finite(std::vector<std::size_t>(10, 1), 0.1, 0.05).value == doctest::Approx(47931.716376864).epsilon(1e-10));
    CHECK_THROWS(bound_heidari_finite({1}, 0.0, 0.05));
    CHECK_THROWS(bound_heidari_finite({1}, 0.1, 1.0));
    CHECK_THROWS(bound_heidari_finite({0}, 0.1, 0.5));
}

TEST_CASE("fat-dimension partition bound") {
    // c R (d + ln(1/delta)) / eps^2 at R = 1, d = 0, delta = 1/e, eps = 1, c = 1.
    CHECK(bound_thm4(1, 0, 1.0, std::exp(-1.0), 1.0).value == doctest::Approx(1.0));
    CHECK(bound_thm4(2, 5, 0.1, 0.1, 1.0).value == doctest::Approx(2 * (5 + std::log(10.0)) / 0.01));
    CHECK(std::abs(bound_thm4(2, 5, 0.1, 0.1, 1.0).value - 1460.5) < 0.05);
    CHECK(bound_thm4(4, 3, 0.2, 0.1).value == doctest::Approx(2 * bound_thm4(2, 3, 0.2, 0.1).value));
    CHECK(bound_thm4(1, 0, 0.2, 0.1).value == doctest::Approx(64 * std::log(10.0) / 0.04));
    CHECK_THROWS(bound_thm4(0, 1, 0.1, 0.1));
    CHECK_THROWS(bound_thm4(1, 1, 0.1, 0.1, -1.0));
}

TEST_CASE("covering-via-fat bound") {
    const auto r = bound_covering_fat(0.5, 1, 4);
    CHECK(r.value == doctest::Approx(2e8));
    CHECK(bound_covering_fat(2.0, 1, 1).value == doctest::Approx(8.0));
    double prev = 0;
    for (std::size_t m = 1; m <= 200; ++m) {
        const double v = bound_covering_fat(0.3, 3, m).log_value;
        CHECK(v >= prev);
        prev = v;
    }
    const auto huge = bound_covering_fat(0.01, 50, 100000);
    CHECK(huge.overflow);
    CHECK(std::isfinite(huge.log_value));
    CHECK_THROWS(bound_covering_fat(0.0, 1, 1));
    CHECK_THROWS(bound_covering_fat(0.5, 0, 1));
    CHECK_THROWS(bound_covering_fat(0.5, 1, 0));
}

TEST_CASE("fat/covering inequality check") {
    CHECK(bound_thm5_check(1, 0, 0, 0.5));
    CHECK(bound_thm5_check(1, 3, 0, 0.5));
    // d = 0 collapses the right-hand side to 2.
    CHECK_FALSE(bound_thm5_check(1000, 0, 1000 * 999 / 2, 0.5));
    CHECK(bound_thm5_check(2, 0, 1, 0.5));
    CHECK_THROWS(bound_thm5_check(5, 1, 9, 0.5));
    const auto ex = make_example1_class(std::vector<double>(5, 0.8));
    const std::size_t k = packing_number(ex.members(), 1.0, ex.domain());
    const std::size_t d = fat_dim(ex, ex.domain().states(), 0.25).dimension;
    CHECK(d == 5);
    CHECK(bound_thm5_check(k, d, k * (k - 1) / 2, 1.0));
}

TEST_CASE("variational circuit bound") {
    CHECK(std::abs(bound_qnn(2, 0.5, 0.1, 1.0).value - 36.84) < 0.005);
    CHECK(bound_qnn(3, 0.7, 0.2, 0.7).value == doctest::Approx(std::log(5.0)));
    CHECK(bound_qnn(3, 0.1, 0.2, 1.0).value == doctest::Approx(32 * bound_qnn(3, 0.2, 0.2, 1.0).value));
    CHECK_THROWS(bound_qnn(2, 0.5, 0.1, 0.0));
}

TEST_CASE("bound report csv") {
    const auto r = bound_qnn(2, 0.5, 0.1, 1.0);
    CHECK(BoundReport::csv_header() == "name,inputs,value,log_value,citation");
    const auto row = r.csv_row();
    CHECK(row.find("variational_circuit,") == 0);
    CHECK(row.find("d=2") != std::string::npos);
}
