#include "povm/complexity.hpp"

#include <algorithm>
#include <bit>
#include <cfloat>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <sstream>

#include "povm/errors.hpp"
#include "povm/learners.hpp"
#include "povm/tolerances.hpp"

namespace povm {

namespace {

constexpr double kFatSlack = 1e-12;

std::vector<double> witness_grid(double gamma, double resolution) {
    std::vector<double> grid{0.5};
    for (int k = 1;; ++k) {
        const double up = 0.5 + k * resolution;
        const double down = 0.5 - k * resolution;
        if (up > 1.0 - gamma + kFatSlack) break;
        grid.push_back(up);
        grid.push_back(down);
    }
    return grid;
}

// f[h][p] = P(outcome 1 | candidate p) for member h.
std::vector<std::vector<double>> outcome_one_table(const HypothesisClass& cls,
                                                   const std::vector<DensityMatrix>& candidates) {
    std::vector<std::vector<double>> f(cls.size(), std::vector<double>(candidates.size()));
    for (std::size_t h = 0; h < cls.size(); ++h) {
        for (std::size_t p = 0; p < candidates.size(); ++p) f[h][p] = outcome_one_probability(cls.member(h), candidates[p]);
    }
    return f;
}

// -1 below, +1 above, 0 neither.
int side(double f, double r, double gamma) {
    if (f >= r + gamma - kFatSlack) return 1;
    if (f <= r - gamma + kFatSlack) return -1;
    return 0;
}

class ShatterSearch {
public:
    ShatterSearch(const std::vector<std::vector<double>>& f, const std::vector<double>& grid, double gamma)
        : f_(f), grid_(grid), gamma_(gamma) {}

    bool run(const std::vector<std::size_t>& subset) {
        subset_ = &subset;
        witnesses_.assign(subset.size(), 0.0);
        std::vector<std::int64_t> codes(f_.size(), 0);
        return descend(0, codes);
    }

    const std::vector<double>& witnesses() const { return witnesses_; }

private:
    bool descend(std::size_t level, const std::vector<std::int64_t>& codes) {
        const auto& subset = *subset_;
        if (level == subset.size()) return true;
        const std::size_t patterns = std::size_t{1} << (level + 1);
        std::vector<std::int64_t> next(codes.size());
        std::vector<char> seen(patterns);
        const std::size_t p = subset[level];
        for (double r : grid_) {
            std::fill(seen.begin(), seen.end(), 0);
            std::size_t distinct = 0;
            for (std::size_t h = 0; h < codes.size(); ++h) {
                if (codes[h] < 0) {
                    next[h] = -1;
                    continue;
                }
                const int s = side(f_[h][p], r, gamma_);
                if (s == 0) {
                    next[h] = -1;
                    continue;
                }
                next[h] = codes[h] | (s > 0 ? (std::int64_t{1} << level) : 0);
                if (!seen[static_cast<std::size_t>(next[h])]) {
                    seen[static_cast<std::size_t>(next[h])] = 1;
                    ++distinct;
                }
            }
            if (distinct == patterns) {
                witnesses_[level] = r;
                if (descend(level + 1, next)) return true;
            }
        }
        return false;
    }

    const std::vector<std::vector<double>>& f_;
    const std::vector<double>& grid_;
    double gamma_;
    const std::vector<std::size_t>* subset_ = nullptr;
    std::vector<double> witnesses_;
};

bool next_combination(std::vector<std::size_t>& idx, std::size_t n) {
    const std::size_t k = idx.size();
    for (std::size_t i = k; i-- > 0;) {
        if (idx[i] < n - k + i) {
            ++idx[i];
            for (std::size_t j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
            return true;
        }
    }
    return false;
}

double binomial(std::size_t n, std::size_t k) {
    double c = 1.0;
    for (std::size_t i = 0; i < k; ++i) c = c * static_cast<double>(n - i) / static_cast<double>(i + 1);
    return c;
}

} // namespace

FatDimResult fat_dim(const HypothesisClass& cls, const std::vector<DensityMatrix>& candidates, double gamma,
                     const FatDimOptions& options) {
    if (!(gamma > 0.0 && gamma <= 0.5)) throw UsageError("fat_dim: gamma must lie in (0, 1/2]");
    if (candidates.empty()) throw UsageError("fat_dim: no candidate points");
    if (candidates.size() > options.max_candidates) {
        throw UsageError("fat_dim: " + std::to_string(candidates.size()) + " candidates exceed the cap of " +
                         std::to_string(options.max_candidates));
    }
    const double resolution = options.resolution > 0.0 ? options.resolution : gamma / 2.0;
    const auto grid = witness_grid(gamma, resolution);
    const auto f = outcome_one_table(cls, candidates);
    const std::size_t n = candidates.size();
    const auto max_by_members = static_cast<std::size_t>(std::bit_width(cls.size()) - 1);
    double work = 0.0;
    for (std::size_t s = std::min(n, max_by_members); s >= 1; --s) {
        work += binomial(n, s) * static_cast<double>(cls.size());
        if (work > static_cast<double>(options.max_work)) throw UsageError("fat_dim: enumeration exceeds the work cap");
        std::vector<std::size_t> subset(s);
        for (std::size_t i = 0; i < s; ++i) subset[i] = i;
        ShatterSearch search(f, grid, gamma);
        do {
            if (!search.run(subset)) continue;
            FatDimResult out;
            out.dimension = s;
            out.certificate.gamma = gamma;
            out.certificate.points = subset;
            out.certificate.witnesses = search.witnesses();
            const std::size_t patterns = std::size_t{1} << s;
            out.certificate.realizers.assign(patterns, cls.size());
            for (std::size_t h = 0; h < cls.size(); ++h) {
                std::size_t code = 0;
                bool ok = true;
                for (std::size_t i = 0; i < s && ok; ++i) {
                    const int sd = side(f[h][subset[i]], out.certificate.witnesses[i], gamma);
                    ok = sd != 0;
                    if (sd > 0) code |= std::size_t{1} << i;
                }
                if (ok && out.certificate.realizers[code] == cls.size()) out.certificate.realizers[code] = h;
            }
            return out;
        } while (next_combination(subset, n));
    }
    FatDimResult none;
    none.certificate.gamma = gamma;
    return none;
}

bool validate_certificate(const HypothesisClass& cls, const std::vector<DensityMatrix>& candidates,
                          const FatShatterCertificate& cert) {
    const std::size_t s = cert.points.size();
    if (cert.witnesses.size() != s || cert.realizers.size() != (std::size_t{1} << s)) return false;
    for (std::size_t b = 0; b < cert.realizers.size(); ++b) {
        const std::size_t h = cert.realizers[b];
        if (h >= cls.size()) return false;
        for (std::size_t i = 0; i < s; ++i) {
            if (cert.points[i] >= candidates.size()) return false;
            const double p1 = born_distribution(cls.member(h), candidates[cert.points[i]])[1];
            const bool high = (b >> i) & 1U;
            if (high && !(p1 >= cert.witnesses[i] + cert.gamma - kFatSlack)) return false;
            if (!high && !(p1 <= cert.witnesses[i] - cert.gamma + kFatSlack)) return false;
        }
    }
    return true;
}

namespace {

using Mask = std::uint64_t;

void max_independent(Mask candidates, std::size_t size, const std::vector<Mask>& conflicts, std::size_t& best) {
    if (candidates == 0) {
        best = std::max(best, size);
        return;
    }
    if (size + static_cast<std::size_t>(std::popcount(candidates)) <= best) return;
    const auto v = static_cast<std::size_t>(std::countr_zero(candidates));
    const Mask bit = Mask{1} << v;
    max_independent(candidates & ~conflicts[v] & ~bit, size + 1, conflicts, best);
    max_independent(candidates & ~bit, size, conflicts, best);
}

} // namespace

std::size_t packing_number(const std::vector<Povm>& points, double gamma, const DomainSpec& domain,
                           PackingMode mode) {
    if (points.empty()) throw UsageError("packing_number: empty class");
    return packing_number(dtv_matrix(points, domain), gamma, mode);
}

std::size_t packing_number(const Eigen::MatrixXd& distances, double gamma, PackingMode mode) {
    const auto n = static_cast<std::size_t>(distances.rows());
    if (n == 0) throw UsageError("packing_number: empty class");
    const double sep = gamma + tolerances().dtv;
    const auto far = [&](std::size_t a, std::size_t b) {
        return distances(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) > sep;
    };
    if (mode == PackingMode::Greedy) {
        std::vector<std::size_t> chosen;
        for (std::size_t i = 0; i < n; ++i) {
            if (std::all_of(chosen.begin(), chosen.end(), [&](std::size_t c) { return far(c, i); })) chosen.push_back(i);
        }
        return chosen.size();
    }
    if (n > 40) throw UsageError("packing_number: exhaustive mode supports at most 40 points");
    std::vector<Mask> conflicts(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i != j && !far(i, j)) conflicts[i] |= Mask{1} << j;
        }
    }
    std::size_t best = 0;
    const Mask all = n == 64 ? ~Mask{0} : (Mask{1} << n) - 1;
    max_independent(all, 0, conflicts, best);
    return best;
}

std::size_t min_cover_size_exhaustive(const Eigen::MatrixXd& distances, double gamma) {
    const auto n = static_cast<std::size_t>(distances.rows());
    if (n == 0) throw UsageError("min_cover_size_exhaustive: empty class");
    if (n > 20) throw UsageError("min_cover_size_exhaustive: at most 20 points");
    const double radius = gamma + tolerances().dtv;
    std::vector<Mask> ball(n, 0);
    for (std::size_t c = 0; c < n; ++c) {
        for (std::size_t p = 0; p < n; ++p) {
            if (distances(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(p)) <= radius) ball[c] |= Mask{1} << p;
        }
    }
    const Mask all = (Mask{1} << n) - 1;
    for (std::size_t k = 1; k <= n; ++k) {
        std::vector<std::size_t> idx(k);
        for (std::size_t i = 0; i < k; ++i) idx[i] = i;
        do {
            Mask cov = 0;
            for (std::size_t c : idx) cov |= ball[c];
            if (cov == all) return k;
        } while (next_combination(idx, n));
    }
    return n;
}

JmCoverReport jm_covering_bound(const HypothesisClass& cls, double gamma) {
    JmCoverReport r;
    r.dtv_bound = tv_cover(cls.members(), gamma, cls.domain()).size();
    if (cls.is_jointly_measurable()) {
        r.structural = 1;
    } else if (cls.variant() == HypothesisClass::Variant::ApproxJmPartitioned) {
        const auto& els = cls.partition().elements;
        if (std::all_of(els.begin(), els.end(), [gamma](const auto& e) { return e.gamma() <= gamma; })) {
            r.structural = els.size();
        }
    }
    return r;
}

McEstimate rademacher_mc(const ApproxJmElement& element, const DataDistribution& d, std::size_t m,
                         std::size_t trials, Rng& rng) {
    if (trials == 0) throw UsageError("rademacher_mc: zero trials");
    if (m == 0) throw UsageError("rademacher_mc: m must be >= 1");
    if (element.gamma() > tolerances().dtv) throw UsageError("rademacher_mc: element must be exactly jointly measurable");
    const std::size_t members = element.size();
    std::vector<double> values(trials);
    std::vector<std::size_t> z(m);
    std::vector<int> y(m);
    std::vector<int> sigma(m);
    for (std::size_t t = 0; t < trials; ++t) {
        for (std::size_t j = 0; j < m; ++j) {
            const auto s = draw_labeled_atom(d, rng);
            QuantumRegister reg(d.atoms()[s.x].state, QuantumRegister::Policy::SingleShot);
            z[j] = reg.measure(element.center(), rng);
            y[j] = s.y;
        }
        for (std::size_t j = 0; j < m; ++j) sigma[j] = rng.sign();
        double sup = -std::numeric_limits<double>::infinity();
        for (std::size_t h = 0; h < members; ++h) {
            const auto& ch = element.members()[h].channel;
            double acc = 0.0;
            for (std::size_t j = 0; j < m; ++j) acc += sigma[j] * ch.prob(static_cast<std::size_t>(1 - y[j]), z[j]);
            sup = std::max(sup, acc);
        }
        values[t] = sup / static_cast<double>(m);
    }
    McEstimate est;
    est.trials = trials;
    double sum = 0.0;
    for (double v : values) sum += v;
    est.mean = sum / static_cast<double>(trials);
    double ss = 0.0;
    for (double v : values) ss += (v - est.mean) * (v - est.mean);
    est.std_error = trials > 1 ? std::sqrt(ss / static_cast<double>(trials - 1) / static_cast<double>(trials)) : 0.0;
    return est;
}

std::vector<double> smoothed_true_risks(const ApproxJmElement& element, const DataDistribution& d) {
    std::vector<double> r(element.size());
    for (std::size_t h = 0; h < element.size(); ++h) r[h] = true_risk(induced_povm(jm_smooth(element, h)), d);
    return r;
}

double generalization_gap(const ApproxJmElement& element, std::span<const std::size_t> root_outcomes,
                          std::span<const int> labels, const DataDistribution& d) {
    const auto risks = smoothed_true_risks(element, d);
    double sup = -std::numeric_limits<double>::infinity();
    for (std::size_t h = 0; h < element.size(); ++h) {
        sup = std::max(sup, denoised_empirical_risk(element, h, root_outcomes, labels) - risks[h]);
    }
    return sup;
}

std::string BoundReport::csv_header() { return "name,inputs,value,log_value,citation"; }

std::string BoundReport::csv_row() const {
    std::ostringstream os;
    os.precision(17);
    os << name << ',';
    for (std::size_t i = 0; i < inputs.size(); ++i) os << (i ? ";" : "") << inputs[i].first << '=' << inputs[i].second;
    os << ',';
    if (overflow) {
        os << "inf";
    } else {
        os << value;
    }
    os << ',' << log_value << ",\"" << citation << '"';
    return os.str();
}

namespace {

void check_eps_delta(double epsilon, double delta) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw UsageError("epsilon must lie in (0,1)");
    if (!(delta > 0.0 && delta < 1.0)) throw UsageError("delta must lie in (0,1)");
}

BoundReport finish(BoundReport r, double log_value) {
    r.log_value = log_value;
    if (log_value > std::log(DBL_MAX)) {
        r.overflow = true;
        r.value = std::numeric_limits<double>::infinity();
    } else {
        r.value = std::exp(log_value);
    }
    return r;
}

// ceil with slack so that ln(e) = 1 does not round up to 2.
double ceil_slack(double x) { return std::ceil(x - 1e-9); }

double covering_fat_log(double alpha, std::size_t d, std::size_t m) {
    const double md = static_cast<double>(m);
    const double dd = static_cast<double>(d);
    const double exponent = ceil_slack(dd * std::log(2.0 * std::numbers::e * md / (dd * alpha)));
    const double base = md * (2.0 / alpha + 1.0) * (2.0 / alpha + 1.0);
    return std::log(2.0) + exponent * std::log(base);
}

} // namespace

BoundReport bound_heidari_finite(const std::vector<std::size_t>& partition_sizes, double epsilon, double delta) {
    check_eps_delta(epsilon, delta);
    if (partition_sizes.empty()) throw UsageError("bound_heidari_finite: empty partition");
    BoundReport r;
    r.name = "finite_partition";
    r.citation = "sum_r (8/eps^2) ln(2|P||P_r|/delta), natural log";
    const double parts = static_cast<double>(partition_sizes.size());
    double total = 0.0;
    std::size_t members = 0;
    for (std::size_t s : partition_sizes) {
        if (s == 0) throw UsageError("bound_heidari_finite: partition element of size zero");
        total += 8.0 / (epsilon * epsilon) * std::log(2.0 * parts * static_cast<double>(s) / delta);
        members += s;
    }
    r.inputs = {{"partition_size", parts}, {"members", static_cast<double>(members)}, {"epsilon", epsilon}, {"delta", delta}};
    r.value = total;
    r.log_value = std::log(total);
    return r;
}

BoundReport bound_thm4(std::size_t partition_size, std::size_t fat_dim_value, double epsilon, double delta,
                       double constant) {
    if (!(epsilon > 0.0 && epsilon <= 1.0)) throw UsageError("epsilon must lie in (0,1]");
    if (!(delta > 0.0 && delta < 1.0)) throw UsageError("delta must lie in (0,1)");
    if (partition_size == 0) throw UsageError("bound_thm4: partition size must be positive");
    if (!(constant > 0.0)) throw UsageError("bound_thm4: constant must be positive");
    BoundReport r;
    r.name = "fat_partition_sufficient";
    r.citation = "c * R * (d + ln(1/delta)) / eps^2, c user-supplied";
    r.inputs = {{"R", static_cast<double>(partition_size)}, {"d", static_cast<double>(fat_dim_value)},
                {"epsilon", epsilon}, {"delta", delta}, {"c", constant}};
    r.value = constant * static_cast<double>(partition_size) *
              (static_cast<double>(fat_dim_value) + std::log(1.0 / delta)) / (epsilon * epsilon);
    r.log_value = std::log(r.value);
    return r;
}

BoundReport bound_covering_fat(double alpha, std::size_t d, std::size_t m) {
    if (!(alpha > 0.0)) throw UsageError("bound_covering_fat: alpha must be positive");
    if (d == 0) throw UsageError("bound_covering_fat: d must be >= 1");
    if (m == 0) throw UsageError("bound_covering_fat: m must be >= 1");
    BoundReport r;
    r.name = "covering_via_fat";
    r.citation = "2 (m (2/alpha + 1)^2)^ceil(d ln(2em/(d alpha))), natural log";
    r.inputs = {{"alpha", alpha}, {"d", static_cast<double>(d)}, {"m", static_cast<double>(m)}};
    return finish(std::move(r), covering_fat_log(alpha, d, m));
}

bool bound_thm5_check(std::size_t k, std::size_t d, std::size_t m, double gamma) {
    if (!(gamma > 0.0)) throw UsageError("bound_thm5_check: gamma must be positive");
    if (k >= 1 && static_cast<double>(m) < static_cast<double>(k) * static_cast<double>(k - 1) / 2.0) {
        throw UsageError("bound_thm5_check: needs m >= k(k-1)/2");
    }
    if (k <= 1) return true;
    // d = 0 makes the exponent vanish: the right-hand side is 2.
    if (d == 0) return k <= 2;
    return std::log(static_cast<double>(k)) <= covering_fat_log(gamma, d, m) + 1e-12;
}

BoundReport bound_qnn(std::size_t dim, double epsilon, double delta, double constant) {
    check_eps_delta(epsilon, delta);
    if (!(constant > 0.0)) throw UsageError("bound_qnn: constant must be positive");
    if (dim == 0) throw UsageError("bound_qnn: dimension must be positive");
    BoundReport r;
    r.name = "variational_circuit";
    r.citation = "(C/eps)^(d+2) ln(1/delta), C user-supplied";
    r.inputs = {{"d", static_cast<double>(dim)}, {"epsilon", epsilon}, {"delta", delta}, {"C", constant}};
    const double log_value = static_cast<double>(dim + 2) * std::log(constant / epsilon) + std::log(std::log(1.0 / delta));
    return finish(std::move(r), log_value);
}

} // namespace povm
