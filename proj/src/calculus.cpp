#include "povm/calculus.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "povm/errors.hpp"
#include "povm/tolerances.hpp"

namespace povm {

ClassicalChannel::ClassicalChannel(Eigen::MatrixXd matrix) : matrix_(std::move(matrix)) {
    if (matrix_.rows() == 0 || matrix_.cols() == 0) throw InvariantError("empty channel");
    const double tol = tolerances().prob;
    for (Eigen::Index z = 0; z < matrix_.rows(); ++z) {
        for (Eigen::Index y = 0; y < matrix_.cols(); ++y) {
            const double v = matrix_(z, y);
            if (!(v >= -tol && v <= 1.0 + tol)) {
                throw InvariantError("channel entry out of [0,1]: " + std::to_string(v));
            }
            matrix_(z, y) = std::clamp(v, 0.0, 1.0);
        }
        const double row = matrix_.row(z).sum();
        if (std::abs(row - 1.0) > tol) {
            throw InvariantError("channel row " + std::to_string(z) + " sums to " + std::to_string(row));
        }
    }
}

ClassicalChannel ClassicalChannel::identity(std::size_t symbols) {
    const auto n = static_cast<Eigen::Index>(symbols);
    return ClassicalChannel(Eigen::MatrixXd::Identity(n, n));
}

ClassicalChannel ClassicalChannel::constant(std::size_t inputs, std::size_t output, std::size_t outputs) {
    if (output >= outputs) throw UsageError("constant channel output out of range");
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(inputs), static_cast<Eigen::Index>(outputs));
    m.col(static_cast<Eigen::Index>(output)).setOnes();
    return ClassicalChannel(m);
}

ClassicalChannel ClassicalChannel::binary_symmetric(double crossover) {
    Eigen::MatrixXd m(2, 2);
    m << 1.0 - crossover, crossover, crossover, 1.0 - crossover;
    return ClassicalChannel(m);
}

ClassicalChannel ClassicalChannel::from_p1(const std::vector<double>& p1) {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(p1.size()), 2);
    for (std::size_t z = 0; z < p1.size(); ++z) {
        m(static_cast<Eigen::Index>(z), 0) = 1.0 - p1[z];
        m(static_cast<Eigen::Index>(z), 1) = p1[z];
    }
    return ClassicalChannel(m);
}

std::vector<double> ClassicalChannel::apply(const std::vector<double>& input) const {
    if (input.size() != inputs()) {
        throw DimensionError("channel expects " + std::to_string(inputs()) + " input symbols, got " +
                             std::to_string(input.size()));
    }
    std::vector<double> out(outputs(), 0.0);
    for (std::size_t z = 0; z < input.size(); ++z) {
        for (std::size_t y = 0; y < out.size(); ++y) out[y] += prob(y, z) * input[z];
    }
    return out;
}

std::size_t ClassicalChannel::sample(std::size_t z, Rng& rng) const {
    if (outputs() == 2) return rng.uniform() < prob(1, z) ? 1 : 0;
    std::vector<double> row(outputs());
    for (std::size_t y = 0; y < row.size(); ++y) row[y] = prob(y, z);
    return sample_outcome(row, rng);
}

bool ClassicalChannel::approx_equal(const ClassicalChannel& other, double tol) const {
    return matrix_.rows() == other.matrix_.rows() && matrix_.cols() == other.matrix_.cols() &&
           (matrix_ - other.matrix_).cwiseAbs().maxCoeff() <= tol;
}

namespace {
void check_alphabet(const FineGraining& fg) {
    if (fg.channel.inputs() != fg.root.outcomes()) {
        throw DimensionError("channel input alphabet (" + std::to_string(fg.channel.inputs()) +
                             ") does not match root outcomes (" + std::to_string(fg.root.outcomes()) + ")");
    }
}
} // namespace

std::vector<double> apply_fine_graining(const FineGraining& fg, const DensityMatrix& state) {
    check_alphabet(fg);
    return fg.channel.apply(born_distribution(fg.root, state));
}

Povm induced_povm(const FineGraining& fg) {
    check_alphabet(fg);
    const auto n = static_cast<Eigen::Index>(fg.root.dim());
    std::vector<ComplexMatrix> effects(fg.channel.outputs(), ComplexMatrix::Zero(n, n));
    for (std::size_t y = 0; y < effects.size(); ++y) {
        for (std::size_t z = 0; z < fg.root.outcomes(); ++z) {
            const double a = fg.channel.prob(y, z);
            if (a != 0.0) effects[y] += a * fg.root.effect(z);
        }
    }
    return Povm(effects);
}

DomainSpec DomainSpec::all_states(std::size_t dim) {
    if (dim == 0 || dim > kMaxDim) throw DimensionError("domain dimension out of range");
    return DomainSpec(AllStates{dim});
}

DomainSpec DomainSpec::finite(std::vector<DensityMatrix> states) {
    if (states.empty()) throw UsageError("finite domain must be non-empty");
    for (const auto& s : states) {
        if (s.dim() != states.front().dim()) throw DimensionError("domain states have different dimensions");
    }
    return DomainSpec(FiniteStates{std::move(states)});
}

std::size_t DomainSpec::dim() const {
    if (const auto* a = std::get_if<AllStates>(&v_)) return a->dim;
    return std::get<FiniteStates>(v_).states.front().dim();
}

const std::vector<DensityMatrix>& DomainSpec::states() const {
    if (const auto* f = std::get_if<FiniteStates>(&v_)) return f->states;
    throw UsageError("domain is AllStates; no finite state list");
}

double dtv_povm(const Povm& p1, const Povm& p2, const DomainSpec& domain) {
    if (p1.dim() != p2.dim() || p1.dim() != domain.dim()) {
        throw DimensionError("dtv_povm: dimension mismatch");
    }
    if (p1.outcomes() != p2.outcomes()) throw DimensionError("dtv_povm: outcome counts differ");
    if (domain.is_all_states()) {
        if (p1.outcomes() != 2) throw UsageError("dtv_povm: AllStates mode supports two outcomes only");
        // sup_rho |Tr(rho D)| is attained at an eigenprojector of D.
        return std::min(1.0, hermitian_spectral_norm(p1.effect(0) - p2.effect(0)));
    }
    double best = 0.0;
    for (const auto& x : domain.states()) {
        const auto a = born_distribution(p1, x);
        const auto b = born_distribution(p2, x);
        double tv = 0.0;
        for (std::size_t y = 0; y < a.size(); ++y) tv += std::abs(a[y] - b[y]);
        best = std::max(best, 0.5 * tv);
    }
    return best;
}

Eigen::MatrixXd dtv_matrix(const std::vector<Povm>& points, const DomainSpec& domain) {
    const auto n = static_cast<Eigen::Index>(points.size());
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
    if (!domain.is_all_states() && !points.empty() && points.front().outcomes() == 2) {
        // Two outcomes on a finite domain: d_TV is the max |f_i(x) - f_j(x)|.
        const auto& xs = domain.states();
        Eigen::MatrixXd f(n, static_cast<Eigen::Index>(xs.size()));
        for (Eigen::Index i = 0; i < n; ++i) {
            const auto& p = points[static_cast<std::size_t>(i)];
            if (p.outcomes() != 2) throw DimensionError("dtv_matrix: outcome counts differ");
            for (std::size_t k = 0; k < xs.size(); ++k) {
                f(i, static_cast<Eigen::Index>(k)) = born_distribution(p, xs[k])[1];
            }
        }
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = i + 1; j < n; ++j) {
                d(i, j) = d(j, i) = (f.row(i) - f.row(j)).cwiseAbs().maxCoeff();
            }
        }
        return d;
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            d(i, j) = d(j, i) = dtv_povm(points[static_cast<std::size_t>(i)], points[static_cast<std::size_t>(j)], domain);
        }
    }
    return d;
}

namespace {

// Upper bound on d_TV for k-outcome POVMs over all states: 1/2 sum_y ||D_y||.
double dtv_upper_bound_all_states(const Povm& a, const Povm& b) {
    double s = 0.0;
    for (std::size_t y = 0; y < a.outcomes(); ++y) s += hermitian_spectral_norm(a.effect(y) - b.effect(y));
    return std::min(1.0, 0.5 * s);
}

double root_distance(const Povm& center, const Povm& root, const DomainSpec& domain) {
    if (domain.is_all_states() && center.outcomes() != 2) return dtv_upper_bound_all_states(center, root);
    return dtv_povm(center, root, domain);
}

double realization_error(const JmMember& m, const DomainSpec& domain) {
    const Povm induced = induced_povm(FineGraining{m.root, m.channel});
    if (induced.outcomes() != m.member.outcomes()) {
        throw DimensionError("member channel output alphabet differs from member outcomes");
    }
    if (domain.is_all_states()) {
        double err = 0.0;
        for (std::size_t y = 0; y < induced.outcomes(); ++y) {
            err = std::max(err, max_abs_entry(induced.effect(y) - m.member.effect(y)));
        }
        return err;
    }
    return dtv_povm(induced, m.member, domain);
}

} // namespace

ApproxJmElement::ApproxJmElement(Povm center, std::vector<JmMember> members, double gamma,
                                 const DomainSpec& domain)
    : center_(std::move(center)), members_(std::move(members)), gamma_(gamma) {
    if (!(gamma_ >= 0.0)) throw InvariantError("gamma must be >= 0");
    if (members_.empty()) throw InvariantError("approximately jointly measurable element is empty");
    const double tol = tolerances().dtv;
    for (std::size_t i = 0; i < members_.size(); ++i) {
        const auto& m = members_[i];
        if (m.root.outcomes() != center_.outcomes() || m.root.dim() != center_.dim()) {
            throw DimensionError("member root incompatible with center");
        }
        if (m.channel.inputs() != center_.outcomes()) {
            throw DimensionError("member channel alphabet does not match center outcomes");
        }
        const double d = root_distance(center_, m.root, domain);
        if (d > gamma_ + tol) {
            throw InvariantError("member " + std::to_string(i) + " root is " + std::to_string(d) +
                                 " from the center, above gamma " + std::to_string(gamma_));
        }
        const double err = realization_error(m, domain);
        if (err > tol) {
            throw InvariantError("member " + std::to_string(i) + " fine-graining is off by " + std::to_string(err));
        }
    }
}

ApproxJmElement ApproxJmElement::exact(const Povm& root, const std::vector<ClassicalChannel>& channels,
                                       const DomainSpec& domain) {
    std::vector<JmMember> members;
    members.reserve(channels.size());
    for (const auto& c : channels) members.push_back({induced_povm(FineGraining{root, c}), root, c});
    return ApproxJmElement(root, std::move(members), 0.0, domain);
}

FineGraining jm_smooth(const ApproxJmElement& element, std::size_t member_index) {
    if (member_index >= element.size()) throw UsageError("jm_smooth: member index out of range");
    return FineGraining{element.center(), element.members()[member_index].channel};
}

std::vector<std::size_t> tv_cover(const std::vector<Povm>& points, double gamma, const DomainSpec& domain) {
    if (points.empty()) throw UsageError("tv_cover: empty class");
    if (!(gamma > 0.0)) throw UsageError("tv_cover: gamma must be positive");
    return tv_cover(dtv_matrix(points, domain), gamma);
}

std::vector<std::size_t> tv_cover(const Eigen::MatrixXd& distances, double gamma) {
    const auto n = static_cast<std::size_t>(distances.rows());
    if (n == 0) throw UsageError("tv_cover: empty class");
    if (!(gamma > 0.0)) throw UsageError("tv_cover: gamma must be positive");
    const double radius = gamma + tolerances().dtv;
    std::vector<bool> covered(n, false);
    std::size_t remaining = n;
    std::vector<std::size_t> centers;
    while (remaining > 0) {
        std::size_t best = n;
        std::size_t best_gain = 0;
        for (std::size_t c = 0; c < n; ++c) {
            if (covered[c]) continue;
            std::size_t gain = 0;
            for (std::size_t p = 0; p < n; ++p) {
                if (!covered[p] && distances(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(p)) <= radius) ++gain;
            }
            if (gain > best_gain) {
                best_gain = gain;
                best = c;
            }
        }
        centers.push_back(best);
        for (std::size_t p = 0; p < n; ++p) {
            if (!covered[p] && distances(static_cast<Eigen::Index>(best), static_cast<Eigen::Index>(p)) <= radius) {
                covered[p] = true;
                --remaining;
            }
        }
    }
    return centers;
}

std::vector<std::size_t> assign_to_centers(const Eigen::MatrixXd& distances,
                                           const std::vector<std::size_t>& centers) {
    if (centers.empty()) throw UsageError("assign_to_centers: no centers");
    std::vector<std::size_t> out(static_cast<std::size_t>(distances.rows()));
    for (std::size_t p = 0; p < out.size(); ++p) {
        std::size_t best = 0;
        for (std::size_t k = 1; k < centers.size(); ++k) {
            if (distances(static_cast<Eigen::Index>(centers[k]), static_cast<Eigen::Index>(p)) <
                distances(static_cast<Eigen::Index>(centers[best]), static_cast<Eigen::Index>(p))) {
                best = k;
            }
        }
        out[p] = best;
    }
    return out;
}

} // namespace povm
