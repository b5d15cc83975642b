#pragma once

#include <cstddef>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "povm/quantum.hpp"

namespace povm {

// Row-stochastic matrix: rows are input symbols z, columns output symbols y,
// entry (z, y) = alpha(y | z).
class ClassicalChannel {
public:
    explicit ClassicalChannel(Eigen::MatrixXd matrix);

    static ClassicalChannel identity(std::size_t symbols);
    static ClassicalChannel constant(std::size_t inputs, std::size_t output, std::size_t outputs = 2);
    static ClassicalChannel binary_symmetric(double crossover);
    // Two-output channel with P(y = 1 | z) = p1[z].
    static ClassicalChannel from_p1(const std::vector<double>& p1);

    std::size_t inputs() const { return static_cast<std::size_t>(matrix_.rows()); }
    std::size_t outputs() const { return static_cast<std::size_t>(matrix_.cols()); }
    double prob(std::size_t y, std::size_t z) const {
        return matrix_(static_cast<Eigen::Index>(z), static_cast<Eigen::Index>(y));
    }
    const Eigen::MatrixXd& matrix() const { return matrix_; }

    // Pushes a distribution over inputs through the channel.
    std::vector<double> apply(const std::vector<double>& input) const;
    std::size_t sample(std::size_t z, Rng& rng) const;

    bool approx_equal(const ClassicalChannel& other, double tol) const;

private:
    Eigen::MatrixXd matrix_;
};

// Root measurement followed by classical post-processing.
struct FineGraining {
    Povm root;
    ClassicalChannel channel;
};

std::vector<double> apply_fine_graining(const FineGraining& fg, const DensityMatrix& state);

// Effects Pi_y = sum_z alpha(y|z) Pi'_z.
Povm induced_povm(const FineGraining& fg);

struct AllStates {
    std::size_t dim;
};

struct FiniteStates {
    std::vector<DensityMatrix> states;
};

// Where the d_TV supremum ranges: every density matrix, or a listed set.
class DomainSpec {
public:
    static DomainSpec all_states(std::size_t dim);
    static DomainSpec finite(std::vector<DensityMatrix> states);

    bool is_all_states() const { return std::holds_alternative<AllStates>(v_); }
    std::size_t dim() const;
    // Listed states; throws UsageError for AllStates.
    const std::vector<DensityMatrix>& states() const;

private:
    explicit DomainSpec(std::variant<AllStates, FiniteStates> v) : v_(std::move(v)) {}
    std::variant<AllStates, FiniteStates> v_;
};

// Worst-case total variation distance between outcome distributions.
double dtv_povm(const Povm& p1, const Povm& p2, const DomainSpec& domain);

// Symmetric matrix of pairwise d_TV values.
Eigen::MatrixXd dtv_matrix(const std::vector<Povm>& points, const DomainSpec& domain);

struct JmMember {
    Povm member;
    Povm root;
    ClassicalChannel channel;
};

// A gamma-approximately jointly measurable set with center Pi_*: each member
// is realized by its own root plus channel, roots within gamma of the center.
class ApproxJmElement {
public:
    ApproxJmElement(Povm center, std::vector<JmMember> members, double gamma, const DomainSpec& domain);

    // gamma = 0 element: every member is (center, channel).
    static ApproxJmElement exact(const Povm& root, const std::vector<ClassicalChannel>& channels,
                                 const DomainSpec& domain);

    const Povm& center() const { return center_; }
    const std::vector<JmMember>& members() const { return members_; }
    std::size_t size() const { return members_.size(); }
    double gamma() const { return gamma_; }

private:
    Povm center_;
    std::vector<JmMember> members_;
    double gamma_;
};

// Member's channel re-rooted at the element's center.
FineGraining jm_smooth(const ApproxJmElement& element, std::size_t member_index);

// Greedy gamma-cover under d_TV. Each new center is an uncovered point whose
// closed gamma-ball covers the most uncovered points (lowest index on ties).
// Centers are pairwise more than gamma apart, so the size never exceeds the
// gamma-packing number. Returns center indices in selection order.
std::vector<std::size_t> tv_cover(const std::vector<Povm>& points, double gamma, const DomainSpec& domain);
std::vector<std::size_t> tv_cover(const Eigen::MatrixXd& distances, double gamma);

// Position in `centers` of the nearest center, per point (lowest position on ties).
std::vector<std::size_t> assign_to_centers(const Eigen::MatrixXd& distances,
                                           const std::vector<std::size_t>& centers);

} // namespace povm
