#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "povm/calculus.hpp"

namespace povm {

// A partition of a class into approximately jointly measurable elements.
// member_ids[e][k] is the class-wide index of element e's k-th member.
struct Partition {
    std::vector<ApproxJmElement> elements;
    std::vector<std::vector<std::size_t>> member_ids;
};

using PovmGenerator = std::function<Povm(std::span<const double>)>;

class HypothesisClass {
public:
    enum class Variant { Finite, JointlyMeasurable, ApproxJmPartitioned, Parameterized };

    static HypothesisClass finite(std::vector<Povm> members, DomainSpec domain);
    static HypothesisClass jointly_measurable(Povm root, std::vector<ClassicalChannel> channels, DomainSpec domain);
    static HypothesisClass partitioned(Partition partition, DomainSpec domain);
    static HypothesisClass parameterized(std::string ansatz, std::vector<std::vector<double>> grid,
                                         const PovmGenerator& generator, DomainSpec domain);

    Variant variant() const { return variant_; }
    std::string variant_name() const;
    std::size_t size() const { return members_.size(); }
    const Povm& member(std::size_t i) const { return members_.at(i); }
    const std::vector<Povm>& members() const { return members_; }
    const DomainSpec& domain() const { return domain_; }

    bool is_jointly_measurable() const { return variant_ == Variant::JointlyMeasurable; }
    // JointlyMeasurable only.
    const Povm& root() const;
    const std::vector<ClassicalChannel>& channels() const;
    // ApproxJmPartitioned only.
    const Partition& partition() const;
    // Parameterized only.
    const std::vector<std::vector<double>>& grid() const;
    const std::string& ansatz() const { return ansatz_; }

    // Fine-graining of member i when the class carries one.
    std::optional<FineGraining> fine_graining(std::size_t i) const;

private:
    HypothesisClass(Variant v, DomainSpec domain) : variant_(v), domain_(std::move(domain)) {}

    Variant variant_;
    DomainSpec domain_;
    std::vector<Povm> members_;
    std::optional<Povm> root_;
    std::vector<ClassicalChannel> channels_;
    std::optional<Partition> partition_;
    std::vector<std::vector<double>> grid_;
    std::string ansatz_;
};

// Splits a jointly measurable class into exact (gamma = 0) elements sharing its root.
HypothesisClass partition_jointly_measurable(const HypothesisClass& jm,
                                             const std::vector<std::vector<std::size_t>>& groups);

// Every member its own element: center = member, identity channel.
HypothesisClass singleton_partition(const std::vector<Povm>& members, const DomainSpec& domain);

// Probabilistically observed concepts on a finite classical domain {0..D-1}:
// member h maps point x to Bernoulli(p1[h][x]).
struct PoccClass {
    std::size_t domain_size = 0;
    std::vector<std::vector<double>> p1;

    std::size_t size() const { return p1.size(); }
    void validate() const;
};

// Classes from the uniform-convergence counterexample on X = {0,1}^2.
// Point index x = 2*x1 + x2.
struct Thm1Classes {
    PoccClass hat;          // BSC_{0.1+z}(x1) for z in the grid
    PoccClass full;         // hat plus h_star appended last
    std::size_t h_star = 0; // index of h_star in full
    std::vector<double> crossovers;
};

inline std::size_t thm1_x1(std::size_t x) { return x >> 1; }
inline std::size_t thm1_x2(std::size_t x) { return x & 1; }

// count evenly spaced offsets in [-alpha, alpha]; {0} when count == 1.
std::vector<double> thm1_z_grid(std::size_t count, double alpha);

Thm1Classes make_thm1_classes(const std::vector<double>& z_grid, double alpha);

// Example of a class with unbounded fat-shattering dimension, truncated to n
// levels: member b has Pi_0 = sum_j beta_j^{1-b_j} (1-beta_j)^{b_j} |j><j|.
// Member index = bit pattern, bit j = (index >> j) & 1.
HypothesisClass make_example1_class(const std::vector<double>& betas);

// Rotation + CZ-entangler ansatz on num_qubits qubits. Each layer applies
// RY(theta) RZ(phi) to every qubit, then CZ on neighbouring pairs.
// Parameter vector length = 2 * num_qubits * layers.
ComplexMatrix qnn_unitary(std::size_t num_qubits, std::size_t layers, std::span<const double> params);

// Pi_j -> U^dagger Pi_j U. Throws UsageError if U is not unitary within tol_herm * dim.
Povm conjugate_povm(const Povm& povm, const ComplexMatrix& unitary);

HypothesisClass make_qnn_class(std::size_t num_qubits, std::size_t layers,
                               std::vector<std::vector<double>> param_grid, const Povm& fixed_measurement);

// Root = computational-basis measurement on C^D, channel row x = (1 - p, p).
HypothesisClass pocc_to_povm(const PoccClass& pocc);

// Qubit POVMs with Pi_0 = t * I; d_TV between members is |t - s|.
HypothesisClass make_diag_family(const std::vector<double>& values);

// {|i><i|, I - |i><i|} for i < dim.
HypothesisClass make_orthogonal_projectors(std::size_t dim);

// Qubit class: one member with Pi_1 = |1><1| plus Pi_0 = t*I for t in
// constants. Domain = computational basis states.
HypothesisClass make_planted_class(const std::vector<double>& constants);

} // namespace povm
