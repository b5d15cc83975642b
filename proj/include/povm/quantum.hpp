#pragma once

#include <cstddef>
#include <memory>
#include <mutex>
#include <vector>

#include "povm/linalg.hpp"
#include "povm/rng.hpp"

namespace povm {

// Hermitian, PSD, unit-trace operator. Immutable once constructed.
class DensityMatrix {
public:
    explicit DensityMatrix(ComplexMatrix op);

    static DensityMatrix pure(const ComplexVector& psi);
    static DensityMatrix basis(std::size_t dim, std::size_t i);
    static DensityMatrix maximally_mixed(std::size_t dim);

    const ComplexMatrix& op() const { return op_; }
    std::size_t dim() const { return static_cast<std::size_t>(op_.rows()); }

private:
    ComplexMatrix op_;
};

// Hermitian PSD operator.
class Effect {
public:
    explicit Effect(ComplexMatrix op);

    const ComplexMatrix& op() const { return op_; }
    std::size_t dim() const { return static_cast<std::size_t>(op_.rows()); }

private:
    ComplexMatrix op_;
};

// Ordered effects summing to the identity; outcome j <-> effects()[j].
class Povm {
public:
    explicit Povm(std::vector<Effect> effects);
    explicit Povm(const std::vector<ComplexMatrix>& effects);

    // Two-outcome POVM {pi0, I - pi0}.
    static Povm binary(const ComplexMatrix& pi0);
    // Projective measurement in the computational basis, dim outcomes.
    static Povm computational_basis(std::size_t dim);
    // Projective measurement onto the columns of a unitary.
    static Povm projective(const ComplexMatrix& basis_columns);

    std::size_t outcomes() const { return effects_.size(); }
    std::size_t dim() const { return effects_.front().dim(); }
    const std::vector<Effect>& effects() const { return effects_; }
    const ComplexMatrix& effect(std::size_t j) const { return effects_.at(j).op(); }

    // Canonical Kraus operator sqrt(effect j), computed once and shared by copies.
    const ComplexMatrix& kraus(std::size_t j) const;

private:
    struct KrausCache {
        std::once_flag once;
        std::vector<ComplexMatrix> ops;
    };

    std::vector<Effect> effects_;
    std::shared_ptr<KrausCache> kraus_;
};

// (Tr(rho Pi_j))_j, clamped to [0,1] after a tolerance check.
std::vector<double> born_distribution(const Povm& povm, const DensityMatrix& state);

// P(outcome 1) for a two-outcome POVM.
double outcome_one_probability(const Povm& povm, const DensityMatrix& state);

// M_j rho M_j^dagger / Tr(Pi_j rho) with M_j the principal root. Throws
// UsageError when the outcome has probability zero.
DensityMatrix post_measurement_state(const Povm& povm, const DensityMatrix& state,
                                     std::size_t outcome);

// Draws an index from a probability vector; zero-probability entries are never drawn.
std::size_t sample_outcome(const std::vector<double>& probs, Rng& rng);

// Holds a hidden state that learners can only reach through measurement.
class QuantumRegister {
public:
    enum class Policy { Reusable, SingleShot };

    explicit QuantumRegister(DensityMatrix state, Policy policy = Policy::Reusable);

    QuantumRegister(QuantumRegister&&) noexcept = default;
    QuantumRegister& operator=(QuantumRegister&&) noexcept = default;
    QuantumRegister(const QuantumRegister&) = delete;
    QuantumRegister& operator=(const QuantumRegister&) = delete;

    // Born-rule measurement; the register collapses to the post-measurement state.
    std::size_t measure(const Povm& povm, Rng& rng);

    void destroy() { destroyed_ = true; }
    bool destroyed() const { return destroyed_; }
    bool consumed() const { return measurements_ > 0; }
    std::size_t measurement_count() const { return measurements_; }
    std::size_t dim() const { return state_.dim(); }
    Policy policy() const { return policy_; }

    // Test-oracle access only. Learners must never call this.
    const DensityMatrix& oracle_state() const { return state_; }

private:
    DensityMatrix state_;
    Policy policy_;
    std::size_t measurements_ = 0;
    bool destroyed_ = false;
};

} // namespace povm
