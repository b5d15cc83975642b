#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "povm/quantum.hpp"
#include "povm/rng.hpp"

namespace povm {

struct Atom {
    double prob;
    DensityMatrix state;
    double p_label1; // P(y = 1 | state)
};

// Finite-support distribution over (state, label).
class DataDistribution {
public:
    explicit DataDistribution(std::vector<Atom> atoms);

    const std::vector<Atom>& atoms() const { return atoms_; }
    std::size_t dim() const { return atoms_.front().state.dim(); }
    // P(y = 1) marginal.
    double label_one_rate() const;
    // Stable content hash of the atoms (hex).
    std::string hash() const;

private:
    std::vector<Atom> atoms_;
};

// Uniform over the computational basis of C^D with P(y=1 | e_x) = p_label1[x].
DataDistribution basis_distribution(const std::vector<double>& probs, const std::vector<double>& p_label1);

// Uniform over X = {0,1}^2 embedded as basis states of C^4, label = x2.
DataDistribution thm1_distribution();

// Uniform over |0>, |1> with label = basis index flipped with probability noise.
DataDistribution noisy_basis_distribution(double noise);

struct Provenance {
    std::uint64_t seed_key = 0;
    std::uint64_t seed_counter = 0;
    std::string distribution_hash;
};

// Labeled registers drawn i.i.d. from a distribution. Registers are
// single-shot: each can be measured exactly once.
class Dataset {
public:
    struct Item {
        QuantumRegister reg;
        int label;
    };

    Dataset(std::vector<Item> items, std::vector<std::size_t> oracle_atoms, Provenance provenance);

    std::size_t size() const { return items_.size(); }
    int label(std::size_t i) const { return items_.at(i).label; }
    QuantumRegister& reg(std::size_t i) { return items_.at(i).reg; }
    const QuantumRegister& reg(std::size_t i) const { return items_.at(i).reg; }
    const Provenance& provenance() const { return provenance_; }

    // Test-oracle access only: which atom item i was drawn from.
    std::size_t oracle_atom(std::size_t i) const { return oracle_atoms_.at(i); }

    // Largest measurement count over all registers (audit).
    std::size_t max_measurements() const;

private:
    std::vector<Item> items_;
    std::vector<std::size_t> oracle_atoms_;
    Provenance provenance_;
};

struct ClassicalSample {
    std::size_t x; // atom index
    int y;
};

// One draw of (atom, label); both samplers below consume the generator identically.
ClassicalSample draw_labeled_atom(const DataDistribution& d, Rng& rng);

Dataset sample_dataset(const DataDistribution& d, std::size_t m, Rng& rng);

// Same draws as sample_dataset, keeping the atom index visible (classical setting).
std::vector<ClassicalSample> sample_classical(const DataDistribution& d, std::size_t m, Rng& rng);

inline int misclassification(int predicted, int label) { return predicted != label ? 1 : 0; }

// Exact risk of a two-outcome POVM.
double true_risk(const Povm& h, const DataDistribution& d);

// Exact risk of a POCC member whose domain point x is atom x.
double true_risk(const std::vector<double>& p1_by_atom, const DataDistribution& d);

struct Prediction {
    int predicted;
    int label;
};

double empirical_risk(std::span<const Prediction> outcomes);

} // namespace povm
