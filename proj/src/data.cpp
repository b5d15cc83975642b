#include "povm/data.hpp"

#include <algorithm>
#include <cmath>

#include "povm/errors.hpp"
#include "povm/hashing.hpp"
#include "povm/serialize.hpp"
#include "povm/tolerances.hpp"

namespace povm {

DataDistribution::DataDistribution(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
    if (atoms_.empty()) throw InvariantError("distribution has no atoms");
    const double tol = tolerances().prob;
    double total = 0.0;
    for (const auto& a : atoms_) {
        if (!(a.prob >= 0.0)) throw InvariantError("atom probability is negative");
        if (!(a.p_label1 >= 0.0 && a.p_label1 <= 1.0)) throw InvariantError("label conditional outside [0,1]");
        if (a.state.dim() != atoms_.front().state.dim()) throw DimensionError("atom states have different dimensions");
        total += a.prob;
    }
    if (std::abs(total - 1.0) > tol) throw InvariantError("atom probabilities sum to " + std::to_string(total));
}

double DataDistribution::label_one_rate() const {
    double r = 0.0;
    for (const auto& a : atoms_) r += a.prob * a.p_label1;
    return r;
}

std::string DataDistribution::hash() const { return content_hash(distribution_to_json(*this).dump()); }

DataDistribution basis_distribution(const std::vector<double>& probs, const std::vector<double>& p_label1) {
    if (probs.size() != p_label1.size()) throw UsageError("basis_distribution: size mismatch");
    std::vector<Atom> atoms;
    for (std::size_t x = 0; x < probs.size(); ++x) {
        atoms.push_back({probs[x], DensityMatrix::basis(probs.size(), x), p_label1[x]});
    }
    return DataDistribution(std::move(atoms));
}

DataDistribution thm1_distribution() {
    return basis_distribution({0.25, 0.25, 0.25, 0.25}, {0.0, 1.0, 0.0, 1.0});
}

DataDistribution noisy_basis_distribution(double noise) {
    return basis_distribution({0.5, 0.5}, {noise, 1.0 - noise});
}

Dataset::Dataset(std::vector<Item> items, std::vector<std::size_t> oracle_atoms, Provenance provenance)
    : items_(std::move(items)), oracle_atoms_(std::move(oracle_atoms)), provenance_(std::move(provenance)) {
    if (oracle_atoms_.size() != items_.size()) throw InvariantError("dataset atom list has wrong length");
    for (const auto& it : items_) {
        if (it.label != 0 && it.label != 1) throw InvariantError("labels must be 0 or 1");
    }
}

std::size_t Dataset::max_measurements() const {
    std::size_t m = 0;
    for (const auto& it : items_) m = std::max(m, it.reg.measurement_count());
    return m;
}

ClassicalSample draw_labeled_atom(const DataDistribution& d, Rng& rng) {
    const auto& atoms = d.atoms();
    const double u = rng.uniform();
    double acc = 0.0;
    std::size_t x = atoms.size() - 1;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        if (atoms[i].prob <= 0.0) continue;
        acc += atoms[i].prob;
        if (u < acc) {
            x = i;
            break;
        }
    }
    while (atoms[x].prob <= 0.0) --x; // u landed in the round-off tail
    const int y = rng.uniform() < atoms[x].p_label1 ? 1 : 0;
    return {x, y};
}

Dataset sample_dataset(const DataDistribution& d, std::size_t m, Rng& rng) {
    if (m == 0) throw UsageError("sample_dataset: m must be >= 1");
    Provenance prov{rng.key(), rng.counter(), d.hash()};
    std::vector<Dataset::Item> items;
    std::vector<std::size_t> atoms;
    items.reserve(m);
    atoms.reserve(m);
    for (std::size_t i = 0; i < m; ++i) {
        const auto s = draw_labeled_atom(d, rng);
        items.push_back({QuantumRegister(d.atoms()[s.x].state, QuantumRegister::Policy::SingleShot), s.y});
        atoms.push_back(s.x);
    }
    return Dataset(std::move(items), std::move(atoms), std::move(prov));
}

std::vector<ClassicalSample> sample_classical(const DataDistribution& d, std::size_t m, Rng& rng) {
    if (m == 0) throw UsageError("sample_classical: m must be >= 1");
    std::vector<ClassicalSample> out;
    out.reserve(m);
    for (std::size_t i = 0; i < m; ++i) out.push_back(draw_labeled_atom(d, rng));
    return out;
}

double true_risk(const Povm& h, const DataDistribution& d) {
    if (h.outcomes() != 2) throw UsageError("true_risk: two-outcome hypothesis expected");
    if (h.dim() != d.dim()) throw DimensionError("true_risk: hypothesis and distribution dimensions differ");
    double r = 0.0;
    for (const auto& a : d.atoms()) {
        const double p1 = born_distribution(h, a.state)[1];
        r += a.prob * (p1 * (1.0 - a.p_label1) + (1.0 - p1) * a.p_label1);
    }
    return r;
}

double true_risk(const std::vector<double>& p1_by_atom, const DataDistribution& d) {
    if (p1_by_atom.size() != d.atoms().size()) throw DimensionError("true_risk: POCC domain does not match atoms");
    double r = 0.0;
    for (std::size_t x = 0; x < p1_by_atom.size(); ++x) {
        const auto& a = d.atoms()[x];
        const double p1 = p1_by_atom[x];
        r += a.prob * (p1 * (1.0 - a.p_label1) + (1.0 - p1) * a.p_label1);
    }
    return r;
}

double empirical_risk(std::span<const Prediction> outcomes) {
    if (outcomes.empty()) throw UsageError("empirical_risk: empty input");
    std::size_t wrong = 0;
    for (const auto& o : outcomes) wrong += static_cast<std::size_t>(misclassification(o.predicted, o.label));
    return static_cast<double>(wrong) / static_cast<double>(outcomes.size());
}

} // namespace povm
