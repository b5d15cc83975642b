#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "povm/data.hpp"
#include "povm/serialize.hpp"
#include "povm/zoo.hpp"

namespace povm {

// Per-element sample counts for DERM; sums to the dataset size.
struct PartitionSpec {
    std::vector<std::size_t> allocation;

    // floor(m/R) each, +1 for the first m mod R elements.
    static PartitionSpec equal_split(std::size_t m, std::size_t elements);
};

struct LearnerOutput {
    std::size_t chosen = 0;             // class-wide member index
    double chosen_score = 0.0;          // the minimized risk estimate
    std::size_t winning_element = 0;    // j_*
    std::vector<double> element_risks;  // R_j per element (one entry for ERM)
    std::vector<std::size_t> element_argmin; // class-wide index of rho_j per element
    std::size_t samples_used = 0;

    Json to_json() const;
};

// Plain ERM over a jointly measurable class: one root measurement per
// register, one fresh channel draw per member per sample.
LearnerOutput erm(const HypothesisClass& cls, Dataset& data, Rng& rng);

// (1/m) sum_j alpha(1 - y_j | z_j) for the member's channel over the element center.
double denoised_empirical_risk(const ApproxJmElement& element, std::size_t member_index,
                               std::span<const std::size_t> root_outcomes, std::span<const int> labels);

// Denoised ERM over an approximately jointly measurable partition.
LearnerOutput derm(const HypothesisClass& cls, Dataset& data, const PartitionSpec& spec, Rng& rng);

// DERM over the singleton partition of an explicit member list; with identity
// channels the denoised risk is the plain empirical risk on each member's own chunk.
LearnerOutput finite_class_learner(const std::vector<Povm>& members, const DomainSpec& domain, Dataset& data,
                                   Rng& rng);

struct CoveringOutput {
    LearnerOutput learner;
    std::vector<std::size_t> centers;
};

// Builds an epsilon/4 d_TV cover and runs the finite-class learner on the centers.
CoveringOutput covering_learner(const HypothesisClass& cls, Dataset& data, double epsilon, Rng& rng,
                                std::size_t max_centers = 64);

// Estimates p(x, y) from the samples and returns the member with the lowest
// plug-in risk (lowest index on ties).
LearnerOutput plugin_pocc_learner(const PoccClass& cls, std::span<const ClassicalSample> samples);

} // namespace povm
