#include "povm/learners.hpp"

#include <limits>
#include <string>

#include "povm/errors.hpp"
#include "povm/tolerances.hpp"

namespace povm {

PartitionSpec PartitionSpec::equal_split(std::size_t m, std::size_t elements) {
    if (elements == 0) throw UsageError("equal_split: no elements");
    if (m < elements) throw UsageError("equal_split: fewer samples than elements");
    PartitionSpec s;
    s.allocation.assign(elements, m / elements);
    for (std::size_t j = 0; j < m % elements; ++j) ++s.allocation[j];
    return s;
}

Json LearnerOutput::to_json() const {
    return Json{{"chosen", chosen},
                {"chosen_score", chosen_score},
                {"winning_element", winning_element},
                {"element_risks", element_risks},
                {"element_argmin", element_argmin},
                {"samples_used", samples_used}};
}

LearnerOutput erm(const HypothesisClass& cls, Dataset& data, Rng& rng) {
    if (!cls.is_jointly_measurable()) throw UsageError("erm: class is not jointly measurable");
    const std::size_t m = data.size();
    if (m == 0) throw UsageError("erm: empty dataset");
    std::vector<std::size_t> z(m);
    std::vector<int> y(m);
    for (std::size_t i = 0; i < m; ++i) {
        z[i] = data.reg(i).measure(cls.root(), rng);
        y[i] = data.label(i);
    }
    const auto& channels = cls.channels();
    LearnerOutput out;
    std::size_t best_errors = std::numeric_limits<std::size_t>::max();
    for (std::size_t h = 0; h < channels.size(); ++h) {
        const auto& ch = channels[h];
        std::size_t errors = 0;
        for (std::size_t i = 0; i < m; ++i) {
            const auto predicted = static_cast<int>(ch.sample(z[i], rng));
            errors += static_cast<std::size_t>(misclassification(predicted, y[i]));
        }
        if (errors < best_errors) {
            best_errors = errors;
            out.chosen = h;
        }
    }
    out.chosen_score = static_cast<double>(best_errors) / static_cast<double>(m);
    out.element_risks = {out.chosen_score};
    out.element_argmin = {out.chosen};
    out.samples_used = m;
    return out;
}

double denoised_empirical_risk(const ApproxJmElement& element, std::size_t member_index,
                               std::span<const std::size_t> root_outcomes, std::span<const int> labels) {
    if (member_index >= element.size()) throw UsageError("denoised_empirical_risk: member index out of range");
    if (root_outcomes.size() != labels.size()) throw UsageError("denoised_empirical_risk: outcome/label count mismatch");
    if (root_outcomes.empty()) throw UsageError("denoised_empirical_risk: empty sample");
    const ClassicalChannel& ch = element.members()[member_index].channel;
    if (ch.outputs() != 2) throw DimensionError("denoised_empirical_risk: channel must have two outputs");
    double total = 0.0;
    for (std::size_t j = 0; j < labels.size(); ++j) {
        if (root_outcomes[j] >= ch.inputs()) throw DimensionError("denoised_empirical_risk: root outcome outside channel alphabet");
        if (labels[j] != 0 && labels[j] != 1) throw UsageError("denoised_empirical_risk: label must be 0 or 1");
        total += ch.prob(static_cast<std::size_t>(1 - labels[j]), root_outcomes[j]);
    }
    return total / static_cast<double>(labels.size());
}

LearnerOutput derm(const HypothesisClass& cls, Dataset& data, const PartitionSpec& spec, Rng& rng) {
    const Partition& part = cls.partition();
    const std::size_t elements = part.elements.size();
    if (spec.allocation.size() != elements) {
        throw UsageError("derm: allocation has " + std::to_string(spec.allocation.size()) + " entries for " +
                         std::to_string(elements) + " elements");
    }
    std::size_t total = 0;
    for (std::size_t n : spec.allocation) {
        if (n == 0) throw UsageError("derm: element with zero samples");
        total += n;
    }
    if (total != data.size()) {
        throw UsageError("derm: allocation sums to " + std::to_string(total) + " but dataset has " +
                         std::to_string(data.size()));
    }

    LearnerOutput out;
    out.element_risks.resize(elements);
    out.element_argmin.resize(elements);
    std::vector<std::size_t> local_argmin(elements);
    std::size_t offset = 0;
    for (std::size_t j = 0; j < elements; ++j) {
        const ApproxJmElement& el = part.elements[j];
        const std::size_t n = spec.allocation[j];
        std::vector<std::size_t> z(n);
        std::vector<int> y(n);
        for (std::size_t i = 0; i < n; ++i) {
            z[i] = data.reg(offset + i).measure(el.center(), rng);
            y[i] = data.label(offset + i);
        }
        offset += n;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < el.size(); ++k) {
            const double r = denoised_empirical_risk(el, k, z, y);
            if (r < best) {
                best = r;
                local_argmin[j] = k;
            }
        }
        out.element_risks[j] = best;
        out.element_argmin[j] = part.member_ids[j][local_argmin[j]];
    }
    std::size_t winner = 0;
    for (std::size_t j = 1; j < elements; ++j) {
        if (out.element_risks[j] < out.element_risks[winner]) winner = j;
    }
    // Any member whose smoothing equals rho_{j*}; take the lowest class index.
    const ApproxJmElement& el = part.elements[winner];
    const ClassicalChannel& target = el.members()[local_argmin[winner]].channel;
    std::size_t chosen = part.member_ids[winner][local_argmin[winner]];
    for (std::size_t k = 0; k < el.size(); ++k) {
        if (el.members()[k].channel.approx_equal(target, tolerances().dtv)) {
            chosen = std::min(chosen, part.member_ids[winner][k]);
        }
    }
    out.chosen = chosen;
    out.chosen_score = out.element_risks[winner];
    out.winning_element = winner;
    out.samples_used = total;
    return out;
}

LearnerOutput finite_class_learner(const std::vector<Povm>& members, const DomainSpec& domain, Dataset& data,
                                   Rng& rng) {
    const HypothesisClass singletons = singleton_partition(members, domain);
    return derm(singletons, data, PartitionSpec::equal_split(data.size(), members.size()), rng);
}

CoveringOutput covering_learner(const HypothesisClass& cls, Dataset& data, double epsilon, Rng& rng,
                                std::size_t max_centers) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw UsageError("covering_learner: epsilon must lie in (0,1)");
    CoveringOutput out;
    out.centers = tv_cover(cls.members(), epsilon / 4.0, cls.domain());
    if (out.centers.size() > max_centers) {
        throw UsageError("covering_learner: cover needs " + std::to_string(out.centers.size()) +
                         " centers, cap is " + std::to_string(max_centers));
    }
    if (data.size() < out.centers.size()) throw UsageError("covering_learner: fewer samples than centers");
    std::vector<Povm> centers;
    for (std::size_t c : out.centers) centers.push_back(cls.member(c));
    out.learner = finite_class_learner(centers, cls.domain(), data, rng);
    for (auto& id : out.learner.element_argmin) id = out.centers[id];
    out.learner.chosen = out.centers[out.learner.chosen];
    return out;
}

LearnerOutput plugin_pocc_learner(const PoccClass& cls, std::span<const ClassicalSample> samples) {
    cls.validate();
    if (samples.empty()) throw UsageError("plugin_pocc_learner: empty sample");
    std::vector<double> p0(cls.domain_size, 0.0);
    std::vector<double> p1(cls.domain_size, 0.0);
    for (const auto& s : samples) {
        if (s.x >= cls.domain_size) throw UsageError("plugin_pocc_learner: sample point outside the domain");
        (s.y == 1 ? p1 : p0)[s.x] += 1.0;
    }
    const double m = static_cast<double>(samples.size());
    LearnerOutput out;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t h = 0; h < cls.size(); ++h) {
        double r = 0.0;
        for (std::size_t x = 0; x < cls.domain_size; ++x) {
            r += p0[x] * cls.p1[h][x] + p1[x] * (1.0 - cls.p1[h][x]);
        }
        r /= m;
        if (r < best) {
            best = r;
            out.chosen = h;
        }
    }
    out.chosen_score = best;
    out.element_risks = {best};
    out.element_argmin = {out.chosen};
    out.samples_used = samples.size();
    return out;
}

} // namespace povm
