#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "povm/data.hpp"
#include "povm/zoo.hpp"

namespace povm {

// Witnesses and realizing members for a fat-shattered point set. Pattern b
// sets point i "high" when bit i of b is 1: f(x_i) >= r_i + gamma, else
// f(x_i) <= r_i - gamma, with f(x) = P[outcome 1 on x].
struct FatShatterCertificate {
    double gamma = 0.0;
    std::vector<std::size_t> points; // indices into the candidate list
    std::vector<double> witnesses;
    std::vector<std::size_t> realizers; // member index per pattern, 2^|points| entries
};

struct FatDimResult {
    std::size_t dimension = 0;
    FatShatterCertificate certificate;
};

struct FatDimOptions {
    double resolution = 0.0;            // witness grid step; 0 means gamma / 2
    std::size_t max_candidates = 12;
    std::size_t max_work = 2'000'000'000; // subsets x members budget
};

// Exhaustive search, largest subsets first. Witness grid is 1/2 + k*resolution
// inside [gamma, 1 - gamma], tried in order of distance from 1/2. Exact relative
// to the candidates and grid, hence a lower bound on the class's fat dimension.
FatDimResult fat_dim(const HypothesisClass& cls, const std::vector<DensityMatrix>& candidates, double gamma,
                     const FatDimOptions& options = {});

// Re-evaluates every pattern of the certificate straight from the Born rule.
bool validate_certificate(const HypothesisClass& cls, const std::vector<DensityMatrix>& candidates,
                          const FatShatterCertificate& cert);

enum class PackingMode { Greedy, Exhaustive };

// Largest subset with pairwise d_TV > gamma. Greedy (index order) gives a
// lower bound; exhaustive is exact and limited to 40 points.
std::size_t packing_number(const std::vector<Povm>& points, double gamma, const DomainSpec& domain,
                           PackingMode mode = PackingMode::Greedy);
std::size_t packing_number(const Eigen::MatrixXd& distances, double gamma, PackingMode mode);

// Smallest number of closed gamma-balls centered at points that cover all
// points, by subset enumeration. At most 20 points.
std::size_t min_cover_size_exhaustive(const Eigen::MatrixXd& distances, double gamma);

struct JmCoverReport {
    std::size_t dtv_bound = 0;               // |tv_cover(gamma)|, an upper bound on N_JM
    std::optional<std::size_t> structural;   // from explicit fine-grainings, when present
};

JmCoverReport jm_covering_bound(const HypothesisClass& cls, double gamma);

struct McEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t trials = 0;
};

// Monte-Carlo Rademacher complexity of an exactly jointly measurable element.
McEstimate rademacher_mc(const ApproxJmElement& element, const DataDistribution& d, std::size_t m,
                         std::size_t trials, Rng& rng);

// sup_h (DER(h, S) - R(smoothed h)) given the center outcomes of S.
double generalization_gap(const ApproxJmElement& element, std::span<const std::size_t> root_outcomes,
                          std::span<const int> labels, const DataDistribution& d);

// Exact true risks of the smoothed members (center + member channel).
std::vector<double> smoothed_true_risks(const ApproxJmElement& element, const DataDistribution& d);

struct BoundReport {
    std::string name;
    std::vector<std::pair<std::string, double>> inputs;
    double value = 0.0;     // +inf when it overflows a double
    double log_value = 0.0; // natural log of value
    bool overflow = false;
    std::string citation;

    static std::string csv_header();
    std::string csv_row() const;
};

// sum_r (8/eps^2) ln(2 |P| |P_r| / delta)
BoundReport bound_heidari_finite(const std::vector<std::size_t>& partition_sizes, double epsilon, double delta);

// c * R * (d + ln(1/delta)) / eps^2
BoundReport bound_thm4(std::size_t partition_size, std::size_t fat_dim, double epsilon, double delta,
                       double constant = 64.0);

// 2 * (m (2/alpha + 1)^2)^ceil(d ln(2em/(d alpha)))
BoundReport bound_covering_fat(double alpha, std::size_t d, std::size_t m);

// k <= 2 * (m (2/gamma + 1)^2)^ceil(d ln(2em/(d gamma))); requires m >= k(k-1)/2.
bool bound_thm5_check(std::size_t k, std::size_t d, std::size_t m, double gamma);

// (C/eps)^(d+2) ln(1/delta)
BoundReport bound_qnn(std::size_t dim, double epsilon, double delta, double constant);

} // namespace povm
