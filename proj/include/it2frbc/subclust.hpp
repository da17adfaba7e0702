#ifndef IT2FRBC_SUBCLUST_HPP
#define IT2FRBC_SUBCLUST_HPP

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "it2frbc/dataset.hpp"

namespace it2frbc {

/**
 * Subtractive clustering parameters.
 *
 * `r_a` is the neighborhood radius of the potential kernel, the revision
 * kernel uses r_b = r_b_ratio * r_a. Candidates at or above
 * accept_ratio * P1 are accepted outright, candidates below
 * reject_ratio * P1 end the search, and candidates in between are accepted
 * only when they are far enough from the existing centers.
 */
struct SubclustParams {
    double r_a = 0.5;
    double r_b_ratio = 1.25;
    double accept_ratio = 0.5;
    double reject_ratio = 0.15;
    std::optional<std::size_t> max_centers;

    double r_b() const { return r_b_ratio * r_a; }
    double alpha() const { return 4.0 / (r_a * r_a); }
    double beta() const { return 4.0 / (r_b() * r_b()); }

    void validate() const;

    bool operator==(const SubclustParams&) const = default;
};

/// Potential of each point as a cluster center.
struct PotentialField {
    std::vector<double> potentials;
};

/// P_i = sum_j exp(-alpha * |x_i - x_j|^2), self-term included.
PotentialField initial_potentials(std::span<const FeatureVector> points,
                                  const SubclustParams& params);

/// P_i -= P* exp(-beta * |x_i - x*|^2) where x* = points[center] and P* its
/// current potential. The center itself ends at exactly zero.
PotentialField revise_potentials(PotentialField field, std::span<const FeatureVector> points,
                                 std::size_t center, const SubclustParams& params);

/// Indices of the selected centers, in selection order. Never empty for a
/// non-empty input.
std::vector<std::size_t> subtractive_cluster_indices(std::span<const FeatureVector> points,
                                                     const SubclustParams& params);

std::vector<FeatureVector> subtractive_cluster(std::span<const FeatureVector> points,
                                               const SubclustParams& params);

}  // namespace it2frbc

#endif  // IT2FRBC_SUBCLUST_HPP
