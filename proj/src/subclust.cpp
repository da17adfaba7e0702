#include "it2frbc/subclust.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "it2frbc/error.hpp"

namespace it2frbc {

namespace {

double squared_distance(std::span<const double> a, std::span<const double> b) {
    double sum = 0.0;
    for (std::size_t f = 0; f < a.size(); ++f) {
        const double d = a[f] - b[f];
        sum += d * d;
    }
    return sum;
}

void check_dimensions(std::span<const FeatureVector> points) {
    if (points.empty()) throw DataError("subtractive clustering needs at least one point");
    const std::size_t dim = points[0].size();
    for (std::size_t i = 1; i < points.size(); ++i) {
        if (points[i].size() != dim) {
            throw DataError("point " + std::to_string(i) + " has " +
                            std::to_string(points[i].size()) + " features, expected " +
                            std::to_string(dim));
        }
    }
}

}  // namespace

void SubclustParams::validate() const {
    if (!(r_a > 0.0) || !std::isfinite(r_a)) {
        throw ConfigError("r_a must be positive, got " + std::to_string(r_a));
    }
    if (!(r_b_ratio > 0.0) || !std::isfinite(r_b_ratio)) {
        throw ConfigError("r_b ratio must be positive, got " + std::to_string(r_b_ratio));
    }
    if (!(accept_ratio > 0.0 && accept_ratio <= 1.0)) {
        throw ConfigError("accept ratio must lie in (0,1], got " + std::to_string(accept_ratio));
    }
    if (!(reject_ratio >= 0.0 && reject_ratio < 1.0)) {
        throw ConfigError("reject ratio must lie in [0,1), got " + std::to_string(reject_ratio));
    }
    if (!(reject_ratio < accept_ratio)) {
        throw ConfigError("reject ratio must be below the accept ratio");
    }
    if (max_centers && *max_centers == 0) throw ConfigError("max centers must be positive");
}

PotentialField initial_potentials(std::span<const FeatureVector> points,
                                  const SubclustParams& params) {
    check_dimensions(points);
    const double alpha = params.alpha();
    const std::size_t n = points.size();
    PotentialField field{std::vector<double>(n, 0.0)};
    for (std::size_t i = 0; i < n; ++i) {
        double sum = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            sum += i == j ? 1.0 : std::exp(-alpha * squared_distance(points[i], points[j]));
        }
        field.potentials[i] = sum;
    }
    return field;
}

PotentialField revise_potentials(PotentialField field, std::span<const FeatureVector> points,
                                 std::size_t center, const SubclustParams& params) {
    if (field.potentials.size() != points.size()) {
        throw InvariantError("potential field and point set differ in size");
    }
    if (center >= points.size()) throw InvariantError("center index out of range");
    const double beta = params.beta();
    const double peak = field.potentials[center];
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (i == center) continue;
        field.potentials[i] -= peak * std::exp(-beta * squared_distance(points[i], points[center]));
    }
    field.potentials[center] = 0.0;
    return field;
}

std::vector<std::size_t> subtractive_cluster_indices(std::span<const FeatureVector> points,
                                                     const SubclustParams& params) {
    params.validate();
    PotentialField field = initial_potentials(points, params);
    const std::size_t cap = params.max_centers.value_or(points.size());

    auto argmax = [&field] {
        std::size_t best = 0;
        for (std::size_t i = 1; i < field.potentials.size(); ++i) {
            if (field.potentials[i] > field.potentials[best]) best = i;
        }
        return best;
    };

    std::vector<std::size_t> centers;
    const std::size_t first = argmax();
    const double first_potential = field.potentials[first];
    centers.push_back(first);
    field = revise_potentials(std::move(field), points, first, params);

    while (centers.size() < cap) {
        const std::size_t k = argmax();
        const double pk = field.potentials[k];
        if (pk <= 0.0 || pk < params.reject_ratio * first_potential) break;

        bool accept = pk >= params.accept_ratio * first_potential;
        if (!accept) {
            double d_min = std::numeric_limits<double>::infinity();
            for (std::size_t c : centers) {
                d_min = std::min(d_min, std::sqrt(squared_distance(points[k], points[c])));
            }
            accept = d_min / params.r_a + pk / first_potential >= 1.0;
        }
        if (accept) {
            centers.push_back(k);
            field = revise_potentials(std::move(field), points, k, params);
        } else {
            field.potentials[k] = 0.0;
        }
    }
    return centers;
}

std::vector<FeatureVector> subtractive_cluster(std::span<const FeatureVector> points,
                                               const SubclustParams& params) {
    std::vector<FeatureVector> centers;
    for (std::size_t i : subtractive_cluster_indices(points, params)) centers.push_back(points[i]);
    return centers;
}

}  // namespace it2frbc
