#ifndef IT2FRBC_INFERENCE_HPP
#define IT2FRBC_INFERENCE_HPP

#include <cstddef>
#include <span>
#include <vector>

#include "it2frbc/dataset.hpp"
#include "it2frbc/rulebase.hpp"

namespace it2frbc {

/// Association of a pattern with one class under one rule: the matching
/// interval scaled by the rule's certainty for that class.
struct AssociationInterval {
    double lower = 0.0;
    double upper = 0.0;
};

/// Aggregated evidence for one class.
struct SoundnessInterval {
    double lower = 0.0;
    double upper = 0.0;

    double midpoint() const { return 0.5 * (lower + upper); }
};

using AssociationMatrix = std::vector<std::vector<AssociationInterval>>;  // rules x classes

struct ClassificationResult {
    std::size_t predicted = 0;
    std::vector<SoundnessInterval> soundness;
    std::vector<double> scores;  ///< soundness midpoints, one per class
    /// Every class had zero soundness; `predicted` then falls back to class 0.
    bool no_evidence = false;
};

/// Interval membership of an already-normalized pattern in every rule antecedent.
std::vector<MembershipInterval> matching_degree(std::span<const double> normalized_x,
                                                const RuleBase& rb);

AssociationMatrix association_degrees(std::span<const MembershipInterval> match,
                                      const RuleBase& rb);

/// Power mean ((1/s) sum a_l^p)^(1/p) of non-negative values. Throws
/// ConfigError for p == 0 or non-finite p, DataError for an empty input.
double quasiarithmetic_mean(std::span<const double> values, double p);

/// Per class, aggregates the lower and upper association bounds of the rules
/// whose upper bound is positive. Classes with no such rule get [0, 0].
std::vector<SoundnessInterval> soundness(const AssociationMatrix& assoc, double p);

/// Full reasoning pipeline on a pattern in original feature units. The
/// prediction is the class with the largest soundness midpoint; ties go to
/// the lowest class index.
ClassificationResult classify(std::span<const double> x, const RuleBase& rb);

std::vector<ClassificationResult> classify_all(const Dataset& ds, const RuleBase& rb);

}  // namespace it2frbc

#endif  // IT2FRBC_INFERENCE_HPP
