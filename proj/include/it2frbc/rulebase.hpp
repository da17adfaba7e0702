#ifndef IT2FRBC_RULEBASE_HPP
#define IT2FRBC_RULEBASE_HPP

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "it2frbc/dataset.hpp"
#include "it2frbc/subclust.hpp"

namespace it2frbc {

/// Lower (m1) and upper (m2) fuzzifier, both > 1. m1 == m2 is accepted and
/// gives a degenerate type-1 system with zero-width intervals.
struct Fuzzifiers {
    double m1 = 1.5;
    double m2 = 2.5;

    void validate() const;

    bool operator==(const Fuzzifiers&) const = default;
};

struct ClusterPrototype {
    FeatureVector center;
    std::size_t source_class = 0;

    bool operator==(const ClusterPrototype&) const = default;
};

/// Primary membership interval of a pattern in one IT2 fuzzy set.
struct MembershipInterval {
    double lower = 0.0;
    double upper = 0.0;

    double width() const { return upper - lower; }
    double midpoint() const { return 0.5 * (lower + upper); }

    bool operator==(const MembershipInterval&) const = default;
};

/// IF x is A_k THEN (r_1, ..., r_M).
struct Rule {
    ClusterPrototype antecedent;
    std::vector<double> certainty;

    bool operator==(const Rule&) const = default;
};

using Matrix = std::vector<std::vector<double>>;

struct RuleBase {
    std::vector<Rule> rules;
    Fuzzifiers fuzzifiers;
    NormalizationParams normalization;
    std::size_t num_classes = 0;
    std::vector<std::string> class_names;
    double aggregation_p = 2.0;

    std::size_t num_features() const noexcept { return normalization.dimension(); }
    std::vector<FeatureVector> prototype_centers() const;

    /// Structural checks: dimensions agree, certainties on the simplex,
    /// parameters in range. Throws DataError.
    void validate() const;

    bool operator==(const RuleBase&) const = default;
};

/// Fuzzy-partition memberships of `x` in each prototype for fuzzifier `m`:
/// mu_k = 1 / sum_q (d_k / d_q)^(2/(m-1)). When x coincides with t
/// prototypes, each of them gets 1/t and all others 0.
std::vector<double> memberships_single_fuzzifier(std::span<const double> x,
                                                 std::span<const FeatureVector> prototypes,
                                                 double m);

/// [min, max] of the memberships under the two fuzzifiers, per prototype.
std::vector<MembershipInterval> membership_interval(std::span<const double> x,
                                                    std::span<const FeatureVector> prototypes,
                                                    const Fuzzifiers& fz);

/// Certainty matrix (rules x classes) from a labeled, normalized training
/// set. Row k holds sum_{i in class j} U_k(x_i) / sum_i U_k(x_i) where U is
/// the interval midpoint.
Matrix certainty_degrees(const Dataset& train, std::span<const FeatureVector> prototypes,
                         const Fuzzifiers& fz);

/// Prototypes per class: subtractive clustering on each class subset, or the
/// class mean when `subclust` is empty. Ordered by class, then selection order.
std::vector<ClusterPrototype> find_prototypes(const Dataset& normalized_train,
                                              const std::optional<SubclustParams>& subclust);

/// Builds a rule base from an already-normalized training set; `normalization`
/// is stored in the model so it can classify raw patterns.
RuleBase build_rulebase(const Dataset& normalized_train,
                        const std::optional<SubclustParams>& subclust, const Fuzzifiers& fz,
                        double aggregation_p, NormalizationParams normalization);

/// Fits the normalizer on `raw_train` and builds the rule base.
RuleBase train_rulebase(const Dataset& raw_train, const std::optional<SubclustParams>& subclust,
                        const Fuzzifiers& fz, double aggregation_p);

inline constexpr int rulebase_format_version = 1;

std::string rulebase_to_json(const RuleBase& rb);
RuleBase rulebase_from_json(const std::string& text);
void save_rulebase(const RuleBase& rb, const std::filesystem::path& path);
RuleBase load_rulebase(const std::filesystem::path& path);

/// One line per rule, centers in original feature units.
std::string export_rules_text(const RuleBase& rb);

}  // namespace it2frbc

#endif  // IT2FRBC_RULEBASE_HPP
