#include "it2frbc/inference.hpp"

#include <cmath>
#include <string>

#include "it2frbc/error.hpp"

namespace it2frbc {

std::vector<MembershipInterval> matching_degree(std::span<const double> normalized_x,
                                                const RuleBase& rb) {
    if (normalized_x.size() != rb.num_features()) {
        throw DataError("pattern has " + std::to_string(normalized_x.size()) +
                        " features, model expects " + std::to_string(rb.num_features()));
    }
    // One antecedent per rule, so the t-norm over antecedents is the identity.
    return membership_interval(normalized_x, rb.prototype_centers(), rb.fuzzifiers);
}

AssociationMatrix association_degrees(std::span<const MembershipInterval> match,
                                      const RuleBase& rb) {
    if (match.size() != rb.rules.size()) {
        throw InvariantError("matching degrees and rules differ in count");
    }
    AssociationMatrix assoc(match.size());
    for (std::size_t k = 0; k < match.size(); ++k) {
        const auto& certainty = rb.rules[k].certainty;
        assoc[k].resize(certainty.size());
        for (std::size_t j = 0; j < certainty.size(); ++j) {
            assoc[k][j] = {match[k].lower * certainty[j], match[k].upper * certainty[j]};
        }
    }
    return assoc;
}

double quasiarithmetic_mean(std::span<const double> values, double p) {
    if (p == 0.0 || !std::isfinite(p)) {
        throw ConfigError("quasiarithmetic mean exponent must be finite and non-zero");
    }
    if (values.empty()) throw DataError("quasiarithmetic mean of an empty set");
    double sum = 0.0;
    for (double a : values) {
        if (!(a >= 0.0)) throw DataError("quasiarithmetic mean needs non-negative values");
        sum += std::pow(a, p);
    }
    return std::pow(sum / static_cast<double>(values.size()), 1.0 / p);
}

std::vector<SoundnessInterval> soundness(const AssociationMatrix& assoc, double p) {
    const std::size_t m = assoc.empty() ? 0 : assoc.front().size();
    std::vector<SoundnessInterval> out(m);
    std::vector<double> lower;
    std::vector<double> upper;
    for (std::size_t j = 0; j < m; ++j) {
        lower.clear();
        upper.clear();
        for (const auto& row : assoc) {
            // g(x) = x; a rule fires for class j when its upper bound is positive.
            if (row[j].upper > 0.0) {
                lower.push_back(row[j].lower);
                upper.push_back(row[j].upper);
            }
        }
        if (!upper.empty()) {
            out[j] = {quasiarithmetic_mean(lower, p), quasiarithmetic_mean(upper, p)};
        }
    }
    return out;
}

ClassificationResult classify(std::span<const double> x, const RuleBase& rb) {
    if (x.size() != rb.num_features()) {
        throw DataError("pattern has " + std::to_string(x.size()) +
                        " features, model expects " + std::to_string(rb.num_features()));
    }
    const auto normalized = rb.normalization.apply(x);
    const auto match = matching_degree(normalized, rb);
    const auto assoc = association_degrees(match, rb);

    ClassificationResult result;
    result.soundness = soundness(assoc, rb.aggregation_p);
    result.scores.reserve(result.soundness.size());
    for (const auto& y : result.soundness) result.scores.push_back(y.midpoint());

    result.no_evidence = true;
    for (std::size_t j = 0; j < result.scores.size(); ++j) {
        if (result.scores[j] > 0.0) result.no_evidence = false;
        if (result.scores[j] > result.scores[result.predicted]) result.predicted = j;
    }
    return result;
}

std::vector<ClassificationResult> classify_all(const Dataset& ds, const RuleBase& rb) {
    std::vector<ClassificationResult> out;
    out.reserve(ds.size());
    for (const Pattern& p : ds.patterns()) out.push_back(classify(p.features, rb));
    return out;
}

}  // namespace it2frbc
