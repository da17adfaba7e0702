#include "it2frbc/rulebase.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "it2frbc/error.hpp"

namespace it2frbc {

namespace {

constexpr const char* format_tag = "it2frbc-rulebase";

double squared_distance(std::span<const double> a, std::span<const double> b) {
    double sum = 0.0;
    for (std::size_t f = 0; f < a.size(); ++f) {
        const double d = a[f] - b[f];
        sum += d * d;
    }
    return sum;
}

}  // namespace

void Fuzzifiers::validate() const {
    if (!(m1 > 1.0) || !(m2 > 1.0) || !std::isfinite(m1) || !std::isfinite(m2)) {
        throw ConfigError("fuzzifiers must be finite and > 1, got m1=" + std::to_string(m1) +
                          " m2=" + std::to_string(m2));
    }
    if (m1 > m2) {
        throw ConfigError("lower fuzzifier m1 must not exceed upper fuzzifier m2");
    }
}

std::vector<FeatureVector> RuleBase::prototype_centers() const {
    std::vector<FeatureVector> centers;
    centers.reserve(rules.size());
    for (const Rule& r : rules) centers.push_back(r.antecedent.center);
    return centers;
}

void RuleBase::validate() const {
    if (rules.empty()) throw DataError("rule base has no rules");
    if (num_classes < 1) throw DataError("rule base has no classes");
    if (class_names.size() != num_classes) {
        throw DataError("rule base lists " + std::to_string(class_names.size()) +
                        " class names for " + std::to_string(num_classes) + " classes");
    }
    if (normalization.min.size() != normalization.max.size() || normalization.min.empty()) {
        throw DataError("rule base normalization is malformed");
    }
    for (std::size_t f = 0; f < normalization.dimension(); ++f) {
        if (!(normalization.min[f] <= normalization.max[f])) {
            throw DataError("normalization min exceeds max for feature " + std::to_string(f + 1));
        }
    }
    fuzzifiers.validate();
    if (!std::isfinite(aggregation_p) || aggregation_p == 0.0) {
        throw DataError("aggregation exponent p must be finite and non-zero");
    }
    for (std::size_t k = 0; k < rules.size(); ++k) {
        const Rule& r = rules[k];
        const std::string where = "rule " + std::to_string(k + 1) + ": ";
        if (r.antecedent.center.size() != num_features()) {
            throw DataError(where + "center has " + std::to_string(r.antecedent.center.size()) +
                            " features, model has " + std::to_string(num_features()));
        }
        if (r.antecedent.source_class >= num_classes) {
            throw DataError(where + "source class out of range");
        }
        if (r.certainty.size() != num_classes) {
            throw DataError(where + "certainty vector has " + std::to_string(r.certainty.size()) +
                            " entries, expected " + std::to_string(num_classes));
        }
        double sum = 0.0;
        for (double c : r.certainty) {
            if (!(c >= 0.0 && c <= 1.0)) throw DataError(where + "certainty outside [0,1]");
            sum += c;
        }
        if (std::abs(sum - 1.0) > 1e-9) throw DataError(where + "certainties do not sum to 1");
    }
}

std::vector<double> memberships_single_fuzzifier(std::span<const double> x,
                                                 std::span<const FeatureVector> prototypes,
                                                 double m) {
    const std::size_t c = prototypes.size();
    std::vector<double> d2(c);
    std::size_t coincident = 0;
    for (std::size_t k = 0; k < c; ++k) {
        if (prototypes[k].size() != x.size()) {
            throw DataError("pattern has " + std::to_string(x.size()) +
                            " features, prototype has " + std::to_string(prototypes[k].size()));
        }
        d2[k] = squared_distance(x, prototypes[k]);
        if (d2[k] == 0.0) ++coincident;
    }

    std::vector<double> mu(c, 0.0);
    if (coincident > 0) {
        for (std::size_t k = 0; k < c; ++k) {
            if (d2[k] == 0.0) mu[k] = 1.0 / static_cast<double>(coincident);
        }
        return mu;
    }
    // 1 / sum_q (d_k/d_q)^(2/(m-1)) == w_k / sum_q w_q with w_q = d_q^(-2/(m-1)).
    // Weights are taken relative to the nearest prototype so they stay in (0, 1].
    const double exponent = 1.0 / (m - 1.0);
    const double nearest = *std::min_element(d2.begin(), d2.end());
    double total = 0.0;
    for (std::size_t k = 0; k < c; ++k) {
        mu[k] = std::pow(nearest / d2[k], exponent);
        total += mu[k];
    }
    for (double& v : mu) v /= total;
    return mu;
}

std::vector<MembershipInterval> membership_interval(std::span<const double> x,
                                                    std::span<const FeatureVector> prototypes,
                                                    const Fuzzifiers& fz) {
    const auto mu1 = memberships_single_fuzzifier(x, prototypes, fz.m1);
    const auto mu2 = memberships_single_fuzzifier(x, prototypes, fz.m2);
    std::vector<MembershipInterval> out(prototypes.size());
    for (std::size_t k = 0; k < out.size(); ++k) {
        out[k] = {std::min(mu1[k], mu2[k]), std::max(mu1[k], mu2[k])};
    }
    return out;
}

Matrix certainty_degrees(const Dataset& train, std::span<const FeatureVector> prototypes,
                         const Fuzzifiers& fz) {
    if (train.empty()) throw DataError("certainty degrees need a non-empty training set");
    const std::size_t c = prototypes.size();
    const std::size_t m = train.num_classes();
    Matrix per_class(c, std::vector<double>(m, 0.0));
    std::vector<double> total(c, 0.0);

    for (const Pattern& p : train.patterns()) {
        if (!p.label) throw DataError("certainty degrees need labeled training patterns");
        const auto intervals = membership_interval(p.features, prototypes, fz);
        for (std::size_t k = 0; k < c; ++k) {
            const double u = intervals[k].midpoint();
            per_class[k][*p.label] += u;
            total[k] += u;
        }
    }
    for (std::size_t k = 0; k < c; ++k) {
        for (std::size_t j = 0; j < m; ++j) {
            per_class[k][j] = total[k] > 0.0 ? per_class[k][j] / total[k]
                                             : 1.0 / static_cast<double>(m);
        }
    }
    return per_class;
}

std::vector<ClusterPrototype> find_prototypes(const Dataset& normalized_train,
                                              const std::optional<SubclustParams>& subclust) {
    normalized_train.require_trainable();
    if (subclust) subclust->validate();
    std::vector<ClusterPrototype> prototypes;
    for (std::size_t j = 0; j < normalized_train.num_classes(); ++j) {
        const auto members = normalized_train.features_of_class(j);
        if (subclust) {
            for (auto& center : subtractive_cluster(members, *subclust)) {
                prototypes.push_back({std::move(center), j});
            }
        } else {
            FeatureVector mean(normalized_train.num_features(), 0.0);
            for (const auto& x : members) {
                for (std::size_t f = 0; f < mean.size(); ++f) mean[f] += x[f];
            }
            for (double& v : mean) v /= static_cast<double>(members.size());
            prototypes.push_back({std::move(mean), j});
        }
    }
    return prototypes;
}

RuleBase build_rulebase(const Dataset& normalized_train,
                        const std::optional<SubclustParams>& subclust, const Fuzzifiers& fz,
                        double aggregation_p, NormalizationParams normalization) {
    fz.validate();
    if (normalization.dimension() != normalized_train.num_features()) {
        throw DataError("normalization has " + std::to_string(normalization.dimension()) +
                        " features, training set has " +
                        std::to_string(normalized_train.num_features()));
    }
    auto prototypes = find_prototypes(normalized_train, subclust);
    std::vector<FeatureVector> centers;
    centers.reserve(prototypes.size());
    for (const auto& p : prototypes) centers.push_back(p.center);
    Matrix certainty = certainty_degrees(normalized_train, centers, fz);

    RuleBase rb;
    rb.fuzzifiers = fz;
    rb.normalization = std::move(normalization);
    rb.num_classes = normalized_train.num_classes();
    rb.class_names = normalized_train.class_names();
    rb.aggregation_p = aggregation_p;
    rb.rules.reserve(prototypes.size());
    for (std::size_t k = 0; k < prototypes.size(); ++k) {
        rb.rules.push_back(Rule{std::move(prototypes[k]), std::move(certainty[k])});
    }
    rb.validate();
    return rb;
}

RuleBase train_rulebase(const Dataset& raw_train, const std::optional<SubclustParams>& subclust,
                        const Fuzzifiers& fz, double aggregation_p) {
    auto normalization = fit_normalizer(raw_train);
    const Dataset normalized = apply_normalizer(normalization, raw_train);
    return build_rulebase(normalized, subclust, fz, aggregation_p, std::move(normalization));
}

// ---------------------------------------------------------------------------
// Persistence

std::string rulebase_to_json(const RuleBase& rb) {
    nlohmann::json doc;
    doc["format"] = format_tag;
    doc["format_version"] = rulebase_format_version;
    doc["num_classes"] = rb.num_classes;
    doc["class_names"] = rb.class_names;
    doc["fuzzifiers"] = {{"m1", rb.fuzzifiers.m1}, {"m2", rb.fuzzifiers.m2}};
    doc["aggregation_p"] = rb.aggregation_p;
    doc["normalization"] = {{"min", rb.normalization.min}, {"max", rb.normalization.max}};
    auto& rules = doc["rules"] = nlohmann::json::array();
    for (const Rule& r : rb.rules) {
        rules.push_back({{"center", r.antecedent.center},
                         {"source_class", r.antecedent.source_class},
                         {"certainty", r.certainty}});
    }
    return doc.dump(2) + "\n";
}

RuleBase rulebase_from_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("model file is not valid JSON: ") + e.what(), 0);
    }
    if (!doc.is_object() || doc.value("format", std::string()) != format_tag) {
        throw DataError("not an it2frbc model file (missing format tag)");
    }
    if (!doc.contains("format_version") || !doc["format_version"].is_number_integer() ||
        doc["format_version"].get<int>() != rulebase_format_version) {
        throw DataError("unsupported model format version (expected " +
                        std::to_string(rulebase_format_version) + ")");
    }
    RuleBase rb;
    try {
        rb.num_classes = doc.at("num_classes").get<std::size_t>();
        rb.class_names = doc.at("class_names").get<std::vector<std::string>>();
        rb.fuzzifiers.m1 = doc.at("fuzzifiers").at("m1").get<double>();
        rb.fuzzifiers.m2 = doc.at("fuzzifiers").at("m2").get<double>();
        rb.aggregation_p = doc.at("aggregation_p").get<double>();
        rb.normalization.min = doc.at("normalization").at("min").get<std::vector<double>>();
        rb.normalization.max = doc.at("normalization").at("max").get<std::vector<double>>();
        for (const auto& r : doc.at("rules")) {
            rb.rules.push_back(Rule{{r.at("center").get<FeatureVector>(),
                                     r.at("source_class").get<std::size_t>()},
                                    r.at("certainty").get<std::vector<double>>()});
        }
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("malformed model file: ") + e.what());
    } catch (const ConfigError& e) {
        throw DataError(std::string("malformed model file: ") + e.what());
    }
    try {
        rb.validate();
    } catch (const ConfigError& e) {
        throw DataError(std::string("invalid model file: ") + e.what());
    }
    return rb;
}

void save_rulebase(const RuleBase& rb, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write '" + path.string() + "'");
    out << rulebase_to_json(rb);
    if (!out) throw DataError("failed writing '" + path.string() + "'");
}

RuleBase load_rulebase(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return rulebase_from_json(buf.str());
}

std::string export_rules_text(const RuleBase& rb) {
    std::ostringstream out;
    out << std::fixed;
    for (std::size_t k = 0; k < rb.rules.size(); ++k) {
        const Rule& r = rb.rules[k];
        const auto center = rb.normalization.invert(r.antecedent.center);
        out << "R" << k + 1 << ": IF x is A" << k + 1 << " (center = (";
        out << std::setprecision(4);
        for (std::size_t f = 0; f < center.size(); ++f) out << (f ? ", " : "") << center[f];
        out << "), from class " << rb.class_names[r.antecedent.source_class] << ") THEN (";
        out << std::setprecision(3);
        for (std::size_t j = 0; j < r.certainty.size(); ++j) {
            out << (j ? ", " : "") << rb.class_names[j] << ": " << r.certainty[j];
        }
        out << ")\n";
    }
    return out.str();
}

}  // namespace it2frbc
