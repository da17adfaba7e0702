#include "it2frbc/dataset.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string_view>

#include "it2frbc/error.hpp"
#include "random.hpp"

namespace it2frbc {

Dataset::Dataset(std::size_t num_features, std::vector<std::string> class_names,
                 std::vector<Pattern> patterns, std::vector<std::string> feature_names)
    : num_features_(num_features),
      class_names_(std::move(class_names)),
      patterns_(std::move(patterns)),
      feature_names_(std::move(feature_names)) {
    if (num_features_ == 0) throw DataError("dataset needs at least one feature");
    if (feature_names_.empty()) {
        for (std::size_t f = 0; f < num_features_; ++f) {
            feature_names_.push_back("x" + std::to_string(f + 1));
        }
    } else if (feature_names_.size() != num_features_) {
        throw DataError("dataset has " + std::to_string(num_features_) + " features but " +
                        std::to_string(feature_names_.size()) + " feature names");
    }
    for (std::size_t i = 0; i < patterns_.size(); ++i) {
        const Pattern& p = patterns_[i];
        if (p.features.size() != num_features_) {
            throw DataError("pattern " + std::to_string(i) + " has " +
                            std::to_string(p.features.size()) + " features, expected " +
                            std::to_string(num_features_));
        }
        for (double v : p.features) {
            if (!std::isfinite(v)) {
                throw DataError("pattern " + std::to_string(i) + " has a non-finite feature");
            }
        }
        if (p.label && *p.label >= class_names_.size()) {
            throw DataError("pattern " + std::to_string(i) + " has label " +
                            std::to_string(*p.label) + " but only " +
                            std::to_string(class_names_.size()) + " classes exist");
        }
    }
}

std::vector<std::size_t> Dataset::class_counts() const {
    std::vector<std::size_t> counts(num_classes(), 0);
    for (const Pattern& p : patterns_) {
        if (p.label) ++counts[*p.label];
    }
    return counts;
}

std::vector<FeatureVector> Dataset::features_of_class(std::size_t cls) const {
    std::vector<FeatureVector> out;
    for (const Pattern& p : patterns_) {
        if (p.label == cls) out.push_back(p.features);
    }
    return out;
}

std::vector<FeatureVector> Dataset::all_features() const {
    std::vector<FeatureVector> out;
    out.reserve(patterns_.size());
    for (const Pattern& p : patterns_) out.push_back(p.features);
    return out;
}

Dataset Dataset::with_patterns(std::vector<Pattern> patterns) const {
    return Dataset(num_features_, class_names_, std::move(patterns), feature_names_);
}

void Dataset::require_trainable() const {
    if (num_classes() < 2) {
        throw DataError("training needs at least 2 classes, got " +
                        std::to_string(num_classes()));
    }
    for (const Pattern& p : patterns_) {
        if (!p.label) throw DataError("training pattern without a class label");
    }
    const auto counts = class_counts();
    for (std::size_t j = 0; j < counts.size(); ++j) {
        if (counts[j] == 0) {
            throw DataError("class '" + class_names_[j] + "' has no training patterns");
        }
    }
}

// ---------------------------------------------------------------------------
// Normalization

FeatureVector NormalizationParams::apply(std::span<const double> x) const {
    if (x.size() != dimension()) {
        throw DataError("normalizer expects " + std::to_string(dimension()) +
                        " features, got " + std::to_string(x.size()));
    }
    FeatureVector out(x.size());
    for (std::size_t f = 0; f < x.size(); ++f) {
        const double range = max[f] - min[f];
        out[f] = range > 0.0 ? (x[f] - min[f]) / range : 0.5;
    }
    return out;
}

FeatureVector NormalizationParams::invert(std::span<const double> normalized) const {
    if (normalized.size() != dimension()) {
        throw DataError("normalizer expects " + std::to_string(dimension()) +
                        " features, got " + std::to_string(normalized.size()));
    }
    FeatureVector out(normalized.size());
    for (std::size_t f = 0; f < normalized.size(); ++f) {
        const double range = max[f] - min[f];
        out[f] = range > 0.0 ? min[f] + normalized[f] * range : min[f];
    }
    return out;
}

NormalizationParams fit_normalizer(const Dataset& ds) {
    if (ds.empty()) throw DataError("cannot fit a normalizer on an empty dataset");
    NormalizationParams params;
    params.min = ds[0].features;
    params.max = ds[0].features;
    for (const Pattern& p : ds.patterns()) {
        for (std::size_t f = 0; f < ds.num_features(); ++f) {
            params.min[f] = std::min(params.min[f], p.features[f]);
            params.max[f] = std::max(params.max[f], p.features[f]);
        }
    }
    return params;
}

Pattern apply_normalizer(const NormalizationParams& params, const Pattern& p) {
    return Pattern{params.apply(p.features), p.label};
}

Dataset apply_normalizer(const NormalizationParams& params, const Dataset& ds) {
    std::vector<Pattern> out;
    out.reserve(ds.size());
    for (const Pattern& p : ds.patterns()) out.push_back(apply_normalizer(params, p));
    return ds.with_patterns(std::move(out));
}

// ---------------------------------------------------------------------------
// CSV

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    s = s.substr(first, last - first + 1);
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
    return s;
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        const auto end = comma == std::string::npos ? line.size() : comma;
        fields.emplace_back(trim(std::string_view(line).substr(start, end - start)));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return fields;
}

bool is_missing(const std::string& field) { return field.empty() || field == "?"; }

std::optional<double> parse_number(std::string_view s) {
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
    return value;
}

}  // namespace

Dataset parse_csv(std::istream& in, std::optional<long> label_column, MissingPolicy missing) {
    std::string line;
    std::size_t line_no = 0;
    std::size_t num_columns = 0;
    std::optional<std::size_t> label_idx;
    std::vector<std::string> header;
    std::vector<std::string> class_names;
    std::vector<Pattern> patterns;
    bool first_row = true;

    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        auto fields = split_fields(line);

        if (first_row) {
            first_row = false;
            num_columns = fields.size();
            if (label_column) {
                const long n = static_cast<long>(num_columns);
                const long idx = *label_column < 0 ? n + *label_column : *label_column;
                if (idx < 0 || idx >= n) {
                    throw ConfigError("label column " + std::to_string(*label_column) +
                                      " does not exist (file has " + std::to_string(n) +
                                      " columns)");
                }
                label_idx = static_cast<std::size_t>(idx);
            }
            if (num_columns - (label_idx ? 1 : 0) == 0) {
                throw ConfigError("file has no feature columns besides the label column");
            }
            bool looks_like_header = false;
            for (std::size_t c = 0; c < fields.size(); ++c) {
                if (c == label_idx) continue;
                if (!is_missing(fields[c]) && !parse_number(fields[c])) looks_like_header = true;
            }
            if (looks_like_header) {
                for (std::size_t c = 0; c < fields.size(); ++c) {
                    if (c != label_idx) header.push_back(fields[c]);
                }
                continue;
            }
        }

        if (fields.size() != num_columns) {
            throw ParseError("expected " + std::to_string(num_columns) + " fields, got " +
                             std::to_string(fields.size()),
                             line_no);
        }

        Pattern p;
        p.features.reserve(num_columns);
        bool has_missing = false;
        for (std::size_t c = 0; c < fields.size(); ++c) {
            const std::string& field = fields[c];
            if (is_missing(field)) {
                if (missing == MissingPolicy::error) {
                    throw ParseError("missing value in column " + std::to_string(c + 1), line_no);
                }
                has_missing = true;
                continue;
            }
            if (c == label_idx) continue;
            const auto value = parse_number(field);
            if (!value) {
                throw ParseError("non-numeric value '" + field + "' in column " +
                                 std::to_string(c + 1),
                                 line_no);
            }
            if (!std::isfinite(*value)) {
                throw ParseError("non-finite value in column " + std::to_string(c + 1), line_no);
            }
            p.features.push_back(*value);
        }
        if (has_missing) continue;

        if (label_idx) {
            const std::string& name = fields[*label_idx];
            auto it = std::find(class_names.begin(), class_names.end(), name);
            if (it == class_names.end()) {
                class_names.push_back(name);
                it = class_names.end() - 1;
            }
            p.label = static_cast<std::size_t>(it - class_names.begin());
        }
        patterns.push_back(std::move(p));
    }

    if (patterns.empty()) throw DataError("empty dataset");
    const std::size_t num_features = num_columns - (label_idx ? 1 : 0);
    return Dataset(num_features, std::move(class_names), std::move(patterns), std::move(header));
}

Dataset load_csv(const std::filesystem::path& path, std::optional<long> label_column,
                 MissingPolicy missing) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path.string() + "'");
    try {
        return parse_csv(in, label_column, missing);
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what(), 0);
    }
}

void write_csv(std::ostream& out, const Dataset& ds) {
    const bool labeled = ds.num_classes() > 0;
    for (std::size_t f = 0; f < ds.num_features(); ++f) {
        if (f) out << ',';
        out << ds.feature_names()[f];
    }
    if (labeled) out << ",class";
    out << '\n';

    std::array<char, 32> buf{};
    for (const Pattern& p : ds.patterns()) {
        for (std::size_t f = 0; f < p.features.size(); ++f) {
            if (f) out << ',';
            const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), p.features[f]);
            out << std::string_view(buf.data(), static_cast<std::size_t>(res.ptr - buf.data()));
        }
        if (labeled) out << ',' << (p.label ? ds.class_names()[*p.label] : "?");
        out << '\n';
    }
}

// ---------------------------------------------------------------------------
// Splitting

void SplitSpec::validate() const {
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw ConfigError("train fraction must lie in (0,1), got " +
                          std::to_string(train_fraction));
    }
}

std::pair<Dataset, Dataset> split(const Dataset& ds, const SplitSpec& spec) {
    spec.validate();
    const std::size_t n = ds.size();
    if (n < 2) throw DataError("cannot split a dataset with fewer than 2 patterns");
    const auto requested = static_cast<std::size_t>(
        std::llround(static_cast<double>(n) * spec.train_fraction));
    const std::size_t n_train = std::clamp<std::size_t>(requested, 1, n - 1);

    detail::Rng rng(spec.seed);
    std::vector<std::size_t> train_idx;
    std::vector<std::size_t> test_idx;

    if (!spec.stratified) {
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), 0);
        rng.shuffle(order);
        train_idx.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
        test_idx.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
    } else {
        const std::size_t m = ds.num_classes();
        std::vector<std::vector<std::size_t>> members(m);
        for (std::size_t i = 0; i < n; ++i) {
            if (!ds[i].label) throw DataError("stratified split needs every pattern labeled");
            members[*ds[i].label].push_back(i);
        }
        // Largest-remainder apportionment of n_train over the classes.
        std::vector<std::size_t> quota(m);
        std::vector<double> remainder(m);
        std::size_t assigned = 0;
        for (std::size_t j = 0; j < m; ++j) {
            const double exact = static_cast<double>(members[j].size()) * spec.train_fraction;
            quota[j] = static_cast<std::size_t>(std::floor(exact));
            remainder[j] = exact - static_cast<double>(quota[j]);
            assigned += quota[j];
        }
        std::vector<std::size_t> by_remainder(m);
        std::iota(by_remainder.begin(), by_remainder.end(), 0);
        std::stable_sort(by_remainder.begin(), by_remainder.end(),
                         [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
        while (assigned < n_train) {
            bool progressed = false;
            for (std::size_t j : by_remainder) {
                if (assigned == n_train) break;
                if (quota[j] < members[j].size()) {
                    ++quota[j];
                    ++assigned;
                    progressed = true;
                }
            }
            if (!progressed) break;
        }
        for (std::size_t j = 0; j < m; ++j) {
            if (!members[j].empty() && quota[j] == 0) {
                throw DataError("stratified split leaves class '" + ds.class_names()[j] +
                                "' without training patterns");
            }
            rng.shuffle(members[j]);
            train_idx.insert(train_idx.end(), members[j].begin(),
                             members[j].begin() + static_cast<std::ptrdiff_t>(quota[j]));
            test_idx.insert(test_idx.end(),
                            members[j].begin() + static_cast<std::ptrdiff_t>(quota[j]),
                            members[j].end());
        }
        rng.shuffle(train_idx);
        rng.shuffle(test_idx);
    }

    auto gather = [&](const std::vector<std::size_t>& idx) {
        std::vector<Pattern> out;
        out.reserve(idx.size());
        for (std::size_t i : idx) out.push_back(ds[i]);
        return ds.with_patterns(std::move(out));
    };
    return {gather(train_idx), gather(test_idx)};
}

// ---------------------------------------------------------------------------
// Synthetic generators

namespace {

Dataset two_class_dataset(std::vector<Pattern> first, std::vector<Pattern> second) {
    first.insert(first.end(), std::make_move_iterator(second.begin()),
                 std::make_move_iterator(second.end()));
    return Dataset(2, {"1", "2"}, std::move(first));
}

// An ellipse in the plane; radius() < 1 inside.
struct Lobe {
    double cx, cy, a, b, angle;

    double radius(double x, double y) const {
        const double c = std::cos(angle);
        const double s = std::sin(angle);
        const double u = (x - cx) * c + (y - cy) * s;
        const double v = -(x - cx) * s + (y - cy) * c;
        return std::hypot(u / a, v / b);
    }

    std::pair<double, double> sample(detail::Rng& rng) const {
        double u = 0.0;
        double v = 0.0;
        do {
            u = rng.uniform(-1.0, 1.0);
            v = rng.uniform(-1.0, 1.0);
        } while (u * u + v * v >= 1.0);
        const double c = std::cos(angle);
        const double s = std::sin(angle);
        return {cx + a * u * c - b * v * s, cy + a * u * s + b * v * c};
    }
};

}  // namespace

Dataset gen_circular(std::uint64_t seed) {
    constexpr std::size_t inner_target = 63;
    constexpr std::size_t outer_target = 123;
    detail::Rng rng(seed);
    std::vector<Pattern> inner;
    std::vector<Pattern> outer;
    while (inner.size() < inner_target || outer.size() < outer_target) {
        const double x = rng.uniform(0.0, 20.0);
        const double y = rng.uniform(0.0, 20.0);
        const double d = std::hypot(x - 10.0, y - 10.0);
        if (d < 5.0 && inner.size() < inner_target) {
            inner.push_back(Pattern{{x, y}, 0});
        } else if (d > 7.0 && outer.size() < outer_target) {
            outer.push_back(Pattern{{x, y}, 1});
        }
    }
    return two_class_dataset(std::move(inner), std::move(outer));
}

Dataset gen_irregular(std::uint64_t seed) {
    constexpr std::size_t surround_target = 480;
    constexpr std::size_t blob_target = 383;
    constexpr double pi = 3.14159265358979323846;
    // Three overlapping lobes of different size; the smallest gets the
    // largest share of points, so densities differ along the blob.
    const std::array<Lobe, 3> lobes{{
        {6.0, 9.0, 3.2, 1.6, pi / 6.0},
        {10.8, 11.4, 3.0, 2.0, -pi / 9.0},
        {14.4, 8.2, 2.2, 1.3, pi / 3.0},
    }};
    const std::array<double, 3> lobe_share{0.40, 0.30, 0.30};
    auto blob_radius = [&](double x, double y) {
        double r = lobes[0].radius(x, y);
        for (const Lobe& l : lobes) r = std::min(r, l.radius(x, y));
        return r;
    };

    detail::Rng rng(seed);
    std::vector<Pattern> blob;
    while (blob.size() < blob_target) {
        const double pick = rng.uniform01();
        std::size_t k = 0;
        double acc = lobe_share[0];
        while (k + 1 < lobes.size() && pick >= acc) acc += lobe_share[++k];
        const auto [x, y] = lobes[k].sample(rng);
        blob.push_back(Pattern{{x, y}, 1});
    }

    // Surrounding band between 1.5 and 3.2 lobe radii, thinning out from
    // right to left.
    std::vector<Pattern> surround;
    while (surround.size() < surround_target) {
        const double x = rng.uniform(0.0, 20.0);
        const double y = rng.uniform(0.0, 20.0);
        const double r = blob_radius(x, y);
        if (r <= 1.5 || r >= 3.2) continue;
        if (rng.uniform01() > 0.35 + 0.65 * (x / 20.0)) continue;
        surround.push_back(Pattern{{x, y}, 0});
    }
    return two_class_dataset(std::move(surround), std::move(blob));
}

}  // namespace it2frbc
