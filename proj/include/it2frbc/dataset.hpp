#ifndef IT2FRBC_DATASET_HPP
#define IT2FRBC_DATASET_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace it2frbc {

using FeatureVector = std::vector<double>;

/// One observation. `label` is a class index into the owning dataset's class list.
struct Pattern {
    FeatureVector features;
    std::optional<std::size_t> label;

    bool operator==(const Pattern&) const = default;
};

/**
 * A set of patterns with a fixed dimensionality and class list.
 *
 * Construction validates that every pattern has `num_features` finite values
 * and that every label indexes `class_names`. A dataset with no class names is
 * unlabeled (used for plain clustering input).
 */
class Dataset {
public:
    Dataset(std::size_t num_features, std::vector<std::string> class_names,
            std::vector<Pattern> patterns, std::vector<std::string> feature_names = {});

    std::size_t size() const noexcept { return patterns_.size(); }
    bool empty() const noexcept { return patterns_.empty(); }
    std::size_t num_features() const noexcept { return num_features_; }
    std::size_t num_classes() const noexcept { return class_names_.size(); }

    const std::vector<Pattern>& patterns() const noexcept { return patterns_; }
    const Pattern& operator[](std::size_t i) const { return patterns_[i]; }
    const std::vector<std::string>& class_names() const noexcept { return class_names_; }

    /// Column names; generated as x1..xN when the source had none.
    const std::vector<std::string>& feature_names() const noexcept { return feature_names_; }

    /// Number of labeled patterns per class.
    std::vector<std::size_t> class_counts() const;

    /// Feature vectors of the patterns labeled `cls`, in dataset order.
    std::vector<FeatureVector> features_of_class(std::size_t cls) const;

    std::vector<FeatureVector> all_features() const;

    /// Same class list and feature names, different patterns.
    Dataset with_patterns(std::vector<Pattern> patterns) const;

    /// Throws DataError unless the dataset can train a classifier: M >= 2,
    /// every pattern labeled, every class present.
    void require_trainable() const;

    bool operator==(const Dataset&) const = default;

private:
    std::size_t num_features_;
    std::vector<std::string> class_names_;
    std::vector<Pattern> patterns_;
    std::vector<std::string> feature_names_;
};

/// Per-feature min/max of the data the normalizer was fitted on.
struct NormalizationParams {
    std::vector<double> min;
    std::vector<double> max;

    std::size_t dimension() const noexcept { return min.size(); }

    /// (x - min) / (max - min), unclamped; a constant feature maps to 0.5.
    FeatureVector apply(std::span<const double> x) const;

    /// Inverse of apply(); a constant feature maps back to its min.
    FeatureVector invert(std::span<const double> normalized) const;

    bool operator==(const NormalizationParams&) const = default;
};

NormalizationParams fit_normalizer(const Dataset& ds);
Pattern apply_normalizer(const NormalizationParams& params, const Pattern& p);
Dataset apply_normalizer(const NormalizationParams& params, const Dataset& ds);

enum class MissingPolicy { drop_row, error };

/**
 * CSV ingestion. Comma-separated, optional header row (detected when the first
 * row has a non-numeric feature field). Missing values are empty fields or "?".
 *
 * `label_column` selects the class column; negative values count from the end
 * (-1 = last). With no label column the dataset is unlabeled. Labels are
 * mapped to indices in order of first appearance.
 */
Dataset parse_csv(std::istream& in, std::optional<long> label_column, MissingPolicy missing);
Dataset load_csv(const std::filesystem::path& path, std::optional<long> label_column,
                 MissingPolicy missing);

/// Writes features followed by a `class` column (when labeled), with a header row.
void write_csv(std::ostream& out, const Dataset& ds);

struct SplitSpec {
    double train_fraction = 0.5;
    std::uint64_t seed = 0;
    bool stratified = false;

    void validate() const;
};

/// Shuffled train/test partition, deterministic in `spec.seed`.
/// Train size is round(n * fraction), clamped so both sides are non-empty.
std::pair<Dataset, Dataset> split(const Dataset& ds, const SplitSpec& spec);

/// Two-class circular problem on [0,20]^2: 63 points within radius 5 of
/// (10,10) (class "1") and 123 points beyond radius 7 (class "2").
Dataset gen_circular(std::uint64_t seed);

/// Two-class irregular problem on [0,20]^2: 383 class-"2" points in an
/// elongated three-lobe blob, 480 class-"1" points in a band surrounding it.
Dataset gen_irregular(std::uint64_t seed);

}  // namespace it2frbc

#endif  // IT2FRBC_DATASET_HPP
