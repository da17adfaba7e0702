#ifndef IT2FRBC_EVALUATION_HPP
#define IT2FRBC_EVALUATION_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "it2frbc/dataset.hpp"
#include "it2frbc/rulebase.hpp"
#include "it2frbc/subclust.hpp"

namespace it2frbc {

using ConfusionMatrix = std::vector<std::vector<std::size_t>>;  // [true][predicted]

/// 100 * trace / total. Throws DataError when the matrix holds no counts.
double accuracy(const ConfusionMatrix& conf);

ConfusionMatrix confusion_matrix(const Dataset& labeled, std::span<const std::size_t> predicted);

/// Where an experiment's data comes from: a CSV file or one of the
/// synthetic generators (seeded from the experiment's master seed).
struct DatasetSource {
    enum class Kind { file, circular, irregular };

    Kind kind = Kind::circular;
    std::filesystem::path path;
    long label_column = -1;
    MissingPolicy missing = MissingPolicy::drop_row;

    static DatasetSource file(std::filesystem::path path, long label_column = -1,
                              MissingPolicy missing = MissingPolicy::drop_row);
    static DatasetSource generator(Kind kind);

    std::string describe() const;
};

Dataset resolve_dataset(const DatasetSource& source, std::uint64_t seed);

struct ExperimentConfig {
    DatasetSource source;
    std::size_t runs = 32;
    double train_fraction = 0.5;
    bool stratified = false;
    std::uint64_t master_seed = 0;
    std::optional<SubclustParams> subclust;  ///< empty: one mean prototype per class
    Fuzzifiers fuzzifiers;
    double aggregation_p = 2.0;
    unsigned threads = 1;  ///< 0 = hardware concurrency

    void validate() const;

    /// Single-line key=value rendering with every default spelled out.
    std::string describe() const;
};

struct RunResult {
    std::size_t index = 0;
    std::uint64_t seed = 0;
    bool failed = false;
    std::string failure;
    double accuracy = 0.0;
    std::size_t rule_count = 0;
    std::size_t train_size = 0;
    std::size_t test_size = 0;
    ConfusionMatrix confusion;
};

struct Aggregate {
    double best = 0.0;
    double average = 0.0;
    double worst = 0.0;
    double sigma = 0.0;  ///< population standard deviation
    std::size_t min_rules = 0;
    std::size_t max_rules = 0;
};

struct ExperimentReport {
    ExperimentConfig config;
    std::vector<std::string> class_names;
    std::vector<RunResult> runs;
    std::size_t failed_runs = 0;
    std::optional<Aggregate> aggregate;  ///< absent when every run failed
};

/// Seed of run `run` derived from the master seed.
std::uint64_t derive_run_seed(std::uint64_t master_seed, std::size_t run);

/// One split / train / test cycle. Untrainable splits come back as failed runs.
RunResult run_once(const Dataset& ds, const ExperimentConfig& cfg, std::size_t index,
                   std::uint64_t seed);

/// Best/average/worst/sigma and the rule-count interval over successful runs.
std::optional<Aggregate> summarize(std::span<const RunResult> runs);

/// Runs `seeds.size()` runs on `ds` (possibly in parallel); results are in
/// run-index order regardless of scheduling.
ExperimentReport run_experiment(const Dataset& ds, const ExperimentConfig& cfg,
                                std::span<const std::uint64_t> seeds);

/// Resolves the data source and runs cfg.runs runs with derived seeds.
ExperimentReport run_experiment(const ExperimentConfig& cfg);

enum class ReportFormat { text_table, csv, json };

std::string emit_report(const ExperimentReport& report, ReportFormat format);

}  // namespace it2frbc

#endif  // IT2FRBC_EVALUATION_HPP
