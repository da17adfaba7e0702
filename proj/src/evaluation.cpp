#include "it2frbc/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "it2frbc/error.hpp"
#include "it2frbc/inference.hpp"
#include "random.hpp"

namespace it2frbc {

namespace {

std::string shortest(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

// Reports carry two decimals everywhere so every format shows the same numbers.
double round2(double v) { return std::round(v * 100.0) / 100.0; }

std::string fixed2(double v) {
    std::ostringstream out;
    out << std::fixed << std::setprecision(2) << round2(v);
    return out.str();
}

std::string ra_label(const ExperimentConfig& cfg) {
    return cfg.subclust ? shortest(cfg.subclust->r_a) : "none";
}

std::string rules_label(const Aggregate& agg) {
    if (agg.min_rules == agg.max_rules) return std::to_string(agg.min_rules);
    return "[" + std::to_string(agg.min_rules) + "," + std::to_string(agg.max_rules) + "]";
}

}  // namespace

double accuracy(const ConfusionMatrix& conf) {
    std::size_t total = 0;
    std::size_t correct = 0;
    for (std::size_t i = 0; i < conf.size(); ++i) {
        for (std::size_t j = 0; j < conf[i].size(); ++j) {
            total += conf[i][j];
            if (i == j) correct += conf[i][j];
        }
    }
    if (total == 0) throw DataError("accuracy of an empty confusion matrix");
    return 100.0 * static_cast<double>(correct) / static_cast<double>(total);
}

ConfusionMatrix confusion_matrix(const Dataset& labeled, std::span<const std::size_t> predicted) {
    if (predicted.size() != labeled.size()) {
        throw InvariantError("prediction count differs from pattern count");
    }
    const std::size_t m = labeled.num_classes();
    ConfusionMatrix conf(m, std::vector<std::size_t>(m, 0));
    for (std::size_t i = 0; i < labeled.size(); ++i) {
        const auto& truth = labeled[i].label;
        if (!truth) throw DataError("confusion matrix needs labeled patterns");
        if (predicted[i] >= m) throw InvariantError("predicted class out of range");
        ++conf[*truth][predicted[i]];
    }
    return conf;
}

DatasetSource DatasetSource::file(std::filesystem::path path, long label_column,
                                  MissingPolicy missing) {
    DatasetSource s;
    s.kind = Kind::file;
    s.path = std::move(path);
    s.label_column = label_column;
    s.missing = missing;
    return s;
}

DatasetSource DatasetSource::generator(Kind kind) {
    DatasetSource s;
    s.kind = kind;
    return s;
}

std::string DatasetSource::describe() const {
    switch (kind) {
        case Kind::circular:
            return "gen:circular";
        case Kind::irregular:
            return "gen:irregular";
        case Kind::file:
            break;
    }
    return "file:" + path.string() + " label_col=" + std::to_string(label_column) +
           " missing=" + (missing == MissingPolicy::drop_row ? "drop" : "error");
}

Dataset resolve_dataset(const DatasetSource& source, std::uint64_t seed) {
    switch (source.kind) {
        case DatasetSource::Kind::circular:
            return gen_circular(seed);
        case DatasetSource::Kind::irregular:
            return gen_irregular(seed);
        case DatasetSource::Kind::file:
            break;
    }
    return load_csv(source.path, source.label_column, source.missing);
}

void ExperimentConfig::validate() const {
    if (runs == 0) throw ConfigError("runs must be at least 1");
    SplitSpec{train_fraction, 0, stratified}.validate();
    if (subclust) subclust->validate();
    fuzzifiers.validate();
    if (aggregation_p == 0.0 || !std::isfinite(aggregation_p)) {
        throw ConfigError("aggregation exponent p must be finite and non-zero");
    }
}

std::string ExperimentConfig::describe() const {
    std::ostringstream out;
    out << "source=" << source.describe() << " runs=" << runs
        << " train_fraction=" << shortest(train_fraction)
        << " stratified=" << (stratified ? "true" : "false") << " seed=" << master_seed;
    if (subclust) {
        out << " r_a=" << shortest(subclust->r_a) << " r_b_ratio=" << shortest(subclust->r_b_ratio)
            << " accept=" << shortest(subclust->accept_ratio)
            << " reject=" << shortest(subclust->reject_ratio);
        if (subclust->max_centers) out << " max_centers=" << *subclust->max_centers;
    } else {
        out << " r_a=none";
    }
    out << " m1=" << shortest(fuzzifiers.m1) << " m2=" << shortest(fuzzifiers.m2)
        << " p=" << shortest(aggregation_p) << " threads=" << threads;
    return out.str();
}

std::uint64_t derive_run_seed(std::uint64_t master_seed, std::size_t run) {
    return detail::splitmix64(detail::splitmix64(master_seed) + static_cast<std::uint64_t>(run));
}

RunResult run_once(const Dataset& ds, const ExperimentConfig& cfg, std::size_t index,
                   std::uint64_t seed) {
    RunResult result;
    result.index = index;
    result.seed = seed;
    try {
        auto [train, test] = split(ds, SplitSpec{cfg.train_fraction, seed, cfg.stratified});
        result.train_size = train.size();
        result.test_size = test.size();
        // Test patterns must never influence the normalizer.
        auto normalization = fit_normalizer(train);
        const Dataset normalized_train = apply_normalizer(normalization, train);
        const RuleBase rb = build_rulebase(normalized_train, cfg.subclust, cfg.fuzzifiers,
                                           cfg.aggregation_p, std::move(normalization));
        result.rule_count = rb.rules.size();

        std::vector<std::size_t> predicted;
        predicted.reserve(test.size());
        for (const Pattern& p : test.patterns()) predicted.push_back(classify(p.features, rb).predicted);
        result.confusion = confusion_matrix(test, predicted);
        result.accuracy = accuracy(result.confusion);
    } catch (const ConfigError&) {
        throw;
    } catch (const DataError& e) {
        result.failed = true;
        result.failure = e.what();
    }
    return result;
}

std::optional<Aggregate> summarize(std::span<const RunResult> runs) {
    std::vector<const RunResult*> ok;
    for (const auto& r : runs) {
        if (!r.failed) ok.push_back(&r);
    }
    if (ok.empty()) return std::nullopt;
    Aggregate agg;
    agg.best = agg.worst = ok.front()->accuracy;
    agg.min_rules = agg.max_rules = ok.front()->rule_count;
    double sum = 0.0;
    for (const RunResult* r : ok) {
        agg.best = std::max(agg.best, r->accuracy);
        agg.worst = std::min(agg.worst, r->accuracy);
        agg.min_rules = std::min(agg.min_rules, r->rule_count);
        agg.max_rules = std::max(agg.max_rules, r->rule_count);
        sum += r->accuracy;
    }
    const double n = static_cast<double>(ok.size());
    agg.average = sum / n;
    double sq = 0.0;
    for (const RunResult* r : ok) sq += (r->accuracy - agg.average) * (r->accuracy - agg.average);
    agg.sigma = std::sqrt(sq / n);
    return agg;
}

ExperimentReport run_experiment(const Dataset& ds, const ExperimentConfig& cfg,
                                std::span<const std::uint64_t> seeds) {
    cfg.validate();
    ExperimentReport report;
    report.config = cfg;
    report.class_names = ds.class_names();
    report.runs.resize(seeds.size());

    unsigned workers = cfg.threads == 0 ? std::max(1u, std::thread::hardware_concurrency())
                                        : cfg.threads;
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, seeds.size()));

    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto work = [&] {
        for (std::size_t i = next++; i < seeds.size(); i = next++) {
            try {
                report.runs[i] = run_once(ds, cfg, i, seeds[i]);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned t = 0; t < workers; ++t) pool.emplace_back(work);
    }
    if (error) std::rethrow_exception(error);

    for (const auto& r : report.runs) {
        if (r.failed) ++report.failed_runs;
    }
    report.aggregate = summarize(report.runs);
    return report;
}

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    const Dataset ds = resolve_dataset(cfg.source, cfg.master_seed);
    std::vector<std::uint64_t> seeds(cfg.runs);
    for (std::size_t i = 0; i < cfg.runs; ++i) seeds[i] = derive_run_seed(cfg.master_seed, i);
    return run_experiment(ds, cfg, seeds);
}

std::string emit_report(const ExperimentReport& report, ReportFormat format) {
    const auto& agg = report.aggregate;
    std::ostringstream out;
    switch (format) {
        case ReportFormat::text_table: {
            out << "source: " << report.config.source.describe() << ", runs: "
                << report.runs.size() << ", failed: " << report.failed_runs << "\n";
            out << std::left << std::setw(8) << "r_a" << std::setw(16) << "Clusters/rules"
                << std::setw(9) << "Best" << std::setw(9) << "Average" << std::setw(9)
                << "Worst" << "sigma\n";
            out << std::setw(8) << ra_label(report.config);
            if (agg) {
                out << std::setw(16) << rules_label(*agg) << std::setw(9) << fixed2(agg->best)
                    << std::setw(9) << fixed2(agg->average) << std::setw(9) << fixed2(agg->worst)
                    << fixed2(agg->sigma) << "\n";
            } else {
                out << "(all runs failed)\n";
            }
            break;
        }
        case ReportFormat::csv: {
            out << "kind,run,seed,status,rules,accuracy\n";
            for (const auto& r : report.runs) {
                out << "run," << r.index << ',' << r.seed << ',' << (r.failed ? "failed" : "ok")
                    << ',';
                if (!r.failed) out << r.rule_count << ',' << fixed2(r.accuracy);
                else out << ',';
                out << '\n';
            }
            if (agg) {
                out << "best,,,,," << fixed2(agg->best) << '\n';
                out << "average,,,,," << fixed2(agg->average) << '\n';
                out << "worst,,,,," << fixed2(agg->worst) << '\n';
                out << "sigma,,,,," << fixed2(agg->sigma) << '\n';
                out << "rules_min,,,," << agg->min_rules << ",\n";
                out << "rules_max,,,," << agg->max_rules << ",\n";
            }
            out << "failed_runs,,,," << report.failed_runs << ",\n";
            break;
        }
        case ReportFormat::json: {
            const auto& cfg = report.config;
            nlohmann::json doc;
            nlohmann::json config = {{"source", cfg.source.describe()},
                                     {"runs", cfg.runs},
                                     {"train_fraction", cfg.train_fraction},
                                     {"stratified", cfg.stratified},
                                     {"seed", cfg.master_seed},
                                     {"m1", cfg.fuzzifiers.m1},
                                     {"m2", cfg.fuzzifiers.m2},
                                     {"p", cfg.aggregation_p}};
            if (cfg.subclust) {
                config["subclust"] = {{"r_a", cfg.subclust->r_a},
                                      {"r_b_ratio", cfg.subclust->r_b_ratio},
                                      {"accept_ratio", cfg.subclust->accept_ratio},
                                      {"reject_ratio", cfg.subclust->reject_ratio}};
            } else {
                config["subclust"] = nullptr;
            }
            doc["config"] = std::move(config);
            doc["class_names"] = report.class_names;
            auto& runs = doc["runs"] = nlohmann::json::array();
            for (const auto& r : report.runs) {
                nlohmann::json row = {{"run", r.index},
                                      {"seed", r.seed},
                                      {"status", r.failed ? "failed" : "ok"}};
                if (r.failed) {
                    row["failure"] = r.failure;
                } else {
                    row["accuracy"] = round2(r.accuracy);
                    row["rules"] = r.rule_count;
                    row["train_size"] = r.train_size;
                    row["test_size"] = r.test_size;
                    row["confusion"] = r.confusion;
                }
                runs.push_back(std::move(row));
            }
            doc["failed_runs"] = report.failed_runs;
            if (agg) {
                doc["aggregate"] = {{"best", round2(agg->best)},
                                    {"average", round2(agg->average)},
                                    {"worst", round2(agg->worst)},
                                    {"sigma", round2(agg->sigma)},
                                    {"rules", {agg->min_rules, agg->max_rules}}};
            } else {
                doc["aggregate"] = nullptr;
            }
            out << doc.dump(2) << '\n';
            break;
        }
    }
    return out.str();
}

}  // namespace it2frbc
