#include <CLI11.hpp>

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "it2frbc/dataset.hpp"
#include "it2frbc/error.hpp"
#include "it2frbc/evaluation.hpp"
#include "it2frbc/inference.hpp"
#include "it2frbc/rulebase.hpp"
#include "it2frbc/subclust.hpp"

using namespace it2frbc;

namespace {

enum Exit { ok = 0, usage = 1, data = 2, internal = 3 };

struct Common {
    bool no_timestamp = false;
};

struct SubclustFlags {
    std::optional<double> ra;
    bool no_sc = false;
    double rb_ratio = 1.25;
    double accept = 0.5;
    double reject = 0.15;

    void add(CLI::App* cmd, bool allow_none) {
        auto* ra_opt = cmd->add_option("--ra", ra, "cluster radius r_a (normalized units)");
        cmd->add_option("--rb-ratio", rb_ratio, "r_b / r_a")->capture_default_str();
        cmd->add_option("--accept", accept, "accept ratio")->capture_default_str();
        cmd->add_option("--reject", reject, "reject ratio")->capture_default_str();
        if (allow_none) {
            auto* none = cmd->add_flag("--no-sc", no_sc, "one mean prototype per class");
            ra_opt->excludes(none);
            none->excludes(ra_opt);
        } else {
            ra_opt->required();
        }
    }

    std::optional<SubclustParams> resolve() const {
        if (no_sc) return std::nullopt;
        if (!ra) throw ConfigError("one of --ra or --no-sc is required");
        SubclustParams p;
        p.r_a = *ra;
        p.r_b_ratio = rb_ratio;
        p.accept_ratio = accept;
        p.reject_ratio = reject;
        p.validate();
        return p;
    }
};

struct ModelFlags {
    double m1 = 1.5;
    double m2 = 2.5;
    double p = 2.0;

    void add(CLI::App* cmd) {
        cmd->add_option("--m1", m1, "lower fuzzifier")->capture_default_str();
        cmd->add_option("--m2", m2, "upper fuzzifier")->capture_default_str();
        cmd->add_option("--p", p, "aggregation exponent (non-zero)")->capture_default_str();
    }

    Fuzzifiers fuzzifiers() const {
        Fuzzifiers fz{m1, m2};
        fz.validate();
        if (p == 0.0 || !std::isfinite(p)) throw ConfigError("--p must be finite and non-zero");
        return fz;
    }
};

MissingPolicy parse_missing(const std::string& s) {
    return s == "error" ? MissingPolicy::error : MissingPolicy::drop_row;
}

void print_header(const Common& common, const std::string& command, const std::string& config) {
    if (!common.no_timestamp) {
        const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
        std::tm tm{};
        gmtime_r(&now, &tm);
        std::cerr << "# started " << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ") << '\n';
    }
    std::cerr << "# " << command << ": " << config << '\n';
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open " + path + " for writing");
    return out;
}

std::string num(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Interval type-2 fuzzy rule-based classifier with subtractive clustering"};
    app.require_subcommand(1);
    app.fallthrough();
    Common common;
    app.add_flag("--no-timestamp", common.no_timestamp, "omit the timestamp line on stderr");

    // gen-data
    auto* gen = app.add_subcommand("gen-data", "write a synthetic dataset as CSV");
    std::string gen_which;
    std::uint64_t gen_seed = 0;
    std::string gen_out;
    gen->add_option("--which", gen_which)->required()->check(CLI::IsMember({"circular", "irregular"}));
    gen->add_option("--seed", gen_seed)->capture_default_str();
    gen->add_option("--out", gen_out)->required();

    // cluster
    auto* clu = app.add_subcommand("cluster", "subtractive clustering of a CSV file; centers as CSV");
    std::string clu_in, clu_out;
    long clu_label = -1;
    bool clu_unlabeled = false, clu_raw = false;
    SubclustFlags clu_sc;
    clu->add_option("--in", clu_in)->required();
    clu->add_option("--out", clu_out)->required();
    clu_sc.add(clu, false);
    auto* clu_label_opt = clu->add_option("--label-col", clu_label, "label column to ignore")->capture_default_str();
    clu->add_flag("--unlabeled", clu_unlabeled, "every column is a feature")->excludes(clu_label_opt);
    clu->add_flag("--no-normalize", clu_raw, "cluster raw feature values");

    // train
    auto* tr = app.add_subcommand("train", "build a rule base and save it");
    std::string tr_in, tr_model, tr_missing = "drop";
    long tr_label = -1;
    std::uint64_t tr_seed = 0;
    double tr_frac = 0.5;
    bool tr_strat = false;
    SubclustFlags tr_sc;
    ModelFlags tr_mf;
    tr->add_option("--in", tr_in)->required();
    tr->add_option("--model", tr_model)->required();
    tr->add_option("--label-col", tr_label)->capture_default_str();
    tr_sc.add(tr, true);
    tr_mf.add(tr);
    tr->add_option("--seed", tr_seed)->capture_default_str();
    tr->add_option("--train-frac", tr_frac, "training fraction; 1 trains on everything")->capture_default_str();
    tr->add_flag("--stratified", tr_strat);
    tr->add_option("--missing", tr_missing)->check(CLI::IsMember({"drop", "error"}))->capture_default_str();

    // predict
    auto* pr = app.add_subcommand("predict", "classify a CSV file with a saved model");
    std::string pr_model, pr_in, pr_out;
    long pr_label = -1;
    bool pr_unlabeled = false;
    pr->add_option("--model", pr_model)->required();
    pr->add_option("--in", pr_in)->required();
    pr->add_option("--out", pr_out)->required();
    auto* pr_label_opt = pr->add_option("--label-col", pr_label)->capture_default_str();
    pr->add_flag("--unlabeled", pr_unlabeled, "every column is a feature")->excludes(pr_label_opt);

    // eval
    auto* ev = app.add_subcommand("eval", "repeated split/train/test experiment");
    std::string ev_in, ev_gen, ev_format = "table", ev_missing = "drop";
    long ev_label = -1;
    std::size_t ev_runs = 32;
    std::uint64_t ev_seed = 0;
    double ev_frac = 0.5;
    bool ev_strat = false;
    SubclustFlags ev_sc;
    ModelFlags ev_mf;
    auto* ev_in_opt = ev->add_option("--in", ev_in);
    auto* ev_gen_opt = ev->add_option("--gen", ev_gen)->check(CLI::IsMember({"circular", "irregular"}));
    ev_in_opt->excludes(ev_gen_opt);
    ev->add_option("--label-col", ev_label)->capture_default_str();
    ev->add_option("--missing", ev_missing)->check(CLI::IsMember({"drop", "error"}))->capture_default_str();
    ev->add_option("--runs", ev_runs)->capture_default_str();
    ev->add_option("--seed", ev_seed)->capture_default_str();
    ev->add_option("--train-frac", ev_frac)->capture_default_str();
    ev->add_flag("--stratified", ev_strat);
    ev_sc.add(ev, true);
    ev_mf.add(ev);
    ev->add_option("--format", ev_format)->check(CLI::IsMember({"table", "csv", "json"}))->capture_default_str();

    // export-rules
    auto* ex = app.add_subcommand("export-rules", "print a saved rule base as text");
    std::string ex_model;
    ex->add_option("--model", ex_model)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? Exit::ok : Exit::usage;
    }

    try {
        if (*gen) {
            print_header(common, "gen-data", "which=" + gen_which + " seed=" + std::to_string(gen_seed));
            const Dataset ds = gen_which == "circular" ? gen_circular(gen_seed) : gen_irregular(gen_seed);
            auto out = open_out(gen_out);
            write_csv(out, ds);
        } else if (*clu) {
            const SubclustParams params = *clu_sc.resolve();
            print_header(common, "cluster",
                         "in=" + clu_in + " r_a=" + num(params.r_a) + " r_b_ratio=" + num(params.r_b_ratio) +
                             " accept=" + num(params.accept_ratio) + " reject=" + num(params.reject_ratio) +
                             " normalize=" + (clu_raw ? "false" : "true"));
            const Dataset ds = load_csv(clu_in, clu_unlabeled ? std::nullopt : std::optional<long>(clu_label),
                                        MissingPolicy::drop_row);
            std::vector<FeatureVector> centers;
            if (clu_raw) {
                centers = subtractive_cluster(ds.all_features(), params);
            } else {
                const NormalizationParams norm = fit_normalizer(ds);
                centers = subtractive_cluster(apply_normalizer(norm, ds).all_features(), params);
                for (auto& c : centers) c = norm.invert(c);
            }
            auto out = open_out(clu_out);
            write_csv(out, Dataset(ds.num_features(), {}, [&] {
                          std::vector<Pattern> pats;
                          for (auto& c : centers) pats.push_back({c, std::nullopt});
                          return pats;
                      }(), ds.feature_names()));
            std::cout << centers.size() << " centers\n";
        } else if (*tr) {
            const auto sc = tr_sc.resolve();
            const Fuzzifiers fz = tr_mf.fuzzifiers();
            if (!(tr_frac > 0.0 && tr_frac <= 1.0)) throw ConfigError("--train-frac must be in (0,1]");
            std::ostringstream cfg;
            cfg << "in=" << tr_in << " label_col=" << tr_label << " missing=" << tr_missing
                << " r_a=" << (sc ? num(sc->r_a) : "none") << " m1=" << num(fz.m1) << " m2=" << num(fz.m2)
                << " p=" << num(tr_mf.p) << " seed=" << tr_seed << " train_fraction=" << num(tr_frac)
                << " stratified=" << (tr_strat ? "true" : "false");
            print_header(common, "train", cfg.str());
            const Dataset ds = load_csv(tr_in, tr_label, parse_missing(tr_missing));
            if (tr_frac == 1.0) {
                const RuleBase rb = train_rulebase(ds, sc, fz, tr_mf.p);
                save_rulebase(rb, tr_model);
                std::cout << "rules: " << rb.rules.size() << "\ntrain size: " << ds.size() << '\n';
            } else {
                auto [train, test] = split(ds, {tr_frac, tr_seed, tr_strat});
                const RuleBase rb = train_rulebase(train, sc, fz, tr_mf.p);
                save_rulebase(rb, tr_model);
                std::vector<std::size_t> pred;
                for (const auto& r : classify_all(test, rb)) pred.push_back(r.predicted);
                std::cout << "rules: " << rb.rules.size() << "\ntrain size: " << train.size()
                          << "\ntest size: " << test.size() << "\ntest accuracy: " << std::fixed
                          << std::setprecision(2) << accuracy(confusion_matrix(test, pred)) << '\n';
            }
        } else if (*pr) {
            print_header(common, "predict", "model=" + pr_model + " in=" + pr_in +
                                                (pr_unlabeled ? " unlabeled" : " label_col=" + std::to_string(pr_label)));
            const RuleBase rb = load_rulebase(pr_model);
            const Dataset ds = load_csv(pr_in, pr_unlabeled ? std::nullopt : std::optional<long>(pr_label),
                                        MissingPolicy::drop_row);
            if (ds.num_features() != rb.num_features()) {
                throw DataError("input has " + std::to_string(ds.num_features()) +
                                " features but the model expects " + std::to_string(rb.num_features()));
            }
            auto out = open_out(pr_out);
            out << std::setprecision(17);
            for (const auto& name : ds.feature_names()) out << name << ',';
            if (ds.num_classes() > 0) out << "class,";
            out << "predicted";
            for (const auto& name : rb.class_names) out << ",score_" << name;
            out << '\n';
            std::size_t hits = 0;
            for (const auto& pat : ds.patterns()) {
                const auto r = classify(pat.features, rb);
                for (double v : pat.features) out << v << ',';
                if (pat.label) {
                    const auto& truth = ds.class_names()[*pat.label];
                    out << truth << ',';
                    if (truth == rb.class_names[r.predicted]) ++hits;
                }
                out << rb.class_names[r.predicted];
                for (double s : r.scores) out << ',' << s;
                out << '\n';
            }
            std::cout << "predicted: " << ds.size() << '\n';
            if (ds.num_classes() > 0) {
                std::cout << "accuracy: " << std::fixed << std::setprecision(2)
                          << 100.0 * static_cast<double>(hits) / static_cast<double>(ds.size()) << '\n';
            }
        } else if (*ev) {
            ExperimentConfig cfg;
            if (!ev_in.empty()) {
                cfg.source = DatasetSource::file(ev_in, ev_label, parse_missing(ev_missing));
            } else {
                cfg.source = DatasetSource::generator(ev_gen == "irregular" ? DatasetSource::Kind::irregular
                                                                            : DatasetSource::Kind::circular);
            }
            cfg.runs = ev_runs;
            cfg.train_fraction = ev_frac;
            cfg.stratified = ev_strat;
            cfg.master_seed = ev_seed;
            cfg.subclust = ev_sc.resolve();
            cfg.fuzzifiers = ev_mf.fuzzifiers();
            cfg.aggregation_p = ev_mf.p;
            cfg.threads = 0;
            if (const char* env = std::getenv("IT2FRBC_THREADS")) {
                try {
                    cfg.threads = static_cast<unsigned>(std::stoul(env));
                } catch (const std::exception&) {
                    throw ConfigError(std::string("IT2FRBC_THREADS is not a number: ") + env);
                }
            }
            cfg.validate();
            print_header(common, "eval", cfg.describe());
            const auto report = run_experiment(cfg);
            const auto format = ev_format == "csv"    ? ReportFormat::csv
                                : ev_format == "json" ? ReportFormat::json
                                                      : ReportFormat::text_table;
            std::cout << emit_report(report, format);
        } else if (*ex) {
            print_header(common, "export-rules", "model=" + ex_model);
            std::cout << export_rules_text(load_rulebase(ex_model));
        }
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return Exit::usage;
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return Exit::data;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return Exit::internal;
    }
    return Exit::ok;
}
