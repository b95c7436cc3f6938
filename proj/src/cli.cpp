#include "texeval/cli.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "texeval/config.hpp"
#include "texeval/consistency.hpp"
#include "texeval/error.hpp"
#include "texeval/evaluate.hpp"
#include "texeval/filter.hpp"
#include "texeval/manifest.hpp"
#include "texeval/report.hpp"

namespace texeval {

namespace {

// Flags shared by every verb. Values are kept as text and fed through
// RunConfig::set after the config file and the environment.
struct CommonFlags {
    std::string config_path;
    std::map<std::string, std::string> values;
    std::vector<std::string> sets;
    std::vector<std::pair<std::string, CLI::Option*>> options;
};

void add_common(CLI::App* app, CommonFlags& flags) {
    app->add_option("--config", flags.config_path, "TOML-style config file")->check(CLI::ExistingFile);
    const std::pair<const char*, const char*> keys[] = {
        {"variant", "structure distance: mask-iou, wire-iou or wire-ssim"},
        {"alpha", "TexEval weight of the instruction score"},
        {"tau-attr", "attribute thresholds, e.g. 0.8,0.95"},
        {"tau-tex", "texture thresholds, e.g. 0.7,0.9"},
        {"judge", "fixture or remote"},
        {"fixture-file", "fixture judge scores (JSON or JSONL)"},
        {"jobs", "worker threads (0 = all cores)"},
        {"judge-calls", "judge calls averaged per pair"},
    };
    for (const auto& [key, help] : keys) {
        auto* opt = app->add_option(std::string("--") + key, flags.values[key], help);
        flags.options.emplace_back(key, opt);
    }
    app->add_option("--set", flags.sets, "any config key, as key=value (repeatable)");
}

RunConfig build_config(const CommonFlags& flags) {
    RunConfig config;
    if (!flags.config_path.empty()) apply_config_file(config, flags.config_path);
    apply_environment(config);
    for (const auto& s : flags.sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw Error(ErrorCode::ConfigError, "--set expects key=value, got '" + s + "'");
        config.set(s.substr(0, eq), s.substr(eq + 1));
    }
    for (const auto& [key, opt] : flags.options) {
        if (opt->count() > 0) config.set(key, flags.values.at(key));
    }
    config.validate();
    return config;
}

void write_text(const std::string& path, const std::string& text, std::ostream& out) {
    if (path.empty() || path == "-") {
        out << text;
        return;
    }
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(ErrorCode::IoError, "cannot write " + path);
    f << text;
}

std::string fmt(double v, const char* spec = "%.4f") {
    char buf[32];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

std::vector<double> parse_grid(const std::string& text) {
    if (text.empty()) return default_alpha_grid();
    std::vector<double> grid;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            grid.push_back(std::stod(item, &used));
            if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw Error(ErrorCode::ConfigError, "bad alpha grid value '" + item + "'");
        }
    }
    return grid;
}

std::string accuracy_text(const ConsistencyResult& r) {
    return r.accuracy ? fmt(*r.accuracy) : std::string("n/a");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Texture-editing evaluation toolkit"};
    app.name("texeval");
    app.require_subcommand(1);

    CommonFlags score_flags, agg_flags, cons_flags, sweep_flags, filter_flags;

    std::string manifest_path, report_path, output_path;
    bool no_cache = false, csv = false, kendall = false;
    std::string grid_text;
    double theta = -1.0;
    std::string out_dir = ".";

    auto* score = app.add_subcommand("score", "score a manifest into a report");
    add_common(score, score_flags);
    score->add_option("manifest", manifest_path, "manifest (JSONL)")->required();
    score->add_option("-o,--output", output_path, "report path (JSONL)")->required();
    score->add_flag("--no-cache", no_cache, "do not read or write the judge verdict cache");

    auto* agg = app.add_subcommand("aggregate", "per-model, per-subtask means of a report");
    add_common(agg, agg_flags);
    agg->add_option("report", report_path, "report (JSONL)")->required()->check(CLI::ExistingFile);
    agg->add_flag("--csv", csv, "CSV instead of the aligned table");
    agg->add_option("-o,--output", output_path, "write here instead of stdout");

    auto* cons = app.add_subcommand("consistency", "agreement of metric rankings with human rankings");
    add_common(cons, cons_flags);
    cons->add_option("report", report_path, "report (JSONL)")->required()->check(CLI::ExistingFile);
    cons->add_option("manifest", manifest_path, "manifest with human_ranking fields")->required();
    cons->add_flag("--kendall", kendall, "score cases by Kendall concordance instead of exact match");

    auto* sweep = app.add_subcommand("sweep", "ranking consistency across alpha values (CSV)");
    add_common(sweep, sweep_flags);
    sweep->add_option("report", report_path, "report (JSONL)")->required()->check(CLI::ExistingFile);
    sweep->add_option("manifest", manifest_path, "manifest with human_ranking fields")->required();
    sweep->add_option("--grid", grid_text, "comma-separated alphas (default 0,0.1,...,1)");
    sweep->add_flag("--kendall", kendall, "score cases by Kendall concordance instead of exact match");
    sweep->add_option("-o,--output", output_path, "write here instead of stdout");

    auto* filter = app.add_subcommand("filter", "split a manifest by judged edit quality");
    add_common(filter, filter_flags);
    filter->add_option("manifest", manifest_path, "manifest (JSONL)")->required();
    auto* theta_opt = filter->add_option("--theta", theta, "keep records whose every edit scores >= theta")
                          ->check(CLI::Range(0.0, 1.0));
    filter->add_option("--out-dir", out_dir, "directory for kept/discarded/undecided manifests");

    std::vector<std::string> argv_store;
    argv_store.reserve(args.size() + 1);
    argv_store.emplace_back("texeval");
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const auto& a : argv_store) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? 0 : 2;
    }

    try {
        if (score->parsed()) {
            RunConfig config = build_config(score_flags);
            if (no_cache) config.cache = false;
            std::optional<std::filesystem::path> cache_file;
            if (config.cache) cache_file = std::filesystem::path(output_path + ".judge-cache.jsonl");
            const auto records = load_manifest(manifest_path);
            const auto judge = make_judge(config, cache_file);
            const Report report = evaluate_batch(records, config, *judge);
            save_report(output_path, report);
            std::size_t failed = 0;
            for (const auto& r : report.rows) failed += r.ok() ? 0 : 1;
            err << "scored " << report.rows.size() << " pair(s) from " << records.size()
                << " record(s), " << failed << " failed -> " << output_path << '\n';
            return 0;
        }
        if (agg->parsed()) {
            build_config(agg_flags);
            const auto table = aggregate(load_report(report_path));
            write_text(output_path, csv ? render_csv(table) : render_text(table), out);
            return 0;
        }
        if (cons->parsed()) {
            const RunConfig config = build_config(cons_flags);
            const auto result = ranking_consistency(load_report(report_path), load_manifest(manifest_path),
                                                    config.alpha,
                                                    kendall ? MatchMode::KendallTau : MatchMode::ExactPermutation);
            out << "alpha " << fmt(config.alpha, "%.3f") << "  cases " << result.cases << "  matches "
                << fmt(result.matches, "%g") << "  accuracy " << accuracy_text(result) << '\n';
            return 0;
        }
        if (sweep->parsed()) {
            build_config(sweep_flags);
            const auto grid = parse_grid(grid_text);
            const auto curve = alpha_sweep(load_report(report_path), load_manifest(manifest_path), grid,
                                           kendall ? MatchMode::KendallTau : MatchMode::ExactPermutation);
            std::string csv_text = "alpha,cases,matches,accuracy\n";
            for (const auto& [alpha, r] : curve) {
                csv_text += fmt(alpha, "%.3f") + "," + std::to_string(r.cases) + "," + fmt(r.matches, "%g") +
                            "," + (r.accuracy ? fmt(*r.accuracy) : std::string()) + "\n";
            }
            write_text(output_path, csv_text, out);
            return 0;
        }
        if (filter->parsed()) {
            RunConfig config = build_config(filter_flags);
            if (theta_opt->count() > 0) config.theta = theta;
            if (!config.theta) {
                throw Error(ErrorCode::ConfigError, "filter needs --theta (or theta in the config file); there is no default");
            }
            const auto records = load_manifest(manifest_path);
            std::filesystem::create_directories(out_dir);
            std::optional<std::filesystem::path> cache_file;
            if (config.cache) cache_file = std::filesystem::path(out_dir) / "judge-cache.jsonl";
            const auto judge = make_judge(config, cache_file);
            const auto result = quality_filter(records, *judge, *config.theta, config.quality_prompt);

            std::string scores = "sample_id,status,score,error\n";
            auto emit = [&](const std::vector<FilteredRecord>& part, const char* name) {
                std::vector<SampleRecord> plain;
                for (const auto& f : part) {
                    plain.push_back(f.record);
                    std::string error = f.error;
                    for (auto& ch : error) if (ch == '"') ch = '\'';
                    scores += f.record.sample_id + "," + name + "," + (f.score ? fmt(*f.score) : std::string()) +
                              "," + (error.empty() ? "" : "\"" + error + "\"") + "\n";
                }
                save_manifest(std::filesystem::path(out_dir) / (std::string(name) + ".jsonl"), plain);
            };
            emit(result.kept, "kept");
            emit(result.discarded, "discarded");
            emit(result.undecided, "undecided");
            write_text((std::filesystem::path(out_dir) / "filter-scores.csv").string(), scores, out);
            out << "kept " << result.kept.size() << "  discarded " << result.discarded.size()
                << "  undecided " << result.undecided.size() << '\n';
            return 0;
        }
    } catch (const Error& e) {
        err << "texeval: " << to_string(e.code()) << ": " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        err << "texeval: " << e.what() << '\n';
        return 1;
    }
    return 2;
}

}  // namespace texeval
