#include "gm/cli.hpp"

#include "gm/common.hpp"
#include "gm/csv.hpp"
#include "gm/data_model.hpp"
#include "gm/measures.hpp"
#include "gm/predict.hpp"
#include "gm/report.hpp"
#include "gm/synth.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>

namespace gm::cli {

using nlohmann::json;

namespace {

// translates thrown errors into the documented exit codes
template <typename Fn>
int guard(const char* command, Fn&& body) {
    try {
        return body();
    } catch (const ParseError& e) {
        std::cerr << command << ": " << e.what() << "\n";
        return kExitInput;
    } catch (const ValidationError& e) {
        std::cerr << command << ": " << e.what() << "\n";
        return kExitInput;
    } catch (const std::invalid_argument& e) {
        std::cerr << command << ": " << e.what() << "\n";
        return kExitInput;
    } catch (const NumericError& e) {
        std::cerr << command << ": " << e.what() << "\n";
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << command << ": unexpected error: " << e.what() << "\n";
        return kExitNumeric;
    }
}

measures::MeasureConfig measure_config(const CommonOptions& opts) {
    measures::MeasureConfig cfg;
    cfg.score_threshold = opts.threshold;
    cfg.min_run_seconds = opts.min_run_seconds;
    measures::validate(cfg);
    return cfg;
}

std::vector<measures::MeasureSet> load_measures(const CommonOptions& opts) {
    if (opts.manifest.empty()) throw ValidationError("--manifest is required");
    auto cohort = parse_manifest(opts.manifest);
    return measures::compute_measures(cohort, measure_config(opts));
}

void emit(const CommonOptions& opts, const std::string& filename, const std::string& content,
          bool primary) {
    csv::write_file_atomic(opts.out_dir / filename, content);
    if (primary && opts.to_stdout) std::cout << content;
}

json load_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

predict::Hyperparameters parse_hyperparameters(const json& doc) {
    predict::Hyperparameters hp;
    try {
        if (doc.contains("rf")) {
            const auto& j = doc["rf"];
            hp.rf.n_trees = j.value("n_trees", hp.rf.n_trees);
            hp.rf.max_depth = j.value("max_depth", hp.rf.max_depth);
            hp.rf.min_leaf = j.value("min_leaf", hp.rf.min_leaf);
            hp.rf.mtry = j.value("mtry", hp.rf.mtry);
        }
        if (doc.contains("lasso")) {
            const auto& j = doc["lasso"];
            if (j.contains("lambda")) hp.lasso.lambda = j["lambda"].get<double>();
            hp.lasso.grid_points = j.value("grid_points", hp.lasso.grid_points);
            hp.lasso.lambda_min_ratio = j.value("lambda_min_ratio", hp.lasso.lambda_min_ratio);
            hp.lasso.inner_replicates = j.value("inner_replicates", hp.lasso.inner_replicates);
        }
        if (doc.contains("svr")) {
            const auto& j = doc["svr"];
            hp.svr.epsilon = j.value("epsilon", hp.svr.epsilon);
            hp.svr.c = j.value("c", hp.svr.c);
            hp.svr.steps = j.value("steps", hp.svr.steps);
            hp.svr.learning_rate = j.value("learning_rate", hp.svr.learning_rate);
        }
        if (doc.contains("gbt")) {
            const auto& j = doc["gbt"];
            hp.gbt.n_trees = j.value("n_trees", hp.gbt.n_trees);
            hp.gbt.max_depth = j.value("max_depth", hp.gbt.max_depth);
            hp.gbt.min_leaf = j.value("min_leaf", hp.gbt.min_leaf);
            hp.gbt.learning_rate = j.value("learning_rate", hp.gbt.learning_rate);
        }
        if (doc.contains("mlp")) {
            const auto& j = doc["mlp"];
            hp.mlp.hidden_units = j.value("hidden_units", hp.mlp.hidden_units);
            hp.mlp.learning_rate = j.value("learning_rate", hp.mlp.learning_rate);
            hp.mlp.epochs = j.value("epochs", hp.mlp.epochs);
        }
    } catch (const json::exception& e) {
        throw ParseError(std::string("hyperparameter config: ") + e.what());
    }
    return hp;
}

synth::CohortConfig parse_cohort_config(const json& doc) {
    synth::CohortConfig cfg;
    try {
        cfg.n_observations = doc.value("n_observations", cfg.n_observations);
        if (doc.contains("link")) {
            std::string link = doc["link"].get<std::string>();
            if (link == "informative") {
                cfg.link = synth::GazeLink::GazeInformative;
            } else if (link == "uninformative") {
                cfg.link = synth::GazeLink::GazeUninformative;
            } else {
                throw ValidationError("link must be informative|uninformative");
            }
        }
        cfg.fps = doc.value("fps", cfg.fps);
        cfg.duration_s = doc.value("duration_s", cfg.duration_s);
        cfg.score_margin = doc.value("score_margin", cfg.score_margin);
        cfg.noise_sd = doc.value("noise_sd", cfg.noise_sd);
        cfg.gaze_dwell_min_s = doc.value("gaze_dwell_min_s", cfg.gaze_dwell_min_s);
        cfg.gaze_dwell_max_s = doc.value("gaze_dwell_max_s", cfg.gaze_dwell_max_s);
        cfg.nongaze_dwell_min_s = doc.value("nongaze_dwell_min_s", cfg.nongaze_dwell_min_s);
        cfg.nongaze_dwell_max_s = doc.value("nongaze_dwell_max_s", cfg.nongaze_dwell_max_s);
        cfg.profile.svb_noise_sd = doc.value("svb_noise_sd", cfg.profile.svb_noise_sd);
    } catch (const json::exception& e) {
        throw ParseError(std::string("synth config: ") + e.what());
    }
    return cfg;
}

}  // namespace

int run_measures(const CommonOptions& opts) {
    return guard("gm measures", [&] {
        auto sets = load_measures(opts);
        emit(opts, "measures.csv", report::measures_to_csv(sets), true);
        return kExitOk;
    });
}

int run_evaluate(const CommonOptions& opts) {
    return guard("gm evaluate", [&] {
        auto sets = load_measures(opts);
        auto result = report::evaluate_measures(sets);
        emit(opts, "evaluate.json", report::evaluate_to_json(result), true);
        emit(opts, "evaluate_scatter.csv", report::evaluate_scatter_csv(sets), false);
        emit(opts, "evaluate_kde.csv", report::evaluate_kde_csv(sets), false);
        return kExitOk;
    });
}

int run_analyze(const AnalyzeOptions& opts) {
    return guard("gm analyze", [&] {
        auto choice = report::test_choice_from_string(opts.test);
        if (opts.summary_fixture) {
            auto cells = report::parse_summary_fixture(*opts.summary_fixture);
            auto results = report::analyze_summary_fixture(cells);
            emit(opts, "analyze_tests.json", report::analysis_to_json(results), true);
            return kExitOk;
        }
        auto sets = load_measures(opts);
        auto results = report::run_analysis(sets, report::AnalysisPlan::standard_plan(choice));
        for (const auto& res : results) {
            if (!res.note.empty()) {
                std::cerr << "analyze: " << res.name << ": " << res.note << "\n";
            }
        }
        emit(opts, "analyze_tests.json", report::analysis_to_json(results), true);
        emit(opts, "analyze_groups.csv", report::groups_table_csv(sets), false);
        emit(opts, "analyze_sessions.csv", report::sessions_table_csv(sets), false);
        emit(opts, "analyze_boxplot.csv", report::boxplot_csv(sets), false);
        return kExitOk;
    });
}

int run_predict(const PredictOptions& opts) {
    return guard("gm predict", [&] {
        if (opts.manifest.empty()) throw ValidationError("--manifest is required");
        auto cohort = parse_manifest(opts.manifest);
        auto sets = measures::compute_measures(cohort, measure_config(opts));
        auto matrix = report::build_feature_matrix(cohort, sets);
        predict::Hyperparameters hp;
        if (opts.config) hp = parse_hyperparameters(load_json_file(*opts.config));
        auto reports = predict::ablation(matrix, opts.n_bootstrap, opts.seed, hp);
        emit(opts, "predictions.csv", report::eval_reports_to_csv(reports), true);
        return kExitOk;
    });
}

int run_synth(const SynthOptions& opts) {
    return guard("gm synth", [&] {
        synth::CohortConfig cfg;
        if (opts.config) cfg = parse_cohort_config(load_json_file(*opts.config));
        cfg.seed = opts.seed;
        auto result = synth::generate_cohort(cfg);
        auto manifest = write_cohort(result.cohort, opts.out_dir);

        // truth sidecar so oracle comparisons never re-derive labels
        std::string truth = "child_id,activity,truth_ratio\n";
        for (const auto& [key, ratio] : result.truth_ratios) {
            truth += key.child_id;
            truth += ',';
            truth += to_string(key.activity);
            truth += ',';
            truth += format_double(ratio);
            truth += '\n';
        }
        csv::write_file_atomic(opts.out_dir / "truth.csv", truth);

        if (opts.to_stdout) std::cout << manifest.string() << "\n";
        return kExitOk;
    });
}

int dispatch(int argc, char** argv) {
    CLI::App app{"social gaze measures, analyses and score prediction"};
    app.require_subcommand(1);

    CommonOptions measures_opts;
    CommonOptions evaluate_opts;
    AnalyzeOptions analyze_opts;
    PredictOptions predict_opts;
    SynthOptions synth_opts;

    // every subcommand accepts the shared tuning flags, relevant or not
    auto add_common = [](CLI::App* cmd, CommonOptions& o, bool manifest_required) {
        auto* m = cmd->add_option("--manifest", o.manifest, "cohort manifest JSON");
        if (manifest_required) m->required();
        cmd->add_option("--out", o.out_dir, "output directory (default .)");
        cmd->add_option("--threshold", o.threshold, "mutual gaze score cutoff (default 0.6)");
        cmd->add_option("--min-run-seconds", o.min_run_seconds,
                        "duration run cutoff in seconds (default 1.0)");
        cmd->add_option("--seed", o.seed, "random seed");
        cmd->add_option("--test", o.test, "t-test variant: student|welch|auto (default auto)");
        cmd->add_flag("--stdout", o.to_stdout, "also stream the primary artifact to stdout");
    };

    auto* cmd_measures = app.add_subcommand("measures", "per-observation gaze measures CSV");
    add_common(cmd_measures, measures_opts, true);

    auto* cmd_evaluate =
        app.add_subcommand("evaluate", "framework-vs-human correlation and plot data");
    add_common(cmd_evaluate, evaluate_opts, true);

    auto* cmd_analyze = app.add_subcommand("analyze", "group/activity/session comparisons");
    add_common(cmd_analyze, analyze_opts, false);
    cmd_analyze->add_option("--summary-fixture", analyze_opts.summary_fixture,
                            "run the published-summary reproduction instead of a manifest");

    auto* cmd_predict = app.add_subcommand("predict", "svb score prediction ablation");
    add_common(cmd_predict, predict_opts, true);
    cmd_predict->add_option("--B", predict_opts.n_bootstrap,
                            "bootstrap replicates (default 1000)");
    cmd_predict->add_option("--config", predict_opts.config, "hyperparameter override JSON");

    auto* cmd_synth = app.add_subcommand("synth", "write a synthetic cohort to disk");
    cmd_synth->add_option("--out", synth_opts.out_dir, "output directory")->required();
    cmd_synth->add_option("--seed", synth_opts.seed, "random seed");
    cmd_synth->add_option("--config", synth_opts.config, "cohort config JSON");
    cmd_synth->add_flag("--stdout", synth_opts.to_stdout, "print the manifest path");
    cmd_synth->add_option("--threshold", synth_opts.threshold)->group("");
    cmd_synth->add_option("--min-run-seconds", synth_opts.min_run_seconds)->group("");
    cmd_synth->add_option("--test", synth_opts.test)->group("");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitUsage;
    }

    if (cmd_measures->parsed()) return run_measures(measures_opts);
    if (cmd_evaluate->parsed()) return run_evaluate(evaluate_opts);
    if (cmd_analyze->parsed()) return run_analyze(analyze_opts);
    if (cmd_predict->parsed()) return run_predict(predict_opts);
    if (cmd_synth->parsed()) return run_synth(synth_opts);
    return kExitUsage;
}

}  // namespace gm::cli
