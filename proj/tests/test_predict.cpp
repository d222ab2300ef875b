#include "gm/common.hpp"
#include "gm/measures.hpp"
#include "gm/predict.hpp"
#include "gm/report.hpp"
#include "gm/synth.hpp"

#include "support/oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <set>

using namespace gm;
namespace pr = gm::predict;

namespace {

// small regression problem with one informative feature and one noise column
pr::FeatureMatrix toy_matrix(std::size_t n, std::uint64_t seed, double noise_sd) {
    rng::Rng rng(seed);
    pr::FeatureMatrix m;
    m.feature_names = {"signal", "noise"};
    for (std::size_t i = 0; i < n; ++i) {
        double x = rng.uniform(-2.0, 2.0);
        double z = rng.normal();
        m.rows.push_back({x, z});
        m.targets.push_back(2.5 + 0.6 * x + rng.normal(0.0, noise_sd));
        m.row_ids.push_back("row" + std::to_string(i));
    }
    return m;
}

pr::FeatureMatrix informative_gaze_matrix(std::uint64_t seed) {
    synth::CohortConfig cfg;
    cfg.n_observations = 28;
    cfg.duration_s = 30.0;
    cfg.seed = seed;
    cfg.link = synth::GazeLink::GazeInformative;
    auto generated = synth::generate_cohort(cfg);
    auto sets = measures::compute_measures(generated.cohort, measures::MeasureConfig{});
    return report::build_feature_matrix(generated.cohort, sets);
}

}  // namespace

TEST_CASE("fit RF: a single depth-0 tree predicts one constant everywhere") {
    pr::ModelSpec spec;
    spec.kind = pr::ModelKind::RF;
    spec.params.rf.n_trees = 1;
    spec.params.rf.max_depth = 0;

    auto data = toy_matrix(12, 3, 0.1);
    auto model = pr::fit(spec, data.rows, data.targets, 9);
    auto preds = model->predict(data.rows);
    for (double p : preds) CHECK(p == preds.front());
    double lo = *std::min_element(data.targets.begin(), data.targets.end());
    double hi = *std::max_element(data.targets.begin(), data.targets.end());
    CHECK(preds.front() >= lo);
    CHECK(preds.front() <= hi);
}

TEST_CASE("fit: constant targets give constant predictions for every model") {
    pr::Matrix X = {{0.1, 1.0}, {0.4, -1.0}, {0.8, 0.2}, {0.2, 0.5}, {0.9, -0.3}, {0.5, 0.0}};
    std::vector<double> y(6, 2.5);
    for (auto kind : {pr::ModelKind::RF, pr::ModelKind::Lasso, pr::ModelKind::GBT}) {
        pr::ModelSpec spec;
        spec.kind = kind;
        auto model = pr::fit(spec, X, y, 5);
        for (const auto& row : X) {
            CHECK(model->predict_row(row) == doctest::Approx(2.5).epsilon(1e-9));
        }
    }
}

TEST_CASE("fit: degenerate all-identical rows do not crash") {
    pr::Matrix X(6, {0.5, -0.5});
    std::vector<double> y = {1.0, 2.0, 3.0, 1.5, 2.5, 2.0};
    for (auto kind : {pr::ModelKind::RF, pr::ModelKind::Lasso, pr::ModelKind::SVR,
                      pr::ModelKind::GBT, pr::ModelKind::MLP}) {
        pr::ModelSpec spec;
        spec.kind = kind;
        spec.params.mlp.epochs = 50;
        spec.params.svr.steps = 50;
        auto model = pr::fit(spec, X, y, 5);
        double p = model->predict_row(X[0]);
        CHECK(std::isfinite(p));
    }
}

TEST_CASE("predict: schema mismatch throws") {
    auto data = toy_matrix(8, 1, 0.1);
    pr::ModelSpec spec;
    spec.kind = pr::ModelKind::Lasso;
    spec.params.lasso.lambda = 0.0;
    auto model = pr::fit(spec, data.rows, data.targets, 2);
    pr::Matrix wrong = {{1.0, 2.0, 3.0}};
    CHECK_THROWS_AS(model->predict(wrong), std::invalid_argument);
}

TEST_CASE("lasso: lambda at lambda_max zeroes all coefficients") {
    auto data = toy_matrix(20, 11, 0.2);
    double lambda_max = pr::lasso_lambda_max(data.rows, data.targets);
    auto fit = pr::lasso_fit(data.rows, data.targets, lambda_max);
    for (double c : fit.coef) CHECK(c == 0.0);
    double mean = 0.0;
    for (double v : data.targets) mean += v;
    mean /= static_cast<double>(data.targets.size());
    CHECK(fit.intercept == doctest::Approx(mean).epsilon(1e-12));

    auto above = pr::lasso_fit(data.rows, data.targets, lambda_max * 1.5);
    for (double c : above.coef) CHECK(c == 0.0);
}

TEST_CASE("lasso: lambda 0 matches closed-form OLS to 1e-6") {
    auto data = toy_matrix(25, 13, 0.3);
    auto fit = pr::lasso_fit(data.rows, data.targets, 0.0);
    auto beta = oracle::ols(data.rows, data.targets);  // [coef..., intercept]
    for (std::size_t j = 0; j < fit.coef.size(); ++j) {
        CHECK(fit.coef[j] == doctest::Approx(beta[j]).epsilon(1e-6));
    }
    CHECK(fit.intercept == doctest::Approx(beta.back()).epsilon(1e-6));
}

TEST_CASE("lasso: objective is non-increasing per sweep") {
    for (double lambda : {0.0, 0.05, 0.3}) {
        auto data = toy_matrix(15, 21, 0.4);
        auto fit = pr::lasso_fit(data.rows, data.targets, lambda);
        for (std::size_t s = 1; s < fit.objective_per_sweep.size(); ++s) {
            CHECK(fit.objective_per_sweep[s] <= fit.objective_per_sweep[s - 1] + 1e-12);
        }
    }
}

TEST_CASE("deep RF beats the mean predictor on its training set") {
    auto data = toy_matrix(30, 17, 0.05);
    pr::ModelSpec spec;
    spec.kind = pr::ModelKind::RF;
    spec.params.rf.n_trees = 100;
    spec.params.rf.max_depth = 8;
    spec.params.rf.min_leaf = 1;
    auto model = pr::fit(spec, data.rows, data.targets, 23);
    auto preds = model->predict(data.rows);

    double mean = 0.0;
    for (double v : data.targets) mean += v;
    mean /= static_cast<double>(data.targets.size());
    double rf_mae = 0.0, mean_mae = 0.0;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        rf_mae += std::abs(preds[i] - data.targets[i]);
        mean_mae += std::abs(mean - data.targets[i]);
    }
    CHECK(rf_mae < mean_mae);
}

TEST_CASE("GBT with learning rate 1 and one tree equals a single regression tree") {
    auto data = toy_matrix(20, 29, 0.2);

    pr::ModelSpec gbt;
    gbt.kind = pr::ModelKind::GBT;
    gbt.params.gbt.n_trees = 1;
    gbt.params.gbt.learning_rate = 1.0;
    gbt.params.gbt.max_depth = 3;
    gbt.params.gbt.min_leaf = 1;
    auto boosted = pr::fit(gbt, data.rows, data.targets, 1);

    // one full-rate boosting stage from the mean must reproduce a plain
    // regression tree: every leaf predicts the mean target of its members
    auto preds = boosted->predict(data.rows);
    std::map<double, std::vector<std::size_t>> leaves;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        leaves[preds[i]].push_back(i);
    }
    for (const auto& [value, members] : leaves) {
        double mean = 0.0;
        for (auto i : members) mean += data.targets[i];
        mean /= static_cast<double>(members.size());
        CHECK(value == doctest::Approx(mean).epsilon(1e-12));
    }
}

TEST_CASE("MLP: analytic gradient matches central finite differences") {
    auto data = toy_matrix(10, 31, 0.2);
    pr::MlpRegressor mlp(2, 5, 77);
    auto analytic = mlp.gradient(data.rows, data.targets);
    auto& params = mlp.parameters();

    double max_rel = 0.0;
    const double h = 1e-6;
    for (std::size_t k = 0; k < params.size(); ++k) {
        double saved = params[k];
        params[k] = saved + h;
        double up = mlp.loss(data.rows, data.targets);
        params[k] = saved - h;
        double down = mlp.loss(data.rows, data.targets);
        params[k] = saved;
        double numeric = (up - down) / (2.0 * h);
        double denom = std::max({std::abs(numeric), std::abs(analytic[k]), 1e-8});
        max_rel = std::max(max_rel, std::abs(numeric - analytic[k]) / denom);
    }
    CHECK(max_rel < 1e-4);
}

TEST_CASE("MLP: training loss decreases over the first 10 epochs") {
    auto data = toy_matrix(16, 37, 0.05);
    pr::MlpRegressor mlp(2, 8, 9);
    std::vector<double> history;
    mlp.train(data.rows, data.targets, 10, 0.01, &history);
    REQUIRE(history.size() == 11);
    for (std::size_t e = 1; e < history.size(); ++e) {
        CHECK(history[e] < history[e - 1]);
    }
}

TEST_CASE("bootstrap_evaluate: fixed seed is bit-deterministic") {
    auto data = toy_matrix(14, 41, 0.2);
    for (int b_count : {1, 3}) {
        for (auto kind : {pr::ModelKind::RF, pr::ModelKind::Lasso, pr::ModelKind::MLP}) {
            pr::ModelSpec spec;
            spec.kind = kind;
            spec.params.rf.n_trees = 20;
            spec.params.mlp.epochs = 100;
            auto a = pr::bootstrap_evaluate(spec, data, b_count, 2024);
            auto b = pr::bootstrap_evaluate(spec, data, b_count, 2024);
            CHECK(a.mae == b.mae);
            CHECK(a.rmse == b.rmse);
            CHECK(a.r2 == b.r2);
            CHECK(a.skipped_replicates == b.skipped_replicates);
        }
    }
}

TEST_CASE("bootstrap_evaluate: lasso on a noiseless linear target reaches r2 near 1") {
    auto data = toy_matrix(24, 47, 0.0);
    pr::ModelSpec spec;
    spec.kind = pr::ModelKind::Lasso;
    spec.params.lasso.lambda = 0.0;
    auto report = pr::bootstrap_evaluate(spec, data, 50, 7);
    CHECK(report.r2 > 0.95);
    CHECK(report.mae <= report.rmse);
}

TEST_CASE("bootstrap_evaluate: mean-only model scores r2 near 0") {
    auto data = toy_matrix(24, 53, 0.5);
    pr::ModelSpec spec;
    spec.kind = pr::ModelKind::RF;
    spec.params.rf.n_trees = 1;
    spec.params.rf.max_depth = 0;  // stump = resample mean
    auto report = pr::bootstrap_evaluate(spec, data, 100, 3);
    CHECK(std::abs(report.r2) < 0.25);
}

TEST_CASE("bootstrap_evaluate: input validation") {
    auto data = toy_matrix(4, 1, 0.1);
    pr::ModelSpec spec;
    CHECK_THROWS_AS(pr::bootstrap_evaluate(spec, data, 1, 1), std::invalid_argument);
    auto ok = toy_matrix(6, 1, 0.1);
    CHECK_THROWS_AS(pr::bootstrap_evaluate(spec, ok, 0, 1), std::invalid_argument);
}

TEST_CASE("impute_duration: mean fill, identity, all-absent drop") {
    pr::FeatureMatrix m;
    m.feature_names = {"mutual_gaze_duration", "other"};
    m.rows = {{40.0, 1.0}, {50.0, 2.0}, {std::nan(""), 3.0}};
    m.targets = {1.0, 2.0, 3.0};
    m.row_ids = {"a", "b", "c"};

    auto result = pr::impute_duration(m);
    CHECK(result.data.rows[2][0] == 45.0);
    CHECK(result.imputed_rows == std::vector<std::uint8_t>{0, 0, 1});
    CHECK(result.dropped_features.empty());

    pr::FeatureMatrix complete = m;
    complete.rows[2][0] = 60.0;
    auto identity = pr::impute_duration(complete);
    CHECK(identity.data.rows == complete.rows);
    CHECK(identity.imputed_rows == std::vector<std::uint8_t>{0, 0, 0});

    pr::FeatureMatrix gone = m;
    for (auto& row : gone.rows) row[0] = std::nan("");
    auto dropped = pr::impute_duration(gone);
    CHECK(dropped.dropped_features == std::vector<std::string>{"mutual_gaze_duration"});
    CHECK(dropped.data.feature_names == std::vector<std::string>{"other"});
    CHECK(dropped.data.rows[0].size() == 1);
}

TEST_CASE("normalize_features: z-scores columns and is idempotent") {
    auto data = toy_matrix(12, 59, 0.3);
    auto normalized = pr::normalize_features(data);
    for (std::size_t j = 0; j < normalized.n_features(); ++j) {
        double mean = 0.0;
        for (const auto& row : normalized.rows) mean += row[j];
        mean /= static_cast<double>(normalized.n_rows());
        CHECK(mean == doctest::Approx(0.0).epsilon(1e-12));
    }
    auto twice = pr::normalize_features(normalized);
    for (std::size_t i = 0; i < twice.n_rows(); ++i) {
        for (std::size_t j = 0; j < twice.n_features(); ++j) {
            CHECK(twice.rows[i][j] == doctest::Approx(normalized.rows[i][j]).epsilon(1e-12));
        }
    }
}

TEST_CASE("ablation: ten reports, mae <= rmse, settings mask features") {
    auto data = informative_gaze_matrix(71);
    pr::Hyperparameters hp;
    hp.rf.n_trees = 30;
    hp.mlp.epochs = 150;
    hp.svr.steps = 200;
    hp.lasso.inner_replicates = 5;
    auto reports = pr::ablation(data, 10, 99, hp);
    REQUIRE(reports.size() == 10);

    std::set<std::pair<std::string, std::string>> seen;
    for (const auto& r : reports) {
        CHECK(r.mae <= r.rmse + 1e-12);
        CHECK(r.r2 <= 1.0);
        seen.insert({r.model_name, pr::to_string(r.setting)});
    }
    CHECK(seen.size() == 10);

    // determinism across the whole ablation
    auto again = pr::ablation(data, 10, 99, hp);
    for (std::size_t i = 0; i < reports.size(); ++i) {
        CHECK(reports[i].mae == again[i].mae);
        CHECK(reports[i].rmse == again[i].rmse);
        CHECK(reports[i].r2 == again[i].r2);
    }
}

TEST_CASE("ablation: informative gaze features beat profile-only for RF") {
    auto data = informative_gaze_matrix(73);
    pr::Hyperparameters hp;
    hp.rf.n_trees = 60;
    hp.mlp.epochs = 50;
    hp.svr.steps = 100;
    hp.lasso.inner_replicates = 3;
    auto reports = pr::ablation(data, 40, 11, hp);
    double with_gaze = -1.0, profile_only = -1.0;
    for (const auto& r : reports) {
        if (r.model_name != "RF") continue;
        (r.setting == pr::PredictionSetting::WithGaze ? with_gaze : profile_only) = r.mae;
    }
    REQUIRE(with_gaze >= 0.0);
    REQUIRE(profile_only >= 0.0);
    CHECK(with_gaze < profile_only);
}

TEST_CASE("ablation: pure-noise gaze features leave settings indistinguishable") {
    // targets depend only on profile columns; gaze columns are noise
    rng::Rng rng(83);
    pr::FeatureMatrix m;
    m.feature_names = {"mutual_gaze_ratio", "mutual_gaze_duration", "level_of_functioning",
                       "ados_social_affect"};
    for (int i = 0; i < 28; ++i) {
        double lof = 1.0 + static_cast<double>(rng.uniform_index(3));
        double ados = rng.uniform(8.0, 25.0);
        m.rows.push_back({rng.normal(), rng.normal(), lof, ados});
        double svb = 1.0 + 0.9 * lof + 0.02 * ados + rng.normal(0.0, 0.15);
        m.targets.push_back(std::clamp(svb, 1.0, 4.0));
        m.row_ids.push_back("r" + std::to_string(i));
    }

    pr::Hyperparameters hp;
    hp.rf.n_trees = 60;
    hp.mlp.epochs = 50;
    hp.svr.steps = 100;
    hp.lasso.inner_replicates = 3;
    auto reports = pr::ablation(m, 60, 29, hp);
    double with_gaze = -1.0, profile_only = -1.0, rmse_scale = 1.0;
    for (const auto& r : reports) {
        if (r.model_name != "RF") continue;
        if (r.setting == pr::PredictionSetting::WithGaze) {
            with_gaze = r.mae;
            rmse_scale = r.rmse;
        } else {
            profile_only = r.mae;
        }
    }
    // OOB standard error of MAE is roughly rmse / sqrt(pooled n); with
    // B=60 and n=28 the pool is ~600 predictions
    double se = rmse_scale / std::sqrt(600.0);
    CHECK(std::abs(with_gaze - profile_only) < 2.0 * se + 0.05);
}
