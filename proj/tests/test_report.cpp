#include "gm/common.hpp"
#include "gm/csv.hpp"
#include "gm/measures.hpp"
#include "gm/report.hpp"
#include "gm/stats.hpp"
#include "gm/synth.hpp"

#include "support/oracles.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cmath>
#include <filesystem>

using namespace gm;
using measures::MeasureSet;

namespace {

std::vector<MeasureSet> synth_measures(std::uint64_t seed, int n = 12,
                                       double noise_sd = 0.0) {
    synth::CohortConfig cfg;
    cfg.n_observations = n;
    cfg.duration_s = 20.0;
    cfg.seed = seed;
    cfg.noise_sd = noise_sd;
    cfg.score_margin = noise_sd > 0.0 ? 0.2 : 0.25;
    auto generated = synth::generate_cohort(cfg);
    return measures::compute_measures(generated.cohort, measures::MeasureConfig{});
}

}  // namespace

TEST_CASE("measures CSV round-trips field for field") {
    auto sets = synth_measures(91);
    auto csv_text = report::measures_to_csv(sets);
    auto parsed = report::measures_from_csv_text(csv_text);
    REQUIRE(parsed.size() == sets.size());
    for (std::size_t i = 0; i < sets.size(); ++i) {
        CHECK(parsed[i] == sets[i]);
    }
}

TEST_CASE("measures CSV column layout") {
    auto sets = synth_measures(92, 5);
    auto table = csv::read_string(report::measures_to_csv(sets), "measures");
    CHECK(table.header.front() == "child_id");
    CHECK(table.header.size() == 12);
    CHECK(table.rows.size() == sets.size());
}

TEST_CASE("evaluate_measures: noise-free synth gives r exactly 1") {
    auto sets = synth_measures(93, 10, 0.0);
    auto result = report::evaluate_measures(sets);
    CHECK(result.corr.r == 1.0);
    CHECK(result.corr.rmse == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(result.n == 10);
}

TEST_CASE("evaluate_measures: errors on tiny or constant input") {
    auto sets = synth_measures(94, 5);
    sets.resize(2);
    CHECK_THROWS_AS(report::evaluate_measures(sets), std::invalid_argument);

    auto flat = synth_measures(95, 5);
    for (auto& m : flat) {
        m.mutual_gaze_ratio = 0.25;
    }
    CHECK_THROWS_AS(report::evaluate_measures(flat), std::invalid_argument);
}

TEST_CASE("evaluate plot data: scatter rows and KDE grids re-parse") {
    auto sets = synth_measures(96, 14, 0.03);
    auto scatter = csv::read_string(report::evaluate_scatter_csv(sets), "scatter");
    CHECK(scatter.rows.size() == sets.size());
    CHECK(scatter.header.back() == "human_coded_ratio_z");

    // standardized columns have mean 0
    double zsum = 0.0;
    int col = scatter.column("mutual_gaze_ratio_z");
    REQUIRE(col >= 0);
    for (const auto& row : scatter.rows) {
        zsum += std::stod(row[static_cast<std::size_t>(col)]);
    }
    CHECK(zsum == doctest::Approx(0.0).epsilon(1e-9));

    auto kde = csv::read_string(report::evaluate_kde_csv(sets), "kde");
    CHECK(kde.header == std::vector<std::string>{"group", "measure", "x", "density"});
    // both groups x both measures, 161 grid points each
    CHECK(kde.rows.size() == 4 * 161);

    // each KDE slice integrates to ~1 over the grid
    std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> slices;
    for (const auto& row : kde.rows) {
        auto& slice = slices[row[0] + "/" + row[1]];
        slice.first.push_back(std::stod(row[2]));
        slice.second.push_back(std::stod(row[3]));
    }
    for (const auto& [name, slice] : slices) {
        double integral = oracle::trapezoid(slice.first, slice.second);
        CHECK(integral > 0.95);
        CHECK(integral < 1.05);
    }
}

TEST_CASE("run_analysis: standard plan on a synthetic cohort") {
    auto sets = synth_measures(97, 16, 0.02);
    auto results =
        report::run_analysis(sets, report::AnalysisPlan::standard_plan(report::TestChoice::Auto));
    REQUIRE(results.size() == 7);
    for (const auto& res : results) {
        if (res.skipped) continue;
        CHECK(res.ttest.df > 0.0);
        CHECK(res.ttest.p_two_sided >= 0.0);
        CHECK(res.ttest.p_two_sided <= 1.0);
    }
    // ratio comparisons over complete data must be Student
    CHECK(results[0].ttest.method == stats::TTestMethod::Student);
}

TEST_CASE("run_analysis: session comparison on driftless synth is usually null") {
    // no systematic early-vs-late difference by construction: expect p > 0.05
    // in at least 9 of 10 seeded cohorts
    int null_kept = 0;
    for (std::uint64_t seed = 300; seed < 310; ++seed) {
        auto sets = synth_measures(seed, 20, 0.02);
        report::AnalysisPlan plan;
        plan.comparisons = {{"ratio_by_session", report::Grouping::BySession,
                             report::MeasureKind::Ratio, report::TestChoice::Student}};
        auto results = report::run_analysis(sets, plan);
        REQUIRE(results.size() == 1);
        if (!results[0].skipped && results[0].ttest.p_two_sided > 0.05) ++null_kept;
    }
    CHECK(null_kept >= 9);
}

TEST_CASE("summary fixture: published group cells reproduce the reported statistics") {
    auto cells = report::parse_summary_fixture(std::filesystem::path(GM_FIXTURES_DIR) /
                                               "table2_measures.csv");
    REQUIRE(cells.size() == 5);
    auto results = report::analyze_summary_fixture(cells);
    REQUIRE(results.size() == 5);

    auto find = [&](const std::string& name) -> const report::ComparisonResult& {
        for (const auto& r : results) {
            if (r.name == name) return r;
        }
        FAIL("missing comparison");
        return results.front();
    };

    const auto& ratio = find("ratio_by_group");
    CHECK(ratio.ttest.df == 26.0);
    CHECK(std::abs(ratio.ttest.t - (-0.622)) < 0.15);
    CHECK(std::abs(ratio.ttest.p_two_sided - 0.539) < 0.05);

    const auto& hcr = find("human_coded_by_group");
    CHECK(std::abs(hcr.ttest.t - (-1.374)) < 0.15);

    const auto& within = find("ratio_within_play");
    CHECK(within.ttest.df == 16.0);
    CHECK(std::abs(within.ttest.t - (-2.28)) < 0.15);
    CHECK(within.ttest.p_two_sided < 0.05);
    REQUIRE(within.hedges_g.has_value());
    CHECK(std::abs(*within.hedges_g - (-1.05)) < 0.05);
}

TEST_CASE("session fixture: Table 3 totals reproduce the early-vs-late ratio t") {
    auto table = csv::read_file(std::filesystem::path(GM_FIXTURES_DIR) / "table3_sessions.csv");
    struct Cell {
        int n = 0;
        double ratio_m = 0.0, ratio_sd = 0.0;
    };
    Cell early, late;
    for (const auto& row : table.rows) {
        if (row[0] != "Total") continue;
        Cell& cell = row[1] == "early" ? early : late;
        cell.n = std::stoi(row[2]);
        cell.ratio_m = std::stod(row[3]);
        cell.ratio_sd = std::stod(row[4]);
    }
    REQUIRE(early.n == 28);
    REQUIRE(late.n == 28);
    auto res = stats::student_t_summary(early.ratio_m, early.ratio_sd, early.n, late.ratio_m,
                                        late.ratio_sd, late.n);
    CHECK(res.df == 54.0);
    CHECK(std::abs(res.t - (-0.090)) < 0.02);  // published t(54) = -0.090
    CHECK(res.p_two_sided > 0.9);              // published p = 0.928
}

TEST_CASE("analysis JSON is valid and carries the fields") {
    auto sets = synth_measures(98, 10, 0.0);
    auto results =
        report::run_analysis(sets, report::AnalysisPlan::standard_plan(report::TestChoice::Student));
    auto doc = nlohmann::json::parse(report::analysis_to_json(results));
    REQUIRE(doc.is_array());
    CHECK(doc.size() == results.size());
    CHECK(doc[0].contains("t"));
    CHECK(doc[0].contains("p"));
    CHECK(doc[0]["method"] == "student");
}

TEST_CASE("group and session tables have the published row layout") {
    auto sets = synth_measures(99, 28, 0.0);
    auto groups = csv::read_string(report::groups_table_csv(sets), "groups");
    REQUIRE(groups.rows.size() == 5);
    CHECK(groups.rows[0][0] == "PlayTherapy");
    CHECK(groups.rows[0][1] == "HelloSong");
    CHECK(groups.rows[4][0] == "Total");
    int n_col = groups.column("n");
    CHECK(std::stoi(groups.rows[2][static_cast<std::size_t>(n_col)]) == 18);
    CHECK(std::stoi(groups.rows[4][static_cast<std::size_t>(n_col)]) == 28);

    auto sessions = csv::read_string(report::sessions_table_csv(sets), "sessions");
    CHECK(sessions.rows.size() == 8);  // 3 activities + total, early/late each
}

TEST_CASE("quantile: hand values for the interpolating definition") {
    std::vector<double> five = {5.0, 1.0, 3.0, 2.0, 4.0};
    CHECK(report::quantile(five, 0.0) == 1.0);
    CHECK(report::quantile(five, 0.25) == 2.0);
    CHECK(report::quantile(five, 0.5) == 3.0);
    CHECK(report::quantile(five, 0.75) == 4.0);
    CHECK(report::quantile(five, 1.0) == 5.0);

    std::vector<double> four = {1.0, 2.0, 3.0, 4.0};
    CHECK(report::quantile(four, 0.25) == doctest::Approx(1.75).epsilon(1e-12));
    CHECK(report::quantile(four, 0.5) == doctest::Approx(2.5).epsilon(1e-12));
    CHECK(report::quantile(four, 0.75) == doctest::Approx(3.25).epsilon(1e-12));

    CHECK_THROWS_AS(report::quantile({}, 0.5), std::invalid_argument);
}

TEST_CASE("boxplot CSV: ordered five-number summaries per slice") {
    auto sets = synth_measures(103, 16, 0.02);
    auto table = csv::read_string(report::boxplot_csv(sets), "boxplot");
    CHECK(table.header == std::vector<std::string>{"grouping", "label", "measure", "n", "min",
                                                   "q1", "median", "q3", "max"});
    CHECK(table.rows.size() >= 8);
    for (const auto& row : table.rows) {
        double lo = std::stod(row[4]);
        double q1 = std::stod(row[5]);
        double med = std::stod(row[6]);
        double q3 = std::stod(row[7]);
        double hi = std::stod(row[8]);
        CHECK(lo <= q1);
        CHECK(q1 <= med);
        CHECK(med <= q3);
        CHECK(q3 <= hi);
    }
}

TEST_CASE("group table: singleton cells report their value with no sd") {
    auto sets = synth_measures(100, 5);  // one Hello Song observation
    auto groups = csv::read_string(report::groups_table_csv(sets), "groups");
    int n_col = groups.column("n");
    int mean_col = groups.column("ratio_mean");
    int sd_col = groups.column("ratio_sd");
    bool checked = false;
    for (std::size_t r = 0; r < groups.rows.size(); ++r) {
        const auto& row = groups.rows[r];
        if (std::stoi(row[static_cast<std::size_t>(n_col)]) != 1) continue;
        checked = true;
        CHECK_FALSE(row[static_cast<std::size_t>(mean_col)].empty());
        CHECK(std::stod(row[static_cast<std::size_t>(mean_col)]) > 0.0);
        CHECK(row[static_cast<std::size_t>(sd_col)].empty());
    }
    CHECK(checked);
}

TEST_CASE("build_feature_matrix: schema, NaN durations, svb filtering") {
    synth::CohortConfig cfg;
    cfg.n_observations = 8;
    cfg.duration_s = 20.0;
    cfg.seed = 101;
    auto generated = synth::generate_cohort(cfg);
    auto sets = measures::compute_measures(generated.cohort, measures::MeasureConfig{});

    auto matrix = report::build_feature_matrix(generated.cohort, sets);
    CHECK(matrix.feature_names ==
          std::vector<std::string>{"mutual_gaze_ratio", "mutual_gaze_duration",
                                   "level_of_functioning", "ados_social_affect"});
    CHECK(matrix.n_rows() == 8);
    for (double t : matrix.targets) {
        CHECK(t >= 1.0);
        CHECK(t <= 4.0);
    }

    // remove every svb -> validation error
    auto stripped = generated.cohort;
    for (auto& [id, p] : stripped.profiles) p.svb_score.reset();
    CHECK_THROWS_AS(report::build_feature_matrix(stripped, sets), ValidationError);
}

TEST_CASE("eval report CSV has the Table-4 shape") {
    std::vector<predict::EvalReport> reports(2);
    reports[0].model_name = "RF";
    reports[0].setting = predict::PredictionSetting::WithGaze;
    reports[0].mae = 0.348;
    reports[0].rmse = 0.447;
    reports[0].r2 = 0.620;
    reports[0].n_bootstrap = 1000;
    reports[0].seed = 1;
    reports[1] = reports[0];
    reports[1].setting = predict::PredictionSetting::ProfileOnly;

    auto table = csv::read_string(report::eval_reports_to_csv(reports), "pred");
    CHECK(table.header ==
          std::vector<std::string>{"model", "setting", "mae", "rmse", "r2", "B", "seed"});
    REQUIRE(table.rows.size() == 2);
    CHECK(table.rows[0][1] == "WithGaze");
    CHECK(table.rows[1][1] == "ProfileOnly");
    CHECK(std::stod(table.rows[0][2]) == 0.348);
}
