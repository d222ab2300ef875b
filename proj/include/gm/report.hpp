#pragma once

#include "gm/data_model.hpp"
#include "gm/measures.hpp"
#include "gm/predict.hpp"
#include "gm/stats.hpp"

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace gm::report {

// --- measures CSV ------------------------------------------------------------

std::string measures_to_csv(std::span<const measures::MeasureSet> sets);
std::vector<measures::MeasureSet> measures_from_csv_text(const std::string& text);

// --- analysis ----------------------------------------------------------------

enum class Grouping { ByGroup, ByActivityWithinPlay, BySession };
enum class MeasureKind { Ratio, Duration, HumanCoded };
enum class TestChoice { Student, Welch, Auto };

TestChoice test_choice_from_string(const std::string& s);

struct Comparison {
    std::string name;
    Grouping grouping = Grouping::ByGroup;
    MeasureKind measure = MeasureKind::Ratio;
    TestChoice test = TestChoice::Auto;
};

struct AnalysisPlan {
    std::vector<Comparison> comparisons;

    // the comparisons reported in the study: setting and within-Play
    // contrasts for ratio/duration/human-coded, early-vs-late sessions
    static AnalysisPlan standard_plan(TestChoice test = TestChoice::Auto);
};

struct ComparisonResult {
    std::string name;
    std::string side_a;  // t and g oriented as (a - b)
    std::string side_b;
    int n_a = 0;
    int n_b = 0;
    stats::TTestResult ttest;
    std::optional<double> hedges_g;
    bool skipped = false;
    std::string note;
};

std::vector<ComparisonResult> run_analysis(std::span<const measures::MeasureSet> sets,
                                           const AnalysisPlan& plan);

// Table-2-shaped per-group/activity cells and Table-3-shaped per-session
// cells, as CSV.
std::string groups_table_csv(std::span<const measures::MeasureSet> sets);
std::string sessions_table_csv(std::span<const measures::MeasureSet> sets);
std::string analysis_to_json(std::span<const ComparisonResult> results);

// Five-number summaries (type-7 quantiles) per group and per Play
// activity for each measure; the box-plot data behind the comparisons.
std::string boxplot_csv(std::span<const measures::MeasureSet> sets);

// linear-interpolation (type 7) quantile of unsorted values, p in [0,1]
double quantile(std::vector<double> values, double p);

// --- framework evaluation (ratio vs human-coded) ------------------------------

struct EvaluateResult {
    int n = 0;
    stats::CorrelationResult corr;  // mutual_gaze_ratio regressed on human_coded_ratio
};

EvaluateResult evaluate_measures(std::span<const measures::MeasureSet> sets);
std::string evaluate_to_json(const EvaluateResult& result);
// standardized per-observation series for the scatter plot
std::string evaluate_scatter_csv(std::span<const measures::MeasureSet> sets);
// per-group Gaussian KDE of both standardized ratios
std::string evaluate_kde_csv(std::span<const measures::MeasureSet> sets);

// --- prediction --------------------------------------------------------------

// One row per observation with an svb score; duration left NaN when absent.
predict::FeatureMatrix build_feature_matrix(const Cohort& cohort,
                                            std::span<const measures::MeasureSet> sets);

std::string eval_reports_to_csv(std::span<const predict::EvalReport> reports);

// --- published summary-statistic fixtures -------------------------------------

struct SummaryCell {
    std::string group;
    std::string activity;  // "Combined" for the pooled Play row, "" for Total
    int n = 0;
    std::optional<double> duration_mean;
    std::optional<double> duration_sd;
    double ratio_mean = 0.0;
    double ratio_sd = 0.0;
    double human_coded_mean = 0.0;
    double human_coded_sd = 0.0;
};

std::vector<SummaryCell> parse_summary_fixture(const std::filesystem::path& path);

// Re-runs the study's group comparisons from summary statistics alone
// (Student t on (M, SD, N) cells; Hedges' g alongside).
std::vector<ComparisonResult> analyze_summary_fixture(std::span<const SummaryCell> cells);

}  // namespace gm::report
