#include "gm/report.hpp"

#include "gm/common.hpp"
#include "gm/csv.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <iostream>

namespace gm::report {

using measures::MeasureSet;
using nlohmann::json;

namespace {

const int kSessionIndices[3] = {1, 8, 16};

std::string opt_field(const std::optional<double>& v) {
    return v ? format_double(*v) : std::string();
}

}  // namespace

// --- measures CSV ------------------------------------------------------------

std::string measures_to_csv(std::span<const MeasureSet> sets) {
    std::string out =
        "child_id,activity,group,mutual_gaze_ratio,mutual_gaze_duration_frames,"
        "human_coded_ratio";
    for (int s : kSessionIndices) {
        out += ",session_" + std::to_string(s) + "_ratio";
        out += ",session_" + std::to_string(s) + "_duration";
    }
    out += '\n';
    for (const auto& m : sets) {
        out += m.key.child_id;
        out += ',';
        out += to_string(m.key.activity);
        out += ',';
        out += to_string(m.group);
        out += ',';
        out += format_double(m.mutual_gaze_ratio);
        out += ',';
        out += opt_field(m.mutual_gaze_duration_frames);
        out += ',';
        out += format_double(m.human_coded_ratio);
        for (int s : kSessionIndices) {
            auto it = m.per_session.find(s);
            if (it == m.per_session.end()) {
                out += ",,";
            } else {
                out += ',';
                out += format_double(it->second.ratio);
                out += ',';
                out += opt_field(it->second.duration_frames);
            }
        }
        out += '\n';
    }
    return out;
}

std::vector<MeasureSet> measures_from_csv_text(const std::string& text) {
    auto table = csv::read_string(text, "measures");
    std::vector<std::string> expected = {"child_id",
                                         "activity",
                                         "group",
                                         "mutual_gaze_ratio",
                                         "mutual_gaze_duration_frames",
                                         "human_coded_ratio"};
    for (int s : kSessionIndices) {
        expected.push_back("session_" + std::to_string(s) + "_ratio");
        expected.push_back("session_" + std::to_string(s) + "_duration");
    }
    csv::require_header(table, expected, "measures");

    std::vector<MeasureSet> sets;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        std::size_t line = table.line_numbers[r];
        MeasureSet m;
        m.key.child_id = row[0];
        m.key.activity = activity_from_string(row[1]);
        m.group = group_from_string(row[2]);
        m.mutual_gaze_ratio = csv::parse_number(row[3], "mutual_gaze_ratio", line);
        if (!row[4].empty()) {
            m.mutual_gaze_duration_frames = csv::parse_number(row[4], "duration", line);
        }
        m.human_coded_ratio = csv::parse_number(row[5], "human_coded_ratio", line);
        for (int s = 0; s < 3; ++s) {
            const auto& ratio_field = row[6 + 2 * static_cast<std::size_t>(s)];
            const auto& dur_field = row[7 + 2 * static_cast<std::size_t>(s)];
            if (ratio_field.empty()) continue;
            measures::SessionMeasures sm;
            sm.ratio = csv::parse_number(ratio_field, "session ratio", line);
            if (!dur_field.empty()) {
                sm.duration_frames = csv::parse_number(dur_field, "session duration", line);
            }
            m.per_session[kSessionIndices[s]] = sm;
        }
        sets.push_back(std::move(m));
    }
    return sets;
}

// --- analysis ----------------------------------------------------------------

TestChoice test_choice_from_string(const std::string& s) {
    if (s == "student") return TestChoice::Student;
    if (s == "welch") return TestChoice::Welch;
    if (s == "auto") return TestChoice::Auto;
    throw ValidationError("unknown test choice '" + s + "' (student|welch|auto)");
}

AnalysisPlan AnalysisPlan::standard_plan(TestChoice test) {
    AnalysisPlan plan;
    plan.comparisons = {
        {"ratio_by_group", Grouping::ByGroup, MeasureKind::Ratio, test},
        {"human_coded_by_group", Grouping::ByGroup, MeasureKind::HumanCoded, test},
        {"duration_by_group", Grouping::ByGroup, MeasureKind::Duration, test},
        {"ratio_within_play", Grouping::ByActivityWithinPlay, MeasureKind::Ratio, test},
        {"duration_within_play", Grouping::ByActivityWithinPlay, MeasureKind::Duration, test},
        {"ratio_by_session", Grouping::BySession, MeasureKind::Ratio, test},
        {"duration_by_session", Grouping::BySession, MeasureKind::Duration, test},
    };
    return plan;
}

namespace {

struct Samples {
    std::string side_a;
    std::string side_b;
    std::vector<double> a;
    std::vector<double> b;
    // observations whose value is absent (duration) and were dropped
    int dropped = 0;
};

std::optional<double> measure_value(const MeasureSet& m, MeasureKind kind) {
    switch (kind) {
        case MeasureKind::Ratio: return m.mutual_gaze_ratio;
        case MeasureKind::Duration: return m.mutual_gaze_duration_frames;
        case MeasureKind::HumanCoded: return m.human_coded_ratio;
    }
    return std::nullopt;
}

// t is oriented (a - b); sides are ordered to match the published signs
Samples collect_samples(std::span<const MeasureSet> sets, Grouping grouping,
                        MeasureKind kind) {
    Samples s;
    switch (grouping) {
        case Grouping::ByGroup: {
            s.side_a = "StandardTherapy";
            s.side_b = "PlayTherapy";
            for (const auto& m : sets) {
                auto v = measure_value(m, kind);
                if (!v) {
                    ++s.dropped;
                    continue;
                }
                (m.group == TherapyGroup::StandardTherapy ? s.a : s.b).push_back(*v);
            }
            break;
        }
        case Grouping::ByActivityWithinPlay: {
            s.side_a = "MusicMaking";
            s.side_b = "HelloSong";
            for (const auto& m : sets) {
                if (m.group != TherapyGroup::PlayTherapy) continue;
                auto v = measure_value(m, kind);
                if (!v) {
                    ++s.dropped;
                    continue;
                }
                (m.key.activity == Activity::MusicMaking ? s.a : s.b).push_back(*v);
            }
            break;
        }
        case Grouping::BySession: {
            s.side_a = "session_1";
            s.side_b = "session_16";
            for (const auto& m : sets) {
                for (int side = 0; side < 2; ++side) {
                    auto it = m.per_session.find(side == 0 ? 1 : 16);
                    if (it == m.per_session.end()) {
                        ++s.dropped;
                        continue;
                    }
                    std::optional<double> v =
                        kind == MeasureKind::Duration
                            ? it->second.duration_frames
                            : std::optional<double>(it->second.ratio);
                    if (!v) {
                        ++s.dropped;
                        continue;
                    }
                    (side == 0 ? s.a : s.b).push_back(*v);
                }
            }
            break;
        }
    }
    return s;
}

}  // namespace

std::vector<ComparisonResult> run_analysis(std::span<const MeasureSet> sets,
                                           const AnalysisPlan& plan) {
    std::vector<ComparisonResult> results;
    for (const auto& cmp : plan.comparisons) {
        if (cmp.grouping == Grouping::BySession && cmp.measure == MeasureKind::HumanCoded) {
            throw ValidationError(cmp.name + ": human-coded ratio has no per-session values");
        }
        auto samples = collect_samples(sets, cmp.grouping, cmp.measure);
        ComparisonResult res;
        res.name = cmp.name;
        res.side_a = samples.side_a;
        res.side_b = samples.side_b;
        res.n_a = static_cast<int>(samples.a.size());
        res.n_b = static_cast<int>(samples.b.size());
        if (res.n_a < 2 || res.n_b < 2) {
            res.skipped = true;
            res.note = "insufficient observations";
            results.push_back(std::move(res));
            continue;
        }
        TestChoice choice = cmp.test;
        if (choice == TestChoice::Auto) {
            choice = samples.dropped > 0 ? TestChoice::Welch : TestChoice::Student;
            res.note = std::string("auto: ") +
                       (choice == TestChoice::Welch ? "welch (missing values dropped)"
                                                    : "student (complete data)");
        }
        res.ttest = choice == TestChoice::Welch ? stats::welch_t(samples.a, samples.b)
                                                : stats::student_t(samples.a, samples.b);
        auto ma = stats::mean_sd(samples.a);
        auto mb = stats::mean_sd(samples.b);
        try {
            res.hedges_g =
                stats::hedges_g(ma.mean, ma.sd, res.n_a, mb.mean, mb.sd, res.n_b).hedges_g;
        } catch (const std::invalid_argument&) {
            // zero pooled sd with equal means already yields t = 0; g stays absent
        }
        results.push_back(std::move(res));
    }
    return results;
}

namespace {

// mean always reported; sd only when two or more values back it
struct MeanSdField {
    std::optional<double> mean;
    std::optional<double> sd;
};

MeanSdField summarize(const std::vector<double>& values) {
    MeanSdField field;
    if (values.empty()) return field;
    if (values.size() == 1) {
        field.mean = values.front();
        return field;
    }
    auto ms = stats::mean_sd(values);
    field.mean = ms.mean;
    field.sd = ms.sd;
    return field;
}

struct CellStats {
    int n = 0;
    int duration_n = 0;
    MeanSdField duration;
    MeanSdField ratio;
    MeanSdField human_coded;
};

CellStats cell_from(const std::vector<const MeasureSet*>& items) {
    CellStats cell;
    cell.n = static_cast<int>(items.size());
    std::vector<double> ratios, hcrs, durations;
    for (const auto* m : items) {
        ratios.push_back(m->mutual_gaze_ratio);
        hcrs.push_back(m->human_coded_ratio);
        if (m->mutual_gaze_duration_frames) durations.push_back(*m->mutual_gaze_duration_frames);
    }
    cell.duration_n = static_cast<int>(durations.size());
    cell.ratio = summarize(ratios);
    cell.human_coded = summarize(hcrs);
    cell.duration = summarize(durations);
    return cell;
}

void append_mean_sd(std::string& out, const MeanSdField& field) {
    out += ',';
    if (field.mean) out += format_double(*field.mean);
    out += ',';
    if (field.sd) out += format_double(*field.sd);
}

void append_cell_row(std::string& out, const std::string& group, const std::string& activity,
                     const CellStats& cell) {
    out += group;
    out += ',';
    out += activity;
    out += ',';
    out += std::to_string(cell.n);
    out += ',';
    out += std::to_string(cell.duration_n);
    append_mean_sd(out, cell.duration);
    append_mean_sd(out, cell.ratio);
    append_mean_sd(out, cell.human_coded);
    out += '\n';
}

}  // namespace

std::string groups_table_csv(std::span<const MeasureSet> sets) {
    std::string out =
        "group,activity,n,duration_n,duration_mean,duration_sd,ratio_mean,ratio_sd,"
        "human_coded_mean,human_coded_sd\n";

    auto select = [&](auto pred) {
        std::vector<const MeasureSet*> items;
        for (const auto& m : sets) {
            if (pred(m)) items.push_back(&m);
        }
        return items;
    };

    struct RowSpec {
        std::string group;
        std::string activity;
    };
    const RowSpec rows[] = {
        {"PlayTherapy", "HelloSong"},
        {"PlayTherapy", "MusicMaking"},
        {"PlayTherapy", "Combined"},
        {"StandardTherapy", "Reading"},
        {"Total", ""},
    };
    for (const auto& spec : rows) {
        auto items = select([&](const MeasureSet& m) {
            if (spec.group == "Total") return true;
            if (m.group != group_from_string(spec.group)) return false;
            if (spec.activity == "Combined") return true;
            return m.key.activity == activity_from_string(spec.activity);
        });
        if (items.empty()) continue;
        append_cell_row(out, spec.group, spec.activity, cell_from(items));
    }
    return out;
}

std::string sessions_table_csv(std::span<const MeasureSet> sets) {
    std::string out =
        "activity,session,n,duration_n,duration_mean,duration_sd,ratio_mean,ratio_sd\n";
    struct Key {
        std::string activity;  // "Total" pools everything
        int session;
        const char* label;
    };
    const Key keys[] = {
        {"MusicMaking", 1, "early"},  {"MusicMaking", 16, "late"},
        {"HelloSong", 1, "early"},    {"HelloSong", 16, "late"},
        {"Reading", 1, "early"},      {"Reading", 16, "late"},
        {"Total", 1, "early"},        {"Total", 16, "late"},
    };
    for (const auto& key : keys) {
        std::vector<double> ratios, durations;
        for (const auto& m : sets) {
            if (key.activity != "Total" &&
                m.key.activity != activity_from_string(key.activity)) {
                continue;
            }
            auto it = m.per_session.find(key.session);
            if (it == m.per_session.end()) continue;
            ratios.push_back(it->second.ratio);
            if (it->second.duration_frames) durations.push_back(*it->second.duration_frames);
        }
        if (ratios.empty()) continue;
        out += key.activity;
        out += ',';
        out += key.label;
        out += ',';
        out += std::to_string(ratios.size());
        out += ',';
        out += std::to_string(durations.size());
        append_mean_sd(out, summarize(durations));
        append_mean_sd(out, summarize(ratios));
        out += '\n';
    }
    return out;
}

double quantile(std::vector<double> values, double p) {
    if (values.empty()) throw std::invalid_argument("quantile: empty input");
    std::sort(values.begin(), values.end());
    double h = p * (static_cast<double>(values.size()) - 1.0);
    std::size_t lo = static_cast<std::size_t>(std::floor(h));
    std::size_t hi = std::min(lo + 1, values.size() - 1);
    double frac = h - std::floor(h);
    return values[lo] + frac * (values[hi] - values[lo]);
}

std::string boxplot_csv(std::span<const MeasureSet> sets) {
    std::string out = "grouping,label,measure,n,min,q1,median,q3,max\n";

    auto emit = [&](const std::string& grouping, const std::string& label,
                    const std::string& measure, const std::vector<double>& values) {
        if (values.empty()) return;
        out += grouping;
        out += ',';
        out += label;
        out += ',';
        out += measure;
        out += ',';
        out += std::to_string(values.size());
        for (double p : {0.0, 0.25, 0.5, 0.75, 1.0}) {
            out += ',';
            out += format_double(quantile(values, p));
        }
        out += '\n';
    };

    auto collect = [&](auto pred, MeasureKind kind) {
        std::vector<double> values;
        for (const auto& m : sets) {
            if (!pred(m)) continue;
            if (auto v = measure_value(m, kind)) values.push_back(*v);
        }
        return values;
    };

    struct Slice {
        const char* grouping;
        const char* label;
    };
    const Slice group_slices[] = {{"group", "PlayTherapy"}, {"group", "StandardTherapy"}};
    const MeasureKind kinds[] = {MeasureKind::Ratio, MeasureKind::Duration,
                                 MeasureKind::HumanCoded};
    const char* kind_names[] = {"mutual_gaze_ratio", "mutual_gaze_duration",
                                "human_coded_ratio"};
    for (const auto& slice : group_slices) {
        auto group = group_from_string(slice.label);
        for (int k = 0; k < 3; ++k) {
            emit(slice.grouping, slice.label, kind_names[k],
                 collect([&](const MeasureSet& m) { return m.group == group; }, kinds[k]));
        }
    }
    for (Activity activity : {Activity::HelloSong, Activity::MusicMaking}) {
        for (int k = 0; k < 2; ++k) {  // ratio and duration, the published pair
            emit("activity", to_string(activity), kind_names[k],
                 collect([&](const MeasureSet& m) { return m.key.activity == activity; },
                         kinds[k]));
        }
    }
    return out;
}

namespace {

json comparison_to_json(const ComparisonResult& res) {
    json j;
    j["name"] = res.name;
    j["side_a"] = res.side_a;
    j["side_b"] = res.side_b;
    j["n_a"] = res.n_a;
    j["n_b"] = res.n_b;
    j["skipped"] = res.skipped;
    if (!res.skipped) {
        j["method"] =
            res.ttest.method == stats::TTestMethod::Welch ? "welch" : "student";
        j["t"] = res.ttest.t;
        j["df"] = res.ttest.df;
        j["p"] = res.ttest.p_two_sided;
        if (res.hedges_g) j["hedges_g"] = *res.hedges_g;
    }
    if (!res.note.empty()) j["note"] = res.note;
    return j;
}

}  // namespace

std::string analysis_to_json(std::span<const ComparisonResult> results) {
    json j = json::array();
    for (const auto& res : results) j.push_back(comparison_to_json(res));
    return j.dump(2) + "\n";
}

// --- framework evaluation ------------------------------------------------------

EvaluateResult evaluate_measures(std::span<const MeasureSet> sets) {
    if (sets.size() < 3) {
        throw std::invalid_argument("evaluate: need at least 3 observations");
    }
    std::vector<double> human, framework;
    for (const auto& m : sets) {
        human.push_back(m.human_coded_ratio);
        framework.push_back(m.mutual_gaze_ratio);
    }
    EvaluateResult result;
    result.n = static_cast<int>(sets.size());
    // framework ratio regressed on the hand-coded ground truth
    result.corr = stats::pearson(human, framework);
    return result;
}

std::string evaluate_to_json(const EvaluateResult& result) {
    json j;
    j["n"] = result.n;
    j["r"] = result.corr.r;
    j["f_stat"] = result.corr.f_stat;
    j["df"] = {1, result.corr.df_den};
    j["p"] = result.corr.p;
    j["rmse"] = result.corr.rmse;
    j["slope"] = result.corr.slope;
    j["intercept"] = result.corr.intercept;
    return j.dump(2) + "\n";
}

namespace {

struct StandardizedSeries {
    std::vector<double> framework_z;
    std::vector<double> human_z;
};

StandardizedSeries standardize(std::span<const MeasureSet> sets) {
    std::vector<double> framework, human;
    for (const auto& m : sets) {
        framework.push_back(m.mutual_gaze_ratio);
        human.push_back(m.human_coded_ratio);
    }
    return StandardizedSeries{stats::zscore(framework), stats::zscore(human)};
}

}  // namespace

std::string evaluate_scatter_csv(std::span<const MeasureSet> sets) {
    auto z = standardize(sets);
    std::string out =
        "child_id,activity,group,mutual_gaze_ratio,human_coded_ratio,"
        "mutual_gaze_ratio_z,human_coded_ratio_z\n";
    for (std::size_t i = 0; i < sets.size(); ++i) {
        const auto& m = sets[i];
        out += m.key.child_id;
        out += ',';
        out += to_string(m.key.activity);
        out += ',';
        out += to_string(m.group);
        out += ',';
        out += format_double(m.mutual_gaze_ratio);
        out += ',';
        out += format_double(m.human_coded_ratio);
        out += ',';
        out += format_double(z.framework_z[i]);
        out += ',';
        out += format_double(z.human_z[i]);
        out += '\n';
    }
    return out;
}

std::string evaluate_kde_csv(std::span<const MeasureSet> sets) {
    auto z = standardize(sets);
    std::string out = "group,measure,x,density\n";

    const int grid_points = 161;
    std::vector<double> grid(grid_points);
    for (int i = 0; i < grid_points; ++i) {
        grid[static_cast<std::size_t>(i)] = -4.0 + 8.0 * i / (grid_points - 1);
    }

    for (TherapyGroup group : {TherapyGroup::PlayTherapy, TherapyGroup::StandardTherapy}) {
        for (int which = 0; which < 2; ++which) {
            std::vector<double> values;
            for (std::size_t i = 0; i < sets.size(); ++i) {
                if (sets[i].group != group) continue;
                values.push_back(which == 0 ? z.framework_z[i] : z.human_z[i]);
            }
            if (values.size() < 2) {
                std::cerr << "note: KDE skipped for " << to_string(group)
                          << " (fewer than 2 observations)\n";
                continue;
            }
            std::vector<double> density;
            try {
                density = stats::kde_gaussian(values, grid);
            } catch (const std::invalid_argument&) {
                std::cerr << "note: KDE skipped for " << to_string(group)
                          << " (degenerate values)\n";
                continue;
            }
            const char* measure = which == 0 ? "mutual_gaze_ratio" : "human_coded_ratio";
            for (int i = 0; i < grid_points; ++i) {
                out += to_string(group);
                out += ',';
                out += measure;
                out += ',';
                out += format_double(grid[static_cast<std::size_t>(i)]);
                out += ',';
                out += format_double(density[static_cast<std::size_t>(i)]);
                out += '\n';
            }
        }
    }
    return out;
}

// --- prediction ----------------------------------------------------------------

predict::FeatureMatrix build_feature_matrix(const Cohort& cohort,
                                            std::span<const MeasureSet> sets) {
    predict::FeatureMatrix matrix;
    matrix.feature_names = {"mutual_gaze_ratio", "mutual_gaze_duration",
                            "level_of_functioning", "ados_social_affect"};
    int dropped = 0;
    for (const auto& m : sets) {
        auto it = cohort.profiles.find(m.key.child_id);
        if (it == cohort.profiles.end()) {
            throw ValidationError("no profile for child '" + m.key.child_id + "'");
        }
        const auto& profile = it->second;
        if (!profile.svb_score) {
            ++dropped;
            continue;
        }
        matrix.rows.push_back(
            {m.mutual_gaze_ratio,
             m.mutual_gaze_duration_frames ? *m.mutual_gaze_duration_frames
                                           : std::nan(""),
             static_cast<double>(profile.level_of_functioning),
             static_cast<double>(profile.ados_social_affect)});
        matrix.targets.push_back(*profile.svb_score);
        matrix.row_ids.push_back(m.key.child_id + "/" + to_string(m.key.activity));
    }
    if (dropped > 0) {
        std::cerr << "note: dropped " << dropped << " observation(s) without svb_score\n";
    }
    if (matrix.rows.empty()) {
        throw ValidationError("no observation carries an svb_score");
    }
    return matrix;
}

std::string eval_reports_to_csv(std::span<const predict::EvalReport> reports) {
    std::string out = "model,setting,mae,rmse,r2,B,seed\n";
    for (const auto& r : reports) {
        out += r.model_name;
        out += ',';
        out += to_string(r.setting);
        out += ',';
        out += format_double(r.mae);
        out += ',';
        out += format_double(r.rmse);
        out += ',';
        out += format_double(r.r2);
        out += ',';
        out += std::to_string(r.n_bootstrap);
        out += ',';
        out += std::to_string(r.seed);
        out += '\n';
    }
    return out;
}

// --- summary fixtures ------------------------------------------------------------

std::vector<SummaryCell> parse_summary_fixture(const std::filesystem::path& path) {
    auto table = csv::read_file(path);
    csv::require_header(table,
                        {"group", "activity", "n", "duration_mean", "duration_sd",
                         "ratio_mean", "ratio_sd", "human_coded_mean", "human_coded_sd"},
                        path.filename().string());
    std::vector<SummaryCell> cells;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        std::size_t line = table.line_numbers[r];
        SummaryCell cell;
        cell.group = row[0];
        cell.activity = row[1];
        cell.n = static_cast<int>(csv::parse_integer(row[2], "n", line));
        if (!row[3].empty()) cell.duration_mean = csv::parse_number(row[3], "duration_mean", line);
        if (!row[4].empty()) cell.duration_sd = csv::parse_number(row[4], "duration_sd", line);
        cell.ratio_mean = csv::parse_number(row[5], "ratio_mean", line);
        cell.ratio_sd = csv::parse_number(row[6], "ratio_sd", line);
        cell.human_coded_mean = csv::parse_number(row[7], "human_coded_mean", line);
        cell.human_coded_sd = csv::parse_number(row[8], "human_coded_sd", line);
        cells.push_back(cell);
    }
    return cells;
}

namespace {

const SummaryCell* find_cell(std::span<const SummaryCell> cells, const std::string& group,
                             const std::string& activity) {
    for (const auto& c : cells) {
        if (c.group == group && c.activity == activity) return &c;
    }
    return nullptr;
}

ComparisonResult summary_comparison(const std::string& name, const SummaryCell& a,
                                    const SummaryCell& b, const std::string& label_a,
                                    const std::string& label_b, MeasureKind kind) {
    double m1 = 0.0, s1 = 0.0, m2 = 0.0, s2 = 0.0;
    switch (kind) {
        case MeasureKind::Ratio:
            m1 = a.ratio_mean, s1 = a.ratio_sd;
            m2 = b.ratio_mean, s2 = b.ratio_sd;
            break;
        case MeasureKind::HumanCoded:
            m1 = a.human_coded_mean, s1 = a.human_coded_sd;
            m2 = b.human_coded_mean, s2 = b.human_coded_sd;
            break;
        case MeasureKind::Duration:
            m1 = a.duration_mean.value(), s1 = a.duration_sd.value();
            m2 = b.duration_mean.value(), s2 = b.duration_sd.value();
            break;
    }
    ComparisonResult res;
    res.name = name;
    res.side_a = label_a;
    res.side_b = label_b;
    res.n_a = a.n;
    res.n_b = b.n;
    res.ttest = stats::student_t_summary(m1, s1, a.n, m2, s2, b.n);
    res.hedges_g = stats::hedges_g(m1, s1, a.n, m2, s2, b.n).hedges_g;
    return res;
}

}  // namespace

std::vector<ComparisonResult> analyze_summary_fixture(std::span<const SummaryCell> cells) {
    const auto* play = find_cell(cells, "PlayTherapy", "Combined");
    const auto* standard = find_cell(cells, "StandardTherapy", "Reading");
    const auto* hello = find_cell(cells, "PlayTherapy", "HelloSong");
    const auto* music = find_cell(cells, "PlayTherapy", "MusicMaking");
    if (!play || !standard || !hello || !music) {
        throw ValidationError("summary fixture is missing required cells");
    }

    std::vector<ComparisonResult> results;
    results.push_back(summary_comparison("ratio_by_group", *standard, *play,
                                         "StandardTherapy", "PlayTherapy",
                                         MeasureKind::Ratio));
    results.push_back(summary_comparison("human_coded_by_group", *standard, *play,
                                         "StandardTherapy", "PlayTherapy",
                                         MeasureKind::HumanCoded));
    results.push_back(summary_comparison("duration_by_group", *standard, *play,
                                         "StandardTherapy", "PlayTherapy",
                                         MeasureKind::Duration));
    results.push_back(summary_comparison("ratio_within_play", *music, *hello, "MusicMaking",
                                         "HelloSong", MeasureKind::Ratio));
    results.push_back(summary_comparison("duration_within_play", *music, *hello,
                                         "MusicMaking", "HelloSong", MeasureKind::Duration));
    return results;
}

}  // namespace gm::report
