#include "gm/data_model.hpp"

#include "gm/common.hpp"
#include "gm/csv.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

namespace gm {

using nlohmann::json;

std::string to_string(TherapyGroup g) {
    return g == TherapyGroup::PlayTherapy ? "PlayTherapy" : "StandardTherapy";
}

std::string to_string(Activity a) {
    switch (a) {
        case Activity::HelloSong: return "HelloSong";
        case Activity::MusicMaking: return "MusicMaking";
        case Activity::Reading: return "Reading";
    }
    return "?";
}

std::string to_string(Gender g) { return g == Gender::M ? "M" : "F"; }

TherapyGroup group_from_string(const std::string& s) {
    if (s == "PlayTherapy") return TherapyGroup::PlayTherapy;
    if (s == "StandardTherapy") return TherapyGroup::StandardTherapy;
    throw ValidationError("unknown therapy group '" + s + "'");
}

Activity activity_from_string(const std::string& s) {
    if (s == "HelloSong") return Activity::HelloSong;
    if (s == "MusicMaking") return Activity::MusicMaking;
    if (s == "Reading") return Activity::Reading;
    throw ValidationError("unknown activity '" + s + "'");
}

Gender gender_from_string(const std::string& s) {
    if (s == "M") return Gender::M;
    if (s == "F") return Gender::F;
    throw ValidationError("unknown gender '" + s + "' (expected M or F)");
}

TherapyGroup group_of(Activity a) {
    return a == Activity::Reading ? TherapyGroup::StandardTherapy : TherapyGroup::PlayTherapy;
}

std::vector<Observation> group_observations(const Cohort& cohort) {
    std::vector<Observation> out;
    std::size_t i = 0;
    const auto& sessions = cohort.sessions;
    while (i < sessions.size()) {
        std::size_t j = i;
        while (j < sessions.size() && sessions[j].child_id == sessions[i].child_id &&
               sessions[j].activity == sessions[i].activity) {
            ++j;
        }
        Observation obs;
        obs.key = ObservationKey{sessions[i].child_id, sessions[i].activity};
        obs.group = sessions[i].group;
        obs.sessions = std::span<const SessionRecord>(sessions.data() + i, j - i);
        out.push_back(obs);
        i = j;
    }
    return out;
}

bool on_svb_grid(double v) {
    if (v < 1.0 - 1e-9 || v > 4.0 + 1e-9) return false;
    double doubled = v * 2.0;
    return std::abs(doubled - std::round(doubled)) < 1e-9;
}

void validate_profile(const ChildProfile& p) {
    if (p.child_id.empty()) throw ValidationError("profile with empty child_id");
    if (p.ados_social_affect < 0) {
        throw ValidationError(p.child_id + ": ados_social_affect must be >= 0");
    }
    if (p.level_of_functioning < 1 || p.level_of_functioning > 3) {
        throw ValidationError(p.child_id + ": level_of_functioning must be in {1,2,3}");
    }
    if (p.svb_score && !on_svb_grid(*p.svb_score)) {
        throw ValidationError(p.child_id + ": svb_score " + format_double(*p.svb_score) +
                              " is off the 1.0..4.0 half-step grid");
    }
}

// --- scores -----------------------------------------------------------------

ScoreParseResult parse_scores(const std::filesystem::path& path, const std::string& subject) {
    auto table = csv::read_file(path);
    csv::require_header(table, {"frame_index", "subject_id", "partner_id", "score"},
                        path.filename().string());

    ScoreParseResult result;
    std::map<std::string, ScoreStream> by_partner;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        std::size_t line = table.line_numbers[r];
        long long frame = csv::parse_integer(row[0], "frame_index", line);
        if (frame < 0) throw ParseError("negative frame_index", line);
        const std::string& a = row[1];
        const std::string& b = row[2];
        double score = csv::parse_number(row[3], "score", line);
        if (!(score >= 0.0 && score <= 1.0)) {
            throw ParseError("score " + row[3] + " outside [0,1]", line);
        }
        std::string partner;
        if (a == subject) {
            partner = b;
        } else if (b == subject) {
            partner = a;  // pair order in the file is not significant
        } else {
            ++result.excluded_rows;  // trainer-trainer row
            continue;
        }
        if (partner == subject) throw ParseError("pair of " + subject + " with itself", line);
        auto& stream = by_partner[partner];
        stream.subject_id = subject;
        stream.partner_id = partner;
        stream.frames.push_back(ScoreFrame{frame, score});
    }

    for (auto& [partner, stream] : by_partner) {
        std::sort(stream.frames.begin(), stream.frames.end(),
                  [](const ScoreFrame& x, const ScoreFrame& y) {
                      return x.frame_index < y.frame_index;
                  });
        for (std::size_t i = 1; i < stream.frames.size(); ++i) {
            if (stream.frames[i].frame_index == stream.frames[i - 1].frame_index) {
                throw ValidationError(path.filename().string() + ": duplicate frame " +
                                      std::to_string(stream.frames[i].frame_index) +
                                      " for pair (" + subject + "," + partner + ")");
            }
        }
        result.streams.push_back(std::move(stream));
    }
    return result;
}

// --- annotations -------------------------------------------------------------

std::vector<AnnotationInterval> parse_annotations(const std::filesystem::path& path,
                                                  double fps, std::int64_t total_frames) {
    auto table = csv::read_file(path);
    csv::require_header(table, {"start_s", "end_s"}, path.filename().string());

    double horizon = static_cast<double>(total_frames) / fps;
    std::vector<AnnotationInterval> intervals;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        std::size_t line = table.line_numbers[r];
        double start = csv::parse_number(table.rows[r][0], "start_s", line);
        double end = csv::parse_number(table.rows[r][1], "end_s", line);
        if (start < 0.0 || end < 0.0) throw ParseError("negative time", line);
        if (start >= end) throw ParseError("start_s >= end_s", line);
        start = std::min(start, horizon);
        end = std::min(end, horizon);
        if (start >= end) continue;  // clipped away entirely
        intervals.push_back(AnnotationInterval{start, end});
    }

    std::sort(intervals.begin(), intervals.end(),
              [](const AnnotationInterval& a, const AnnotationInterval& b) {
                  return a.start_s < b.start_s;
              });
    std::vector<AnnotationInterval> merged;
    for (const auto& iv : intervals) {
        if (!merged.empty() && iv.start_s <= merged.back().end_s) {
            merged.back().end_s = std::max(merged.back().end_s, iv.end_s);
        } else {
            merged.push_back(iv);
        }
    }
    return merged;
}

// --- profiles ----------------------------------------------------------------

std::map<std::string, ChildProfile> parse_profiles(const std::filesystem::path& path) {
    auto table = csv::read_file(path);
    csv::require_header(table,
                        {"child_id", "age", "gender", "ados_social_affect",
                         "level_of_functioning", "svb_score"},
                        path.filename().string());

    std::map<std::string, ChildProfile> profiles;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        std::size_t line = table.line_numbers[r];
        ChildProfile p;
        p.child_id = row[0];
        p.age = csv::parse_number(row[1], "age", line);
        p.gender = gender_from_string(row[2]);
        p.ados_social_affect =
            static_cast<int>(csv::parse_integer(row[3], "ados_social_affect", line));
        p.level_of_functioning =
            static_cast<int>(csv::parse_integer(row[4], "level_of_functioning", line));
        if (!row[5].empty()) {
            p.svb_score = csv::parse_number(row[5], "svb_score", line);
        }
        validate_profile(p);
        if (!profiles.emplace(p.child_id, std::move(p)).second) {
            throw ValidationError("duplicate profile for child '" + row[0] + "'");
        }
    }
    return profiles;
}

// --- manifest ----------------------------------------------------------------

namespace {

void validate_session(const SessionRecord& s) {
    if (s.session_index != 1 && s.session_index != 8 && s.session_index != 16) {
        throw ValidationError(s.child_id + ": session_index " +
                              std::to_string(s.session_index) + " not in {1,8,16}");
    }
    if (!(s.fps > 0.0)) throw ValidationError(s.child_id + ": fps must be positive");
    if (s.total_frames <= 0) throw ValidationError(s.child_id + ": total_frames must be positive");
    if (group_of(s.activity) != s.group) {
        throw ValidationError(s.child_id + ": activity " + to_string(s.activity) +
                              " inconsistent with group " + to_string(s.group));
    }
    for (const auto& stream : s.streams) {
        if (stream.subject_id != s.child_id) {
            throw ValidationError(s.child_id + ": stream subject '" + stream.subject_id +
                                  "' is not the session child");
        }
        for (std::size_t i = 0; i < stream.frames.size(); ++i) {
            const auto& f = stream.frames[i];
            if (f.frame_index >= s.total_frames) {
                throw ValidationError(s.child_id + ": frame_index " +
                                      std::to_string(f.frame_index) + " >= total_frames " +
                                      std::to_string(s.total_frames));
            }
            if (i > 0 && f.frame_index <= stream.frames[i - 1].frame_index) {
                throw ValidationError(s.child_id + ": stream frames not strictly increasing");
            }
        }
    }
}

}  // namespace

Cohort parse_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }

    auto base = path.parent_path();
    auto resolve = [&](const std::string& p) { return base / p; };

    Cohort cohort;
    try {
        cohort.profiles = parse_profiles(resolve(doc.at("profiles_path").get<std::string>()));
        std::set<ObservationKey> seen;
        for (const auto& obs : doc.at("observations")) {
            std::string child_id = obs.at("child_id").get<std::string>();
            auto group = group_from_string(obs.at("group").get<std::string>());
            auto activity = activity_from_string(obs.at("activity").get<std::string>());
            if (!cohort.profiles.count(child_id)) {
                throw ValidationError("manifest references unknown child '" + child_id + "'");
            }
            if (!seen.insert(ObservationKey{child_id, activity}).second) {
                throw ValidationError("duplicate observation (" + child_id + ", " +
                                      to_string(activity) + ")");
            }
            for (const auto& js : obs.at("sessions")) {
                SessionRecord s;
                s.child_id = child_id;
                s.group = group;
                s.activity = activity;
                s.session_index = js.at("session_index").get<int>();
                s.fps = js.value("fps", 25.0);
                s.total_frames = js.at("total_frames").get<std::int64_t>();
                auto scores = parse_scores(resolve(js.at("scores_path").get<std::string>()),
                                           child_id);
                s.streams = std::move(scores.streams);
                if (js.contains("annotations_path")) {
                    s.annotations = parse_annotations(
                        resolve(js.at("annotations_path").get<std::string>()), s.fps,
                        s.total_frames);
                }
                validate_session(s);
                cohort.sessions.push_back(std::move(s));
            }
        }
    } catch (const json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }

    std::sort(cohort.sessions.begin(), cohort.sessions.end(),
              [](const SessionRecord& a, const SessionRecord& b) {
                  return std::tie(a.child_id, a.activity, a.session_index) <
                         std::tie(b.child_id, b.activity, b.session_index);
              });
    for (std::size_t i = 1; i < cohort.sessions.size(); ++i) {
        const auto& a = cohort.sessions[i - 1];
        const auto& b = cohort.sessions[i];
        if (a.child_id == b.child_id && a.activity == b.activity &&
            a.session_index == b.session_index) {
            throw ValidationError("duplicate session " + std::to_string(a.session_index) +
                                  " for (" + a.child_id + ", " + to_string(a.activity) + ")");
        }
    }
    return cohort;
}

// --- serialization -------------------------------------------------------------

std::string scores_to_csv(std::span<const ScoreStream> streams) {
    std::string out = "frame_index,subject_id,partner_id,score\n";
    for (const auto& stream : streams) {
        for (const auto& f : stream.frames) {
            out += std::to_string(f.frame_index);
            out += ',';
            out += stream.subject_id;
            out += ',';
            out += stream.partner_id;
            out += ',';
            out += format_double(f.score);
            out += '\n';
        }
    }
    return out;
}

std::string annotations_to_csv(std::span<const AnnotationInterval> intervals) {
    std::string out = "start_s,end_s\n";
    for (const auto& iv : intervals) {
        out += format_double(iv.start_s);
        out += ',';
        out += format_double(iv.end_s);
        out += '\n';
    }
    return out;
}

std::string profiles_to_csv(const std::map<std::string, ChildProfile>& profiles) {
    std::string out = "child_id,age,gender,ados_social_affect,level_of_functioning,svb_score\n";
    for (const auto& [id, p] : profiles) {
        out += id;
        out += ',';
        out += format_double(p.age);
        out += ',';
        out += to_string(p.gender);
        out += ',';
        out += std::to_string(p.ados_social_affect);
        out += ',';
        out += std::to_string(p.level_of_functioning);
        out += ',';
        if (p.svb_score) out += format_double(*p.svb_score);
        out += '\n';
    }
    return out;
}

std::filesystem::path write_cohort(const Cohort& cohort, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir / "scores");
    std::filesystem::create_directories(dir / "annotations");
    csv::write_file_atomic(dir / "profiles.csv", profiles_to_csv(cohort.profiles));

    json manifest;
    manifest["profiles_path"] = "profiles.csv";
    manifest["observations"] = json::array();

    for (const auto& obs : group_observations(cohort)) {
        json jobs;
        jobs["child_id"] = obs.key.child_id;
        jobs["group"] = to_string(obs.group);
        jobs["activity"] = to_string(obs.key.activity);
        jobs["sessions"] = json::array();
        for (const auto& s : obs.sessions) {
            std::string stem = s.child_id + "_" + to_string(s.activity) + "_s" +
                               std::to_string(s.session_index);
            std::string scores_rel = "scores/" + stem + ".csv";
            std::string annot_rel = "annotations/" + stem + ".csv";
            csv::write_file_atomic(dir / scores_rel, scores_to_csv(s.streams));
            csv::write_file_atomic(dir / annot_rel, annotations_to_csv(s.annotations));
            json js;
            js["session_index"] = s.session_index;
            js["fps"] = s.fps;
            js["total_frames"] = s.total_frames;
            js["scores_path"] = scores_rel;
            js["annotations_path"] = annot_rel;
            jobs["sessions"].push_back(std::move(js));
        }
        manifest["observations"].push_back(std::move(jobs));
    }

    auto manifest_path = dir / "manifest.json";
    csv::write_file_atomic(manifest_path, manifest.dump(2) + "\n");
    return manifest_path;
}

}  // namespace gm
