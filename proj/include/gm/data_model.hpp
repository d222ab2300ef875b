#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace gm {

enum class TherapyGroup { PlayTherapy, StandardTherapy };
enum class Activity { HelloSong, MusicMaking, Reading };
enum class Gender { M, F };

std::string to_string(TherapyGroup g);
std::string to_string(Activity a);
std::string to_string(Gender g);
TherapyGroup group_from_string(const std::string& s);
Activity activity_from_string(const std::string& s);
Gender gender_from_string(const std::string& s);

// Reading is the Standard-Therapy activity; Hello Song and Music Making
// belong to Play Therapy.
TherapyGroup group_of(Activity a);

// One frame-level mutual-gaze confidence score for a (subject, partner) pair.
struct ScoreFrame {
    std::int64_t frame_index = 0;
    double score = 0.0;

    bool operator==(const ScoreFrame&) const = default;
};

// All scored frames for one (subject, partner) pair within a session,
// strictly increasing in frame_index.
struct ScoreStream {
    std::string subject_id;
    std::string partner_id;
    std::vector<ScoreFrame> frames;

    bool operator==(const ScoreStream&) const = default;
};

// Expert-coded child-looks-at-trainer interval, in seconds.
struct AnnotationInterval {
    double start_s = 0.0;
    double end_s = 0.0;

    bool operator==(const AnnotationInterval&) const = default;
};

// One therapy-session observation unit: a video clip's worth of score
// streams plus the expert annotations for it.
struct SessionRecord {
    std::string child_id;
    TherapyGroup group = TherapyGroup::PlayTherapy;
    Activity activity = Activity::MusicMaking;
    int session_index = 1;  // one of {1, 8, 16}
    double fps = 25.0;
    std::int64_t total_frames = 0;
    std::vector<ScoreStream> streams;  // every stream has subject_id == child_id
    std::vector<AnnotationInterval> annotations;

    bool operator==(const SessionRecord&) const = default;
};

struct ChildProfile {
    std::string child_id;
    double age = 0.0;  // years
    Gender gender = Gender::M;
    int ados_social_affect = 0;
    int level_of_functioning = 1;           // 1..3
    std::optional<double> svb_score;        // 1.0..4.0 in 0.5 steps

    bool operator==(const ChildProfile&) const = default;
};

// (child, activity) identifies one observation; a child doing two Play
// Therapy activities contributes two observations.
struct ObservationKey {
    std::string child_id;
    Activity activity = Activity::MusicMaking;

    auto operator<=>(const ObservationKey&) const = default;
};

struct Cohort {
    std::map<std::string, ChildProfile> profiles;
    // sorted by (child_id, activity, session_index); each observation is a
    // contiguous range
    std::vector<SessionRecord> sessions;

    bool operator==(const Cohort&) const = default;
};

struct Observation {
    ObservationKey key;
    TherapyGroup group = TherapyGroup::PlayTherapy;
    std::span<const SessionRecord> sessions;
};

// Groups a cohort's sessions into observations, ordered by key.
std::vector<Observation> group_observations(const Cohort& cohort);

// --- ingest ---------------------------------------------------------------

struct ScoreParseResult {
    std::vector<ScoreStream> streams;   // ordered by partner_id
    std::size_t excluded_rows = 0;      // trainer-trainer rows dropped
};

// Score CSV: header frame_index,subject_id,partner_id,score. Rows naming
// `subject` on either side become (subject, other) streams; rows between
// two other people (the trainers) are dropped and counted.
ScoreParseResult parse_scores(const std::filesystem::path& path, const std::string& subject);

// Annotation CSV: header start_s,end_s. Intervals are clipped to
// [0, total_frames/fps], merged when overlapping, and sorted.
std::vector<AnnotationInterval> parse_annotations(const std::filesystem::path& path,
                                                  double fps, std::int64_t total_frames);

// Profile CSV: header child_id,age,gender,ados_social_affect,
// level_of_functioning,svb_score (svb_score may be empty).
std::map<std::string, ChildProfile> parse_profiles(const std::filesystem::path& path);

// Manifest JSON; referenced paths resolve relative to the manifest's
// directory. Returns a fully validated Cohort.
Cohort parse_manifest(const std::filesystem::path& path);

// --- serialization (exact inverse of the parsers) ---------------------------

std::string scores_to_csv(std::span<const ScoreStream> streams);
std::string annotations_to_csv(std::span<const AnnotationInterval> intervals);
std::string profiles_to_csv(const std::map<std::string, ChildProfile>& profiles);

// Writes profiles.csv, scores/*.csv, annotations/*.csv and manifest.json
// under `dir`; parse_manifest on the result reproduces the cohort exactly.
// Returns the manifest path.
std::filesystem::path write_cohort(const Cohort& cohort, const std::filesystem::path& dir);

// Validates ChildProfile invariants (used by parser and by synth).
void validate_profile(const ChildProfile& profile);

// True when v lies on the 1.0..4.0 half-step grid.
bool on_svb_grid(double v);

}  // namespace gm
