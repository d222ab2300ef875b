#pragma once

#include "gm/data_model.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

namespace gm::measures {

struct MeasureConfig {
    // A frame shows mutual gaze when its score is strictly above this.
    double score_threshold = 0.6;
    // A run counts toward duration when longer than this many seconds
    // (> round(min_run_seconds * fps) frames).
    double min_run_seconds = 1.0;
};

void validate(const MeasureConfig& cfg);

struct GazeRun {
    std::int64_t start_frame = 0;
    std::int64_t length = 0;

    bool operator==(const GazeRun&) const = default;
};

struct SessionMeasures {
    double ratio = 0.0;
    std::optional<double> duration_frames;

    bool operator==(const SessionMeasures&) const = default;
};

// Per-observation measure set, pooled over that observation's sessions.
struct MeasureSet {
    ObservationKey key;
    TherapyGroup group = TherapyGroup::PlayTherapy;
    double mutual_gaze_ratio = 0.0;
    std::optional<double> mutual_gaze_duration_frames;  // absent: no qualifying run
    double human_coded_ratio = 0.0;
    std::map<int, SessionMeasures> per_session;

    bool operator==(const MeasureSet&) const = default;
};

// Element t is true iff any of the child's streams scores frame t strictly
// above the threshold. Frames with no data are false.
std::vector<std::uint8_t> binarize(const SessionRecord& session, const MeasureConfig& cfg);

// Maximal runs of true, as (start, length) pairs.
std::vector<GazeRun> gaze_runs(std::span<const std::uint8_t> binarized);

// Frames above threshold over all sessions, divided by total frames
// (pooled across sessions, not averaged per session).
double mutual_gaze_ratio(std::span<const SessionRecord> sessions, const MeasureConfig& cfg);

// Mean length in frames of runs longer than round(min_run_seconds * fps),
// pooled across sessions; absent when no run qualifies.
std::optional<double> mutual_gaze_duration(std::span<const SessionRecord> sessions,
                                           const MeasureConfig& cfg);

// Annotated time divided by total session time, pooled across sessions.
double human_coded_ratio(std::span<const SessionRecord> sessions);

// One MeasureSet per observation, ordered by observation key.
std::vector<MeasureSet> compute_measures(const Cohort& cohort, const MeasureConfig& cfg);

// Run-length qualification cutoff for one session: lengths strictly greater
// qualify.
std::int64_t min_run_frames(double min_run_seconds, double fps);

}  // namespace gm::measures
