#include "gm/measures.hpp"

#include "gm/common.hpp"

#include <cmath>

namespace gm::measures {

void validate(const MeasureConfig& cfg) {
    if (!(cfg.score_threshold > 0.0 && cfg.score_threshold < 1.0)) {
        throw ValidationError("score_threshold must lie in (0,1)");
    }
    if (!(cfg.min_run_seconds > 0.0)) {
        throw ValidationError("min_run_seconds must be positive");
    }
}

std::int64_t min_run_frames(double min_run_seconds, double fps) {
    return std::llround(min_run_seconds * fps);
}

std::vector<std::uint8_t> binarize(const SessionRecord& session, const MeasureConfig& cfg) {
    std::vector<std::uint8_t> out(static_cast<std::size_t>(session.total_frames), 0);
    for (const auto& stream : session.streams) {
        for (const auto& f : stream.frames) {
            if (f.score > cfg.score_threshold) {
                out[static_cast<std::size_t>(f.frame_index)] = 1;
            }
        }
    }
    return out;
}

std::vector<GazeRun> gaze_runs(std::span<const std::uint8_t> binarized) {
    std::vector<GazeRun> runs;
    std::int64_t n = static_cast<std::int64_t>(binarized.size());
    std::int64_t i = 0;
    while (i < n) {
        if (binarized[static_cast<std::size_t>(i)]) {
            std::int64_t start = i;
            while (i < n && binarized[static_cast<std::size_t>(i)]) ++i;
            runs.push_back(GazeRun{start, i - start});
        } else {
            ++i;
        }
    }
    return runs;
}

double mutual_gaze_ratio(std::span<const SessionRecord> sessions, const MeasureConfig& cfg) {
    if (sessions.empty()) throw ValidationError("mutual_gaze_ratio: no sessions");
    std::int64_t above = 0;
    std::int64_t total = 0;
    for (const auto& s : sessions) {
        auto mask = binarize(s, cfg);
        for (auto v : mask) above += v;
        total += s.total_frames;
    }
    return static_cast<double>(above) / static_cast<double>(total);
}

std::optional<double> mutual_gaze_duration(std::span<const SessionRecord> sessions,
                                           const MeasureConfig& cfg) {
    if (sessions.empty()) throw ValidationError("mutual_gaze_duration: no sessions");
    std::int64_t sum = 0;
    std::int64_t count = 0;
    for (const auto& s : sessions) {
        std::int64_t cutoff = min_run_frames(cfg.min_run_seconds, s.fps);
        for (const auto& run : gaze_runs(binarize(s, cfg))) {
            if (run.length > cutoff) {
                sum += run.length;
                ++count;
            }
        }
    }
    if (count == 0) return std::nullopt;
    return static_cast<double>(sum) / static_cast<double>(count);
}

double human_coded_ratio(std::span<const SessionRecord> sessions) {
    if (sessions.empty()) throw ValidationError("human_coded_ratio: no sessions");
    // Intervals are converted back to whole frames: the ratio is the same
    // fraction of session time as the seconds formula, without accumulating
    // 1/fps rounding in the division.
    std::int64_t annotated = 0;
    std::int64_t total = 0;
    for (const auto& s : sessions) {
        for (const auto& iv : s.annotations) {
            std::int64_t a = std::llround(iv.start_s * s.fps);
            std::int64_t b = std::llround(iv.end_s * s.fps);
            annotated += b - a;
        }
        total += s.total_frames;
    }
    return static_cast<double>(annotated) / static_cast<double>(total);
}

std::vector<MeasureSet> compute_measures(const Cohort& cohort, const MeasureConfig& cfg) {
    validate(cfg);
    std::vector<MeasureSet> out;
    for (const auto& obs : group_observations(cohort)) {
        if (obs.sessions.empty()) {
            throw ValidationError("observation (" + obs.key.child_id + ", " +
                                  to_string(obs.key.activity) + ") has no sessions");
        }
        MeasureSet m;
        m.key = obs.key;
        m.group = obs.group;
        m.mutual_gaze_ratio = mutual_gaze_ratio(obs.sessions, cfg);
        m.mutual_gaze_duration_frames = mutual_gaze_duration(obs.sessions, cfg);
        m.human_coded_ratio = human_coded_ratio(obs.sessions);
        for (const auto& s : obs.sessions) {
            std::span<const SessionRecord> one(&s, 1);
            SessionMeasures sm;
            sm.ratio = mutual_gaze_ratio(one, cfg);
            sm.duration_frames = mutual_gaze_duration(one, cfg);
            m.per_session[s.session_index] = sm;
        }
        out.push_back(std::move(m));
    }
    return out;
}

}  // namespace gm::measures
