#pragma once

#include "gm/data_model.hpp"
#include "gm/measures.hpp"

#include <cstdint>
#include <map>
#include <vector>

namespace gm::synth {

// Two-state gaze/non-gaze process with geometric dwell times. Scores sit
// score_margin above/below the 0.6 cutoff plus truncated-normal noise, so
// margin > 3*noise_sd guarantees the binarized session equals the truth.
struct SynthConfig {
    double fps = 25.0;
    double duration_s = 60.0;
    double mean_gaze_dwell_s = 2.0;     // 0 disables the gaze state entirely
    double mean_nongaze_dwell_s = 8.0;
    double score_margin = 0.2;          // in (0, 0.4)
    double noise_sd = 0.0;              // noise truncated at +/-3 sd
    std::uint64_t seed = 1;
};

void validate(const SynthConfig& cfg);

struct SynthSession {
    SessionRecord session;
    std::vector<std::uint8_t> truth_labels;    // per frame
    double truth_ratio = 0.0;                  // sum(labels) / total_frames, exact
    std::vector<measures::GazeRun> truth_runs;
};

SynthSession generate_session(const SynthConfig& cfg);

enum class GazeLink { GazeInformative, GazeUninformative };

struct ProfileModel {
    double age_min = 5.0;
    double age_max = 12.0;
    double ados_mean = 17.0;
    double ados_sd = 5.0;
    double female_fraction = 0.15;
    // sd of the noise added to the svb link before grid snapping
    double svb_noise_sd = 0.25;
};

struct CohortConfig {
    int n_observations = 28;
    GazeLink link = GazeLink::GazeInformative;
    ProfileModel profile;
    std::uint64_t seed = 1;

    // per-session generation; dwell means drawn per observation
    double fps = 25.0;
    double duration_s = 60.0;
    double score_margin = 0.2;
    double noise_sd = 0.0;
    double gaze_dwell_min_s = 0.8;
    double gaze_dwell_max_s = 4.0;
    double nongaze_dwell_min_s = 4.0;
    double nongaze_dwell_max_s = 16.0;
};

struct SynthCohort {
    Cohort cohort;
    std::map<ObservationKey, double> truth_ratios;  // pooled over sessions
};

// Observation mix follows the study shape: ~10/28 of observations are
// Standard-Therapy Reading; Play-Therapy children each do Music Making and
// the first few also do Hello Song.
SynthCohort generate_cohort(const CohortConfig& cfg);

}  // namespace gm::synth
