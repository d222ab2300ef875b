#include "gm/synth.hpp"

#include "gm/common.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace gm::synth {

void validate(const SynthConfig& cfg) {
    if (!(cfg.fps > 0.0)) throw ValidationError("synth: fps must be positive");
    if (!(cfg.duration_s > 0.0)) throw ValidationError("synth: duration_s must be positive");
    if (cfg.mean_gaze_dwell_s < 0.0) {
        throw ValidationError("synth: mean_gaze_dwell_s must be >= 0");
    }
    if (!(cfg.mean_nongaze_dwell_s > 0.0)) {
        throw ValidationError("synth: mean_nongaze_dwell_s must be positive");
    }
    if (!(cfg.score_margin > 0.0 && cfg.score_margin < 0.4)) {
        throw ValidationError("synth: score_margin must lie in (0, 0.4)");
    }
    if (cfg.noise_sd < 0.0) throw ValidationError("synth: noise_sd must be >= 0");
    if (cfg.score_margin + 3.0 * cfg.noise_sd >= 0.4) {
        throw ValidationError("synth: score_margin + 3*noise_sd must stay below 0.4");
    }
}

namespace {

constexpr double kThreshold = 0.6;

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

SynthSession generate_session_impl(const SynthConfig& cfg, const std::string& child_id,
                                   TherapyGroup group, Activity activity, int session_index) {
    validate(cfg);
    rng::Rng rng(cfg.seed);

    std::int64_t total_frames = std::llround(cfg.duration_s * cfg.fps);
    if (total_frames <= 0) throw ValidationError("synth: session has no frames");

    bool gaze_enabled = cfg.mean_gaze_dwell_s > 0.0;
    // geometric dwell: per-frame exit probability 1/mean, capped at 1
    double exit_gaze =
        gaze_enabled ? std::min(1.0, 1.0 / (cfg.mean_gaze_dwell_s * cfg.fps)) : 1.0;
    double exit_nongaze = std::min(1.0, 1.0 / (cfg.mean_nongaze_dwell_s * cfg.fps));
    double stationary =
        gaze_enabled
            ? cfg.mean_gaze_dwell_s / (cfg.mean_gaze_dwell_s + cfg.mean_nongaze_dwell_s)
            : 0.0;

    SynthSession out;
    out.truth_labels.resize(static_cast<std::size_t>(total_frames));

    ScoreStream primary;    // carries the gaze process
    ScoreStream secondary;  // second trainer, never above threshold
    primary.subject_id = secondary.subject_id = child_id;
    primary.partner_id = "trainer_a";
    secondary.partner_id = "trainer_b";

    bool state = gaze_enabled && rng.bernoulli(stationary);
    std::int64_t true_count = 0;
    for (std::int64_t t = 0; t < total_frames; ++t) {
        out.truth_labels[static_cast<std::size_t>(t)] = state ? 1 : 0;
        true_count += state ? 1 : 0;

        double base = state ? kThreshold + cfg.score_margin : kThreshold - cfg.score_margin;
        double score_a = clamp01(base + rng.truncated_normal(cfg.noise_sd));
        double score_b =
            clamp01(kThreshold - cfg.score_margin + rng.truncated_normal(cfg.noise_sd));
        primary.frames.push_back(ScoreFrame{t, score_a});
        secondary.frames.push_back(ScoreFrame{t, score_b});

        double exit_p = state ? exit_gaze : exit_nongaze;
        if (rng.bernoulli(exit_p)) {
            state = !state;
            if (!gaze_enabled) state = false;
        }
    }

    out.truth_ratio = static_cast<double>(true_count) / static_cast<double>(total_frames);
    out.truth_runs = measures::gaze_runs(out.truth_labels);

    SessionRecord session;
    session.child_id = child_id;
    session.group = group;
    session.activity = activity;
    session.session_index = session_index;
    session.fps = cfg.fps;
    session.total_frames = total_frames;
    session.streams.push_back(std::move(primary));
    session.streams.push_back(std::move(secondary));
    for (const auto& run : out.truth_runs) {
        session.annotations.push_back(
            AnnotationInterval{static_cast<double>(run.start_frame) / cfg.fps,
                               static_cast<double>(run.start_frame + run.length) / cfg.fps});
    }
    out.session = std::move(session);
    return out;
}

}  // namespace

SynthSession generate_session(const SynthConfig& cfg) {
    return generate_session_impl(cfg, "child", TherapyGroup::PlayTherapy,
                                 Activity::MusicMaking, 1);
}

SynthCohort generate_cohort(const CohortConfig& cfg) {
    if (cfg.n_observations < 5) {
        throw ValidationError("generate_cohort: need at least 5 observations");
    }

    // observation mix mirroring the 18 Play / 10 Standard split, with the
    // Hello Song share of Play observations
    int n_standard = std::clamp(
        static_cast<int>(std::lround(cfg.n_observations * 10.0 / 28.0)), 1,
        cfg.n_observations - 2);
    int n_play = cfg.n_observations - n_standard;
    // every Play child gets Music Making; Hello Song goes to a prefix of them
    int n_hello = std::clamp(static_cast<int>(std::lround(n_play * 7.0 / 18.0)), 0, n_play / 2);
    int n_play_children = n_play - n_hello;

    auto child_name = [](const char* prefix, int i) {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "%s%02d", prefix, i + 1);
        return std::string(buf);
    };

    struct ObsPlan {
        std::string child_id;
        Activity activity;
    };
    std::vector<ObsPlan> plan;
    for (int i = 0; i < n_play_children; ++i) {
        plan.push_back({child_name("p", i), Activity::MusicMaking});
    }
    for (int i = 0; i < n_hello; ++i) {
        plan.push_back({child_name("p", i), Activity::HelloSong});
    }
    for (int i = 0; i < n_standard; ++i) {
        plan.push_back({child_name("s", i), Activity::Reading});
    }
    std::sort(plan.begin(), plan.end(), [](const ObsPlan& a, const ObsPlan& b) {
        return std::tie(a.child_id, a.activity) < std::tie(b.child_id, b.activity);
    });

    rng::Rng rng(rng::derive(cfg.seed, 0x636F686F72ULL));  // cohort-level draws

    SynthCohort out;
    const int session_indices[3] = {1, 8, 16};
    std::uint64_t session_counter = 0;

    for (const auto& item : plan) {
        SynthConfig scfg;
        scfg.fps = cfg.fps;
        scfg.duration_s = cfg.duration_s;
        scfg.score_margin = cfg.score_margin;
        scfg.noise_sd = cfg.noise_sd;
        scfg.mean_gaze_dwell_s = rng.uniform(cfg.gaze_dwell_min_s, cfg.gaze_dwell_max_s);
        scfg.mean_nongaze_dwell_s =
            rng.uniform(cfg.nongaze_dwell_min_s, cfg.nongaze_dwell_max_s);

        std::int64_t true_total = 0;
        std::int64_t frame_total = 0;
        TherapyGroup group = group_of(item.activity);
        for (int s : session_indices) {
            scfg.seed = rng::derive(cfg.seed, ++session_counter);
            auto synth =
                generate_session_impl(scfg, item.child_id, group, item.activity, s);
            for (auto v : synth.truth_labels) true_total += v;
            frame_total += synth.session.total_frames;
            out.cohort.sessions.push_back(std::move(synth.session));
        }
        out.truth_ratios[ObservationKey{item.child_id, item.activity}] =
            static_cast<double>(true_total) / static_cast<double>(frame_total);
    }

    // profiles: one per distinct child; clinical covariates independent of gaze
    for (const auto& s : out.cohort.sessions) {
        if (out.cohort.profiles.count(s.child_id)) continue;
        ChildProfile p;
        p.child_id = s.child_id;
        p.age = rng.uniform(cfg.profile.age_min, cfg.profile.age_max);
        p.gender = rng.bernoulli(cfg.profile.female_fraction) ? Gender::F : Gender::M;
        p.ados_social_affect = std::max(
            0, static_cast<int>(std::lround(rng.normal(cfg.profile.ados_mean,
                                                       cfg.profile.ados_sd))));
        p.level_of_functioning = 1 + static_cast<int>(rng.uniform_index(3));
        out.cohort.profiles.emplace(p.child_id, std::move(p));
    }

    // svb score: per child; informative links it to the child's mean truth ratio
    for (auto& [child_id, profile] : out.cohort.profiles) {
        double svb = 0.0;
        if (cfg.link == GazeLink::GazeInformative) {
            double ratio_sum = 0.0;
            int n = 0;
            for (const auto& [key, ratio] : out.truth_ratios) {
                if (key.child_id == child_id) {
                    ratio_sum += ratio;
                    ++n;
                }
            }
            double linked = 1.0 + 6.0 * (ratio_sum / n) + rng.normal(0.0, cfg.profile.svb_noise_sd);
            svb = std::clamp(std::round(linked * 2.0) / 2.0, 1.0, 4.0);
        } else {
            svb = 1.0 + 0.5 * static_cast<double>(rng.uniform_index(7));
        }
        profile.svb_score = svb;
        validate_profile(profile);
    }

    std::sort(out.cohort.sessions.begin(), out.cohort.sessions.end(),
              [](const SessionRecord& a, const SessionRecord& b) {
                  return std::tie(a.child_id, a.activity, a.session_index) <
                         std::tie(b.child_id, b.activity, b.session_index);
              });
    return out;
}

}  // namespace gm::synth
