#pragma once

// Test-side oracles, written independently of the library code paths they
// check: straight loops, closed forms and quadrature only.

#include "gm/common.hpp"
#include "gm/data_model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

namespace oracle {

struct Run {
    std::int64_t start = 0;
    std::int64_t length = 0;
};

// plain scan run-length encoding
inline std::vector<Run> rle(const std::vector<std::uint8_t>& mask) {
    std::vector<Run> runs;
    for (std::size_t i = 0; i < mask.size();) {
        if (!mask[i]) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < mask.size() && mask[j]) ++j;
        runs.push_back(Run{static_cast<std::int64_t>(i), static_cast<std::int64_t>(j - i)});
        i = j;
    }
    return runs;
}

// frame-by-frame session truth: per-frame max score over streams
inline std::vector<std::uint8_t> brute_binarize(const gm::SessionRecord& session,
                                                double threshold) {
    std::map<std::int64_t, double> best;
    for (const auto& stream : session.streams) {
        for (const auto& f : stream.frames) {
            auto it = best.find(f.frame_index);
            if (it == best.end() || f.score > it->second) best[f.frame_index] = f.score;
        }
    }
    std::vector<std::uint8_t> mask(static_cast<std::size_t>(session.total_frames), 0);
    for (const auto& [frame, score] : best) {
        if (score > threshold) mask[static_cast<std::size_t>(frame)] = 1;
    }
    return mask;
}

struct BruteMeasures {
    double ratio = 0.0;
    bool has_duration = false;
    double duration = 0.0;
    std::vector<Run> runs;  // single-session only
};

inline BruteMeasures brute_measures(const std::vector<gm::SessionRecord>& sessions,
                                    double threshold, double min_run_seconds) {
    BruteMeasures out;
    std::int64_t above = 0, total = 0, run_sum = 0, run_count = 0;
    for (const auto& s : sessions) {
        auto mask = brute_binarize(s, threshold);
        for (auto v : mask) above += v;
        total += s.total_frames;
        auto runs = rle(mask);
        if (sessions.size() == 1) out.runs = runs;
        std::int64_t cutoff = std::llround(min_run_seconds * s.fps);
        for (const auto& r : runs) {
            if (r.length > cutoff) {
                run_sum += r.length;
                ++run_count;
            }
        }
    }
    out.ratio = static_cast<double>(above) / static_cast<double>(total);
    if (run_count > 0) {
        out.has_duration = true;
        out.duration = static_cast<double>(run_sum) / static_cast<double>(run_count);
    }
    return out;
}

// total covered length of a union of intervals (sweep)
inline double interval_union_length(std::vector<std::pair<double, double>> intervals) {
    std::sort(intervals.begin(), intervals.end());
    double covered = 0.0;
    double cur_start = 0.0, cur_end = -1.0;
    bool open = false;
    for (const auto& [a, b] : intervals) {
        if (!open || a > cur_end) {
            if (open) covered += cur_end - cur_start;
            cur_start = a;
            cur_end = b;
            open = true;
        } else {
            cur_end = std::max(cur_end, b);
        }
    }
    if (open) covered += cur_end - cur_start;
    return covered;
}

// ordinary least squares through the normal equations (Gaussian elimination
// with partial pivoting); design gets an intercept column appended
inline std::vector<double> ols(const std::vector<std::vector<double>>& X,
                               const std::vector<double>& y) {
    std::size_t n = X.size();
    std::size_t p = X.front().size() + 1;
    std::vector<std::vector<double>> a(p, std::vector<double>(p + 1, 0.0));
    auto design = [&](std::size_t i, std::size_t j) {
        return j < p - 1 ? X[i][j] : 1.0;
    };
    for (std::size_t j = 0; j < p; ++j) {
        for (std::size_t k = 0; k < p; ++k) {
            for (std::size_t i = 0; i < n; ++i) a[j][k] += design(i, j) * design(i, k);
        }
        for (std::size_t i = 0; i < n; ++i) a[j][p] += design(i, j) * y[i];
    }
    for (std::size_t col = 0; col < p; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < p; ++r) {
            if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
        }
        std::swap(a[col], a[pivot]);
        if (std::abs(a[col][col]) < 1e-12) throw std::runtime_error("ols: singular design");
        for (std::size_t r = 0; r < p; ++r) {
            if (r == col) continue;
            double f = a[r][col] / a[col][col];
            for (std::size_t k = col; k <= p; ++k) a[r][k] -= f * a[col][k];
        }
    }
    std::vector<double> beta(p);  // coefficients then intercept
    for (std::size_t j = 0; j < p; ++j) beta[j] = a[j][p] / a[j][j];
    return beta;
}

inline double trapezoid(const std::vector<double>& x, const std::vector<double>& y) {
    double area = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i) {
        area += 0.5 * (y[i] + y[i - 1]) * (x[i] - x[i - 1]);
    }
    return area;
}

// sigma of a rendered Gaussian via second moments of the grid mass
inline double moment_sigma(const std::vector<double>& cells, int size) {
    double mass = 0.0, mx = 0.0, my = 0.0;
    for (int r = 0; r < size; ++r) {
        for (int c = 0; c < size; ++c) {
            double v = cells[static_cast<std::size_t>(r) * size + c];
            mass += v;
            mx += v * c;
            my += v * r;
        }
    }
    mx /= mass;
    my /= mass;
    double var = 0.0;
    for (int r = 0; r < size; ++r) {
        for (int c = 0; c < size; ++c) {
            double v = cells[static_cast<std::size_t>(r) * size + c];
            double dx = c - mx;
            double dy = r - my;
            var += v * (dx * dx + dy * dy);
        }
    }
    return std::sqrt(var / (2.0 * mass));  // isotropic: E[dx^2 + dy^2] = 2 sigma^2
}

// empirical two-sided tail of the t distribution: T = Z / sqrt(V/df)
inline double monte_carlo_t_tail(double t, int df, std::size_t draws, std::uint64_t seed) {
    gm::rng::Rng rng(seed);
    std::size_t hits = 0;
    double abs_t = std::abs(t);
    for (std::size_t i = 0; i < draws; ++i) {
        double z = rng.normal();
        double v = 0.0;
        for (int k = 0; k < df; ++k) {
            double u = rng.normal();
            v += u * u;
        }
        double sample = z / std::sqrt(v / df);
        if (std::abs(sample) >= abs_t) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(draws);
}

}  // namespace oracle
