#include "gm/headmap.hpp"

#include "gm/common.hpp"

#include <algorithm>
#include <cmath>

namespace gm::headmap {

const HeadBox* HeadTrack::box_at(std::int64_t frame) const {
    if (boxes.empty() || frame < first_frame() || frame > last_frame()) return nullptr;
    return &boxes[static_cast<std::size_t>(frame - first_frame())];
}

void validate(const HeadTrack& track) {
    if (track.boxes.empty()) throw ValidationError("head track with no boxes");
    for (std::size_t i = 0; i < track.boxes.size(); ++i) {
        const auto& b = track.boxes[i];
        if (b.person_id != track.person_id) {
            throw ValidationError("track " + track.person_id + ": box person mismatch");
        }
        if (!(b.w > 0.0 && b.h > 0.0)) {
            throw ValidationError("track " + track.person_id + ": box size must be positive");
        }
        if (i > 0 && b.frame_index != track.boxes[i - 1].frame_index + 1) {
            throw ValidationError("track " + track.person_id + ": frames not consecutive");
        }
    }
}

std::pair<int, int> Grid::argmax() const {
    std::size_t best = 0;
    for (std::size_t i = 1; i < cells.size(); ++i) {
        if (cells[i] > cells[best]) best = i;
    }
    return {static_cast<int>(best / size), static_cast<int>(best % size)};
}

std::vector<TrackPair> enumerate_pairs(std::span<const HeadTrack> tracks,
                                       const std::string& child_id, const HeadMapConfig& cfg) {
    std::vector<TrackPair> pairs;
    for (std::size_t i = 0; i < tracks.size(); ++i) {
        for (std::size_t j = i + 1; j < tracks.size(); ++j) {
            std::int64_t start = std::max(tracks[i].first_frame(), tracks[j].first_frame());
            std::int64_t end = std::min(tracks[i].last_frame(), tracks[j].last_frame());
            std::int64_t overlap = end - start + 1;
            if (overlap < cfg.tau) continue;
            TrackPair p;
            p.index_a = i;
            p.index_b = j;
            p.overlap_start = start;
            p.overlap_length = overlap;
            p.child_relevant =
                tracks[i].person_id == child_id || tracks[j].person_id == child_id;
            pairs.push_back(p);
        }
    }
    return pairs;
}

namespace {

void render_gaussian(Grid& grid, const HeadBox& box, double amplitude, double sigma_scale) {
    double n = static_cast<double>(grid.size);
    double px = std::clamp(box.cx, 0.0, 1.0) * n;
    double py = std::clamp(box.cy, 0.0, 1.0) * n;
    double sigma = sigma_scale * std::max(box.w, box.h) * n;
    double inv = 1.0 / (2.0 * sigma * sigma);
    // support window at 4 sigma; the tail beyond it is < 4e-4 of the peak
    double radius = 4.0 * sigma;
    int row_lo = std::max(0, static_cast<int>(std::ceil(py - radius)));
    int row_hi = std::min(grid.size - 1, static_cast<int>(std::floor(py + radius)));
    int col_lo = std::max(0, static_cast<int>(std::ceil(px - radius)));
    int col_hi = std::min(grid.size - 1, static_cast<int>(std::floor(px + radius)));
    for (int row = row_lo; row <= row_hi; ++row) {
        double dy = static_cast<double>(row) - py;
        for (int col = col_lo; col <= col_hi; ++col) {
            double dx = static_cast<double>(col) - px;
            double d2 = dx * dx + dy * dy;
            if (d2 > radius * radius) continue;
            grid.cells[static_cast<std::size_t>(row) * grid.size + col] +=
                amplitude * std::exp(-d2 * inv);
        }
    }
}

}  // namespace

HeadMapStack build_headmap(const HeadTrack& a, const HeadTrack& b,
                           std::span<const HeadTrack> others, int map_length,
                           const HeadMapConfig& cfg) {
    if (map_length < 1) throw ValidationError("map_length must be >= 1");
    validate(a);
    validate(b);
    std::int64_t start = std::max(a.first_frame(), b.first_frame());
    std::int64_t end = std::min(a.last_frame(), b.last_frame());
    std::int64_t overlap = end - start + 1;
    if (overlap < map_length) {
        throw ValidationError("map_length " + std::to_string(map_length) +
                              " exceeds co-visible span " + std::to_string(std::max<std::int64_t>(overlap, 0)));
    }

    HeadMapStack stack;
    stack.person_a = a.person_id;
    stack.person_b = b.person_id;
    for (const auto& other : others) {
        stack.bystanders.push_back(other.person_id);
    }

    for (int k = 0; k < map_length; ++k) {
        // uniform sampling, first and last co-visible frame inclusive
        std::int64_t frame =
            map_length == 1
                ? start
                : start + std::llround(static_cast<double>(k) *
                                       static_cast<double>(overlap - 1) /
                                       static_cast<double>(map_length - 1));
        Grid grid;
        grid.size = cfg.grid_size;
        grid.cells.assign(static_cast<std::size_t>(cfg.grid_size) * cfg.grid_size, 0.0);
        render_gaussian(grid, *a.box_at(frame), cfg.target_amplitude, cfg.sigma_scale);
        render_gaussian(grid, *b.box_at(frame), cfg.target_amplitude, cfg.sigma_scale);
        for (const auto& other : others) {
            if (const HeadBox* box = other.box_at(frame)) {
                render_gaussian(grid, *box, cfg.bystander_amplitude, cfg.sigma_scale);
            }
        }
        stack.maps.push_back(std::move(grid));
    }
    return stack;
}

std::string grids_to_csv(const HeadMapStack& stack) {
    std::string out = "map_index,row";
    if (!stack.maps.empty()) {
        for (int c = 0; c < stack.maps.front().size; ++c) {
            out += ",c" + std::to_string(c);
        }
    }
    out += '\n';
    for (std::size_t m = 0; m < stack.maps.size(); ++m) {
        const auto& grid = stack.maps[m];
        for (int row = 0; row < grid.size; ++row) {
            out += std::to_string(m);
            out += ',';
            out += std::to_string(row);
            for (int col = 0; col < grid.size; ++col) {
                out += ',';
                out += format_double(grid.at(row, col));
            }
            out += '\n';
        }
    }
    return out;
}

}  // namespace gm::headmap
