#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace gm::headmap {

// Head detection for one frame, in normalized image coordinates.
struct HeadBox {
    std::int64_t frame_index = 0;
    std::string person_id;
    double cx = 0.5;
    double cy = 0.5;
    double w = 0.1;
    double h = 0.1;
};

// Boxes for one person over consecutive frames.
struct HeadTrack {
    std::string person_id;
    std::vector<HeadBox> boxes;

    std::int64_t first_frame() const { return boxes.front().frame_index; }
    std::int64_t last_frame() const { return boxes.back().frame_index; }
    const HeadBox* box_at(std::int64_t frame) const;
};

void validate(const HeadTrack& track);

struct HeadMapConfig {
    int grid_size = 64;
    // sigma = sigma_scale * max(w, h) * grid_size; head size is the depth proxy
    double sigma_scale = 0.5;
    double target_amplitude = 1.0;
    double bystander_amplitude = 0.5;
    int tau = 10;  // minimum co-visible frames for a candidate pair
    int map_length = 10;  // M
};

struct Grid {
    int size = 64;
    std::vector<double> cells;  // row-major, size*size

    double at(int row, int col) const { return cells[static_cast<std::size_t>(row) * size + col]; }
    // (row, col) of the maximum cell, first occurrence on ties
    std::pair<int, int> argmax() const;
};

struct HeadMapStack {
    std::vector<Grid> maps;  // M grids
    std::string person_a;
    std::string person_b;
    std::vector<std::string> bystanders;
};

struct TrackPair {
    std::size_t index_a = 0;  // indices into the input track list
    std::size_t index_b = 0;
    std::int64_t overlap_start = 0;
    std::int64_t overlap_length = 0;
    // false marks trainer-trainer pairs, excluded from downstream analysis
    bool child_relevant = false;
};

// All unordered pairs of tracks co-visible for at least tau frames; pairs
// not involving child_id are kept but flagged.
std::vector<TrackPair> enumerate_pairs(std::span<const HeadTrack> tracks,
                                       const std::string& child_id, const HeadMapConfig& cfg);

// Renders M grids over the pair's co-visible span (endpoints included),
// one additive 2D Gaussian per visible head; bystander tracks render at
// reduced amplitude. Grids are not normalized.
HeadMapStack build_headmap(const HeadTrack& a, const HeadTrack& b,
                           std::span<const HeadTrack> others, int map_length,
                           const HeadMapConfig& cfg);

// Flat CSV: header `map_index,row` then grid_size value columns; one row
// per grid row, maps stacked in order.
std::string grids_to_csv(const HeadMapStack& stack);

}  // namespace gm::headmap
