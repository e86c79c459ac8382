#pragma once

#include <set>

#include "leafseg/core.hpp"

namespace leafseg {

struct LeafMarkerParams {
    int reconstruction_radius = 5; // SE for open/close by reconstruction
    double solidity_target = 0.95;
    double hue_tolerance_deg = 20;
    double intensity_tolerance = 0.10;
    int final_erosion_radius = 3;
};

/// Per-region descriptors from a watershed / components pass. Solidity is
/// the pixel count over the area of the pixel-corner convex hull, so a
/// filled convex region scores 1.
struct RegionStats {
    std::int32_t label = 0;
    std::uint64_t area = 0;
    double mean_hue_deg = 0; // NaN when no pixel has a defined hue
    double mean_intensity = 0;
    double mean_exg = 0;
    double solidity = 0;
    std::vector<Point2d> hull; // pixel-corner hull vertices
    std::set<std::int32_t> adjacency;
};

std::vector<RegionStats> compute_region_stats(const LabelMap& labels, const RgbImage& img);

/// Region-combining pass: start from the largest green (mean ExG > 0)
/// region; greedily merge adjacent regions with similar hue and intensity
/// whenever the merge strictly raises solidity. Throws NoLeafError when no
/// green region exists.
BinaryMask select_and_grow(const std::vector<RegionStats>& stats, const LabelMap& labels,
                           const LeafMarkerParams& params = {});

/// If the candidate's solidity is below the target, sever it along edge
/// chains touching its boundary and keep the largest piece; always finish
/// with the final erosion. Throws std::runtime_error("marker vanished")
/// when the erosion leaves nothing.
BinaryMask edge_cut(const BinaryMask& candidate, const BinaryMask& edges,
                    const LeafMarkerParams& params = {});

struct LeafMarkerDebug {
    GrayImage smoothed; // after open/close by reconstruction
    BinaryMask maxima;
    LabelMap prepass;
    BinaryMask selected;
    BinaryMask marker;
};

/// Full leaf-marker stage (grayscale morphology, watershed pre-pass,
/// solidity-driven growth, edge cutting).
BinaryMask build_leaf_marker(const RgbImage& img, const BinaryMask& bg,
                             const LeafMarkerParams& params = {},
                             LeafMarkerDebug* debug = nullptr);

} // namespace leafseg
