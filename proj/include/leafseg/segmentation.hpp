#pragma once

#include "leafseg/core.hpp"

namespace leafseg {

enum class SegMethod { Watershed, GraphCut };

/// Marker-controlled watershed. Each pixel joins the basin with the
/// smallest minimax relief path from its seeds, where a path's cost is the
/// maximum relief over its interior (non-seed) pixels; pixels whose best
/// cost is achieved by two different basins become ridge (label 0). Seed
/// pixels always keep their seed label.
LabelMap watershed(const FloatImage& relief, const LabelMap& seeds);

struct SeededGraph {
    struct Arc {
        int from = 0;
        int to = 0;
        double capacity = 0;
    };
    int node_count = 0;
    std::vector<Arc> arcs;
    int source = 0;
    int sink = 0;
};

struct MaxFlowResult {
    double flow = 0;
    std::vector<std::uint8_t> source_side; // per node, 1 = source partition
};

/// Exact maximum s-t flow (Dinic) and the source-side min-cut partition
/// from the residual graph.
MaxFlowResult max_flow(const SeededGraph& g);

struct GraphCutParams {
    double sigma = 0;  // boundary-contrast scale; 0 = auto (mean abs neighbour diff)
    double lambda = 1; // n-link weight scale
};

/// Seeded graph-cut: 4-neighbour n-links lambda * exp(-dI^2 / (2 sigma^2))
/// on grayscale intensities, leaf seeds wired to the source and background
/// seeds to the sink with effectively infinite capacity.
BinaryMask graph_cut_segment(const RgbImage& img, const BinaryMask& leaf,
                             const BinaryMask& bg, const GraphCutParams& params = {});

/// Marker-controlled watershed on the gradient magnitude with the two
/// markers imposed as minima; ridge pixels fall to the background.
BinaryMask watershed_segment(const RgbImage& img, const BinaryMask& leaf,
                             const BinaryMask& bg);

BinaryMask segment(const RgbImage& img, const BinaryMask& leaf, const BinaryMask& bg,
                   SegMethod method, const GraphCutParams& params = {});

} // namespace leafseg
