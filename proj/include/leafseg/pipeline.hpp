#pragma once

#include <optional>

#include "leafseg/config.hpp"

namespace leafseg {

struct ExtractResult {
    BinaryMask mask;        // final leaf mask
    BinaryMask initial;     // before refinement
    BinaryMask bg_marker;
    BinaryMask leaf_marker;
};

/// End-to-end extraction: resize, background marker, leaf marker, the
/// selected segmenter, then the selected refinement. The input is assumed
/// already within the resize limit when it matches the mask consumers;
/// callers that need scoring against a ground truth should resize first.
/// Throws NoLeafError when no leaf candidate exists.
ExtractResult extract_leaf(const RgbImage& img, const PipelineConfig& cfg,
                           const std::string& dump_dir = {});

/// Input boundary drawn in red over the image.
RgbImage overlay_boundary(const RgbImage& img, const BinaryMask& mask);

} // namespace leafseg
