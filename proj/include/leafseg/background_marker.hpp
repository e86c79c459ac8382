#pragma once

#include <array>
#include <cstdint>

#include "leafseg/core.hpp"

namespace leafseg {

using ColorIndexImage = FloatImage;

struct BackgroundRuleParams {
    int white_r = 200;
    int white_g = 220;
    int white_b = 200;
    int black_max = 30;
    int entropy_window = 3;
    int entropy_threshold = 220; // on the 0-255 scale
    int cleanup_min_area = 100;  // px
    double cleanup_distance = 50; // px
    int cleanup_erosion_radius = 2;
};

/// ExG = 2G - R - B, unclamped.
ColorIndexImage excess_green(const RgbImage& img);

/// ExR = 1.4R - G - B, unclamped.
ColorIndexImage excess_red(const RgbImage& img);

/// Smallest level t maximising the between-class variance of the split
/// [0..t] vs [t+1..255]. Splits with an empty class are skipped; if only a
/// single bin is populated that bin's level is returned.
int otsu_threshold(const std::array<std::uint64_t, 256>& histogram);

/// Split the ExG-ExR difference into vegetation candidates (true) and
/// background: Otsu on the min-max rescaled 256-bin histogram, falling back
/// to mean - std when the histogram has more than two peaks. A constant
/// image is all vegetation.
BinaryMask threshold_index_difference(const ColorIndexImage& diff);

/// Number of smoothed-histogram peaks as used by the fallback rule.
int count_histogram_peaks(const std::array<std::uint64_t, 256>& histogram);

/// Rule-based background: blue-dominant (B > G), white, or black pixels.
BinaryMask color_rules(const RgbImage& img, const BackgroundRuleParams& params = {});

/// Shannon entropy of each pixel's window histogram, scaled to 0-255 by the
/// window's maximum entropy (255 / log2(window^2)) and rounded.
GrayImage local_entropy(const GrayImage& img, int window = 3);

/// Drop small background islands far from any other background (likely
/// holes in the leaf), erode to open a gap to the leaf edge, then force the
/// image border to background.
BinaryMask cleanup_marker(const BinaryMask& raw, const BackgroundRuleParams& params = {});

struct BackgroundDebug {
    BinaryMask index_background; // complement of the vegetation candidates
    BinaryMask rule_background;
    BinaryMask entropy_background;
    BinaryMask marker;
};

/// Full background-marker stage: index threshold + colour rules + texture
/// entropy, then cleanup. Expects an already-resized image.
BinaryMask build_background_marker(const RgbImage& img,
                                   const BackgroundRuleParams& params = {},
                                   BackgroundDebug* debug = nullptr);

} // namespace leafseg
