#pragma once

#include <span>

#include "leafseg/core.hpp"

namespace leafseg {

/// Flat structuring element given as a set of (dx, dy) offsets.
struct StructElement {
    std::vector<Point> offsets;

    /// Euclidean disk: all offsets with dx^2 + dy^2 <= r^2. r = 1 is the
    /// 5-pixel cross; r = 0 is the identity.
    static StructElement disk(int radius);
    /// Square of the given side, centred (side must be odd).
    static StructElement square(int side);
};

/// Downscale so the longer side equals `limit` (bilinear, aspect preserved,
/// rounding half up). Images at or below the limit pass through unchanged.
RgbImage resize_longest_side(const RgbImage& img, int limit = 600);

/// Nearest-neighbour resize for binary masks (keeps values binary).
BinaryMask resize_mask_nearest(const BinaryMask& mask, int width, int height);

/// BT.601 luma: round(0.299 R + 0.587 G + 0.114 B).
GrayImage to_grayscale(const RgbImage& img);

/// Standard arccos-form HSI conversion. S = 1 - min/mean (0 for black),
/// I = (R+G+B)/765, hue reflected when B > G and NaN where S = 0.
HsiPlanes rgb_to_hsi(const RgbImage& img);

/// Sobel gradient magnitude with edge replication at the borders.
FloatImage gradient_magnitude(const GrayImage& img);

// Flat morphology. Erosion pads with the maximum (so a full mask stays
// full), dilation pads with the minimum.
GrayImage erode(const GrayImage& img, const StructElement& se);
GrayImage dilate(const GrayImage& img, const StructElement& se);
FloatImage erode(const FloatImage& img, const StructElement& se);
FloatImage dilate(const FloatImage& img, const StructElement& se);
BinaryMask erode(const BinaryMask& mask, const StructElement& se);
BinaryMask dilate(const BinaryMask& mask, const StructElement& se);

/// Label maximal connected foreground regions, labels 1..k assigned by the
/// raster order of each region's first pixel.
LabelMap connected_components(const BinaryMask& mask, int connectivity = 8);

/// Exact Euclidean distance to the nearest foreground pixel (0 on the mask
/// itself). Throws on an empty mask.
FloatImage distance_to_mask(const BinaryMask& mask);

/// Area of the convex hull of a point set (monotone chain + shoelace).
/// Collinear or single-point sets give 0; empty input throws.
double convex_hull_area(std::span<const Point2d> points);
std::vector<Point2d> convex_hull(std::span<const Point2d> points);

/// Canny-style edge map: Sobel gradient, non-maximum suppression along the
/// quantized gradient direction, hysteresis thresholds at the given
/// percentiles of the nonzero gradient magnitudes.
BinaryMask detect_edges(const GrayImage& img, double low_percentile = 0.70,
                        double high_percentile = 0.90);

/// Boundary of a mask: foreground pixels 4-adjacent to background or to the
/// image border.
BinaryMask mask_boundary(const BinaryMask& mask);

} // namespace leafseg
