#pragma once

#include "leafseg/imageops.hpp"

namespace leafseg {

/// Geodesic reconstruction by dilation: grows `marker` under `mask` until
/// stability (8-connectivity). Requires marker <= mask pointwise.
GrayImage reconstruct_by_dilation(const GrayImage& marker, const GrayImage& mask);
FloatImage reconstruct_by_dilation(const FloatImage& marker, const FloatImage& mask);

/// Dual: shrinks `marker` down to `mask` until stability. Requires
/// marker >= mask pointwise.
GrayImage reconstruct_by_erosion(const GrayImage& marker, const GrayImage& mask);
FloatImage reconstruct_by_erosion(const FloatImage& marker, const FloatImage& mask);

/// reconstruct_by_dilation(erode(img, se), img). Removes bright structures
/// smaller than the SE without shifting the remaining contours.
GrayImage open_by_reconstruction(const GrayImage& img, const StructElement& se);

/// reconstruct_by_erosion(dilate(img, se), img). Fills dark structures
/// smaller than the SE; applied to an opened image this is the usual
/// clean-up pair.
GrayImage close_by_reconstruction(const GrayImage& img, const StructElement& se);

/// Connected plateaus strictly above all of their 8-neighbours.
BinaryMask regional_maxima(const GrayImage& img);
BinaryMask regional_maxima(const FloatImage& img);

/// Connected plateaus strictly below all of their 8-neighbours.
BinaryMask regional_minima(const FloatImage& img);

/// Rebuild the relief so the seed components are its only regional minima:
/// seeds forced to a below-minimum sentinel, everything else raised to
/// relief + 1, then reconstruction by erosion. Throws on empty seeds.
FloatImage impose_minima(const FloatImage& relief, const BinaryMask& seeds);

} // namespace leafseg
