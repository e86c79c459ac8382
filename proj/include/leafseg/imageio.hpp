#pragma once

#include <string>

#include "leafseg/core.hpp"

namespace leafseg {

/// Read a PNG or JPEG (detected by magic bytes) as 8-bit RGB. Throws
/// IoError on unreadable files.
RgbImage read_rgb(const std::string& path);

/// Read a mask PNG: any channel value >= 128 counts as foreground.
BinaryMask read_mask(const std::string& path);

void write_png(const std::string& path, const RgbImage& img);
void write_png(const std::string& path, const GrayImage& img);

/// Masks serialise as single-channel 8-bit PNG, 255 = foreground.
void write_png(const std::string& path, const BinaryMask& mask);

void write_jpeg(const std::string& path, const RgbImage& img, int quality = 92);

} // namespace leafseg
