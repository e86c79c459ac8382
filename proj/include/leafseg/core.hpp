#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace leafseg {

struct Rgb {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;
    bool operator==(const Rgb&) const = default;
};

/// Row-major pixel grid. T is uint8_t for 8-bit images, double for
/// real-valued maps (gradients, distances), Rgb for colour.
template <typename T>
class Image {
public:
    Image() = default;
    Image(int width, int height, T fill = T{})
        : width_(width), height_(height),
          data_(static_cast<std::size_t>(width) * height, fill) {
        if (width < 1 || height < 1)
            throw std::invalid_argument("image dimensions must be >= 1");
    }

    int width() const { return width_; }
    int height() const { return height_; }
    std::size_t size() const { return data_.size(); }

    bool in_bounds(int x, int y) const {
        return x >= 0 && x < width_ && y >= 0 && y < height_;
    }

    T& at(int x, int y) { return data_[static_cast<std::size_t>(y) * width_ + x]; }
    const T& at(int x, int y) const { return data_[static_cast<std::size_t>(y) * width_ + x]; }

    // Edge-replicated access.
    const T& at_clamped(int x, int y) const {
        if (x < 0) x = 0;
        if (x >= width_) x = width_ - 1;
        if (y < 0) y = 0;
        if (y >= height_) y = height_ - 1;
        return at(x, y);
    }

    std::vector<T>& data() { return data_; }
    const std::vector<T>& data() const { return data_; }

    bool same_size(int w, int h) const { return width_ == w && height_ == h; }

    bool operator==(const Image&) const = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<T> data_;
};

using RgbImage = Image<Rgb>;
using GrayImage = Image<std::uint8_t>;
using FloatImage = Image<double>;

enum class MaskRole {
    Generic,
    BackgroundMarker,
    LeafMarker,
    LeafMask,
    EdgeMap,
};

/// Per-pixel boolean grid stored as {0,255} so morphology can treat masks
/// and grayscale images uniformly.
class BinaryMask {
public:
    BinaryMask() = default;
    BinaryMask(int width, int height, bool fill = false,
               MaskRole role = MaskRole::Generic)
        : pixels_(width, height, fill ? std::uint8_t{255} : std::uint8_t{0}),
          role_(role) {}

    explicit BinaryMask(Image<std::uint8_t> pixels, MaskRole role = MaskRole::Generic)
        : pixels_(std::move(pixels)), role_(role) {
        for (auto& v : pixels_.data()) v = v ? 255 : 0;
    }

    int width() const { return pixels_.width(); }
    int height() const { return pixels_.height(); }

    bool get(int x, int y) const { return pixels_.at(x, y) != 0; }
    void set(int x, int y, bool v) { pixels_.at(x, y) = v ? 255 : 0; }
    bool in_bounds(int x, int y) const { return pixels_.in_bounds(x, y); }

    Image<std::uint8_t>& pixels() { return pixels_; }
    const Image<std::uint8_t>& pixels() const { return pixels_; }

    MaskRole role() const { return role_; }
    void set_role(MaskRole r) { role_ = r; }

    std::size_t count() const {
        std::size_t n = 0;
        for (auto v : pixels_.data()) n += v != 0;
        return n;
    }
    bool empty() const { return count() == 0; }

    bool operator==(const BinaryMask& o) const { return pixels_ == o.pixels_; }

private:
    Image<std::uint8_t> pixels_;
    MaskRole role_ = MaskRole::Generic;
};

/// Non-negative region labels; 0 marks unassigned pixels / watershed ridges.
struct LabelMap {
    Image<std::int32_t> labels;
    int region_count = 0;

    LabelMap() = default;
    LabelMap(int width, int height) : labels(width, height, 0) {}

    int width() const { return labels.width(); }
    int height() const { return labels.height(); }
    std::int32_t at(int x, int y) const { return labels.at(x, y); }
    std::int32_t& at(int x, int y) { return labels.at(x, y); }
};

/// HSI planes; hue is degrees in [0,360) and NaN exactly where S = 0.
struct HsiPlanes {
    FloatImage hue;
    FloatImage saturation;
    FloatImage intensity;
};

struct Point {
    int x = 0;
    int y = 0;
    bool operator==(const Point&) const = default;
};

struct Point2d {
    double x = 0;
    double y = 0;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NoLeafError : std::runtime_error {
    NoLeafError() : std::runtime_error("no leaf candidate") {}
    using std::runtime_error::runtime_error;
};

struct NoVeinError : std::runtime_error {
    NoVeinError() : std::runtime_error("no vein found") {}
};

// Mask set algebra. Dimensions must match.
BinaryMask mask_union(const BinaryMask& a, const BinaryMask& b);
BinaryMask mask_intersect(const BinaryMask& a, const BinaryMask& b);
BinaryMask mask_subtract(const BinaryMask& a, const BinaryMask& b);
BinaryMask mask_complement(const BinaryMask& a);

} // namespace leafseg
