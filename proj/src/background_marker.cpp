#include "leafseg/background_marker.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "leafseg/imageops.hpp"

namespace leafseg {

ColorIndexImage excess_green(const RgbImage& img) {
    ColorIndexImage out(img.width(), img.height());
    for (std::size_t i = 0; i < img.size(); ++i) {
        const Rgb& c = img.data()[i];
        out.data()[i] = 2.0 * c.g - c.r - c.b;
    }
    return out;
}

ColorIndexImage excess_red(const RgbImage& img) {
    ColorIndexImage out(img.width(), img.height());
    for (std::size_t i = 0; i < img.size(); ++i) {
        const Rgb& c = img.data()[i];
        out.data()[i] = 1.4 * c.r - c.g - c.b;
    }
    return out;
}

namespace {

// Between-class variance comparison in exact integer arithmetic:
// sigma^2(t) ~ (S0*w1 - S1*w0)^2 / (w0*w1), compared cross-multiplied so
// tie-breaking toward the smallest level is deterministic.
struct OtsuScore {
    __int128 num = 0; // squared difference term
    __int128 den = 1;

    bool better_than(const OtsuScore& o) const {
        return static_cast<__int128>(num) * o.den > static_cast<__int128>(o.num) * den;
    }
};

} // namespace

int otsu_threshold(const std::array<std::uint64_t, 256>& histogram) {
    std::uint64_t total = 0, weighted = 0;
    int lone_bin = -1, populated = 0;
    for (int i = 0; i < 256; ++i) {
        if (histogram[i]) {
            ++populated;
            lone_bin = i;
        }
        total += histogram[i];
        weighted += histogram[i] * static_cast<std::uint64_t>(i);
    }
    if (total == 0) throw std::invalid_argument("empty histogram");
    if (populated == 1) return lone_bin;

    int best_t = 0;
    OtsuScore best{-1, 1};
    std::uint64_t w0 = 0, s0 = 0;
    for (int t = 0; t < 255; ++t) {
        w0 += histogram[t];
        s0 += histogram[t] * static_cast<std::uint64_t>(t);
        std::uint64_t w1 = total - w0;
        if (w0 == 0 || w1 == 0) continue;
        std::uint64_t s1 = weighted - s0;
        __int128 diff = static_cast<__int128>(s0) * w1 - static_cast<__int128>(s1) * w0;
        OtsuScore score{diff * diff, static_cast<__int128>(w0) * w1};
        if (score.better_than(best)) {
            best = score;
            best_t = t;
        }
    }
    return best_t;
}

int count_histogram_peaks(const std::array<std::uint64_t, 256>& histogram) {
    // 5-bin moving average, then local maxima at least 5% of the global
    // maximum and at least 10 bins apart (taller peaks claim first).
    std::array<double, 256> smooth{};
    for (int i = 0; i < 256; ++i) {
        double sum = 0;
        int cnt = 0;
        for (int j = i - 2; j <= i + 2; ++j) {
            if (j < 0 || j > 255) continue;
            sum += static_cast<double>(histogram[j]);
            ++cnt;
        }
        smooth[i] = sum / cnt;
    }
    double peak_floor = 0.05 * *std::max_element(smooth.begin(), smooth.end());

    std::vector<std::pair<double, int>> candidates;
    int i = 0;
    while (i < 256) { // plateaus count once, as a peak only if both ends drop
        int j = i;
        while (j + 1 < 256 && smooth[j + 1] == smooth[i]) ++j;
        double left = i > 0 ? smooth[i - 1] : -1;
        double right = j < 255 ? smooth[j + 1] : -1;
        if (smooth[i] >= peak_floor && smooth[i] > left && smooth[i] > right)
            candidates.emplace_back(smooth[i], i);
        i = j + 1;
    }
    std::sort(candidates.begin(), candidates.end(), [](const auto& a, const auto& b) {
        return a.first != b.first ? a.first > b.first : a.second < b.second;
    });

    std::vector<int> accepted;
    for (const auto& [height, pos] : candidates) {
        bool ok = true;
        for (int a : accepted)
            if (std::abs(a - pos) < 10) { ok = false; break; }
        if (ok) accepted.push_back(pos);
    }
    return static_cast<int>(accepted.size());
}

BinaryMask threshold_index_difference(const ColorIndexImage& diff) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (double v : diff.data()) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }

    BinaryMask out(diff.width(), diff.height());
    if (lo == hi) { // constant image: no split possible, all vegetation
        for (auto& v : out.pixels().data()) v = 255;
        return out;
    }

    const double scale = 255.0 / (hi - lo);
    auto bin_of = [&](double v) {
        long b = std::lround((v - lo) * scale);
        return static_cast<int>(std::clamp(b, 0L, 255L));
    };

    std::array<std::uint64_t, 256> hist{};
    for (double v : diff.data()) ++hist[bin_of(v)];

    if (count_histogram_peaks(hist) <= 2) {
        int t = otsu_threshold(hist);
        for (std::size_t i = 0; i < diff.size(); ++i)
            out.pixels().data()[i] = bin_of(diff.data()[i]) > t ? 255 : 0;
    } else {
        double mean = 0;
        for (double v : diff.data()) mean += v;
        mean /= static_cast<double>(diff.size());
        double var = 0;
        for (double v : diff.data()) var += (v - mean) * (v - mean);
        double stddev = std::sqrt(var / static_cast<double>(diff.size()));
        double threshold = mean - stddev;
        for (std::size_t i = 0; i < diff.size(); ++i)
            out.pixels().data()[i] = diff.data()[i] > threshold ? 255 : 0;
    }
    return out;
}

BinaryMask color_rules(const RgbImage& img, const BackgroundRuleParams& p) {
    BinaryMask out(img.width(), img.height());
    for (std::size_t i = 0; i < img.size(); ++i) {
        const Rgb& c = img.data()[i];
        bool bg = c.b > c.g ||
                  (c.r > p.white_r && c.g > p.white_g && c.b > p.white_b) ||
                  (c.r < p.black_max && c.g < p.black_max && c.b < p.black_max);
        out.pixels().data()[i] = bg ? 255 : 0;
    }
    return out;
}

GrayImage local_entropy(const GrayImage& img, int window) {
    if (window < 3 || window % 2 == 0)
        throw std::invalid_argument("entropy window must be odd and >= 3");
    const int r = window / 2;
    const double scale = 255.0 / std::log2(static_cast<double>(window) * window);
    const double samples = static_cast<double>(window) * window;

    GrayImage out(img.width(), img.height());
    std::array<int, 256> hist{};
    std::vector<int> used;
    used.reserve(static_cast<std::size_t>(window) * window);
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            used.clear();
            for (int dy = -r; dy <= r; ++dy) {
                for (int dx = -r; dx <= r; ++dx) {
                    int v = img.at_clamped(x + dx, y + dy);
                    if (hist[v]++ == 0) used.push_back(v);
                }
            }
            double entropy = 0;
            for (int v : used) {
                double p = hist[v] / samples;
                entropy -= p * std::log2(p);
                hist[v] = 0;
            }
            out.at(x, y) = static_cast<std::uint8_t>(
                std::clamp(std::lround(entropy * scale), 0L, 255L));
        }
    }
    return out;
}

BinaryMask cleanup_marker(const BinaryMask& raw, const BackgroundRuleParams& p) {
    const int w = raw.width(), h = raw.height();
    BinaryMask kept = raw;

    LabelMap comps = connected_components(raw, 8);
    if (comps.region_count > 1) {
        std::vector<std::uint64_t> area(comps.region_count + 1, 0);
        std::vector<int> min_x(comps.region_count + 1, w), max_x(comps.region_count + 1, -1);
        std::vector<int> min_y(comps.region_count + 1, h), max_y(comps.region_count + 1, -1);
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                int l = comps.at(x, y);
                if (l == 0) continue;
                ++area[l];
                min_x[l] = std::min(min_x[l], x);
                max_x[l] = std::max(max_x[l], x);
                min_y[l] = std::min(min_y[l], y);
                max_y[l] = std::max(max_y[l], y);
            }
        }

        const int pad = static_cast<int>(std::ceil(p.cleanup_distance)) + 1;
        for (int l = 1; l <= comps.region_count; ++l) {
            if (area[l] >= static_cast<std::uint64_t>(p.cleanup_min_area)) continue;
            // Distance from this island to the rest of the background,
            // computed on a padded crop (anything further than the pad is
            // already beyond the cleanup distance).
            int x0 = std::max(0, min_x[l] - pad), x1 = std::min(w - 1, max_x[l] + pad);
            int y0 = std::max(0, min_y[l] - pad), y1 = std::min(h - 1, max_y[l] + pad);
            BinaryMask others(x1 - x0 + 1, y1 - y0 + 1);
            bool any = false;
            for (int y = y0; y <= y1; ++y) {
                for (int x = x0; x <= x1; ++x) {
                    int ol = comps.at(x, y);
                    if (ol != 0 && ol != l) {
                        others.set(x - x0, y - y0, true);
                        any = true;
                    }
                }
            }
            double min_dist = std::numeric_limits<double>::infinity();
            if (any) {
                FloatImage dist = distance_to_mask(others);
                for (int y = y0; y <= y1; ++y)
                    for (int x = x0; x <= x1; ++x)
                        if (comps.at(x, y) == l)
                            min_dist = std::min(min_dist, dist.at(x - x0, y - y0));
            }
            if (min_dist > p.cleanup_distance) {
                for (int y = min_y[l]; y <= max_y[l]; ++y)
                    for (int x = min_x[l]; x <= max_x[l]; ++x)
                        if (comps.at(x, y) == l) kept.set(x, y, false);
            }
        }
    }

    BinaryMask out = erode(kept, StructElement::disk(p.cleanup_erosion_radius));
    for (int x = 0; x < w; ++x) {
        out.set(x, 0, true);
        out.set(x, h - 1, true);
    }
    for (int y = 0; y < h; ++y) {
        out.set(0, y, true);
        out.set(w - 1, y, true);
    }
    out.set_role(MaskRole::BackgroundMarker);
    return out;
}

BinaryMask build_background_marker(const RgbImage& img,
                                   const BackgroundRuleParams& params,
                                   BackgroundDebug* debug) {
    ColorIndexImage exg = excess_green(img);
    ColorIndexImage exr = excess_red(img);
    ColorIndexImage diff(img.width(), img.height());
    for (std::size_t i = 0; i < diff.size(); ++i)
        diff.data()[i] = exg.data()[i] - exr.data()[i];

    BinaryMask index_bg = mask_complement(threshold_index_difference(diff));
    BinaryMask rules = color_rules(img, params);

    GrayImage entropy = local_entropy(to_grayscale(img), params.entropy_window);
    BinaryMask texture(img.width(), img.height());
    for (std::size_t i = 0; i < entropy.size(); ++i)
        texture.pixels().data()[i] = entropy.data()[i] > params.entropy_threshold ? 255 : 0;

    BinaryMask raw = mask_union(mask_union(index_bg, rules), texture);
    BinaryMask marker = cleanup_marker(raw, params);

    if (debug) {
        debug->index_background = index_bg;
        debug->rule_background = rules;
        debug->entropy_background = texture;
        debug->marker = marker;
    }
    return marker;
}

} // namespace leafseg
