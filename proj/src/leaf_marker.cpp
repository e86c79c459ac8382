#include "leafseg/leaf_marker.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "leafseg/background_marker.hpp"
#include "leafseg/imageops.hpp"
#include "leafseg/reconstruction.hpp"
#include "leafseg/segmentation.hpp"

namespace leafseg {

namespace {

double circular_mean_deg(double sum_cos, double sum_sin) {
    if (sum_cos == 0 && sum_sin == 0)
        return std::numeric_limits<double>::quiet_NaN();
    double a = std::atan2(sum_sin, sum_cos) * 180.0 / std::numbers::pi;
    if (a < 0) a += 360.0;
    return a;
}

double hue_distance_deg(double a, double b) {
    if (std::isnan(a) || std::isnan(b))
        return std::numeric_limits<double>::infinity();
    double d = std::fmod(std::abs(a - b), 360.0);
    return d > 180.0 ? 360.0 - d : d;
}

// Pixel-corner points of a pixel set; hulls built from these make solidity
// of a filled convex region come out at 1.
void append_corners(std::vector<Point2d>& out, int x, int y) {
    out.push_back({x - 0.5, y - 0.5});
    out.push_back({x + 0.5, y - 0.5});
    out.push_back({x - 0.5, y + 0.5});
    out.push_back({x + 0.5, y + 0.5});
}

double hull_area_of(const std::vector<Point2d>& pts) {
    if (pts.empty()) return 0;
    return convex_hull_area(pts);
}

struct GrowState {
    std::uint64_t area = 0;
    double sum_cos = 0, sum_sin = 0; // area-weighted hue vector
    std::vector<Point2d> hull; // corner-hull vertices of the merged set
    double solidity = 0;
};

} // namespace

std::vector<RegionStats> compute_region_stats(const LabelMap& labels, const RgbImage& img) {
    const int w = labels.width(), h = labels.height();
    if (!img.same_size(w, h))
        throw std::invalid_argument("label/image dimensions differ");
    const int k = labels.region_count;

    HsiPlanes hsi = rgb_to_hsi(img);
    ColorIndexImage exg = excess_green(img);

    std::vector<RegionStats> stats(k);
    std::vector<std::vector<Point2d>> corners(k + 1);
    std::vector<double> sum_cos(k + 1, 0), sum_sin(k + 1, 0);
    std::vector<double> sum_i(k + 1, 0), sum_g(k + 1, 0);
    std::vector<std::uint64_t> hue_n(k + 1, 0);

    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            int l = labels.at(x, y);
            if (l <= 0 || l > k) continue;
            RegionStats& s = stats[l - 1];
            s.label = l;
            ++s.area;
            double hue = hsi.hue.at(x, y);
            if (!std::isnan(hue)) {
                double rad = hue * std::numbers::pi / 180.0;
                sum_cos[l] += std::cos(rad);
                sum_sin[l] += std::sin(rad);
                ++hue_n[l];
            }
            sum_i[l] += hsi.intensity.at(x, y);
            sum_g[l] += exg.at(x, y);
            append_corners(corners[l], x, y);

            if (x + 1 < w) {
                int r = labels.at(x + 1, y);
                if (r > 0 && r != l) {
                    s.adjacency.insert(r);
                    stats[r - 1].adjacency.insert(l);
                }
            }
            if (y + 1 < h) {
                int b = labels.at(x, y + 1);
                if (b > 0 && b != l) {
                    s.adjacency.insert(b);
                    stats[b - 1].adjacency.insert(l);
                }
            }
        }
    }

    for (int l = 1; l <= k; ++l) {
        RegionStats& s = stats[l - 1];
        if (s.area == 0) {
            s.label = l;
            s.mean_hue_deg = std::numeric_limits<double>::quiet_NaN();
            continue;
        }
        s.mean_hue_deg = hue_n[l] ? circular_mean_deg(sum_cos[l], sum_sin[l])
                                  : std::numeric_limits<double>::quiet_NaN();
        s.mean_intensity = sum_i[l] / static_cast<double>(s.area);
        s.mean_exg = sum_g[l] / static_cast<double>(s.area);
        s.hull = convex_hull(corners[l]);
        double ha = hull_area_of(s.hull);
        s.solidity = ha > 0 ? static_cast<double>(s.area) / ha : 1.0;
    }
    return stats;
}

BinaryMask select_and_grow(const std::vector<RegionStats>& stats, const LabelMap& labels,
                           const LeafMarkerParams& params) {
    const RegionStats* seed = nullptr;
    for (const auto& s : stats) {
        if (s.area == 0 || s.mean_exg <= 0) continue;
        if (!seed || s.area > seed->area) seed = &s;
    }
    if (!seed) throw NoLeafError();

    std::vector<char> merged(stats.size() + 1, 0);
    merged[seed->label] = 1;

    GrowState cur;
    cur.area = seed->area;
    cur.hull = seed->hull;
    cur.solidity = seed->solidity;
    if (!std::isnan(seed->mean_hue_deg)) {
        double rad = seed->mean_hue_deg * std::numbers::pi / 180.0;
        cur.sum_cos = std::cos(rad) * static_cast<double>(seed->area);
        cur.sum_sin = std::sin(rad) * static_cast<double>(seed->area);
    }
    double cur_hue = seed->mean_hue_deg;
    double cur_intensity = seed->mean_intensity;

    bool changed = true;
    while (changed) {
        changed = false;
        std::vector<const RegionStats*> candidates;
        for (const auto& s : stats) {
            if (s.area == 0 || merged[s.label]) continue;
            bool adjacent = false;
            for (std::int32_t nb : s.adjacency)
                if (merged[nb]) { adjacent = true; break; }
            if (adjacent) candidates.push_back(&s);
        }
        std::sort(candidates.begin(), candidates.end(),
                  [](const RegionStats* a, const RegionStats* b) {
                      return a->area != b->area ? a->area > b->area : a->label < b->label;
                  });
        for (const RegionStats* c : candidates) {
            if (hue_distance_deg(cur_hue, c->mean_hue_deg) > params.hue_tolerance_deg)
                continue;
            if (std::abs(cur_intensity - c->mean_intensity) > params.intensity_tolerance)
                continue;
            std::vector<Point2d> pts = cur.hull;
            pts.insert(pts.end(), c->hull.begin(), c->hull.end());
            auto merged_hull = convex_hull(pts);
            double merged_area = hull_area_of(merged_hull);
            double merged_solidity =
                merged_area > 0 ? static_cast<double>(cur.area + c->area) / merged_area : 1.0;
            if (merged_solidity <= cur.solidity) continue;

            merged[c->label] = 1;
            double n_old = static_cast<double>(cur.area);
            double n_new = static_cast<double>(cur.area + c->area);
            cur_intensity = (cur_intensity * n_old +
                             c->mean_intensity * static_cast<double>(c->area)) / n_new;
            if (!std::isnan(c->mean_hue_deg)) {
                double rad = c->mean_hue_deg * std::numbers::pi / 180.0;
                cur.sum_cos += std::cos(rad) * static_cast<double>(c->area);
                cur.sum_sin += std::sin(rad) * static_cast<double>(c->area);
            }
            cur_hue = (cur.sum_cos != 0 || cur.sum_sin != 0)
                          ? circular_mean_deg(cur.sum_cos, cur.sum_sin)
                          : cur_hue;
            cur.area += c->area;
            cur.hull = std::move(merged_hull);
            cur.solidity = merged_solidity;
            changed = true;
            break;
        }
    }

    BinaryMask out(labels.width(), labels.height());
    for (int y = 0; y < labels.height(); ++y)
        for (int x = 0; x < labels.width(); ++x) {
            int l = labels.at(x, y);
            if (l > 0 && merged[l]) out.set(x, y, true);
        }
    return out;
}

BinaryMask edge_cut(const BinaryMask& candidate, const BinaryMask& edges,
                    const LeafMarkerParams& params) {
    BinaryMask work = candidate;

    // Solidity check on the candidate as a whole.
    std::vector<Point2d> corners;
    for (int y = 0; y < candidate.height(); ++y)
        for (int x = 0; x < candidate.width(); ++x)
            if (candidate.get(x, y)) append_corners(corners, x, y);
    double solidity = 1.0;
    if (!corners.empty()) {
        double ha = convex_hull_area(corners);
        if (ha > 0) solidity = static_cast<double>(candidate.count()) / ha;
    }

    if (solidity < params.solidity_target && !edges.empty()) {
        BinaryMask boundary = mask_subtract(candidate, erode(candidate, StructElement::disk(1)));
        LabelMap chains = connected_components(edges, 8);
        std::vector<char> touches(chains.region_count + 1, 0);
        for (int y = 0; y < candidate.height(); ++y)
            for (int x = 0; x < candidate.width(); ++x) {
                int l = chains.at(x, y);
                if (l > 0 && boundary.get(x, y)) touches[l] = 1;
            }
        for (int y = 0; y < candidate.height(); ++y)
            for (int x = 0; x < candidate.width(); ++x) {
                int l = chains.at(x, y);
                if (l > 0 && touches[l]) work.set(x, y, false);
            }
        // Removing 8-connected chains 4-disconnects the pieces.
        LabelMap pieces = connected_components(work, 4);
        if (pieces.region_count > 0) {
            std::vector<std::uint64_t> area(pieces.region_count + 1, 0);
            for (auto l : pieces.labels.data())
                if (l > 0) ++area[l];
            int largest = 1;
            for (int l = 2; l <= pieces.region_count; ++l)
                if (area[l] > area[largest]) largest = l;
            for (int y = 0; y < work.height(); ++y)
                for (int x = 0; x < work.width(); ++x)
                    work.set(x, y, pieces.at(x, y) == largest);
        }
    }

    BinaryMask out = erode(work, StructElement::disk(params.final_erosion_radius));
    if (out.empty()) throw std::runtime_error("marker vanished");
    out.set_role(MaskRole::LeafMarker);
    return out;
}

BinaryMask build_leaf_marker(const RgbImage& img, const BinaryMask& bg,
                             const LeafMarkerParams& params, LeafMarkerDebug* debug) {
    const int w = img.width(), h = img.height();
    if (!bg.pixels().same_size(w, h))
        throw std::invalid_argument("background marker dimensions differ");

    BinaryMask foreground = mask_complement(bg);
    if (foreground.empty()) throw NoLeafError();

    GrayImage gray = to_grayscale(img);
    StructElement se = StructElement::disk(params.reconstruction_radius);
    GrayImage smoothed = close_by_reconstruction(open_by_reconstruction(gray, se), se);

    BinaryMask maxima = mask_intersect(regional_maxima(smoothed), foreground);
    if (maxima.empty()) throw NoLeafError();

    LabelMap seeds = connected_components(maxima, 8);
    FloatImage relief = impose_minima(gradient_magnitude(gray), maxima);
    LabelMap basins = watershed(relief, seeds);

    auto stats = compute_region_stats(basins, img);
    BinaryMask selected = mask_intersect(select_and_grow(stats, basins, params), foreground);
    if (selected.empty()) throw NoLeafError();

    BinaryMask edges = detect_edges(gray);
    BinaryMask marker;
    try {
        marker = edge_cut(selected, edges, params);
    } catch (const std::runtime_error&) {
        // erosion swallowed the marker; fall back to the largest un-eroded piece
        LabelMap pieces = connected_components(selected, 4);
        std::vector<std::uint64_t> area(pieces.region_count + 1, 0);
        for (auto l : pieces.labels.data())
            if (l > 0) ++area[l];
        int largest = 1;
        for (int l = 2; l <= pieces.region_count; ++l)
            if (area[l] > area[largest]) largest = l;
        marker = BinaryMask(w, h, false, MaskRole::LeafMarker);
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x)
                if (pieces.at(x, y) == largest) marker.set(x, y, true);
    }

    if (debug) {
        debug->smoothed = smoothed;
        debug->maxima = maxima;
        debug->prepass = basins;
        debug->selected = selected;
        debug->marker = marker;
    }
    return marker;
}

} // namespace leafseg
