#include "leafseg/pipeline.hpp"

#include <filesystem>
#include <fstream>

#include "leafseg/imageio.hpp"
#include "leafseg/imageops.hpp"

namespace leafseg {

namespace {

void dump_labels(const std::string& path, const LabelMap& labels) {
    GrayImage vis(labels.width(), labels.height());
    for (int y = 0; y < labels.height(); ++y)
        for (int x = 0; x < labels.width(); ++x) {
            std::int32_t l = labels.at(x, y);
            vis.at(x, y) = l == 0 ? 0 : static_cast<std::uint8_t>(40 + (l * 47) % 216);
        }
    write_png(path, vis);
}

void dump_polar_csv(const std::string& path, const std::array<PolarContour, 2>& halves,
                    const std::array<std::vector<AnomalousInterval>, 2>& anomalies,
                    const std::array<std::optional<CubicFit>, 2>& fits) {
    std::ofstream out(path);
    out << "theta_deg,r_px,anomalous_flag,fitted_r\n";
    for (int h = 0; h < 2; ++h) {
        std::vector<std::uint8_t> bad(halves[h].r.size(), 0);
        for (const auto& iv : anomalies[h])
            for (int i = std::max(0, iv.begin);
                 i <= std::min(static_cast<int>(bad.size()) - 1, iv.end); ++i)
                bad[i] = 1;
        for (std::size_t i = 0; i < halves[h].r.size(); ++i) {
            double deg = halves[h].theta[i] * 180.0 / 3.14159265358979323846;
            out << deg << ',' << halves[h].r[i] << ',' << int(bad[i]) << ',';
            if (fits[h])
                out << evaluate_cubic(*fits[h], halves[h].theta[i]);
            out << '\n';
        }
    }
}

// Contour repair step shared by the Contour and Full modes. Returns the
// input unchanged when no primary vein is found, the origin falls outside
// the mask, or no anomalies were detected (skipping the rasterisation
// round-trip when there is nothing to fix).
BinaryMask repair_shape(const BinaryMask& mask, const RgbImage& img,
                        const PipelineConfig& cfg, const std::string& dump_dir) {
    if (mask.empty()) return mask;
    GrayImage gray = to_grayscale(img);
    VeinLine primary;
    try {
        primary = detect_primary_vein(mask, gray, cfg.refinement);
    } catch (const NoVeinError&) {
        return mask;
    }

    LabelMap comps = connected_components(mask, 8);
    if (comps.region_count != 1) return mask; // polar trace needs one piece

    std::array<PolarContour, 2> halves;
    try {
        halves = contour_to_polar(mask, primary);
    } catch (const std::runtime_error&) {
        return mask;
    }

    std::array<std::vector<AnomalousInterval>, 2> anomalies{
        detect_anomalous_segments(halves[0], cfg.refinement.anomaly_window,
                                  cfg.refinement.anomaly_k),
        detect_anomalous_segments(halves[1], cfg.refinement.anomaly_window,
                                  cfg.refinement.anomaly_k)};

    if (!dump_dir.empty()) {
        std::array<std::optional<CubicFit>, 2> fits;
        for (int h = 0; h < 2; ++h) {
            std::vector<Point2d> pts;
            for (std::size_t i = 0; i < halves[h].r.size(); ++i)
                pts.push_back({halves[h].theta[i], halves[h].r[i]});
            try {
                fits[h] = fit_cubic(pts);
            } catch (const std::runtime_error&) {
            }
        }
        dump_polar_csv(dump_dir + "/polar.csv", halves, anomalies, fits);
    }

    if (anomalies[0].empty() && anomalies[1].empty()) return mask;
    return repair_contour(halves, anomalies, mask.width(), mask.height());
}

} // namespace

ExtractResult extract_leaf(const RgbImage& input, const PipelineConfig& cfg,
                           const std::string& dump_dir) {
    RgbImage img = resize_longest_side(input, cfg.resize_limit);

    const bool dump = !dump_dir.empty();
    if (dump) std::filesystem::create_directories(dump_dir);

    BackgroundDebug bg_debug;
    BinaryMask bg = build_background_marker(img, cfg.background, dump ? &bg_debug : nullptr);
    if (dump) {
        write_png(dump_dir + "/bg_index.png", bg_debug.index_background);
        write_png(dump_dir + "/bg_rules.png", bg_debug.rule_background);
        write_png(dump_dir + "/bg_entropy.png", bg_debug.entropy_background);
        write_png(dump_dir + "/bg_marker.png", bg);
    }

    LeafMarkerDebug leaf_debug;
    BinaryMask leaf_marker = build_leaf_marker(img, bg, cfg.leaf, dump ? &leaf_debug : nullptr);
    if (dump) {
        write_png(dump_dir + "/gray_smoothed.png", leaf_debug.smoothed);
        write_png(dump_dir + "/maxima.png", leaf_debug.maxima);
        dump_labels(dump_dir + "/prepass_labels.png", leaf_debug.prepass);
        write_png(dump_dir + "/selected_region.png", leaf_debug.selected);
        write_png(dump_dir + "/leaf_marker.png", leaf_marker);
    }
    if (leaf_marker.empty()) throw NoLeafError();

    BinaryMask initial = segment(img, leaf_marker, bg, cfg.method, cfg.graphcut);
    if (dump) write_png(dump_dir + "/initial_mask.png", initial);

    BinaryMask refined = initial;
    if (cfg.refine == RefineMode::Veins || cfg.refine == RefineMode::Full)
        refined = refine_with_veins(refined, img, leaf_marker, bg, cfg.method, cfg.graphcut,
                                    cfg.refinement);
    if (cfg.refine == RefineMode::Contour || cfg.refine == RefineMode::Full)
        refined = repair_shape(refined, img, cfg, dump_dir);
    refined.set_role(MaskRole::LeafMask);
    if (dump) write_png(dump_dir + "/refined_mask.png", refined);

    return {refined, initial, bg, leaf_marker};
}

RgbImage overlay_boundary(const RgbImage& img, const BinaryMask& mask) {
    RgbImage out = img;
    BinaryMask boundary = mask_boundary(mask);
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x)
            if (boundary.get(x, y)) out.at(x, y) = {255, 0, 0};
    return out;
}

} // namespace leafseg
