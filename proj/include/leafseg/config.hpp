#pragma once

#include <string>

#include "leafseg/background_marker.hpp"
#include "leafseg/leaf_marker.hpp"
#include "leafseg/refinement.hpp"
#include "leafseg/segmentation.hpp"

namespace leafseg {

enum class RefineMode { None, Veins, Contour, Full };

RefineMode refine_mode_from_string(const std::string& s);
std::string to_string(RefineMode mode);
SegMethod seg_method_from_string(const std::string& s);
std::string to_string(SegMethod method);

/// Every tunable of the pipeline in one flat table; the defaults mirror the
/// per-stage constants (600-px resize, 3x3 entropy window with the 220
/// threshold, 100-px / 50-px cleanup rule, 0.95 solidity target, 30-150
/// degree secondary-vein window, ...).
struct PipelineConfig {
    SegMethod method = SegMethod::Watershed;
    RefineMode refine = RefineMode::Full;
    int resize_limit = 600;
    double edge_low_percentile = 0.70;
    double edge_high_percentile = 0.90;
    BackgroundRuleParams background;
    LeafMarkerParams leaf;
    GraphCutParams graphcut;
    RefineParams refinement;
};

/// Parse a flat `key = value` config file ('#' comments). Unknown keys are
/// rejected.
PipelineConfig parse_config_file(const std::string& path);
PipelineConfig parse_config_text(const std::string& text);

/// Apply a single `key=value` override (CLI flags use this as well).
void apply_config_entry(PipelineConfig& cfg, const std::string& key, const std::string& value);

std::string serialize_config(const PipelineConfig& cfg);

} // namespace leafseg
