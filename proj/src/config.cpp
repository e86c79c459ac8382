#include "leafseg/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace leafseg {

RefineMode refine_mode_from_string(const std::string& s) {
    if (s == "none") return RefineMode::None;
    if (s == "veins") return RefineMode::Veins;
    if (s == "contour") return RefineMode::Contour;
    if (s == "full") return RefineMode::Full;
    throw std::invalid_argument("unknown refine mode '" + s + "'");
}

std::string to_string(RefineMode mode) {
    switch (mode) {
        case RefineMode::None: return "none";
        case RefineMode::Veins: return "veins";
        case RefineMode::Contour: return "contour";
        case RefineMode::Full: return "full";
    }
    return "?";
}

SegMethod seg_method_from_string(const std::string& s) {
    if (s == "watershed") return SegMethod::Watershed;
    if (s == "graphcut") return SegMethod::GraphCut;
    throw std::invalid_argument("unknown method '" + s + "'");
}

std::string to_string(SegMethod method) {
    return method == SegMethod::Watershed ? "watershed" : "graphcut";
}

namespace {

struct Field {
    std::function<void(PipelineConfig&, const std::string&)> set;
    std::function<std::string(const PipelineConfig&)> get;
};

int parse_int(const std::string& v) {
    std::size_t pos = 0;
    int x = std::stoi(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("bad integer '" + v + "'");
    return x;
}

double parse_double(const std::string& v) {
    std::size_t pos = 0;
    double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("bad number '" + v + "'");
    return x;
}

std::string fmt(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

const std::map<std::string, Field>& fields() {
    auto int_field = [](auto member) {
        return Field{[member](PipelineConfig& c, const std::string& v) { c.*member = parse_int(v); },
                     [member](const PipelineConfig& c) { return std::to_string(c.*member); }};
    };
    auto dbl_field = [](auto member) {
        return Field{[member](PipelineConfig& c, const std::string& v) { c.*member = parse_double(v); },
                     [member](const PipelineConfig& c) { return fmt(c.*member); }};
    };
    auto sub_int = [](auto sub, auto member) {
        return Field{[sub, member](PipelineConfig& c, const std::string& v) { c.*sub.*member = parse_int(v); },
                     [sub, member](const PipelineConfig& c) { return std::to_string(c.*sub.*member); }};
    };
    auto sub_dbl = [](auto sub, auto member) {
        return Field{[sub, member](PipelineConfig& c, const std::string& v) { c.*sub.*member = parse_double(v); },
                     [sub, member](const PipelineConfig& c) { return fmt(c.*sub.*member); }};
    };

    static const std::map<std::string, Field> table = {
        {"method",
         {[](PipelineConfig& c, const std::string& v) { c.method = seg_method_from_string(v); },
          [](const PipelineConfig& c) { return to_string(c.method); }}},
        {"refine",
         {[](PipelineConfig& c, const std::string& v) { c.refine = refine_mode_from_string(v); },
          [](const PipelineConfig& c) { return to_string(c.refine); }}},
        {"resize_limit", int_field(&PipelineConfig::resize_limit)},
        {"edge_low_percentile", dbl_field(&PipelineConfig::edge_low_percentile)},
        {"edge_high_percentile", dbl_field(&PipelineConfig::edge_high_percentile)},
        {"bg_white_r", sub_int(&PipelineConfig::background, &BackgroundRuleParams::white_r)},
        {"bg_white_g", sub_int(&PipelineConfig::background, &BackgroundRuleParams::white_g)},
        {"bg_white_b", sub_int(&PipelineConfig::background, &BackgroundRuleParams::white_b)},
        {"bg_black_max", sub_int(&PipelineConfig::background, &BackgroundRuleParams::black_max)},
        {"bg_entropy_window", sub_int(&PipelineConfig::background, &BackgroundRuleParams::entropy_window)},
        {"bg_entropy_threshold", sub_int(&PipelineConfig::background, &BackgroundRuleParams::entropy_threshold)},
        {"bg_cleanup_min_area", sub_int(&PipelineConfig::background, &BackgroundRuleParams::cleanup_min_area)},
        {"bg_cleanup_distance", sub_dbl(&PipelineConfig::background, &BackgroundRuleParams::cleanup_distance)},
        {"bg_cleanup_erosion_radius", sub_int(&PipelineConfig::background, &BackgroundRuleParams::cleanup_erosion_radius)},
        {"leaf_reconstruction_radius", sub_int(&PipelineConfig::leaf, &LeafMarkerParams::reconstruction_radius)},
        {"leaf_solidity_target", sub_dbl(&PipelineConfig::leaf, &LeafMarkerParams::solidity_target)},
        {"leaf_hue_tolerance_deg", sub_dbl(&PipelineConfig::leaf, &LeafMarkerParams::hue_tolerance_deg)},
        {"leaf_intensity_tolerance", sub_dbl(&PipelineConfig::leaf, &LeafMarkerParams::intensity_tolerance)},
        {"leaf_final_erosion_radius", sub_int(&PipelineConfig::leaf, &LeafMarkerParams::final_erosion_radius)},
        {"graphcut_sigma", sub_dbl(&PipelineConfig::graphcut, &GraphCutParams::sigma)},
        {"graphcut_lambda", sub_dbl(&PipelineConfig::graphcut, &GraphCutParams::lambda)},
        {"hough_min_votes", sub_int(&PipelineConfig::refinement, &RefineParams::min_votes)},
        {"symmetry_threshold", sub_dbl(&PipelineConfig::refinement, &RefineParams::symmetry_threshold)},
        {"secondary_min_angle_deg", sub_dbl(&PipelineConfig::refinement, &RefineParams::secondary_min_angle_deg)},
        {"secondary_max_angle_deg", sub_dbl(&PipelineConfig::refinement, &RefineParams::secondary_max_angle_deg)},
        {"collinear_rho_tol", sub_dbl(&PipelineConfig::refinement, &RefineParams::collinear_rho_tol)},
        {"collinear_theta_tol_deg", sub_dbl(&PipelineConfig::refinement, &RefineParams::collinear_theta_tol_deg)},
        {"vein_dilate_radius", sub_int(&PipelineConfig::refinement, &RefineParams::vein_dilate_radius)},
        {"interior_erosion_radius", sub_int(&PipelineConfig::refinement, &RefineParams::interior_erosion_radius)},
        {"candidate_lines", sub_int(&PipelineConfig::refinement, &RefineParams::candidate_lines)},
        {"anomaly_window", sub_int(&PipelineConfig::refinement, &RefineParams::anomaly_window)},
        {"anomaly_k", sub_dbl(&PipelineConfig::refinement, &RefineParams::anomaly_k)},
    };
    return table;
}

void validate(const PipelineConfig& c) {
    auto fail = [](const std::string& what) {
        throw std::invalid_argument("config: " + what);
    };
    if (c.resize_limit < 1) fail("resize_limit must be >= 1");
    if (!(c.edge_low_percentile >= 0 && c.edge_low_percentile < c.edge_high_percentile &&
          c.edge_high_percentile <= 1))
        fail("edge percentiles must satisfy 0 <= low < high <= 1");
    if (c.background.entropy_window < 3 || c.background.entropy_window % 2 == 0)
        fail("bg_entropy_window must be odd and >= 3");
    if (c.leaf.solidity_target <= 0 || c.leaf.solidity_target > 1)
        fail("leaf_solidity_target must be in (0, 1]");
    if (c.leaf.hue_tolerance_deg <= 0 || c.leaf.intensity_tolerance <= 0)
        fail("similarity tolerances must be positive");
    if (c.graphcut.sigma < 0) fail("graphcut_sigma must be >= 0");
    if (c.graphcut.lambda < 0) fail("graphcut_lambda must be >= 0");
    if (c.refinement.min_votes < 1) fail("hough_min_votes must be >= 1");
}

} // namespace

void apply_config_entry(PipelineConfig& cfg, const std::string& key, const std::string& value) {
    auto it = fields().find(key);
    if (it == fields().end()) throw std::invalid_argument("unknown config key '" + key + "'");
    it->second.set(cfg, value);
    validate(cfg);
}

PipelineConfig parse_config_text(const std::string& text) {
    PipelineConfig cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto notspace = [](unsigned char c) { return !std::isspace(c); };
        line.erase(line.begin(), std::find_if(line.begin(), line.end(), notspace));
        line.erase(std::find_if(line.rbegin(), line.rend(), notspace).base(), line.end());
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": expected key = value");
        std::string key = line.substr(0, eq);
        std::string value = line.substr(eq + 1);
        key.erase(std::find_if(key.rbegin(), key.rend(), notspace).base(), key.end());
        value.erase(value.begin(), std::find_if(value.begin(), value.end(), notspace));
        apply_config_entry(cfg, key, value);
    }
    return cfg;
}

PipelineConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

std::string serialize_config(const PipelineConfig& cfg) {
    std::ostringstream out;
    for (const auto& [key, field] : fields())
        out << key << " = " << field.get(cfg) << "\n";
    return out.str();
}

} // namespace leafseg
