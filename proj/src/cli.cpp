#include "leafseg/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "leafseg/evaluation.hpp"
#include "leafseg/imageio.hpp"
#include "leafseg/imageops.hpp"
#include "leafseg/pipeline.hpp"

namespace leafseg {

namespace {

namespace fs = std::filesystem;

constexpr int EXIT_IO = 1;
constexpr int EXIT_NO_LEAF = 2;

PipelineConfig load_config(const std::string& config_path,
                           const std::vector<std::string>& overrides,
                           const std::string& method, const std::string& refine) {
    PipelineConfig cfg = config_path.empty() ? PipelineConfig{} : parse_config_file(config_path);
    if (!method.empty()) apply_config_entry(cfg, "method", method);
    if (!refine.empty()) apply_config_entry(cfg, "refine", refine);
    for (const std::string& kv : overrides) {
        auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("--set expects key=value, got '" + kv + "'");
        apply_config_entry(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    return cfg;
}

int cmd_extract(const std::string& input, const std::string& out_mask,
                const std::string& out_overlay, const std::string& dump_dir,
                const PipelineConfig& cfg) {
    RgbImage img = read_rgb(input);
    ExtractResult result = extract_leaf(img, cfg, dump_dir);
    write_png(out_mask, result.mask);
    if (!out_overlay.empty()) {
        RgbImage resized = resize_longest_side(img, cfg.resize_limit);
        write_png(out_overlay, overlay_boundary(resized, result.mask));
    }
    std::cout << "mask=" << out_mask << " leaf_px=" << result.mask.count() << "\n";
    return 0;
}

int cmd_eval(const std::string& mask_path, const std::string& gt_path) {
    BinaryMask mask = read_mask(mask_path);
    BinaryMask truth = read_mask(gt_path);
    if (mask.width() != truth.width() || mask.height() != truth.height()) {
        std::cerr << "error: mask dimensions " << mask.width() << "x" << mask.height()
                  << " differ from ground truth " << truth.width() << "x" << truth.height()
                  << "\n";
        return EXIT_IO;
    }
    auto [p, r] = precision_recall(mask, truth);
    std::cout << std::fixed << std::setprecision(4) << "precision=" << p << " recall=" << r
              << "\n";
    return 0;
}

std::vector<CorpusItem> load_directory_corpus(const std::string& dir, const std::string& gt_dir) {
    std::map<std::string, fs::path> truths;
    for (const auto& entry : fs::directory_iterator(gt_dir))
        if (entry.is_regular_file()) truths[entry.path().stem().string()] = entry.path();

    std::vector<std::pair<std::string, fs::path>> inputs;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        auto ext = entry.path().extension().string();
        if (ext != ".png" && ext != ".jpg" && ext != ".jpeg" && ext != ".PNG" && ext != ".JPG")
            continue;
        inputs.emplace_back(entry.path().stem().string(), entry.path());
    }
    std::sort(inputs.begin(), inputs.end());

    std::vector<CorpusItem> items;
    for (const auto& [stem, path] : inputs) {
        auto it = truths.find(stem);
        if (it == truths.end()) continue;
        items.push_back({stem, read_rgb(path.string()), read_mask(it->second.string())});
    }
    return items;
}

int cmd_batch(const std::string& dir, const std::string& gt_dir, int synthetic,
              std::uint64_t seed, const std::string& scene, const std::string& report_path,
              const std::string& overlay_dir, bool timings, bool table, int workers,
              const PipelineConfig& cfg) {
    std::vector<CorpusItem> items;
    if (synthetic > 0) {
        items = synthetic_corpus(synthetic, seed, scene_kind_from_string(scene));
    } else {
        if (dir.empty() || gt_dir.empty()) {
            std::cerr << "error: batch needs either <dir> --gt <dir> or --synthetic N\n";
            return EXIT_IO;
        }
        items = load_directory_corpus(dir, gt_dir);
    }
    if (items.empty()) {
        std::cerr << "error: no image/ground-truth pairs found\n";
        return EXIT_IO;
    }

    EvaluationReport report = evaluate_corpus(items, cfg, workers, overlay_dir);
    std::string text = format_report(report, timings);
    if (!report_path.empty()) {
        std::ofstream out(report_path);
        if (!out) {
            std::cerr << "error: cannot write report '" << report_path << "'\n";
            return EXIT_IO;
        }
        out << text;
    }
    if (table) std::cout << format_report_table(report);
    std::cout << "images=" << report.images.size() << " processed=" << report.processed()
              << " failed=" << report.failed() << std::fixed << std::setprecision(4)
              << " mean_precision=" << report.mean_precision()
              << " mean_recall=" << report.mean_recall() << "\n";
    return 0;
}

} // namespace

int run_cli(const std::vector<std::string>& args) {
    CLI::App app{"Front-most leaf extraction from outdoor images"};
    app.require_subcommand(1);

    std::string config_path, method, refine;
    std::vector<std::string> overrides;

    auto add_config_options = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "flat key = value config file");
        cmd->add_option("--method", method, "watershed|graphcut");
        cmd->add_option("--refine", refine, "none|veins|contour|full");
        cmd->add_option("--set", overrides, "override a config key (key=value)");
    };

    // extract
    std::string in_path, out_mask = "leaf_mask.png", out_overlay, dump_dir;
    CLI::App* extract = app.add_subcommand("extract", "extract the front-most leaf");
    extract->add_option("input", in_path, "input image (PNG or JPEG)")->required();
    extract->add_option("--out-mask", out_mask, "output mask PNG");
    extract->add_option("--out-overlay", out_overlay, "overlay PNG (boundary in red)");
    extract->add_option("--dump-intermediate", dump_dir, "directory for stage dumps");
    add_config_options(extract);

    // eval
    std::string eval_mask, eval_gt;
    CLI::App* eval = app.add_subcommand("eval", "score a mask against ground truth");
    eval->add_option("mask", eval_mask)->required();
    eval->add_option("gt", eval_gt)->required();

    // batch
    std::string batch_dir, batch_gt, report_path, overlay_dir, scene = "easy";
    int synthetic = 0, workers = 0;
    std::uint64_t seed = 1;
    bool timings = false, table = false;
    CLI::App* batch = app.add_subcommand("batch", "evaluate a corpus");
    batch->add_option("dir", batch_dir, "input image directory");
    batch->add_option("--gt", batch_gt, "ground-truth directory (paired by stem)");
    batch->add_option("--synthetic", synthetic, "use N generated scenes instead of a directory");
    batch->add_option("--seed", seed, "base seed for --synthetic");
    batch->add_option("--scene", scene, "easy|occluded|textured|veined");
    batch->add_option("--report", report_path, "write the key/value report here");
    batch->add_option("--overlay-dir", overlay_dir, "write per-image boundary overlays here");
    batch->add_flag("--timings", timings, "include wall times in the report");
    batch->add_flag("--table", table, "print a human-readable table");
    batch->add_option("--workers", workers, "worker threads (0 = hardware)");
    add_config_options(batch);

    std::vector<const char*> argv;
    argv.push_back("leafseg");
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : EXIT_IO;
    }

    try {
        if (extract->parsed()) {
            PipelineConfig cfg = load_config(config_path, overrides, method, refine);
            return cmd_extract(in_path, out_mask, out_overlay, dump_dir, cfg);
        }
        if (eval->parsed()) return cmd_eval(eval_mask, eval_gt);
        if (batch->parsed()) {
            PipelineConfig cfg = load_config(config_path, overrides, method, refine);
            return cmd_batch(batch_dir, batch_gt, synthetic, seed, scene, report_path,
                             overlay_dir, timings, table, workers, cfg);
        }
    } catch (const NoLeafError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return EXIT_NO_LEAF;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return EXIT_IO;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return EXIT_IO;
    }
    return EXIT_IO;
}

} // namespace leafseg
