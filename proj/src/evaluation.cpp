#include "leafseg/evaluation.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <sstream>
#include <thread>

#include "leafseg/imageio.hpp"
#include "leafseg/imageops.hpp"
#include "leafseg/pipeline.hpp"

namespace leafseg {

std::pair<double, double> precision_recall(const BinaryMask& extracted,
                                           const BinaryMask& truth) {
    if (extracted.width() != truth.width() || extracted.height() != truth.height())
        throw std::invalid_argument("mask dimensions differ");
    std::uint64_t l = 0, g = 0, both = 0;
    const auto& le = extracted.pixels().data();
    const auto& gt = truth.pixels().data();
    for (std::size_t i = 0; i < le.size(); ++i) {
        bool a = le[i] != 0, b = gt[i] != 0;
        l += a;
        g += b;
        both += a && b;
    }
    double p = l == 0 ? 0.0 : static_cast<double>(both) / static_cast<double>(l);
    double r = g == 0 ? 0.0 : static_cast<double>(both) / static_cast<double>(g);
    return {p, r};
}

int EvaluationReport::processed() const {
    int n = 0;
    for (const auto& s : images) n += s.ok;
    return n;
}

int EvaluationReport::failed() const { return static_cast<int>(images.size()) - processed(); }

int EvaluationReport::zero_count() const {
    int n = 0;
    for (const auto& s : images) n += s.ok && s.precision == 0 && s.recall == 0;
    return n;
}

namespace {

double mean_of(const std::vector<ImageScore>& images, double ImageScore::* field,
               bool exclude_zero) {
    double sum = 0;
    int n = 0;
    for (const auto& s : images) {
        if (!s.ok) continue;
        if (exclude_zero && s.precision == 0 && s.recall == 0) continue;
        sum += s.*field;
        ++n;
    }
    return n == 0 ? 0.0 : sum / n;
}

} // namespace

double EvaluationReport::mean_precision() const {
    return mean_of(images, &ImageScore::precision, false);
}
double EvaluationReport::mean_recall() const {
    return mean_of(images, &ImageScore::recall, false);
}
double EvaluationReport::mean_precision_excl_zero() const {
    return mean_of(images, &ImageScore::precision, true);
}
double EvaluationReport::mean_recall_excl_zero() const {
    return mean_of(images, &ImageScore::recall, true);
}
double EvaluationReport::mean_initial_precision() const {
    return mean_of(images, &ImageScore::initial_precision, false);
}
double EvaluationReport::mean_initial_recall() const {
    return mean_of(images, &ImageScore::initial_recall, false);
}

EvaluationReport evaluate_corpus(const std::vector<CorpusItem>& items,
                                 const PipelineConfig& cfg, int workers,
                                 const std::string& overlay_dir) {
    EvaluationReport report;
    report.refinement_enabled = cfg.refine != RefineMode::None;
    report.images.resize(items.size());
    if (!overlay_dir.empty()) std::filesystem::create_directories(overlay_dir);

    if (workers <= 0) {
        workers = static_cast<int>(std::thread::hardware_concurrency());
        if (workers < 1) workers = 1;
    }
    if (const char* env = std::getenv("LEAFSEG_WORKERS")) {
        int cap = std::atoi(env);
        if (cap >= 1) workers = std::min(workers, cap);
    }
    workers = std::min<int>(workers, std::max<std::size_t>(items.size(), 1));

    std::atomic<std::size_t> cursor{0};
    auto run = [&]() {
        while (true) {
            std::size_t i = cursor.fetch_add(1);
            if (i >= items.size()) break;
            const CorpusItem& item = items[i];
            ImageScore& score = report.images[i];
            score.id = item.id;
            auto start = std::chrono::steady_clock::now();
            try {
                ExtractResult result = extract_leaf(item.image, cfg);
                BinaryMask truth = item.truth;
                if (truth.width() != result.mask.width() ||
                    truth.height() != result.mask.height())
                    truth = resize_mask_nearest(truth, result.mask.width(),
                                                result.mask.height());
                auto [p, r] = precision_recall(result.mask, truth);
                auto [ip, ir] = precision_recall(result.initial, truth);
                score.ok = true;
                score.precision = p;
                score.recall = r;
                score.initial_precision = ip;
                score.initial_recall = ir;
                score.mask_px = result.mask.count();
                score.truth_px = truth.count();
                BinaryMask inter = mask_intersect(result.mask, truth);
                score.intersection_px = inter.count();
                if (!overlay_dir.empty()) {
                    RgbImage resized = resize_longest_side(item.image, cfg.resize_limit);
                    write_png(overlay_dir + "/" + item.id + ".png",
                              overlay_boundary(resized, result.mask));
                }
            } catch (const std::exception& e) {
                score.ok = false;
                score.error = e.what();
            }
            score.wall_ms = std::chrono::duration<double, std::milli>(
                                std::chrono::steady_clock::now() - start)
                                .count();
        }
    };

    if (workers == 1) {
        run();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < workers; ++t) pool.emplace_back(run);
        for (auto& t : pool) t.join();
    }
    return report;
}

std::vector<CorpusItem> synthetic_corpus(int count, std::uint64_t seed, SceneKind kind) {
    std::vector<CorpusItem> items;
    items.reserve(count);
    for (int i = 0; i < count; ++i) {
        SyntheticScene scene = generate_synthetic_scene(seed + static_cast<std::uint64_t>(i), kind);
        std::ostringstream id;
        id << to_string(kind) << '_' << std::setfill('0') << std::setw(3) << i;
        items.push_back({id.str(), std::move(scene.image), std::move(scene.truth)});
    }
    return items;
}

namespace {

std::string fixed4(double v) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(4) << v;
    return os.str();
}

} // namespace

std::string format_report(const EvaluationReport& report, bool with_timings) {
    std::ostringstream out;
    for (const auto& s : report.images) {
        out << "image=" << s.id;
        if (!s.ok) {
            out << " status=failed error=\"" << s.error << "\"";
            if (with_timings) out << " time_ms=" << std::llround(s.wall_ms);
            out << "\n";
            continue;
        }
        out << " status=ok precision=" << fixed4(s.precision) << " recall=" << fixed4(s.recall);
        if (report.refinement_enabled)
            out << " initial_precision=" << fixed4(s.initial_precision)
                << " initial_recall=" << fixed4(s.initial_recall);
        out << " mask_px=" << s.mask_px << " truth_px=" << s.truth_px
            << " intersection_px=" << s.intersection_px;
        if (with_timings) out << " time_ms=" << std::llround(s.wall_ms);
        out << "\n";
    }
    out << "aggregate images=" << report.images.size() << " processed=" << report.processed()
        << " failed=" << report.failed() << " zero=" << report.zero_count()
        << " mean_precision=" << fixed4(report.mean_precision())
        << " mean_recall=" << fixed4(report.mean_recall())
        << " mean_precision_excl_zero=" << fixed4(report.mean_precision_excl_zero())
        << " mean_recall_excl_zero=" << fixed4(report.mean_recall_excl_zero());
    if (report.refinement_enabled)
        out << " initial_mean_precision=" << fixed4(report.mean_initial_precision())
            << " initial_mean_recall=" << fixed4(report.mean_initial_recall());
    out << "\n";
    return out.str();
}

std::string format_report_table(const EvaluationReport& report) {
    std::ostringstream out;
    out << std::left << std::setw(16) << "image" << std::right << std::setw(10) << "precision"
        << std::setw(10) << "recall" << std::setw(12) << "mask_px" << std::setw(12)
        << "truth_px" << "\n";
    for (const auto& s : report.images) {
        out << std::left << std::setw(16) << s.id << std::right;
        if (s.ok)
            out << std::setw(10) << fixed4(s.precision) << std::setw(10) << fixed4(s.recall)
                << std::setw(12) << s.mask_px << std::setw(12) << s.truth_px;
        else
            out << std::setw(10) << "failed" << "  " << s.error;
        out << "\n";
    }
    out << std::left << std::setw(16) << "mean" << std::right << std::setw(10)
        << fixed4(report.mean_precision()) << std::setw(10) << fixed4(report.mean_recall())
        << "\n";
    return out.str();
}

} // namespace leafseg
