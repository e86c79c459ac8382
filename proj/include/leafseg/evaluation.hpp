#pragma once

#include <optional>
#include <string>
#include <utility>

#include "leafseg/config.hpp"
#include "leafseg/synthetic.hpp"

namespace leafseg {

/// P = |L n G| / |L|, R = |L n G| / |G|; an empty denominator scores 0.
std::pair<double, double> precision_recall(const BinaryMask& extracted,
                                           const BinaryMask& truth);

struct ImageScore {
    std::string id;
    bool ok = false;
    std::string error;
    double precision = 0;
    double recall = 0;
    double initial_precision = 0; // before refinement
    double initial_recall = 0;
    std::uint64_t mask_px = 0;
    std::uint64_t truth_px = 0;
    std::uint64_t intersection_px = 0;
    double wall_ms = 0;
};

struct EvaluationReport {
    std::vector<ImageScore> images;
    bool refinement_enabled = false;

    int processed() const;
    int failed() const;
    int zero_count() const; // P = R = 0 among processed
    double mean_precision() const;
    double mean_recall() const;
    double mean_precision_excl_zero() const;
    double mean_recall_excl_zero() const;
    double mean_initial_precision() const;
    double mean_initial_recall() const;
};

struct CorpusItem {
    std::string id;
    RgbImage image;
    BinaryMask truth;
};

/// Run the pipeline over every pair and score it. Ground truths are
/// resized nearest-neighbour to the working scale when needed. Unreadable
/// or failing items are recorded and excluded from the means. `workers`
/// = 0 picks the hardware count (capped by the LEAFSEG_WORKERS env var);
/// results are keyed by item so the report is order-deterministic. When
/// `overlay_dir` is set, a boundary overlay PNG is written per image.
EvaluationReport evaluate_corpus(const std::vector<CorpusItem>& items,
                                 const PipelineConfig& cfg, int workers = 0,
                                 const std::string& overlay_dir = {});

std::vector<CorpusItem> synthetic_corpus(int count, std::uint64_t seed, SceneKind kind);

/// Machine-readable key/value report, one record per image plus an
/// aggregate line. Timings are included only on request so that repeated
/// runs produce byte-identical reports.
std::string format_report(const EvaluationReport& report, bool with_timings = false);

/// Human-readable table.
std::string format_report_table(const EvaluationReport& report);

} // namespace leafseg
