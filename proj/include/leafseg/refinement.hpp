#pragma once

#include <array>
#include <optional>
#include <span>

#include "leafseg/core.hpp"
#include "leafseg/segmentation.hpp"

namespace leafseg {

/// Detected line in normal form rho = x cos(theta) + y sin(theta), with the
/// accumulator strength and the extreme inlier pixels along the line.
struct VeinLine {
    double rho = 0;      // signed px from the image origin
    double theta = 0;    // radians in [0, pi)
    int strength = 0;    // accumulator votes
    Point2d span_a{};    // inlier extent endpoints
    Point2d span_b{};
};

struct RefineParams {
    int min_votes = 20;
    double symmetry_threshold = 0.70;
    double secondary_min_angle_deg = 30;
    double secondary_max_angle_deg = 150;
    double collinear_rho_tol = 1.0;
    double collinear_theta_tol_deg = 2.0;
    int vein_dilate_radius = 2;
    int interior_erosion_radius = 2;
    int candidate_lines = 3; // boundary lines tried as replacement primaries
    int anomaly_window = 15;
    double anomaly_k = 2.5;
};

/// Standard (rho, theta) Hough accumulator over the edge pixels; peaks
/// above min_votes after 3x3 accumulator NMS, strongest first.
std::vector<VeinLine> hough_lines(const BinaryMask& edges, double rho_step = 1.0,
                                  double theta_step_deg = 1.0, int min_votes = 20);

/// Strongest line within the leaf interior (leaf eroded to exclude its
/// boundary edges). Throws NoVeinError when nothing reaches min_votes.
VeinLine detect_primary_vein(const BinaryMask& leaf, const GrayImage& img,
                             const RefineParams& params = {});

/// Interior lines at 30-150 degrees to the primary whose span intersects
/// the leaf.
std::vector<VeinLine> detect_secondary_veins(const BinaryMask& leaf, const GrayImage& img,
                                             const VeinLine& primary,
                                             const RefineParams& params = {});

/// IoU of the mask with its reflection across the line.
double symmetry_score(const BinaryMask& leaf, const VeinLine& axis);

/// Vein-driven refinement (three-case update of the leaf marker followed by
/// re-segmentation); degrades to the identity when no case applies.
BinaryMask refine_with_veins(const BinaryMask& initial, const RgbImage& img,
                             const BinaryMask& leaf_marker, const BinaryMask& bg_marker,
                             SegMethod method, const GraphCutParams& gc_params = {},
                             const RefineParams& params = {});

/// One leaf half in polar form around the primary-vein centroid; thetas are
/// radians at 1-degree steps, strictly increasing (unwrapped past 2 pi when
/// the half crosses zero).
struct PolarContour {
    Point2d origin{};
    std::vector<double> theta; // radians
    std::vector<double> r;     // px, >= 0
    int half_id = 0;
};

/// Max-radius polar trace of the leaf boundary split into the two halves on
/// either side of the primary vein. Throws when the origin falls outside
/// the leaf.
std::array<PolarContour, 2> contour_to_polar(const BinaryMask& leaf, const VeinLine& primary);

struct AnomalousInterval {
    int begin = 0; // sample indices, inclusive
    int end = 0;
};

/// Sliding-window std-dev outliers: samples whose window std exceeds
/// k x (median window std); runs shorter than 3 samples dropped, runs
/// within 3 samples merged. Too few samples gives an empty list.
std::vector<AnomalousInterval> detect_anomalous_segments(const PolarContour& half,
                                                         int window = 15, double k = 2.5);

struct CubicFit {
    double a = 0, b = 0, c = 0, d = 0; // y = ax^3 + bx^2 + cx + d
    double residual_rms = 0;
};

/// Least-squares cubic via normal equations on x standardised to zero mean
/// and unit std (coefficients reported in the original coordinates).
/// Throws "underdetermined" with fewer than 4 distinct x.
CubicFit fit_cubic(std::span<const Point2d> points);

/// Replace each half's anomalous radii with the cubic fitted to its smooth
/// samples and rasterise the repaired contour back to a filled mask.
BinaryMask repair_contour(const std::array<PolarContour, 2>& halves,
                          const std::array<std::vector<AnomalousInterval>, 2>& anomalies,
                          int width, int height);

double evaluate_cubic(const CubicFit& fit, double x);

} // namespace leafseg
