#include "leafseg/refinement.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <unordered_set>

#include "leafseg/imageops.hpp"

namespace leafseg {

namespace {

constexpr double PI = std::numbers::pi;
constexpr std::size_t kMaxLines = 256; // practical cap on returned peaks

double deg2rad(double d) { return d * PI / 180.0; }
double rad2deg(double r) { return r * 180.0 / PI; }

double signed_distance(const VeinLine& line, double x, double y) {
    return x * std::cos(line.theta) + y * std::sin(line.theta) - line.rho;
}

// Undirected angular difference in degrees, in [0, 180).
double line_angle_diff_deg(double theta_a, double theta_b) {
    double d = std::fmod(std::abs(theta_a - theta_b), PI);
    return rad2deg(d);
}

bool collinear(const VeinLine& a, const VeinLine& b, double rho_tol, double theta_tol_deg) {
    double dt = std::abs(a.theta - b.theta);
    if (dt <= deg2rad(theta_tol_deg) && std::abs(a.rho - b.rho) <= rho_tol) return true;
    // theta wraps at pi with the sign of rho flipped
    if (PI - dt <= deg2rad(theta_tol_deg) && std::abs(a.rho + b.rho) <= rho_tol) return true;
    return false;
}

std::vector<Point> pixels_on_segment(Point2d a, Point2d b) {
    double dx = b.x - a.x, dy = b.y - a.y;
    int steps = std::max(1, (int)std::ceil(std::max(std::abs(dx), std::abs(dy))));
    std::vector<Point> out;
    out.reserve(steps + 1);
    for (int i = 0; i <= steps; ++i) {
        double t = (double)i / steps;
        Point p{(int)std::lround(a.x + dx * t), (int)std::lround(a.y + dy * t)};
        if (out.empty() || !(out.back() == p)) out.push_back(p);
    }
    return out;
}

Point2d reflect_point(const VeinLine& axis, double x, double y) {
    double d = signed_distance(axis, x, y);
    return {x - 2.0 * d * std::cos(axis.theta), y - 2.0 * d * std::sin(axis.theta)};
}

BinaryMask reflect_mask(const BinaryMask& mask, const VeinLine& axis) {
    BinaryMask out(mask.width(), mask.height());
    for (int y = 0; y < mask.height(); ++y) {
        for (int x = 0; x < mask.width(); ++x) {
            if (!mask.get(x, y)) continue;
            Point2d p = reflect_point(axis, x, y);
            int rx = (int)std::lround(p.x), ry = (int)std::lround(p.y);
            if (out.in_bounds(rx, ry)) out.set(rx, ry, true);
        }
    }
    return out;
}

} // namespace

std::vector<VeinLine> hough_lines(const BinaryMask& edges, double rho_step,
                                  double theta_step_deg, int min_votes) {
    if (rho_step <= 0 || theta_step_deg <= 0)
        throw std::invalid_argument("hough steps must be positive");
    const int w = edges.width(), h = edges.height();
    const int n_theta = std::max(1, (int)std::lround(180.0 / theta_step_deg));
    const double diag = std::sqrt((double)w * w + (double)h * h);
    const int n_rho_half = (int)std::ceil(diag / rho_step);
    const int n_rho = 2 * n_rho_half + 1;

    std::vector<double> cos_t(n_theta), sin_t(n_theta);
    for (int t = 0; t < n_theta; ++t) {
        double th = deg2rad(t * theta_step_deg);
        cos_t[t] = std::cos(th);
        sin_t[t] = std::sin(th);
    }

    std::vector<Point> pixels;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            if (edges.get(x, y)) pixels.push_back({x, y});

    std::vector<int> acc((std::size_t)n_theta * n_rho, 0);
    auto cell = [&](int t, int r) -> int& { return acc[(std::size_t)t * n_rho + r]; };
    for (const Point& p : pixels) {
        for (int t = 0; t < n_theta; ++t) {
            double rho = p.x * cos_t[t] + p.y * sin_t[t];
            int r = (int)std::lround(rho / rho_step) + n_rho_half;
            ++cell(t, r);
        }
    }

    // 3x3 accumulator NMS; theta wraps around with the rho axis mirrored.
    // Plateau ties break toward the smaller linear index.
    auto neighbour = [&](int t, int r, int dt, int dr, int& nt, int& nr) {
        nt = t + dt;
        nr = r + dr;
        if (nt < 0) {
            nt = n_theta - 1;
            nr = (n_rho - 1) - nr;
        } else if (nt >= n_theta) {
            nt = 0;
            nr = (n_rho - 1) - nr;
        }
        return nr >= 0 && nr < n_rho;
    };

    struct Peak {
        int votes, t, r;
    };
    std::vector<Peak> peaks;
    for (int t = 0; t < n_theta; ++t) {
        for (int r = 0; r < n_rho; ++r) {
            int v = cell(t, r);
            if (v < min_votes) continue;
            long idx = (long)t * n_rho + r;
            bool is_peak = true;
            for (int dt = -1; dt <= 1 && is_peak; ++dt) {
                for (int dr = -1; dr <= 1; ++dr) {
                    if (dt == 0 && dr == 0) continue;
                    int nt, nr;
                    if (!neighbour(t, r, dt, dr, nt, nr)) continue;
                    int nv = cell(nt, nr);
                    long nidx = (long)nt * n_rho + nr;
                    if (nv > v || (nv == v && nidx < idx)) {
                        is_peak = false;
                        break;
                    }
                }
            }
            if (is_peak) peaks.push_back({v, t, r});
        }
    }

    std::sort(peaks.begin(), peaks.end(), [&](const Peak& a, const Peak& b) {
        if (a.votes != b.votes) return a.votes > b.votes;
        if (a.t != b.t) return a.t < b.t;
        return a.r < b.r;
    });
    if (peaks.size() > kMaxLines) peaks.resize(kMaxLines);

    std::vector<VeinLine> lines;
    lines.reserve(peaks.size());
    for (const Peak& pk : peaks) {
        VeinLine line;
        line.theta = deg2rad(pk.t * theta_step_deg);
        line.rho = (pk.r - n_rho_half) * rho_step;
        line.strength = pk.votes;

        // Total-least-squares refit from the peak cell's inliers. Lattice
        // rounding can pile a line's votes into a resonant neighbouring
        // cell (worst near the diagonals), leaving the raw cell more than
        // a bin away from the true line; the refit recovers it.
        {
            double c0 = std::cos(line.theta), s0 = std::sin(line.theta);
            double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
            int m = 0;
            for (const Point& p : pixels) {
                if (std::abs(p.x * c0 + p.y * s0 - line.rho) > 1.5) continue;
                sx += p.x;
                sy += p.y;
                sxx += (double)p.x * p.x;
                syy += (double)p.y * p.y;
                sxy += (double)p.x * p.y;
                ++m;
            }
            if (m >= 2) {
                double mx = sx / m, my = sy / m;
                double cxx = sxx / m - mx * mx;
                double cyy = syy / m - my * my;
                double cxy = sxy / m - mx * my;
                if (cxx + cyy > 0) {
                    // normal of the principal direction
                    double angle = 0.5 * std::atan2(2 * cxy, cxx - cyy);
                    double theta = angle + PI / 2;
                    if (theta < 0) theta += PI;
                    if (theta >= PI) theta -= PI;
                    double rho = mx * std::cos(theta) + my * std::sin(theta);
                    double dt = std::abs(theta - line.theta);
                    dt = std::min(dt, PI - dt);
                    if (dt <= 2.5 * deg2rad(theta_step_deg)) {
                        line.theta = theta;
                        line.rho = rho;
                    }
                }
            }
        }
        // Inlier span: extreme edge pixels within 1.5 px of the line.
        const double ct = std::cos(line.theta), st = std::sin(line.theta);
        double best_lo = 0, best_hi = 0;
        bool found = false;
        for (const Point& p : pixels) {
            double d = p.x * ct + p.y * st - line.rho;
            if (std::abs(d) > 1.5) continue;
            double proj = -p.x * st + p.y * ct;
            if (!found || proj < best_lo) {
                best_lo = found ? std::min(best_lo, proj) : proj;
                line.span_a = {(double)p.x, (double)p.y};
            }
            if (!found || proj > best_hi) {
                best_hi = found ? std::max(best_hi, proj) : proj;
                line.span_b = {(double)p.x, (double)p.y};
            }
            found = true;
        }
        lines.push_back(line);
    }
    return lines;
}

namespace {

BinaryMask interior_edges(const BinaryMask& leaf, const GrayImage& img,
                          const RefineParams& params) {
    BinaryMask interior = erode(leaf, StructElement::disk(params.interior_erosion_radius));
    return mask_intersect(detect_edges(img), interior);
}

bool span_in_mask(const VeinLine& line, const BinaryMask& mask) {
    auto inside = [&](const Point2d& p) {
        int x = (int)std::lround(p.x), y = (int)std::lround(p.y);
        return mask.in_bounds(x, y) && mask.get(x, y);
    };
    return inside(line.span_a) && inside(line.span_b);
}

bool span_intersects_mask(const VeinLine& line, const BinaryMask& mask) {
    for (const Point& p : pixels_on_segment(line.span_a, line.span_b))
        if (mask.in_bounds(p.x, p.y) && mask.get(p.x, p.y)) return true;
    return false;
}

Point2d span_midpoint(const VeinLine& line) {
    return {(line.span_a.x + line.span_b.x) / 2.0, (line.span_a.y + line.span_b.y) / 2.0};
}

} // namespace

VeinLine detect_primary_vein(const BinaryMask& leaf, const GrayImage& img,
                             const RefineParams& params) {
    if (leaf.empty()) throw std::invalid_argument("empty leaf mask");
    BinaryMask edges = interior_edges(leaf, img, params);
    for (const VeinLine& line : hough_lines(edges, 1.0, 1.0, params.min_votes))
        if (span_in_mask(line, leaf)) return line;
    throw NoVeinError();
}

std::vector<VeinLine> detect_secondary_veins(const BinaryMask& leaf, const GrayImage& img,
                                             const VeinLine& primary,
                                             const RefineParams& params) {
    BinaryMask edges = interior_edges(leaf, img, params);
    std::vector<VeinLine> out;
    for (const VeinLine& line : hough_lines(edges, 1.0, 1.0, params.min_votes)) {
        double angle = line_angle_diff_deg(line.theta, primary.theta);
        if (angle < params.secondary_min_angle_deg || angle > params.secondary_max_angle_deg)
            continue;
        if (span_intersects_mask(line, leaf)) out.push_back(line);
    }
    return out;
}

double symmetry_score(const BinaryMask& leaf, const VeinLine& axis) {
    std::unordered_set<std::int64_t> reflected;
    std::size_t inter = 0;
    std::size_t leaf_count = 0;
    for (int y = 0; y < leaf.height(); ++y) {
        for (int x = 0; x < leaf.width(); ++x) {
            if (!leaf.get(x, y)) continue;
            ++leaf_count;
            Point2d p = reflect_point(axis, x, y);
            int rx = (int)std::lround(p.x), ry = (int)std::lround(p.y);
            std::int64_t key = (std::int64_t)(ry + 65536) * 262144 + (rx + 65536);
            if (!reflected.insert(key).second) continue;
            if (leaf.in_bounds(rx, ry) && leaf.get(rx, ry)) ++inter;
        }
    }
    std::size_t uni = leaf_count + reflected.size() - inter;
    return uni == 0 ? 0.0 : (double)inter / (double)uni;
}

namespace {

// Pixels of collinear extensions of `line` found in the full-image edge
// map, outside the current mask.
BinaryMask collinear_extension(const VeinLine& line, const std::vector<VeinLine>& all_lines,
                               const BinaryMask& initial, const RefineParams& params) {
    BinaryMask add(initial.width(), initial.height());
    for (const VeinLine& cand : all_lines) {
        if (!collinear(cand, line, params.collinear_rho_tol, params.collinear_theta_tol_deg))
            continue;
        bool outside = false;
        for (const Point& p : pixels_on_segment(cand.span_a, cand.span_b))
            if (add.in_bounds(p.x, p.y) && !initial.get(p.x, p.y)) {
                outside = true;
                break;
            }
        if (!outside) continue;
        for (const Point& p : pixels_on_segment(cand.span_a, cand.span_b))
            if (add.in_bounds(p.x, p.y)) add.set(p.x, p.y, true);
    }
    return add;
}

void add_span_pixels(BinaryMask& add, const VeinLine& line) {
    for (const Point& p : pixels_on_segment(line.span_a, line.span_b))
        if (add.in_bounds(p.x, p.y)) add.set(p.x, p.y, true);
}

BinaryMask resegment_with(const BinaryMask& additions, const RgbImage& img,
                          const BinaryMask& leaf_marker, const BinaryMask& bg_marker,
                          SegMethod method, const GraphCutParams& gc,
                          const RefineParams& params) {
    BinaryMask grown = dilate(additions, StructElement::disk(params.vein_dilate_radius));
    BinaryMask marker = mask_subtract(mask_union(leaf_marker, grown), bg_marker);
    return segment(img, marker, bg_marker, method, gc);
}

} // namespace

BinaryMask refine_with_veins(const BinaryMask& initial, const RgbImage& img,
                             const BinaryMask& leaf_marker, const BinaryMask& bg_marker,
                             SegMethod method, const GraphCutParams& gc_params,
                             const RefineParams& params) {
    if (initial.empty()) return initial;
    GrayImage gray = to_grayscale(img);

    VeinLine primary;
    try {
        primary = detect_primary_vein(initial, gray, params);
    } catch (const NoVeinError&) {
        return initial;
    }

    const bool symmetric = symmetry_score(initial, primary) >= params.symmetry_threshold;

    if (symmetric) {
        auto secondaries = detect_secondary_veins(initial, gray, primary, params);
        bool pos = false, neg = false;
        for (const VeinLine& s : secondaries) {
            Point2d m = span_midpoint(s);
            double d = signed_distance(primary, m.x, m.y);
            (d >= 0 ? pos : neg) = true;
        }
        if (pos && neg) return initial; // target leaf found
        if (!secondaries.empty()) return initial; // one-sided evidence: no case applies

        // Initial leaf too small: pull in collinear continuations of the
        // primary from the full-image edge map and segment again.
        BinaryMask full_edges = detect_edges(gray);
        auto all_lines = hough_lines(full_edges, 1.0, 1.0, params.min_votes);
        BinaryMask additions = collinear_extension(primary, all_lines, initial, params);
        if (additions.empty()) return initial;
        add_span_pixels(additions, primary);
        return resegment_with(additions, img, leaf_marker, bg_marker, method, gc_params, params);
    }

    // Not symmetric: the detected line may itself be a secondary. Try the
    // strongest boundary-adjacent lines as replacement primaries, accepting
    // one when the mirrored initial reveals secondaries on the far side.
    BinaryMask full_edges = detect_edges(gray);
    auto all_lines = hough_lines(full_edges, 1.0, 1.0, params.min_votes);

    BinaryMask band = dilate(mask_boundary(initial), StructElement::disk(2));
    std::vector<VeinLine> candidates;
    for (const VeinLine& line : all_lines) {
        if (candidates.size() >= (std::size_t)params.candidate_lines) break;
        if (span_intersects_mask(line, band)) candidates.push_back(line);
    }

    // Side of the candidate carrying the bulk of the current mask.
    auto mask_side = [&](const VeinLine& axis) {
        double sum = 0;
        for (int y = 0; y < initial.height(); ++y)
            for (int x = 0; x < initial.width(); ++x)
                if (initial.get(x, y)) sum += signed_distance(axis, x, y);
        return sum >= 0 ? 1.0 : -1.0;
    };

    for (const VeinLine& cand : candidates) {
        BinaryMask mirrored = mask_subtract(reflect_mask(initial, cand), initial);
        if (mirrored.empty()) continue;
        double near_side = mask_side(cand);

        std::vector<VeinLine> far_secondaries;
        for (const VeinLine& line : all_lines) {
            double angle = line_angle_diff_deg(line.theta, cand.theta);
            if (angle < params.secondary_min_angle_deg || angle > params.secondary_max_angle_deg)
                continue;
            Point2d m = span_midpoint(line);
            double d = signed_distance(cand, m.x, m.y);
            if (d * near_side >= 0) continue; // want the far side
            int mx = (int)std::lround(m.x), my = (int)std::lround(m.y);
            if (!mirrored.in_bounds(mx, my) || !mirrored.get(mx, my)) continue;
            far_secondaries.push_back(line);
        }
        if (far_secondaries.empty()) continue;

        BinaryMask additions = collinear_extension(cand, all_lines, initial, params);
        add_span_pixels(additions, cand);
        for (const VeinLine& s : far_secondaries) add_span_pixels(additions, s);
        return resegment_with(additions, img, leaf_marker, bg_marker, method, gc_params, params);
    }
    return initial;
}

std::array<PolarContour, 2> contour_to_polar(const BinaryMask& leaf, const VeinLine& primary) {
    if (leaf.empty()) throw std::invalid_argument("empty leaf mask");
    Point2d origin = span_midpoint(primary);
    int ox = (int)std::lround(origin.x), oy = (int)std::lround(origin.y);
    if (!leaf.in_bounds(ox, oy) || !leaf.get(ox, oy))
        throw std::runtime_error("origin outside region");

    BinaryMask boundary = mask_boundary(leaf);

    // Max radius per 1-degree ray, measured to the outer edge of the
    // boundary pixel (+0.5) so a rasterised round-trip reproduces the mask;
    // rays with no boundary pixel within 0.5 degrees are filled by circular
    // linear interpolation.
    std::vector<double> radius(360, -1.0);
    for (int y = 0; y < leaf.height(); ++y) {
        for (int x = 0; x < leaf.width(); ++x) {
            if (!boundary.get(x, y)) continue;
            double dx = x - origin.x, dy = y - origin.y;
            double r = std::hypot(dx, dy);
            if (r == 0) continue;
            double ang = rad2deg(std::atan2(dy, dx));
            if (ang < 0) ang += 360.0;
            int k = (int)std::lround(ang) % 360;
            radius[k] = std::max(radius[k], r + 0.5);
        }
    }

    int defined = -1;
    for (int k = 0; k < 360; ++k)
        if (radius[k] >= 0) { defined = k; break; }
    if (defined < 0) throw std::runtime_error("origin outside region");
    for (int step = 0, k = defined; step < 360; ++step, k = (k + 1) % 360) {
        int nk = (k + 1) % 360;
        if (radius[nk] >= 0) continue;
        int gap = 1;
        while (radius[(k + 1 + gap) % 360] < 0) ++gap;
        double r0 = radius[k], r1 = radius[(k + 1 + gap) % 360];
        for (int i = 0; i < gap; ++i)
            radius[(k + 1 + i) % 360] = r0 + (r1 - r0) * (i + 1) / (gap + 1);
        step += gap;
        k = (k + gap) % 360;
    }

    // Split at the primary-vein direction; each half is one contiguous run
    // of 180 rays, thetas unwrapped so they increase strictly.
    double axis_dir = primary.theta + PI / 2.0; // line direction angle
    auto half_of = [&](int k) {
        double rel = std::fmod(deg2rad((double)k) - axis_dir, 2.0 * PI);
        if (rel < 0) rel += 2.0 * PI;
        return rel < PI ? 0 : 1;
    };

    int start = 0;
    while (!(half_of(start) == 0 && half_of((start + 359) % 360) == 1)) {
        ++start;
        if (start == 360) { start = 0; break; } // degenerate split
    }

    std::array<PolarContour, 2> halves;
    halves[0].origin = halves[1].origin = origin;
    halves[0].half_id = 0;
    halves[1].half_id = 1;
    for (int i = 0; i < 360; ++i) {
        int k = (start + i) % 360;
        double theta = deg2rad((double)(start + i)); // unwrapped
        int h = half_of(k);
        halves[h].theta.push_back(theta);
        halves[h].r.push_back(radius[k]);
    }
    return halves;
}

std::vector<AnomalousInterval> detect_anomalous_segments(const PolarContour& half,
                                                         int window, double k) {
    const int n = (int)half.r.size();
    if (window < 1 || n < 2 * window) return {};
    const int hw = window / 2;

    std::vector<double> win_std(n);
    for (int i = 0; i < n; ++i) {
        int lo = std::max(0, i - hw), hi = std::min(n - 1, i + hw);
        double mean = 0;
        for (int j = lo; j <= hi; ++j) mean += half.r[j];
        int cnt = hi - lo + 1;
        mean /= cnt;
        double var = 0;
        for (int j = lo; j <= hi; ++j) var += (half.r[j] - mean) * (half.r[j] - mean);
        win_std[i] = std::sqrt(var / cnt);
    }

    std::vector<double> sorted = win_std;
    std::size_t mid = (sorted.size() - 1) / 2;
    std::nth_element(sorted.begin(), sorted.begin() + mid, sorted.end());
    double median = sorted[mid];
    double threshold = k * median;

    std::vector<std::uint8_t> flag(n, 0);
    for (int i = 0; i < n; ++i) flag[i] = win_std[i] > threshold;

    std::vector<AnomalousInterval> runs;
    for (int i = 0; i < n;) {
        if (!flag[i]) { ++i; continue; }
        int j = i;
        while (j + 1 < n && flag[j + 1]) ++j;
        runs.push_back({i, j});
        i = j + 1;
    }
    // Drop short blips, then merge near-adjacent runs.
    std::erase_if(runs, [](const AnomalousInterval& r) { return r.end - r.begin + 1 < 3; });
    std::vector<AnomalousInterval> merged;
    for (const auto& r : runs) {
        if (!merged.empty() && r.begin - merged.back().end <= 3)
            merged.back().end = r.end;
        else
            merged.push_back(r);
    }
    return merged;
}

double evaluate_cubic(const CubicFit& fit, double x) {
    return ((fit.a * x + fit.b) * x + fit.c) * x + fit.d;
}

CubicFit fit_cubic(std::span<const Point2d> points) {
    std::vector<double> xs;
    for (const auto& p : points) xs.push_back(p.x);
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    if (xs.size() < 4) throw std::runtime_error("underdetermined");

    const double n = (double)points.size();
    double mean = 0;
    for (const auto& p : points) mean += p.x;
    mean /= n;
    double var = 0;
    for (const auto& p : points) var += (p.x - mean) * (p.x - mean);
    double sd = std::sqrt(var / n);

    // Normal equations on the standardised abscissa.
    double pow_sum[7] = {};
    double rhs[4] = {};
    for (const auto& p : points) {
        double u = (p.x - mean) / sd;
        double up[7];
        up[0] = 1;
        for (int i = 1; i < 7; ++i) up[i] = up[i - 1] * u;
        for (int i = 0; i < 7; ++i) pow_sum[i] += up[i];
        for (int i = 0; i < 4; ++i) rhs[i] += up[3 - i] * p.y;
    }
    double m[4][5];
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) m[i][j] = pow_sum[6 - i - j];
        m[i][4] = rhs[i];
    }
    // Gaussian elimination with partial pivoting.
    for (int col = 0; col < 4; ++col) {
        int piv = col;
        for (int row = col + 1; row < 4; ++row)
            if (std::abs(m[row][col]) > std::abs(m[piv][col])) piv = row;
        std::swap(m[col], m[piv]);
        if (m[col][col] == 0) throw std::runtime_error("underdetermined");
        for (int row = col + 1; row < 4; ++row) {
            double f = m[row][col] / m[col][col];
            for (int j = col; j < 5; ++j) m[row][j] -= f * m[col][j];
        }
    }
    double coef[4];
    for (int i = 3; i >= 0; --i) {
        double acc = m[i][4];
        for (int j = i + 1; j < 4; ++j) acc -= m[i][j] * coef[j];
        coef[i] = acc / m[i][i];
    }
    double ap = coef[0], bp = coef[1], cp = coef[2], dp = coef[3];

    CubicFit fit;
    double s1 = sd, s2 = sd * sd, s3 = sd * sd * sd;
    fit.a = ap / s3;
    fit.b = -3 * ap * mean / s3 + bp / s2;
    fit.c = 3 * ap * mean * mean / s3 - 2 * bp * mean / s2 + cp / s1;
    fit.d = -ap * mean * mean * mean / s3 + bp * mean * mean / s2 - cp * mean / s1 + dp;

    double sq = 0;
    for (const auto& p : points) {
        double u = (p.x - mean) / sd;
        double pred = ((ap * u + bp) * u + cp) * u + dp;
        sq += (p.y - pred) * (p.y - pred);
    }
    fit.residual_rms = std::sqrt(sq / n);
    return fit;
}

BinaryMask repair_contour(const std::array<PolarContour, 2>& halves,
                          const std::array<std::vector<AnomalousInterval>, 2>& anomalies,
                          int width, int height) {
    std::array<std::vector<double>, 2> repaired;
    for (int h = 0; h < 2; ++h) {
        const PolarContour& half = halves[h];
        repaired[h] = half.r;
        if (anomalies[h].empty()) continue;

        std::vector<std::uint8_t> bad(half.r.size(), 0);
        for (const auto& iv : anomalies[h])
            for (int i = std::max(0, iv.begin); i <= std::min((int)half.r.size() - 1, iv.end); ++i)
                bad[i] = 1;

        std::vector<Point2d> smooth;
        for (std::size_t i = 0; i < half.r.size(); ++i)
            if (!bad[i]) smooth.push_back({half.theta[i], half.r[i]});
        try {
            CubicFit fit = fit_cubic(smooth);
            for (std::size_t i = 0; i < half.r.size(); ++i)
                if (bad[i])
                    repaired[h][i] = std::max(0.0, evaluate_cubic(fit, half.theta[i]));
        } catch (const std::runtime_error&) {
            // fit failed: leave this half as-is
        }
    }

    // Rebuild the closed contour in angular order and scanline-fill it.
    std::vector<Point2d> polygon;
    for (int h = 0; h < 2; ++h) {
        const PolarContour& half = halves[h];
        for (std::size_t i = 0; i < half.theta.size(); ++i) {
            double th = half.theta[i], r = repaired[h][i];
            polygon.push_back({half.origin.x + r * std::cos(th),
                               half.origin.y + r * std::sin(th)});
        }
    }

    BinaryMask out(width, height, false, MaskRole::LeafMask);
    if (polygon.size() < 3) return out;
    for (int y = 0; y < height; ++y) {
        std::vector<double> xs;
        for (std::size_t i = 0; i < polygon.size(); ++i) {
            const Point2d& a = polygon[i];
            const Point2d& b = polygon[(i + 1) % polygon.size()];
            if ((a.y <= y && y < b.y) || (b.y <= y && y < a.y)) {
                double t = (y - a.y) / (b.y - a.y);
                xs.push_back(a.x + t * (b.x - a.x));
            }
        }
        std::sort(xs.begin(), xs.end());
        for (std::size_t i = 0; i + 1 < xs.size(); i += 2) {
            int x0 = std::max(0, (int)std::ceil(xs[i]));
            int x1 = std::min(width - 1, (int)std::floor(xs[i + 1]));
            for (int x = x0; x <= x1; ++x) out.set(x, y, true);
        }
    }
    return out;
}

} // namespace leafseg
