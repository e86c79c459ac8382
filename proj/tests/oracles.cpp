#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace oracles {

namespace {
constexpr int DX8[] = {1, -1, 0, 0, 1, 1, -1, -1};
constexpr int DY8[] = {0, 0, 1, -1, 1, -1, 1, -1};
constexpr int DX4[] = {1, -1, 0, 0};
constexpr int DY4[] = {0, 0, 1, -1};
} // namespace

GrayImage naive_reconstruct_dilation(const GrayImage& marker, const GrayImage& mask) {
    GrayImage f = marker;
    bool changed = true;
    while (changed) {
        changed = false;
        GrayImage next = f;
        for (int y = 0; y < f.height(); ++y)
            for (int x = 0; x < f.width(); ++x) {
                std::uint8_t v = f.at(x, y);
                for (int d = 0; d < 8; ++d) {
                    int nx = x + DX8[d], ny = y + DY8[d];
                    if (f.in_bounds(nx, ny)) v = std::max(v, f.at(nx, ny));
                }
                v = std::min(v, mask.at(x, y));
                if (v != next.at(x, y)) {
                    next.at(x, y) = v;
                    changed = true;
                }
            }
        f = next;
    }
    return f;
}

GrayImage naive_reconstruct_erosion(const GrayImage& marker, const GrayImage& mask) {
    GrayImage f = marker;
    bool changed = true;
    while (changed) {
        changed = false;
        GrayImage next = f;
        for (int y = 0; y < f.height(); ++y)
            for (int x = 0; x < f.width(); ++x) {
                std::uint8_t v = f.at(x, y);
                for (int d = 0; d < 8; ++d) {
                    int nx = x + DX8[d], ny = y + DY8[d];
                    if (f.in_bounds(nx, ny)) v = std::min(v, f.at(nx, ny));
                }
                v = std::max(v, mask.at(x, y));
                if (v != next.at(x, y)) {
                    next.at(x, y) = v;
                    changed = true;
                }
            }
        f = next;
    }
    return f;
}

FloatImage brute_force_edt(const BinaryMask& mask) {
    FloatImage out(mask.width(), mask.height());
    for (int y = 0; y < mask.height(); ++y)
        for (int x = 0; x < mask.width(); ++x) {
            double best = std::numeric_limits<double>::infinity();
            for (int fy = 0; fy < mask.height(); ++fy)
                for (int fx = 0; fx < mask.width(); ++fx)
                    if (mask.get(fx, fy)) {
                        double d = std::hypot(x - fx, y - fy);
                        best = std::min(best, d);
                    }
            out.at(x, y) = best;
        }
    return out;
}

namespace {

BinaryMask plateau_extrema(const FloatImage& img, bool maxima) {
    BinaryMask out(img.width(), img.height());
    for (int y0 = 0; y0 < img.height(); ++y0) {
        for (int x0 = 0; x0 < img.width(); ++x0) {
            double level = img.at(x0, y0);
            // flood this pixel's plateau from scratch
            std::vector<leafseg::Point> stack{{x0, y0}};
            leafseg::Image<std::uint8_t> seen(img.width(), img.height(), 0);
            seen.at(x0, y0) = 1;
            bool extremum = true;
            while (!stack.empty()) {
                auto p = stack.back();
                stack.pop_back();
                for (int d = 0; d < 8; ++d) {
                    int nx = p.x + DX8[d], ny = p.y + DY8[d];
                    if (!img.in_bounds(nx, ny)) continue;
                    double nv = img.at(nx, ny);
                    if (nv == level) {
                        if (!seen.at(nx, ny)) {
                            seen.at(nx, ny) = 1;
                            stack.push_back({nx, ny});
                        }
                    } else if (maxima ? nv > level : nv < level) {
                        extremum = false;
                    }
                }
            }
            out.set(x0, y0, extremum);
        }
    }
    return out;
}

} // namespace

BinaryMask plateau_regional_maxima(const FloatImage& img) { return plateau_extrema(img, true); }
BinaryMask plateau_regional_minima(const FloatImage& img) { return plateau_extrema(img, false); }

int otsu_exhaustive(const std::array<std::uint64_t, 256>& hist) {
    int best_t = -1;
    __int128 best_num = -1;
    __int128 best_den = 1;
    int lone = -1, populated = 0;
    for (int i = 0; i < 256; ++i)
        if (hist[i]) {
            ++populated;
            lone = i;
        }
    if (populated == 1) return lone;

    for (int t = 0; t < 255; ++t) {
        std::uint64_t w0 = 0, w1 = 0, s0 = 0, s1 = 0;
        for (int i = 0; i <= t; ++i) {
            w0 += hist[i];
            s0 += hist[i] * (std::uint64_t)i;
        }
        for (int i = t + 1; i < 256; ++i) {
            w1 += hist[i];
            s1 += hist[i] * (std::uint64_t)i;
        }
        if (w0 == 0 || w1 == 0) continue;
        __int128 diff = (__int128)s0 * w1 - (__int128)s1 * w0;
        __int128 num = diff * diff;
        __int128 den = (__int128)w0 * w1;
        if (best_t < 0 || num * best_den > best_num * den) {
            best_t = t;
            best_num = num;
            best_den = den;
        }
    }
    return best_t < 0 ? 0 : best_t;
}

namespace {

struct PathState {
    const FloatImage* relief;
    const LabelMap* seeds;
    std::vector<std::uint8_t> on_path;
    std::vector<double>* best; // per pixel, for the current basin
};

// Enumerate every simple path forward from `pixel`; `value` is the max
// relief over interior pixels visited so far (the endpoint seed excluded).
void dfs(PathState& st, int pixel, double value) {
    int w = st.relief->width();
    double& b = (*st.best)[pixel];
    if (value < b) b = value;
    int px = pixel % w, py = pixel / w;
    for (int d = 0; d < 4; ++d) {
        int nx = px + DX4[d], ny = py + DY4[d];
        if (nx < 0 || nx >= w || ny < 0 || ny >= st.relief->height()) continue;
        int q = ny * w + nx;
        if (st.on_path[q]) continue;
        if (st.seeds->labels.data()[q] > 0) continue; // interiors avoid seeds
        st.on_path[q] = 1;
        dfs(st, q, std::max(value, st.relief->data()[pixel]));
        st.on_path[q] = 0;
    }
}

} // namespace

LabelMap minimax_watershed(const FloatImage& relief, const LabelMap& seeds) {
    const int w = relief.width(), h = relief.height();
    const int n = w * h;
    const double inf = std::numeric_limits<double>::infinity();

    std::int32_t max_label = 0;
    for (auto v : seeds.labels.data()) max_label = std::max(max_label, v);

    std::vector<std::vector<double>> best(max_label + 1,
                                          std::vector<double>(n, inf));
    for (std::int32_t basin = 1; basin <= max_label; ++basin) {
        PathState st{&relief, &seeds, std::vector<std::uint8_t>(n, 0), &best[basin]};
        for (int i = 0; i < n; ++i) {
            if (seeds.labels.data()[i] != basin) continue;
            // paths start at each seed pixel; its own value is not interior
            st.on_path.assign(n, 0);
            st.on_path[i] = 1;
            int px = i % w, py = i / w;
            for (int d = 0; d < 4; ++d) {
                int nx = px + DX4[d], ny = py + DY4[d];
                if (nx < 0 || nx >= w || ny < 0 || ny >= h) continue;
                int q = ny * w + nx;
                if (seeds.labels.data()[q] > 0) continue;
                st.on_path[q] = 1;
                dfs(st, q, -inf);
                st.on_path[q] = 0;
            }
        }
    }

    LabelMap out(w, h);
    out.region_count = seeds.region_count;
    for (int i = 0; i < n; ++i) {
        if (seeds.labels.data()[i] > 0) {
            out.labels.data()[i] = seeds.labels.data()[i];
            continue;
        }
        double lo = inf;
        int who = 0;
        bool tie = false;
        for (std::int32_t basin = 1; basin <= max_label; ++basin) {
            double v = best[basin][i];
            if (v < lo) {
                lo = v;
                who = basin;
                tie = false;
            } else if (v == lo && v < inf && basin != who) {
                tie = true;
            }
        }
        out.labels.data()[i] = (lo == inf || tie) ? 0 : who;
    }
    return out;
}

double exhaustive_min_cut(const leafseg::SeededGraph& g) {
    const int n = g.node_count;
    std::vector<int> others;
    for (int i = 0; i < n; ++i)
        if (i != g.source && i != g.sink) others.push_back(i);

    double best = std::numeric_limits<double>::infinity();
    const std::uint64_t subsets = 1ull << others.size();
    for (std::uint64_t bits = 0; bits < subsets; ++bits) {
        std::vector<char> in_s(n, 0);
        in_s[g.source] = 1;
        for (std::size_t k = 0; k < others.size(); ++k)
            if (bits & (1ull << k)) in_s[others[k]] = 1;
        double cut = 0;
        for (const auto& arc : g.arcs)
            if (in_s[arc.from] && !in_s[arc.to]) cut += arc.capacity;
        best = std::min(best, cut);
    }
    return best;
}

LsqResult qr_cubic_fit(const std::vector<Point2d>& points) {
    const int m = (int)points.size();
    const int cols = 4;
    std::vector<std::vector<long double>> A(m, std::vector<long double>(cols));
    std::vector<long double> b(m);
    for (int i = 0; i < m; ++i) {
        long double x = points[i].x;
        A[i][0] = x * x * x;
        A[i][1] = x * x;
        A[i][2] = x;
        A[i][3] = 1;
        b[i] = points[i].y;
    }

    // Householder QR, applied to [A | b].
    for (int k = 0; k < cols; ++k) {
        long double norm = 0;
        for (int i = k; i < m; ++i) norm += A[i][k] * A[i][k];
        norm = std::sqrt((double)norm);
        if (norm == 0) continue;
        long double alpha = A[k][k] > 0 ? -norm : norm;
        std::vector<long double> v(m, 0);
        v[k] = A[k][k] - alpha;
        for (int i = k + 1; i < m; ++i) v[i] = A[i][k];
        long double vtv = 0;
        for (int i = k; i < m; ++i) vtv += v[i] * v[i];
        if (vtv == 0) continue;
        for (int j = k; j < cols; ++j) {
            long double dot = 0;
            for (int i = k; i < m; ++i) dot += v[i] * A[i][j];
            long double f = 2 * dot / vtv;
            for (int i = k; i < m; ++i) A[i][j] -= f * v[i];
        }
        long double dot = 0;
        for (int i = k; i < m; ++i) dot += v[i] * b[i];
        long double f = 2 * dot / vtv;
        for (int i = k; i < m; ++i) b[i] -= f * v[i];
    }

    std::vector<long double> coef(cols, 0);
    for (int i = cols - 1; i >= 0; --i) {
        long double acc = b[i];
        for (int j = i + 1; j < cols; ++j) acc -= A[i][j] * coef[j];
        coef[i] = A[i][i] == 0 ? 0 : acc / A[i][i];
    }
    long double sq = 0;
    for (int i = cols; i < m; ++i) sq += b[i] * b[i];

    return {(double)coef[0], (double)coef[1], (double)coef[2], (double)coef[3],
            std::sqrt((double)(sq / m))};
}

} // namespace oracles
