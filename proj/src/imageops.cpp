#include "leafseg/imageops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>

namespace leafseg {

StructElement StructElement::disk(int radius) {
    if (radius < 0) throw std::invalid_argument("disk radius must be >= 0");
    StructElement se;
    for (int dy = -radius; dy <= radius; ++dy)
        for (int dx = -radius; dx <= radius; ++dx)
            if (dx * dx + dy * dy <= radius * radius)
                se.offsets.push_back({dx, dy});
    return se;
}

StructElement StructElement::square(int side) {
    if (side < 1 || side % 2 == 0)
        throw std::invalid_argument("square side must be odd and >= 1");
    StructElement se;
    int r = side / 2;
    for (int dy = -r; dy <= r; ++dy)
        for (int dx = -r; dx <= r; ++dx)
            se.offsets.push_back({dx, dy});
    return se;
}

RgbImage resize_longest_side(const RgbImage& img, int limit) {
    if (limit < 1) throw std::invalid_argument("resize limit must be >= 1");
    int w = img.width(), h = img.height();
    if (std::max(w, h) <= limit) return img;

    double scale = static_cast<double>(limit) / std::max(w, h);
    auto half_up = [](double v) { return static_cast<int>(std::floor(v + 0.5)); };
    int nw = (w >= h) ? limit : std::max(1, half_up(w * scale));
    int nh = (h > w) ? limit : std::max(1, half_up(h * scale));

    RgbImage out(nw, nh);
    double sx = static_cast<double>(w) / nw;
    double sy = static_cast<double>(h) / nh;
    for (int y = 0; y < nh; ++y) {
        double fy = (y + 0.5) * sy - 0.5;
        int y0 = static_cast<int>(std::floor(fy));
        double wy = fy - y0;
        for (int x = 0; x < nw; ++x) {
            double fx = (x + 0.5) * sx - 0.5;
            int x0 = static_cast<int>(std::floor(fx));
            double wx = fx - x0;
            const Rgb& p00 = img.at_clamped(x0, y0);
            const Rgb& p10 = img.at_clamped(x0 + 1, y0);
            const Rgb& p01 = img.at_clamped(x0, y0 + 1);
            const Rgb& p11 = img.at_clamped(x0 + 1, y0 + 1);
            auto mix = [&](std::uint8_t a, std::uint8_t b, std::uint8_t c, std::uint8_t d) {
                double v = (1 - wy) * ((1 - wx) * a + wx * b) + wy * ((1 - wx) * c + wx * d);
                return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
            };
            out.at(x, y) = {mix(p00.r, p10.r, p01.r, p11.r),
                            mix(p00.g, p10.g, p01.g, p11.g),
                            mix(p00.b, p10.b, p01.b, p11.b)};
        }
    }
    return out;
}

BinaryMask resize_mask_nearest(const BinaryMask& mask, int width, int height) {
    BinaryMask out(width, height, false, mask.role());
    double sx = static_cast<double>(mask.width()) / width;
    double sy = static_cast<double>(mask.height()) / height;
    for (int y = 0; y < height; ++y) {
        int syi = std::min(mask.height() - 1, static_cast<int>((y + 0.5) * sy));
        for (int x = 0; x < width; ++x) {
            int sxi = std::min(mask.width() - 1, static_cast<int>((x + 0.5) * sx));
            out.set(x, y, mask.get(sxi, syi));
        }
    }
    return out;
}

GrayImage to_grayscale(const RgbImage& img) {
    GrayImage out(img.width(), img.height());
    const auto& src = img.data();
    auto& dst = out.data();
    for (std::size_t i = 0; i < src.size(); ++i) {
        double v = 0.299 * src[i].r + 0.587 * src[i].g + 0.114 * src[i].b;
        dst[i] = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
    }
    return out;
}

HsiPlanes rgb_to_hsi(const RgbImage& img) {
    HsiPlanes p{FloatImage(img.width(), img.height()),
                FloatImage(img.width(), img.height()),
                FloatImage(img.width(), img.height())};
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            const Rgb& c = img.at(x, y);
            double r = c.r, g = c.g, b = c.b;
            double sum = r + g + b;
            p.intensity.at(x, y) = sum / 765.0;
            if (sum == 0) {
                p.saturation.at(x, y) = 0;
                p.hue.at(x, y) = nan;
                continue;
            }
            double s = 1.0 - 3.0 * std::min({r, g, b}) / sum;
            p.saturation.at(x, y) = s;
            if (s == 0) {
                p.hue.at(x, y) = nan;
                continue;
            }
            double num = 0.5 * ((r - g) + (r - b));
            double den = std::sqrt((r - g) * (r - g) + (r - b) * (g - b));
            double arg = den == 0 ? 1.0 : std::clamp(num / den, -1.0, 1.0);
            double h = std::acos(arg) * 180.0 / std::numbers::pi;
            if (b > g) h = 360.0 - h;
            if (h >= 360.0) h = 0.0;
            p.hue.at(x, y) = h;
        }
    }
    return p;
}

FloatImage gradient_magnitude(const GrayImage& img) {
    FloatImage out(img.width(), img.height());
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            auto v = [&](int dx, int dy) {
                return static_cast<double>(img.at_clamped(x + dx, y + dy));
            };
            double gx = (v(1, -1) + 2 * v(1, 0) + v(1, 1)) -
                        (v(-1, -1) + 2 * v(-1, 0) + v(-1, 1));
            double gy = (v(-1, 1) + 2 * v(0, 1) + v(1, 1)) -
                        (v(-1, -1) + 2 * v(0, -1) + v(1, -1));
            out.at(x, y) = std::sqrt(gx * gx + gy * gy);
        }
    }
    return out;
}

namespace {

template <typename T, typename Reduce>
Image<T> morph(const Image<T>& img, const StructElement& se, T pad, Reduce reduce) {
    Image<T> out(img.width(), img.height());
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            T acc = pad;
            for (const Point& o : se.offsets) {
                int nx = x + o.x, ny = y + o.y;
                T v = img.in_bounds(nx, ny) ? img.at(nx, ny) : pad;
                acc = reduce(acc, v);
            }
            out.at(x, y) = acc;
        }
    }
    return out;
}

template <typename T>
Image<T> erode_impl(const Image<T>& img, const StructElement& se) {
    T pad = std::numeric_limits<T>::max();
    return morph(img, se, pad, [](T a, T b) { return std::min(a, b); });
}

template <typename T>
Image<T> dilate_impl(const Image<T>& img, const StructElement& se) {
    T pad = std::numeric_limits<T>::lowest();
    return morph(img, se, pad, [](T a, T b) { return std::max(a, b); });
}

} // namespace

GrayImage erode(const GrayImage& img, const StructElement& se) { return erode_impl(img, se); }
GrayImage dilate(const GrayImage& img, const StructElement& se) { return dilate_impl(img, se); }
FloatImage erode(const FloatImage& img, const StructElement& se) { return erode_impl(img, se); }
FloatImage dilate(const FloatImage& img, const StructElement& se) { return dilate_impl(img, se); }

BinaryMask erode(const BinaryMask& mask, const StructElement& se) {
    return BinaryMask(erode_impl(mask.pixels(), se), mask.role());
}
BinaryMask dilate(const BinaryMask& mask, const StructElement& se) {
    return BinaryMask(dilate_impl(mask.pixels(), se), mask.role());
}

LabelMap connected_components(const BinaryMask& mask, int connectivity) {
    if (connectivity != 4 && connectivity != 8)
        throw std::invalid_argument("connectivity must be 4 or 8");
    const int w = mask.width(), h = mask.height();
    LabelMap out(w, h);
    static const int dx8[] = {1, -1, 0, 0, 1, 1, -1, -1};
    static const int dy8[] = {0, 0, 1, -1, 1, -1, 1, -1};
    int ndirs = connectivity == 4 ? 4 : 8;

    std::vector<Point> stack;
    int next = 0;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (!mask.get(x, y) || out.at(x, y) != 0) continue;
            ++next;
            out.at(x, y) = next;
            stack.push_back({x, y});
            while (!stack.empty()) {
                Point p = stack.back();
                stack.pop_back();
                for (int d = 0; d < ndirs; ++d) {
                    int nx = p.x + dx8[d], ny = p.y + dy8[d];
                    if (!mask.in_bounds(nx, ny)) continue;
                    if (!mask.get(nx, ny) || out.at(nx, ny) != 0) continue;
                    out.at(nx, ny) = next;
                    stack.push_back({nx, ny});
                }
            }
        }
    }
    out.region_count = next;
    return out;
}

namespace {

// Felzenszwalb-Huttenlocher 1-D squared distance transform. Infinite
// entries (no source in this scanline) never enter the envelope.
void edt_1d(const std::vector<double>& f, std::vector<double>& d,
            std::vector<int>& v, std::vector<double>& z, int n) {
    const double inf = std::numeric_limits<double>::infinity();
    int k = -1;
    for (int q = 0; q < n; ++q) {
        if (f[q] == inf) continue;
        double s = 0;
        while (k >= 0) {
            s = ((f[q] + q * (double)q) - (f[v[k]] + v[k] * (double)v[k])) /
                (2.0 * q - 2.0 * v[k]);
            if (s <= z[k]) --k;
            else break;
        }
        if (k < 0) {
            k = 0;
            v[0] = q;
            z[0] = -inf;
            z[1] = inf;
        } else {
            ++k;
            v[k] = q;
            z[k] = s;
            z[k + 1] = inf;
        }
    }
    if (k < 0) {
        std::fill(d.begin(), d.begin() + n, inf);
        return;
    }
    k = 0;
    for (int q = 0; q < n; ++q) {
        while (z[k + 1] < q) ++k;
        double dq = q - (double)v[k];
        d[q] = dq * dq + f[v[k]];
    }
}

} // namespace

FloatImage distance_to_mask(const BinaryMask& mask) {
    if (mask.empty()) throw std::invalid_argument("no reference pixels");
    const int w = mask.width(), h = mask.height();
    const double inf = std::numeric_limits<double>::infinity();
    FloatImage sq(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            sq.at(x, y) = mask.get(x, y) ? 0.0 : inf;

    int n = std::max(w, h);
    std::vector<double> f(n), d(n), z(n + 1);
    std::vector<int> v(n);

    for (int x = 0; x < w; ++x) {
        for (int y = 0; y < h; ++y) f[y] = sq.at(x, y);
        edt_1d(f, d, v, z, h);
        for (int y = 0; y < h; ++y) sq.at(x, y) = d[y];
    }
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) f[x] = sq.at(x, y);
        edt_1d(f, d, v, z, w);
        for (int x = 0; x < w; ++x) sq.at(x, y) = d[x];
    }
    for (auto& val : sq.data()) val = std::sqrt(val);
    return sq;
}

std::vector<Point2d> convex_hull(std::span<const Point2d> points) {
    if (points.empty()) throw std::invalid_argument("empty region");
    std::vector<Point2d> pts(points.begin(), points.end());
    std::sort(pts.begin(), pts.end(), [](const Point2d& a, const Point2d& b) {
        return a.x != b.x ? a.x < b.x : a.y < b.y;
    });
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [](const Point2d& a, const Point2d& b) {
                              return a.x == b.x && a.y == b.y;
                          }),
              pts.end());
    if (pts.size() <= 2) return pts;

    auto cross = [](const Point2d& o, const Point2d& a, const Point2d& b) {
        return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
    };
    std::vector<Point2d> hull(2 * pts.size());
    std::size_t k = 0;
    for (const auto& p : pts) {
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0) --k;
        hull[k++] = p;
    }
    std::size_t lower = k + 1;
    for (auto it = pts.rbegin() + 1; it != pts.rend(); ++it) {
        while (k >= lower && cross(hull[k - 2], hull[k - 1], *it) <= 0) --k;
        hull[k++] = *it;
    }
    hull.resize(k - 1);
    return hull;
}

double convex_hull_area(std::span<const Point2d> points) {
    auto hull = convex_hull(points);
    if (hull.size() < 3) return 0.0;
    double acc = 0;
    for (std::size_t i = 0; i < hull.size(); ++i) {
        const Point2d& a = hull[i];
        const Point2d& b = hull[(i + 1) % hull.size()];
        acc += a.x * b.y - b.x * a.y;
    }
    return std::abs(acc) / 2.0;
}

BinaryMask detect_edges(const GrayImage& img, double low_percentile,
                        double high_percentile) {
    if (!(low_percentile >= 0 && low_percentile < high_percentile && high_percentile <= 1))
        throw std::invalid_argument("percentiles must satisfy 0 <= low < high <= 1");
    const int w = img.width(), h = img.height();
    BinaryMask out(w, h, false, MaskRole::EdgeMap);

    // Directional Sobel, needed for NMS.
    FloatImage mag(w, h), gx(w, h), gy(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            auto v = [&](int dx, int dy) {
                return static_cast<double>(img.at_clamped(x + dx, y + dy));
            };
            double sx = (v(1, -1) + 2 * v(1, 0) + v(1, 1)) -
                        (v(-1, -1) + 2 * v(-1, 0) + v(-1, 1));
            double sy = (v(-1, 1) + 2 * v(0, 1) + v(1, 1)) -
                        (v(-1, -1) + 2 * v(0, -1) + v(1, -1));
            gx.at(x, y) = sx;
            gy.at(x, y) = sy;
            mag.at(x, y) = std::sqrt(sx * sx + sy * sy);
        }
    }

    std::vector<double> nonzero;
    nonzero.reserve(mag.size());
    for (double m : mag.data())
        if (m > 0) nonzero.push_back(m);
    if (nonzero.empty()) return out;

    auto percentile = [&](double q) {
        std::size_t idx = static_cast<std::size_t>(
            std::llround(q * (double)(nonzero.size() - 1)));
        std::nth_element(nonzero.begin(), nonzero.begin() + idx, nonzero.end());
        return nonzero[idx];
    };
    double high = percentile(high_percentile);
    double low = percentile(low_percentile);

    // NMS along the quantized gradient direction; the strict test on the
    // negative side thins two-wide plateaus to a single line.
    auto direction = [&](int x, int y) -> Point {
        double a = std::atan2(gy.at(x, y), gx.at(x, y)) * 180.0 / std::numbers::pi;
        if (a < 0) a += 180.0;
        if (a < 22.5 || a >= 157.5) return {1, 0};
        if (a < 67.5) return {1, 1};
        if (a < 112.5) return {0, 1};
        return {-1, 1};
    };
    Image<std::uint8_t> survives(w, h, 0);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double m = mag.at(x, y);
            if (m <= 0 || m < low) continue;
            Point d = direction(x, y);
            double back = mag.in_bounds(x - d.x, y - d.y) ? mag.at(x - d.x, y - d.y) : 0;
            double fwd = mag.in_bounds(x + d.x, y + d.y) ? mag.at(x + d.x, y + d.y) : 0;
            if (m > back && m >= fwd) survives.at(x, y) = 1;
        }
    }

    // Hysteresis: grow from strong survivors through weak ones (8-conn).
    std::vector<Point> stack;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            if (survives.at(x, y) && mag.at(x, y) >= high) {
                out.set(x, y, true);
                stack.push_back({x, y});
            }
    static const int dx8[] = {1, -1, 0, 0, 1, 1, -1, -1};
    static const int dy8[] = {0, 0, 1, -1, 1, -1, 1, -1};
    while (!stack.empty()) {
        Point p = stack.back();
        stack.pop_back();
        for (int d = 0; d < 8; ++d) {
            int nx = p.x + dx8[d], ny = p.y + dy8[d];
            if (!out.in_bounds(nx, ny) || out.get(nx, ny)) continue;
            if (survives.at(nx, ny) && mag.at(nx, ny) >= low) {
                out.set(nx, ny, true);
                stack.push_back({nx, ny});
            }
        }
    }
    return out;
}

BinaryMask mask_boundary(const BinaryMask& mask) {
    BinaryMask out(mask.width(), mask.height());
    for (int y = 0; y < mask.height(); ++y) {
        for (int x = 0; x < mask.width(); ++x) {
            if (!mask.get(x, y)) continue;
            bool edge = x == 0 || y == 0 || x == mask.width() - 1 || y == mask.height() - 1;
            if (!edge) {
                edge = !mask.get(x - 1, y) || !mask.get(x + 1, y) ||
                       !mask.get(x, y - 1) || !mask.get(x, y + 1);
            }
            out.set(x, y, edge);
        }
    }
    return out;
}

} // namespace leafseg
