#include "leafseg/reconstruction.hpp"

#include <algorithm>
#include <deque>
#include <limits>

namespace leafseg {

namespace {

constexpr int DX8[] = {1, -1, 0, 0, 1, 1, -1, -1};
constexpr int DY8[] = {0, 0, 1, -1, 1, -1, 1, -1};

// Vincent's hybrid algorithm: raster pass, anti-raster pass with queue
// seeding, then queue propagation. Ordering policy selects the dual.
template <typename T, bool ByDilation>
Image<T> reconstruct_impl(const Image<T>& marker, const Image<T>& mask) {
    const int w = marker.width(), h = marker.height();
    if (!mask.same_size(w, h))
        throw std::invalid_argument("marker/mask dimensions differ");
    for (std::size_t i = 0; i < marker.size(); ++i) {
        bool ordered = ByDilation ? marker.data()[i] <= mask.data()[i]
                                  : marker.data()[i] >= mask.data()[i];
        if (!ordered) throw std::invalid_argument("marker/mask ordering");
    }

    auto inner = [](T a, T b) { return ByDilation ? std::max(a, b) : std::min(a, b); };
    auto clip = [](T a, T b) { return ByDilation ? std::min(a, b) : std::max(a, b); };
    auto before = [](T a, T b) { return ByDilation ? a < b : a > b; };

    Image<T> f = marker;

    // Raster pass: propagate from the already-visited half-neighbourhood.
    static const int rdx[] = {-1, 0, 1, -1};
    static const int rdy[] = {0, -1, -1, -1};
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            T v = f.at(x, y);
            for (int d = 0; d < 4; ++d) {
                int nx = x + rdx[d], ny = y + rdy[d];
                if (f.in_bounds(nx, ny)) v = inner(v, f.at(nx, ny));
            }
            f.at(x, y) = clip(v, mask.at(x, y));
        }
    }

    // Anti-raster pass; queue pixels that still have work to push.
    std::deque<Point> queue;
    for (int y = h - 1; y >= 0; --y) {
        for (int x = w - 1; x >= 0; --x) {
            T v = f.at(x, y);
            for (int d = 0; d < 4; ++d) {
                int nx = x - rdx[d], ny = y - rdy[d];
                if (f.in_bounds(nx, ny)) v = inner(v, f.at(nx, ny));
            }
            v = clip(v, mask.at(x, y));
            f.at(x, y) = v;
            for (int d = 0; d < 4; ++d) {
                int nx = x - rdx[d], ny = y - rdy[d];
                if (!f.in_bounds(nx, ny)) continue;
                if (before(f.at(nx, ny), v) && before(f.at(nx, ny), mask.at(nx, ny))) {
                    queue.push_back({x, y});
                    break;
                }
            }
        }
    }

    while (!queue.empty()) {
        Point p = queue.front();
        queue.pop_front();
        T v = f.at(p.x, p.y);
        for (int d = 0; d < 8; ++d) {
            int nx = p.x + DX8[d], ny = p.y + DY8[d];
            if (!f.in_bounds(nx, ny)) continue;
            T& n = f.at(nx, ny);
            if (before(n, v) && n != mask.at(nx, ny)) {
                n = clip(v, mask.at(nx, ny));
                queue.push_back({nx, ny});
            }
        }
    }
    return f;
}

template <typename T>
BinaryMask regional_maxima_impl(const Image<T>& img) {
    const int w = img.width(), h = img.height();
    BinaryMask out(w, h);
    Image<std::uint8_t> state(w, h, 0); // 0 unvisited, 1 max plateau, 2 rejected
    std::vector<Point> plateau, stack;

    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (state.at(x, y) != 0) continue;
            T level = img.at(x, y);
            bool is_max = true;
            plateau.clear();
            stack.push_back({x, y});
            state.at(x, y) = 1;
            while (!stack.empty()) {
                Point p = stack.back();
                stack.pop_back();
                plateau.push_back(p);
                for (int d = 0; d < 8; ++d) {
                    int nx = p.x + DX8[d], ny = p.y + DY8[d];
                    if (!img.in_bounds(nx, ny)) continue;
                    T nv = img.at(nx, ny);
                    if (nv == level) {
                        if (state.at(nx, ny) == 0) {
                            state.at(nx, ny) = 1;
                            stack.push_back({nx, ny});
                        }
                    } else if (nv > level) {
                        is_max = false;
                    }
                }
            }
            for (const Point& p : plateau) {
                state.at(p.x, p.y) = 2;
                if (is_max) out.set(p.x, p.y, true);
            }
        }
    }
    return out;
}

} // namespace

GrayImage reconstruct_by_dilation(const GrayImage& marker, const GrayImage& mask) {
    return reconstruct_impl<std::uint8_t, true>(marker, mask);
}
FloatImage reconstruct_by_dilation(const FloatImage& marker, const FloatImage& mask) {
    return reconstruct_impl<double, true>(marker, mask);
}
GrayImage reconstruct_by_erosion(const GrayImage& marker, const GrayImage& mask) {
    return reconstruct_impl<std::uint8_t, false>(marker, mask);
}
FloatImage reconstruct_by_erosion(const FloatImage& marker, const FloatImage& mask) {
    return reconstruct_impl<double, false>(marker, mask);
}

GrayImage open_by_reconstruction(const GrayImage& img, const StructElement& se) {
    return reconstruct_by_dilation(erode(img, se), img);
}

GrayImage close_by_reconstruction(const GrayImage& img, const StructElement& se) {
    return reconstruct_by_erosion(dilate(img, se), img);
}

BinaryMask regional_maxima(const GrayImage& img) { return regional_maxima_impl(img); }
BinaryMask regional_maxima(const FloatImage& img) { return regional_maxima_impl(img); }

BinaryMask regional_minima(const FloatImage& img) {
    FloatImage neg(img.width(), img.height());
    for (std::size_t i = 0; i < img.size(); ++i)
        neg.data()[i] = -img.data()[i];
    return regional_maxima_impl(neg);
}

FloatImage impose_minima(const FloatImage& relief, const BinaryMask& seeds) {
    if (seeds.empty()) throw std::invalid_argument("empty seeds");
    if (!relief.same_size(seeds.width(), seeds.height()))
        throw std::invalid_argument("relief/seeds dimensions differ");

    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (double v : relief.data()) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    double sentinel = lo - 1.0;
    double big = hi + 2.0;

    FloatImage marker(relief.width(), relief.height());
    FloatImage mask(relief.width(), relief.height());
    for (int y = 0; y < relief.height(); ++y) {
        for (int x = 0; x < relief.width(); ++x) {
            bool s = seeds.get(x, y);
            marker.at(x, y) = s ? sentinel : big;
            mask.at(x, y) = s ? sentinel : relief.at(x, y) + 1.0;
        }
    }
    return reconstruct_by_erosion(marker, mask);
}

} // namespace leafseg
