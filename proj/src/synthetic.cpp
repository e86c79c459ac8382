#include "leafseg/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace leafseg {

namespace {

constexpr double PI = std::numbers::pi;
constexpr int W = 560;
constexpr int H = 420;

struct LeafShape {
    double cx, cy;
    double axis;        // major-axis angle
    double a, b;        // ellipse semi-axes
    double d1, p1;      // low-order radial deformation
    double d2, p2;

    double radius(double phi) const {
        double rel = phi - axis;
        double ca = b * std::cos(rel), sa = a * std::sin(rel);
        double r = a * b / std::sqrt(ca * ca + sa * sa);
        return r * (1.0 + d1 * std::cos(3 * phi + p1) + d2 * std::cos(5 * phi + p2));
    }

    bool inside(double x, double y) const {
        double dx = x - cx, dy = y - cy;
        double r = std::hypot(dx, dy);
        if (r == 0) return true;
        return r <= radius(std::atan2(dy, dx));
    }

    double max_radius() const { return a * (1.0 + d1 + d2); }
};

std::uint8_t clamp8(double v) {
    return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

Rgb mix(const Rgb& bg, const Rgb& fg, double t) {
    return {clamp8(bg.r + (fg.r - bg.r) * t), clamp8(bg.g + (fg.g - bg.g) * t),
            clamp8(bg.b + (fg.b - bg.b) * t)};
}

// 2x2 subsample coverage of the leaf interior, for soft outlines.
double coverage(const LeafShape& leaf, int x, int y) {
    static const double off[4][2] = {{-0.25, -0.25}, {0.25, -0.25}, {-0.25, 0.25}, {0.25, 0.25}};
    int in = 0;
    for (const auto& o : off)
        if (leaf.inside(x + o[0], y + o[1])) ++in;
    return in / 4.0;
}

void draw_leaf(RgbImage& img, const LeafShape& leaf, const Rgb& color) {
    double mr = leaf.max_radius() + 2;
    int x0 = std::max(0, (int)(leaf.cx - mr)), x1 = std::min(W - 1, (int)(leaf.cx + mr));
    int y0 = std::max(0, (int)(leaf.cy - mr)), y1 = std::min(H - 1, (int)(leaf.cy + mr));
    for (int y = y0; y <= y1; ++y)
        for (int x = x0; x <= x1; ++x) {
            double c = coverage(leaf, x, y);
            if (c > 0) img.at(x, y) = mix(img.at(x, y), color, c);
        }
}

double dist_to_segment(double px, double py, double ax, double ay, double bx, double by) {
    double vx = bx - ax, vy = by - ay;
    double len2 = vx * vx + vy * vy;
    double t = len2 == 0 ? 0 : std::clamp(((px - ax) * vx + (py - ay) * vy) / len2, 0.0, 1.0);
    return std::hypot(px - (ax + t * vx), py - (ay + t * vy));
}

// Veins only replace pixels of the target leaf.
void draw_vein(RgbImage& img, const BinaryMask& truth, double ax, double ay, double bx,
               double by, double half_width, const Rgb& color) {
    int x0 = std::max(0, (int)std::floor(std::min(ax, bx) - half_width - 1));
    int x1 = std::min(W - 1, (int)std::ceil(std::max(ax, bx) + half_width + 1));
    int y0 = std::max(0, (int)std::floor(std::min(ay, by) - half_width - 1));
    int y1 = std::min(H - 1, (int)std::ceil(std::max(ay, by) + half_width + 1));
    for (int y = y0; y <= y1; ++y)
        for (int x = x0; x <= x1; ++x)
            if (truth.get(x, y) && dist_to_segment(x, y, ax, ay, bx, by) <= half_width)
                img.at(x, y) = color;
}

void draw_grass_patch(RgbImage& img, Rng& rng, double cx, double cy, double rx, double ry) {
    int x0 = std::max(0, (int)(cx - rx)), x1 = std::min(W - 1, (int)(cx + rx));
    int y0 = std::max(0, (int)(cy - ry)), y1 = std::min(H - 1, (int)(cy + ry));
    for (int y = y0; y <= y1; ++y)
        for (int x = x0; x <= x1; ++x) {
            double nx = (x - cx) / rx, ny = (y - cy) / ry;
            if (nx * nx + ny * ny > 1.0) continue;
            img.at(x, y) = {static_cast<std::uint8_t>(20 + rng.next() % 121),
                            static_cast<std::uint8_t>(60 + rng.next() % 161),
                            static_cast<std::uint8_t>(10 + rng.next() % 81)};
        }
}

void draw_disk(RgbImage& img, double cx, double cy, double r, const Rgb& color) {
    int x0 = std::max(0, (int)(cx - r)), x1 = std::min(W - 1, (int)(cx + r));
    int y0 = std::max(0, (int)(cy - r)), y1 = std::min(H - 1, (int)(cy + r));
    for (int y = y0; y <= y1; ++y)
        for (int x = x0; x <= x1; ++x)
            if ((x - cx) * (x - cx) + (y - cy) * (y - cy) <= r * r) img.at(x, y) = color;
}

struct Palette {
    Rgb soil, leaf, midrib, branch;
};

void fill_soil(RgbImage& img, Rng& rng, const Rgb& base) {
    for (auto& p : img.data()) p = base;
    // a few smooth tonal blobs so the soil is not perfectly flat
    int blobs = rng.irange(2, 3);
    for (int i = 0; i < blobs; ++i) {
        double cx = rng.range(0, W), cy = rng.range(0, H);
        double r = rng.range(70, 150);
        double amp = rng.range(-6, 6);
        int x0 = std::max(0, (int)(cx - r)), x1 = std::min(W - 1, (int)(cx + r));
        int y0 = std::max(0, (int)(cy - r)), y1 = std::min(H - 1, (int)(cy + r));
        for (int y = y0; y <= y1; ++y)
            for (int x = x0; x <= x1; ++x) {
                double d2 = ((x - cx) * (x - cx) + (y - cy) * (y - cy)) / (r * r);
                if (d2 > 1) continue;
                double off = amp * (1.0 - d2);
                Rgb& p = img.at(x, y);
                p = {clamp8(p.r + off), clamp8(p.g + off), clamp8(p.b + off)};
            }
    }
}

// Correlated per-pixel noise keeps ExG flat and 3x3 windows below the
// texture-entropy threshold while breaking exact gradient ties.
void add_noise(RgbImage& img, Rng& rng) {
    for (auto& p : img.data()) {
        int n = rng.irange(-1, 1);
        p = {clamp8(p.r + n), clamp8(p.g + n), clamp8(p.b + n)};
    }
}

LeafShape make_leaf(Rng& rng) {
    LeafShape leaf;
    leaf.cx = W / 2.0 + rng.range(-20, 20);
    leaf.cy = H / 2.0 + rng.range(-15, 15);
    leaf.axis = rng.range(0, PI);
    double e = rng.range(0.18, 0.28);
    double r0 = rng.range(95, 115);
    double fit = 0.9 * std::min({leaf.cx, leaf.cy, W - leaf.cx, H - leaf.cy});
    r0 = std::min(r0, fit / (1.0 + e));
    leaf.a = r0 * (1.0 + e);
    leaf.b = r0 * (1.0 - e);
    leaf.d1 = rng.range(0.02, 0.05);
    leaf.p1 = rng.range(0, 2 * PI);
    leaf.d2 = rng.range(0.01, 0.03);
    leaf.p2 = rng.range(0, 2 * PI);
    return leaf;
}

BinaryMask truth_of(const LeafShape& leaf) {
    BinaryMask truth(W, H);
    double mr = leaf.max_radius() + 2;
    int x0 = std::max(0, (int)(leaf.cx - mr)), x1 = std::min(W - 1, (int)(leaf.cx + mr));
    int y0 = std::max(0, (int)(leaf.cy - mr)), y1 = std::min(H - 1, (int)(leaf.cy + mr));
    for (int y = y0; y <= y1; ++y)
        for (int x = x0; x <= x1; ++x)
            if (leaf.inside(x, y)) truth.set(x, y, true);
    return truth;
}

void draw_vein_system(RgbImage& img, const BinaryMask& truth, const LeafShape& leaf,
                      Rng& rng, const Rgb& midrib, const Rgb& branch,
                      double midrib_half_width) {
    double ca = std::cos(leaf.axis), sa = std::sin(leaf.axis);
    double tip = 0.88 * leaf.radius(leaf.axis);
    double base = 0.88 * leaf.radius(leaf.axis + PI);
    double ax = leaf.cx - base * ca, ay = leaf.cy - base * sa;
    double bx = leaf.cx + tip * ca, by = leaf.cy + tip * sa;
    draw_vein(img, truth, ax, ay, bx, by, midrib_half_width, midrib);

    int branches = rng.irange(6, 8);
    for (int i = 0; i < branches; ++i) {
        double t = rng.range(-0.72, 0.72);
        int side = (i % 2 == 0) ? 1 : -1;
        double ang = leaf.axis + side * (PI / 180.0) * rng.range(40, 65);
        double sx = leaf.cx + t * tip * ca, sy = leaf.cy + t * tip * sa;
        double len = 0.45 * leaf.b;
        draw_vein(img, truth, sx, sy, sx + len * std::cos(ang), sy + len * std::sin(ang),
                  0.9, branch);
    }
}

void add_grass(RgbImage& img, Rng& rng, const LeafShape& leaf, int patches) {
    double keep_out = leaf.max_radius() + 45;
    for (int i = 0; i < patches; ++i) {
        double cx = 0, cy = 0;
        bool ok = false;
        for (int tries = 0; tries < 40 && !ok; ++tries) {
            cx = rng.range(30, W - 30);
            cy = rng.range(30, H - 30);
            ok = std::hypot(cx - leaf.cx, cy - leaf.cy) > keep_out;
        }
        if (!ok) continue;
        draw_grass_patch(img, rng, cx, cy, rng.range(22, 40), rng.range(16, 32));
    }
}

} // namespace

SceneKind scene_kind_from_string(const std::string& s) {
    if (s == "easy") return SceneKind::Easy;
    if (s == "occluded") return SceneKind::Occluded;
    if (s == "textured") return SceneKind::Textured;
    if (s == "veined") return SceneKind::Veined;
    throw std::invalid_argument("unknown scene kind '" + s + "'");
}

std::string to_string(SceneKind kind) {
    switch (kind) {
        case SceneKind::Easy: return "easy";
        case SceneKind::Occluded: return "occluded";
        case SceneKind::Textured: return "textured";
        case SceneKind::Veined: return "veined";
    }
    return "?";
}

SyntheticScene generate_synthetic_scene(std::uint64_t seed, SceneKind kind) {
    Rng rng(seed * 1000003ull + static_cast<std::uint64_t>(kind) * 77777ull + 5);
    RgbImage img(W, H);

    const Palette easy_pal{{118, 86, 58}, {60, 150, 50}, {46, 118, 41}, {52, 130, 45}};
    const Palette vein_pal{{88, 62, 40}, {60, 150, 50}, {56, 139, 47}, {57, 142, 48}};
    const Palette& pal = (kind == SceneKind::Veined) ? vein_pal : easy_pal;

    fill_soil(img, rng, pal.soil);
    LeafShape leaf = make_leaf(rng);
    add_grass(img, rng, leaf, kind == SceneKind::Veined ? 4 : 3);

    if (kind == SceneKind::Occluded) {
        int distractors = rng.irange(1, 2);
        for (int i = 0; i < distractors; ++i) {
            LeafShape back = make_leaf(rng);
            double dir = rng.range(0, 2 * PI);
            back.a *= 0.85;
            back.b *= 0.85;
            back.cx = leaf.cx + std::cos(dir) * leaf.max_radius() * 1.15;
            back.cy = leaf.cy + std::sin(dir) * leaf.max_radius() * 1.15;
            Rgb shade{clamp8(pal.leaf.r - 10), clamp8(pal.leaf.g - 10), clamp8(pal.leaf.b - 10)};
            draw_leaf(img, back, shade);
        }
    }

    BinaryMask truth = truth_of(leaf);
    truth.set_role(MaskRole::LeafMask);

    if (kind == SceneKind::Veined) {
        // Two-tone leaf: the far half is hue-shifted (blocks the marker
        // merge) and slightly darker in grayscale; the dividing midrib has
        // a moderate gradient and a dull stone breaks the outline next to
        // the far half.
        const Rgb near_half = pal.leaf;       // gray ~112
        const Rgb far_half{92, 130, 38};      // gray ~108, hue ~30 deg away
        double nx = -std::sin(leaf.axis), ny = std::cos(leaf.axis);
        draw_leaf(img, leaf, near_half);
        for (int y = 0; y < H; ++y)
            for (int x = 0; x < W; ++x) {
                if (!truth.get(x, y)) continue;
                double s = (x - leaf.cx) * nx + (y - leaf.cy) * ny;
                if (s > 0.8) img.at(x, y) = far_half;
            }
        draw_vein_system(img, truth, leaf, rng, pal.midrib, pal.branch, 1.6);

        // Stone flush against the far-half boundary: a near-isoluminant,
        // blue-dominant patch that seeds the background right at a weak
        // outline segment.
        double phi = std::atan2(ny, nx) + rng.range(-0.3, 0.3);
        double rb = leaf.radius(phi);
        double sx = leaf.cx + std::cos(phi) * rb;
        double sy = leaf.cy + std::sin(phi) * rb;
        const Rgb stone{105, 109, 122};
        double sr = rng.range(14, 18);
        double ox = sx + std::cos(phi) * (sr - 1.0);
        double oy = sy + std::sin(phi) * (sr - 1.0);
        int x0 = std::max(0, (int)(ox - sr - 2)), x1 = std::min(W - 1, (int)(ox + sr + 2));
        int y0 = std::max(0, (int)(oy - sr - 2)), y1 = std::min(H - 1, (int)(oy + sr + 2));
        for (int y = y0; y <= y1; ++y)
            for (int x = x0; x <= x1; ++x)
                if (!truth.get(x, y) &&
                    (x - ox) * (x - ox) + (y - oy) * (y - oy) <= sr * sr)
                    img.at(x, y) = stone;
    } else {
        draw_leaf(img, leaf, pal.leaf);
        draw_vein_system(img, truth, leaf, rng, pal.midrib, pal.branch, 1.3);
    }

    if (kind == SceneKind::Textured) {
        // Specular spots (small, so the marker cleanup discounts them).
        int specs = rng.irange(2, 3);
        double prev_x = -1000, prev_y = -1000;
        for (int i = 0; i < specs; ++i) {
            double r = rng.range(3, 4.5);
            for (int tries = 0; tries < 40; ++tries) {
                double ang = rng.range(0, 2 * PI);
                double rad = rng.range(0.15, 0.45) * leaf.b;
                double cx = leaf.cx + std::cos(ang) * rad;
                double cy = leaf.cy + std::sin(ang) * rad;
                if (std::hypot(cx - prev_x, cy - prev_y) < 65) continue;
                draw_disk(img, cx, cy, r, {235, 240, 235});
                prev_x = cx;
                prev_y = cy;
                break;
            }
        }

        // Protrusion: a leaf-coloured blade sticking out of the outline
        // (not part of the ground truth). It overwrites the soft outline
        // pixels at its base so it attaches without a gradient seam.
        double pa = rng.range(0, 2 * PI);
        double pr = leaf.radius(pa);
        double bx = leaf.cx + std::cos(pa) * pr;
        double by = leaf.cy + std::sin(pa) * pr;
        double len = rng.range(0.85, 0.95) * leaf.b;
        double half_base = rng.range(15, 18);
        double tx = -std::sin(pa), ty = std::cos(pa);
        for (int y = 0; y < H; ++y)
            for (int x = 0; x < W; ++x) {
                double u = (x - bx) * std::cos(pa) + (y - by) * std::sin(pa);
                if (u < -2 || u > len) continue;
                if (u >= 3 && truth.get(x, y)) continue;
                double v = std::abs((x - bx) * tx + (y - by) * ty);
                double width = half_base * (1.0 - std::max(0.0, u) / len);
                if (v <= width) img.at(x, y) = pal.leaf;
            }

        // Shadow notch: a deep, narrow dark slit cutting inward across the
        // boundary, opposite-ish the protrusion. The covered leaf pixels
        // stay in the ground truth.
        double na = pa + PI + rng.range(-0.6, 0.6);
        double nr = leaf.radius(na);
        double ncx = leaf.cx + std::cos(na) * nr;
        double ncy = leaf.cy + std::sin(na) * nr;
        double depth = rng.range(45, 55);
        double half_width = rng.range(9, 11);
        double nx2 = -std::sin(na), ny2 = std::cos(na);
        for (int y = 0; y < H; ++y)
            for (int x = 0; x < W; ++x) {
                double u = (x - ncx) * std::cos(na) + (y - ncy) * std::sin(na);
                if (u < -depth || u > 8) continue;
                double v = std::abs((x - ncx) * nx2 + (y - ncy) * ny2);
                if (v <= half_width) img.at(x, y) = {18, 20, 16};
            }
    }

    add_noise(img, rng);
    return {std::move(img), std::move(truth)};
}

} // namespace leafseg
