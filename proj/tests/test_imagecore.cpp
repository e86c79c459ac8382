#include <doctest.h>

#include <cmath>

#include "leafseg/imageops.hpp"
#include "leafseg/synthetic.hpp"
#include "oracles.hpp"

using namespace leafseg;

namespace {

RgbImage solid(int w, int h, Rgb c) {
    RgbImage img(w, h);
    for (auto& p : img.data()) p = c;
    return img;
}

} // namespace

TEST_CASE("resize_longest_side scales 1200x900 to 600x450") {
    RgbImage img = solid(1200, 900, {10, 20, 30});
    RgbImage out = resize_longest_side(img);
    CHECK(out.width() == 600);
    CHECK(out.height() == 450);
    CHECK(out.at(300, 225) == Rgb{10, 20, 30});
}

TEST_CASE("resize_longest_side leaves small and boundary images unchanged") {
    RgbImage a = solid(500, 400, {1, 2, 3});
    CHECK(resize_longest_side(a) == a);
    RgbImage b = solid(600, 600, {1, 2, 3});
    CHECK(resize_longest_side(b) == b);
}

TEST_CASE("resize keeps the aspect ratio within rounding") {
    Rng rng(7);
    for (int i = 0; i < 20; ++i) {
        int w = rng.irange(601, 1800), h = rng.irange(601, 1800);
        RgbImage out = resize_longest_side(solid(w, h, {9, 9, 9}));
        CHECK(std::max(out.width(), out.height()) == 600);
        double ratio = (double)w / h;
        double out_ratio = (double)out.width() / out.height();
        double tol = 1.0 / std::min(out.width(), out.height());
        CHECK(std::abs(ratio - out_ratio) / ratio <= tol + 1e-12);
    }
}

TEST_CASE("to_grayscale fixed points and rounding") {
    RgbImage img(3, 1);
    img.at(0, 0) = {100, 100, 100};
    img.at(1, 0) = {255, 255, 255};
    img.at(2, 0) = {255, 0, 0};
    GrayImage g = to_grayscale(img);
    CHECK(g.at(0, 0) == 100);
    CHECK(g.at(1, 0) == 255);
    CHECK(g.at(2, 0) == 76); // round(0.299 * 255)
}

TEST_CASE("rgb_to_hsi conventions") {
    RgbImage img(3, 1);
    img.at(0, 0) = {100, 100, 100};
    img.at(1, 0) = {255, 0, 0};
    img.at(2, 0) = {0, 0, 0};
    HsiPlanes p = rgb_to_hsi(img);

    CHECK(p.saturation.at(0, 0) == doctest::Approx(0.0));
    CHECK(p.intensity.at(0, 0) == doctest::Approx(100.0 / 255.0));
    CHECK(std::isnan(p.hue.at(0, 0)));

    CHECK(p.hue.at(1, 0) == doctest::Approx(0.0));
    CHECK(p.saturation.at(1, 0) == doctest::Approx(1.0));
    CHECK(p.intensity.at(1, 0) == doctest::Approx(1.0 / 3.0));

    CHECK(p.saturation.at(2, 0) == doctest::Approx(0.0));
    CHECK(p.intensity.at(2, 0) == doctest::Approx(0.0));
    CHECK(std::isnan(p.hue.at(2, 0)));
}

TEST_CASE("hue is NaN exactly where saturation is zero") {
    Rng rng(11);
    RgbImage img(16, 16);
    for (auto& p : img.data()) {
        std::uint8_t v = (std::uint8_t)rng.irange(0, 255);
        p = rng.uniform() < 0.3 ? Rgb{v, v, v}
                                : Rgb{(std::uint8_t)rng.irange(0, 255),
                                      (std::uint8_t)rng.irange(0, 255),
                                      (std::uint8_t)rng.irange(0, 255)};
    }
    HsiPlanes p = rgb_to_hsi(img);
    for (int y = 0; y < 16; ++y)
        for (int x = 0; x < 16; ++x)
            CHECK(std::isnan(p.hue.at(x, y)) == (p.saturation.at(x, y) == 0.0));
}

TEST_CASE("gradient_magnitude of a constant image is zero") {
    GrayImage img(9, 7, 42);
    FloatImage g = gradient_magnitude(img);
    for (double v : g.data()) CHECK(v == 0.0);
}

TEST_CASE("gradient_magnitude on a vertical step peaks at the step") {
    GrayImage img(8, 6, 0);
    for (int y = 0; y < 6; ++y)
        for (int x = 4; x < 8; ++x) img.at(x, y) = 255;
    FloatImage g = gradient_magnitude(img);
    for (int y = 0; y < 6; ++y) {
        CHECK(g.at(3, y) == doctest::Approx(4 * 255.0));
        CHECK(g.at(4, y) == doctest::Approx(4 * 255.0));
        CHECK(g.at(1, y) == doctest::Approx(0.0));
    }
}

TEST_CASE("gradient_magnitude matches hand convolution on a ramp row") {
    GrayImage img(5, 1);
    std::uint8_t vals[] = {0, 64, 128, 192, 255};
    for (int x = 0; x < 5; ++x) img.at(x, 0) = vals[x];
    FloatImage g = gradient_magnitude(img);
    // height-1 image: rows replicate, so |Gx| = 4 |v[x+1] - v[x-1]|, Gy = 0
    for (int x = 1; x < 4; ++x) {
        double expected = 4.0 * std::abs((double)vals[x + 1] - vals[x - 1]);
        CHECK(g.at(x, 0) == doctest::Approx(expected));
    }
}

TEST_CASE("erode keeps a full mask full, dilate of a point is a cross") {
    BinaryMask full(7, 7, true);
    CHECK(erode(full, StructElement::disk(2)) == full);

    BinaryMask dot(7, 7);
    dot.set(3, 3, true);
    BinaryMask d = dilate(dot, StructElement::disk(1));
    CHECK(d.count() == 5);
    CHECK(d.get(3, 3));
    CHECK(d.get(2, 3));
    CHECK(d.get(4, 3));
    CHECK(d.get(3, 2));
    CHECK(d.get(3, 4));
    CHECK(!d.get(2, 2));
}

TEST_CASE("erode(m) is a subset of m is a subset of dilate(m)") {
    Rng rng(23);
    for (int trial = 0; trial < 10; ++trial) {
        BinaryMask m(12, 10);
        for (int y = 0; y < 10; ++y)
            for (int x = 0; x < 12; ++x) m.set(x, y, rng.uniform() < 0.5);
        StructElement se = rng.uniform() < 0.5 ? StructElement::disk(1) : StructElement::square(3);
        BinaryMask e = erode(m, se), d = dilate(m, se);
        for (int y = 0; y < 10; ++y)
            for (int x = 0; x < 12; ++x) {
                if (e.get(x, y)) CHECK(m.get(x, y));
                if (m.get(x, y)) CHECK(d.get(x, y));
            }
    }
}

TEST_CASE("closing is extensive on a convex blob") {
    BinaryMask blob(11, 11);
    for (int y = 3; y <= 7; ++y)
        for (int x = 3; x <= 7; ++x) blob.set(x, y, true);
    StructElement se = StructElement::disk(1);
    BinaryMask closed = erode(dilate(blob, se), se);
    for (int y = 0; y < 11; ++y)
        for (int x = 0; x < 11; ++x)
            if (blob.get(x, y)) CHECK(closed.get(x, y));
}

TEST_CASE("connected_components connectivity semantics") {
    BinaryMask m(4, 4);
    m.set(0, 0, true);
    m.set(1, 1, true);
    CHECK(connected_components(m, 4).region_count == 2);
    CHECK(connected_components(m, 8).region_count == 1);

    BinaryMask board(4, 4);
    for (int y = 0; y < 4; ++y)
        for (int x = 0; x < 4; ++x) board.set(x, y, (x + y) % 2 == 0);
    CHECK(connected_components(board, 4).region_count == 8);
}

TEST_CASE("connected_components labels partition the foreground") {
    Rng rng(31);
    for (int trial = 0; trial < 8; ++trial) {
        BinaryMask m(10, 8);
        for (int y = 0; y < 8; ++y)
            for (int x = 0; x < 10; ++x) m.set(x, y, rng.uniform() < 0.45);
        LabelMap lm = connected_components(m, trial % 2 ? 4 : 8);
        std::vector<std::uint64_t> sizes(lm.region_count + 1, 0);
        for (int y = 0; y < 8; ++y)
            for (int x = 0; x < 10; ++x) {
                int l = lm.at(x, y);
                CHECK(l >= 0);
                CHECK(l <= lm.region_count);
                CHECK((l > 0) == m.get(x, y));
                if (l > 0) ++sizes[l];
            }
        std::uint64_t total = 0;
        for (int l = 1; l <= lm.region_count; ++l) {
            CHECK(sizes[l] > 0);
            total += sizes[l];
        }
        CHECK(total == m.count());
    }
}

TEST_CASE("distance_to_mask basics and brute-force agreement") {
    BinaryMask m(8, 8);
    m.set(0, 0, true);
    FloatImage d = distance_to_mask(m);
    CHECK(d.at(0, 0) == 0.0);
    CHECK(d.at(3, 4) == doctest::Approx(5.0)); // 3-4-5

    Rng rng(41);
    for (int trial = 0; trial < 5; ++trial) {
        BinaryMask mask(10, 10);
        int pts = rng.irange(1, 6);
        for (int i = 0; i < pts; ++i) mask.set(rng.irange(0, 9), rng.irange(0, 9), true);
        FloatImage fast = distance_to_mask(mask);
        FloatImage slow = oracles::brute_force_edt(mask);
        for (int y = 0; y < 10; ++y)
            for (int x = 0; x < 10; ++x)
                CHECK(fast.at(x, y) == doctest::Approx(slow.at(x, y)).epsilon(1e-9));
    }
}

TEST_CASE("distance_to_mask rejects an empty mask") {
    BinaryMask empty(4, 4);
    CHECK_THROWS_WITH_AS(distance_to_mask(empty), "no reference pixels", std::invalid_argument);
}

TEST_CASE("convex_hull_area on rectangles, points and the L-shape") {
    std::vector<Point2d> rect;
    for (int y = 0; y < 5; ++y)
        for (int x = 0; x < 8; ++x) rect.push_back({(double)x, (double)y});
    CHECK(convex_hull_area(rect) == doctest::Approx(7.0 * 4.0));

    std::vector<Point2d> one{{3, 3}};
    CHECK(convex_hull_area(one) == 0.0);

    std::vector<Point2d> line{{0, 0}, {1, 1}, {2, 2}, {5, 5}};
    CHECK(convex_hull_area(line) == 0.0);

    // 2n x 2n square minus one n x n quadrant vs the continuous value at
    // pixel-centre scale
    for (int n : {10, 15, 20}) {
        std::vector<Point2d> pts;
        for (int y = 0; y < 2 * n; ++y)
            for (int x = 0; x < 2 * n; ++x)
                if (!(x >= n && y >= n)) pts.push_back({(double)x, (double)y});
        double side = 2.0 * n - 1.0;
        double continuous = 0.875 * side * side; // 3.5 (side/2)^2
        CHECK(std::abs(convex_hull_area(pts) - continuous) / continuous < 0.05);
    }
}

TEST_CASE("detect_edges on a constant image is empty") {
    GrayImage img(20, 20, 55);
    CHECK(detect_edges(img).empty());
}

TEST_CASE("detect_edges thins a hard vertical step to one column") {
    GrayImage img(20, 20, 0);
    for (int y = 0; y < 20; ++y)
        for (int x = 10; x < 20; ++x) img.at(x, y) = 255;
    BinaryMask edges = detect_edges(img);
    CHECK(!edges.empty());
    for (int y = 2; y < 18; ++y) {
        int count = 0, col = -1;
        for (int x = 0; x < 20; ++x)
            if (edges.get(x, y)) {
                ++count;
                col = x;
            }
        CHECK(count == 1);
        CHECK((col == 9 || col == 10));
    }
}

TEST_CASE("detect_edges is thin: no same-direction run along the gradient") {
    SyntheticScene scene = generate_synthetic_scene(3, SceneKind::Easy);
    GrayImage gray = to_grayscale(scene.image);
    BinaryMask edges = detect_edges(gray);
    REQUIRE(!edges.empty());
    FloatImage gx(gray.width(), gray.height()), gy(gray.width(), gray.height());
    for (int y = 0; y < gray.height(); ++y)
        for (int x = 0; x < gray.width(); ++x) {
            auto v = [&](int dx, int dy) { return (double)gray.at_clamped(x + dx, y + dy); };
            gx.at(x, y) = (v(1, -1) + 2 * v(1, 0) + v(1, 1)) - (v(-1, -1) + 2 * v(-1, 0) + v(-1, 1));
            gy.at(x, y) = (v(-1, 1) + 2 * v(0, 1) + v(1, 1)) - (v(-1, -1) + 2 * v(0, -1) + v(1, -1));
        }
    auto direction = [&](int x, int y) {
        double a = std::atan2(gy.at(x, y), gx.at(x, y)) * 180.0 / 3.14159265358979;
        if (a < 0) a += 180.0;
        int dx = 1, dy = 0;
        if (a >= 22.5 && a < 67.5) dy = 1;
        else if (a >= 67.5 && a < 112.5) { dx = 0; dy = 1; }
        else if (a >= 112.5 && a < 157.5) { dx = -1; dy = 1; }
        return Point{dx, dy};
    };
    // two adjacent edge pixels sharing a quantized gradient direction can
    // never follow each other along that direction
    int violations = 0;
    for (int y = 1; y < gray.height() - 1; ++y)
        for (int x = 1; x < gray.width() - 1; ++x) {
            if (!edges.get(x, y)) continue;
            Point d = direction(x, y);
            int nx = x + d.x, ny = y + d.y;
            if (!edges.in_bounds(nx, ny) || !edges.get(nx, ny)) continue;
            Point nd = direction(nx, ny);
            if (nd == d) ++violations;
        }
    CHECK(violations == 0);
}
