#include <doctest.h>

#include <cmath>

#include "leafseg/imageops.hpp"
#include "leafseg/segmentation.hpp"
#include "leafseg/synthetic.hpp"
#include "oracles.hpp"

using namespace leafseg;

namespace {

LabelMap random_seeds(Rng& rng, int w, int h, int count) {
    LabelMap seeds(w, h);
    int placed = 0;
    while (placed < count) {
        int x = rng.irange(0, w - 1), y = rng.irange(0, h - 1);
        if (seeds.at(x, y) != 0) continue;
        seeds.at(x, y) = ++placed;
    }
    seeds.region_count = count;
    return seeds;
}

} // namespace

TEST_CASE("watershed 1-D relief splits at the peak") {
    FloatImage relief(5, 1);
    double r[] = {3, 1, 3, 0, 3};
    for (int x = 0; x < 5; ++x) relief.at(x, 0) = r[x];
    LabelMap seeds(5, 1);
    seeds.at(1, 0) = 1;
    seeds.at(3, 0) = 2;
    seeds.region_count = 2;

    LabelMap out = watershed(relief, seeds);
    CHECK(out.at(0, 0) == 1);
    CHECK(out.at(1, 0) == 1);
    CHECK(out.at(2, 0) == 0); // ridge on the peak
    CHECK(out.at(3, 0) == 2);
    CHECK(out.at(4, 0) == 2);
}

TEST_CASE("watershed with seeds everywhere returns the seeds") {
    Rng rng(3);
    FloatImage relief(4, 3);
    for (auto& v : relief.data()) v = rng.irange(0, 9);
    LabelMap seeds(4, 3);
    for (int y = 0; y < 3; ++y)
        for (int x = 0; x < 4; ++x) seeds.at(x, y) = 1 + (x + y) % 3;
    seeds.region_count = 3;
    LabelMap out = watershed(relief, seeds);
    CHECK(out.labels == seeds.labels);
}

TEST_CASE("watershed requires seeds") {
    FloatImage relief(3, 3, 0.0);
    LabelMap seeds(3, 3);
    CHECK_THROWS_AS(watershed(relief, seeds), std::invalid_argument);
}

TEST_CASE("watershed matches the exhaustive minimax-path oracle") {
    Rng rng(101);
    for (int trial = 0; trial < 60; ++trial) {
        FloatImage relief(4, 4);
        for (auto& v : relief.data()) v = rng.irange(0, 9);
        LabelMap seeds = random_seeds(rng, 4, 4, 2);
        LabelMap got = watershed(relief, seeds);
        LabelMap expect = oracles::minimax_watershed(relief, seeds);
        CHECK(got.labels == expect.labels);
    }
}

TEST_CASE("watershed oracle agreement with more seeds and plateaus") {
    Rng rng(202);
    for (int trial = 0; trial < 30; ++trial) {
        FloatImage relief(5, 4);
        for (auto& v : relief.data()) v = rng.irange(0, 3);
        LabelMap seeds = random_seeds(rng, 5, 4, rng.irange(2, 4));
        CHECK(watershed(relief, seeds).labels ==
              oracles::minimax_watershed(relief, seeds).labels);
    }
}

TEST_CASE("watershed output labels every pixel or declares a ridge") {
    Rng rng(303);
    FloatImage relief(12, 9);
    for (auto& v : relief.data()) v = rng.irange(0, 20);
    LabelMap seeds = random_seeds(rng, 12, 9, 4);
    LabelMap out = watershed(relief, seeds);
    for (int y = 0; y < 9; ++y)
        for (int x = 0; x < 12; ++x) {
            CHECK(out.at(x, y) >= 0);
            CHECK(out.at(x, y) <= 4);
            if (seeds.at(x, y) > 0) CHECK(out.at(x, y) == seeds.at(x, y));
        }
}

TEST_CASE("max_flow bottleneck path") {
    SeededGraph g;
    g.node_count = 3;
    g.source = 0;
    g.sink = 2;
    g.arcs = {{0, 1, 3}, {1, 2, 2}};
    MaxFlowResult r = max_flow(g);
    CHECK(r.flow == doctest::Approx(2));
    CHECK(r.source_side[0] == 1);
    CHECK(r.source_side[2] == 0);
}

TEST_CASE("max_flow diamond") {
    // s->a:3, s->b:2, a->t:2, b->t:3, a->b:1; min cut = 5
    SeededGraph g;
    g.node_count = 4;
    g.source = 0;
    g.sink = 3;
    g.arcs = {{0, 1, 3}, {0, 2, 2}, {1, 3, 2}, {2, 3, 3}, {1, 2, 1}};
    CHECK(max_flow(g).flow == doctest::Approx(5));
    CHECK(oracles::exhaustive_min_cut(g) == doctest::Approx(5));
}

TEST_CASE("max_flow rejects source == sink") {
    SeededGraph g;
    g.node_count = 2;
    g.source = 0;
    g.sink = 0;
    CHECK_THROWS_AS(max_flow(g), std::invalid_argument);
}

TEST_CASE("max_flow equals the exhaustive minimum cut on random graphs") {
    Rng rng(404);
    for (int trial = 0; trial < 50; ++trial) {
        SeededGraph g;
        g.node_count = rng.irange(2, 8);
        g.source = 0;
        g.sink = g.node_count - 1;
        if (g.source == g.sink) continue;
        int arcs = rng.irange(0, 2 * g.node_count);
        for (int a = 0; a < arcs; ++a) {
            int from = rng.irange(0, g.node_count - 1);
            int to = rng.irange(0, g.node_count - 1);
            if (from == to) continue;
            g.arcs.push_back({from, to, (double)rng.irange(0, 10)});
        }
        MaxFlowResult r = max_flow(g);
        CHECK(r.flow == doctest::Approx(oracles::exhaustive_min_cut(g)).epsilon(1e-12));

        // the returned partition's cut capacity equals the flow
        double cut = 0;
        for (const auto& arc : g.arcs)
            if (r.source_side[arc.from] && !r.source_side[arc.to]) cut += arc.capacity;
        CHECK(cut == doctest::Approx(r.flow).epsilon(1e-12));
    }
}

TEST_CASE("graph_cut_segment with everything seeded returns the leaf seeds") {
    RgbImage img(6, 4);
    Rng rng(7);
    for (auto& p : img.data())
        p = {(std::uint8_t)rng.irange(0, 255), (std::uint8_t)rng.irange(0, 255),
             (std::uint8_t)rng.irange(0, 255)};
    BinaryMask leaf(6, 4), bg(6, 4);
    for (int y = 0; y < 4; ++y)
        for (int x = 0; x < 6; ++x) (x < 3 ? leaf : bg).set(x, y, true);
    BinaryMask out = graph_cut_segment(img, leaf, bg);
    CHECK(out == leaf);
}

TEST_CASE("graph_cut_segment cuts along a high-contrast boundary") {
    // 4x2, flat halves with one seed per side
    RgbImage img(4, 2);
    for (int y = 0; y < 2; ++y)
        for (int x = 0; x < 4; ++x) img.at(x, y) = x < 2 ? Rgb{200, 200, 200} : Rgb{20, 20, 20};
    BinaryMask leaf(4, 2), bg(4, 2);
    leaf.set(0, 0, true);
    bg.set(3, 1, true);
    BinaryMask out = graph_cut_segment(img, leaf, bg, {10.0, 1.0});
    for (int y = 0; y < 2; ++y)
        for (int x = 0; x < 4; ++x) CHECK(out.get(x, y) == (x < 2));
}

TEST_CASE("graph_cut_segment contains leaf seeds and no background seeds") {
    SyntheticScene scene = generate_synthetic_scene(5, SceneKind::Easy);
    BinaryMask leaf = erode(scene.truth, StructElement::disk(8));
    BinaryMask bg = erode(mask_complement(scene.truth), StructElement::disk(8));
    BinaryMask out = graph_cut_segment(scene.image, leaf, bg);
    CHECK(mask_subtract(leaf, out).count() == 0);
    CHECK(mask_intersect(out, bg).count() == 0);
}

TEST_CASE("graph_cut_segment rejects bad seeds") {
    RgbImage img(4, 4);
    BinaryMask a(4, 4, true), empty(4, 4);
    CHECK_THROWS_AS(graph_cut_segment(img, a, a), std::invalid_argument);
    CHECK_THROWS_AS(graph_cut_segment(img, empty, a), std::invalid_argument);
}

TEST_CASE("graph_cut_segment is invariant to a constant intensity shift") {
    Rng rng(31);
    RgbImage img(10, 8);
    for (auto& p : img.data()) {
        std::uint8_t v = (std::uint8_t)rng.irange(40, 180);
        p = {v, v, v};
    }
    BinaryMask leaf(10, 8), bg(10, 8);
    leaf.set(2, 3, true);
    leaf.set(3, 3, true);
    bg.set(8, 6, true);
    bg.set(8, 5, true);

    RgbImage shifted = img;
    for (auto& p : shifted.data())
        p = {(std::uint8_t)(p.r + 40), (std::uint8_t)(p.g + 40), (std::uint8_t)(p.b + 40)};

    GraphCutParams params{5.0, 1.0}; // fixed sigma so only differences matter
    CHECK(graph_cut_segment(img, leaf, bg, params) ==
          graph_cut_segment(shifted, leaf, bg, params));
}

TEST_CASE("watershed_segment recovers a synthetic leaf from tight markers") {
    SyntheticScene scene = generate_synthetic_scene(9, SceneKind::Easy);
    BinaryMask leaf = erode(scene.truth, StructElement::disk(6));
    BinaryMask bg = erode(mask_complement(scene.truth), StructElement::disk(6));
    BinaryMask out = watershed_segment(scene.image, leaf, bg);

    CHECK(mask_subtract(leaf, out).count() == 0);
    CHECK(mask_intersect(out, bg).count() == 0);

    std::size_t inter = mask_intersect(out, scene.truth).count();
    double p = (double)inter / (double)out.count();
    double r = (double)inter / (double)scene.truth.count();
    CHECK(p > 0.93);
    CHECK(r > 0.93);
}

TEST_CASE("both segmenters keep the markers on the right side") {
    SyntheticScene scene = generate_synthetic_scene(21, SceneKind::Easy);
    BinaryMask leaf = erode(scene.truth, StructElement::disk(10));
    BinaryMask bg = erode(mask_complement(scene.truth), StructElement::disk(10));
    for (SegMethod m : {SegMethod::Watershed, SegMethod::GraphCut}) {
        BinaryMask out = segment(scene.image, leaf, bg, m);
        CHECK(mask_subtract(leaf, out).count() == 0);
        CHECK(mask_intersect(out, bg).count() == 0);
    }
}
