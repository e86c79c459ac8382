#include <doctest.h>

#include "leafseg/reconstruction.hpp"
#include "leafseg/synthetic.hpp"
#include "oracles.hpp"

using namespace leafseg;

namespace {

GrayImage random_gray(Rng& rng, int w, int h, int hi = 255) {
    GrayImage img(w, h);
    for (auto& v : img.data()) v = (std::uint8_t)rng.irange(0, hi);
    return img;
}

} // namespace

TEST_CASE("reconstruct_by_dilation fixed points") {
    Rng rng(3);
    GrayImage mask = random_gray(rng, 6, 5);
    CHECK(reconstruct_by_dilation(mask, mask) == mask);

    GrayImage zero(6, 5, 0);
    CHECK(reconstruct_by_dilation(zero, mask) == zero);
}

TEST_CASE("reconstruct 1-D example") {
    GrayImage marker(5, 1), mask(5, 1);
    std::uint8_t mk[] = {0, 0, 5, 0, 0}, ms[] = {3, 8, 9, 8, 2};
    for (int x = 0; x < 5; ++x) {
        marker.at(x, 0) = mk[x];
        mask.at(x, 0) = ms[x];
    }
    GrayImage rec = reconstruct_by_dilation(marker, mask);
    std::uint8_t expect[] = {3, 5, 5, 5, 2};
    for (int x = 0; x < 5; ++x) CHECK(rec.at(x, 0) == expect[x]);
    CHECK(rec == oracles::naive_reconstruct_dilation(marker, mask));
}

TEST_CASE("reconstruct rejects wrongly ordered inputs") {
    GrayImage a(3, 3, 10), b(3, 3, 5);
    CHECK_THROWS_WITH_AS(reconstruct_by_dilation(a, b), "marker/mask ordering",
                         std::invalid_argument);
    CHECK_THROWS_WITH_AS(reconstruct_by_erosion(b, a), "marker/mask ordering",
                         std::invalid_argument);
}

TEST_CASE("reconstruction matches the iterate-until-stable oracle") {
    Rng rng(7);
    for (int trial = 0; trial < 60; ++trial) {
        GrayImage mask = random_gray(rng, 8, 8);
        GrayImage marker(8, 8);
        for (std::size_t i = 0; i < mask.size(); ++i)
            marker.data()[i] = (std::uint8_t)rng.irange(0, mask.data()[i]);
        CHECK(reconstruct_by_dilation(marker, mask) ==
              oracles::naive_reconstruct_dilation(marker, mask));

        GrayImage em(8, 8);
        for (std::size_t i = 0; i < mask.size(); ++i)
            em.data()[i] = (std::uint8_t)rng.irange(mask.data()[i], 255);
        CHECK(reconstruct_by_erosion(em, mask) ==
              oracles::naive_reconstruct_erosion(em, mask));
    }
}

TEST_CASE("reconstruction is increasing in the marker") {
    Rng rng(13);
    GrayImage mask = random_gray(rng, 8, 6);
    GrayImage m1(8, 6), m2(8, 6);
    for (std::size_t i = 0; i < mask.size(); ++i) {
        m1.data()[i] = (std::uint8_t)rng.irange(0, mask.data()[i]);
        m2.data()[i] = (std::uint8_t)rng.irange(m1.data()[i], mask.data()[i]);
    }
    GrayImage r1 = reconstruct_by_dilation(m1, mask);
    GrayImage r2 = reconstruct_by_dilation(m2, mask);
    for (std::size_t i = 0; i < mask.size(); ++i) CHECK(r1.data()[i] <= r2.data()[i]);
}

TEST_CASE("open_by_reconstruction levels small specks, keeps plateaus, is idempotent") {
    GrayImage img(20, 14, 50);
    for (int y = 4; y < 10; ++y)
        for (int x = 3; x < 15; ++x) img.at(x, y) = 120; // large plateau
    img.at(17, 2) = 200;                                  // speck smaller than the SE
    img.at(18, 12) = 220;

    StructElement se = StructElement::disk(2);
    GrayImage opened = open_by_reconstruction(img, se);
    CHECK(opened.at(17, 2) == 50);
    CHECK(opened.at(18, 12) == 50);
    CHECK(opened.at(8, 6) == 120);
    for (std::size_t i = 0; i < img.size(); ++i) CHECK(opened.data()[i] <= img.data()[i]);
    CHECK(open_by_reconstruction(opened, se) == opened);
}

TEST_CASE("close_by_reconstruction fills small dark holes") {
    GrayImage img(20, 14, 120);
    img.at(10, 7) = 10; // pinhole
    StructElement se = StructElement::disk(2);
    GrayImage closed = close_by_reconstruction(img, se);
    CHECK(closed.at(10, 7) == 120);
    for (std::size_t i = 0; i < img.size(); ++i) CHECK(closed.data()[i] >= img.data()[i]);
}

TEST_CASE("constant image is a fixed point of open/close by reconstruction") {
    GrayImage img(9, 9, 77);
    StructElement se = StructElement::disk(3);
    CHECK(open_by_reconstruction(img, se) == img);
    CHECK(close_by_reconstruction(img, se) == img);
}

TEST_CASE("regional_maxima basics") {
    GrayImage img(7, 7, 10);
    img.at(3, 3) = 200;
    BinaryMask m = regional_maxima(img);
    CHECK(m.get(3, 3));
    CHECK(m.count() == 1);

    GrayImage flat(6, 4, 42);
    CHECK(regional_maxima(flat).count() == 24);
}

TEST_CASE("regional_maxima matches the per-pixel plateau oracle") {
    Rng rng(19);
    for (int trial = 0; trial < 40; ++trial) {
        GrayImage img = random_gray(rng, 6, 6, 5); // few levels = many plateaus
        FloatImage f(6, 6);
        for (std::size_t i = 0; i < img.size(); ++i) f.data()[i] = img.data()[i];
        CHECK(regional_maxima(img) == oracles::plateau_regional_maxima(f));
    }
}

TEST_CASE("impose_minima leaves exactly the seed components as minima") {
    SUBCASE("1-D suppression example") {
        FloatImage grad(5, 1);
        double g[] = {5, 2, 5, 1, 5};
        for (int x = 0; x < 5; ++x) grad.at(x, 0) = g[x];
        BinaryMask seeds(5, 1);
        seeds.set(0, 0, true);
        FloatImage imposed = impose_minima(grad, seeds);
        BinaryMask minima = regional_minima(imposed);
        CHECK(minima.get(0, 0));
        CHECK(minima.count() == 1); // the old minimum at index 3 is gone
    }

    SUBCASE("random fields") {
        Rng rng(23);
        for (int trial = 0; trial < 30; ++trial) {
            FloatImage grad(7, 6);
            for (auto& v : grad.data()) v = rng.irange(0, 9);
            BinaryMask seeds(7, 6);
            int k = rng.irange(1, 4);
            for (int i = 0; i < k; ++i) seeds.set(rng.irange(0, 6), rng.irange(0, 5), true);
            FloatImage imposed = impose_minima(grad, seeds);
            CHECK(regional_minima(imposed) == seeds);
        }
    }

    SUBCASE("seeds everywhere give a flat minimum image") {
        FloatImage grad(4, 4);
        Rng rng(29);
        for (auto& v : grad.data()) v = rng.irange(0, 9);
        BinaryMask seeds(4, 4, true);
        FloatImage imposed = impose_minima(grad, seeds);
        for (double v : imposed.data()) CHECK(v == imposed.data()[0]);
    }

    SUBCASE("empty seeds throw") {
        FloatImage grad(4, 4, 1.0);
        BinaryMask seeds(4, 4);
        CHECK_THROWS_AS(impose_minima(grad, seeds), std::invalid_argument);
    }
}
