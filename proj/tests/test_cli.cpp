#include <doctest.h>

#include <unistd.h>

#include <filesystem>
#include <fstream>

#include "leafseg/cli.hpp"
#include "leafseg/config.hpp"
#include "leafseg/evaluation.hpp"
#include "leafseg/imageio.hpp"
#include "leafseg/synthetic.hpp"

using namespace leafseg;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("leafseg_test_" + std::to_string(::getpid()) + "_" +
                                            std::to_string(counter++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string operator/(const std::string& name) const { return (path / name).string(); }
    static inline int counter = 0;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
}

} // namespace

TEST_CASE("PNG round-trips images and masks exactly, JPEG reads back close") {
    TempDir tmp;
    SyntheticScene scene = generate_synthetic_scene(31, SceneKind::Easy);

    write_png(tmp / "img.png", scene.image);
    RgbImage png_back = read_rgb(tmp / "img.png");
    CHECK(png_back == scene.image);

    write_png(tmp / "mask.png", scene.truth);
    BinaryMask mask_back = read_mask(tmp / "mask.png");
    CHECK(mask_back == scene.truth);

    write_jpeg(tmp / "img.jpg", scene.image);
    RgbImage jpg_back = read_rgb(tmp / "img.jpg");
    REQUIRE(jpg_back.width() == scene.image.width());
    REQUIRE(jpg_back.height() == scene.image.height());
    double err = 0;
    for (std::size_t i = 0; i < jpg_back.size(); ++i)
        err += std::abs((int)jpg_back.data()[i].g - (int)scene.image.data()[i].g);
    CHECK(err / (double)jpg_back.size() < 4.0);

    CHECK_THROWS_AS(read_rgb(tmp / "nothing.png"), IoError);
    std::ofstream(tmp / "garbage.png") << "not an image";
    CHECK_THROWS_AS(read_rgb(tmp / "garbage.png"), IoError);
}

TEST_CASE("batch overlay directory receives one PNG per image") {
    TempDir tmp;
    std::string overlays = tmp / "overlays";
    CHECK(run_cli({"batch", "--synthetic", "2", "--seed", "5", "--report", tmp / "r.txt",
                   "--overlay-dir", overlays, "--refine", "none"}) == 0);
    CHECK(fs::exists(fs::path(overlays) / "easy_000.png"));
    CHECK(fs::exists(fs::path(overlays) / "easy_001.png"));
}

TEST_CASE("config round-trips through serialize and parse") {
    PipelineConfig cfg;
    cfg.method = SegMethod::GraphCut;
    cfg.refine = RefineMode::Veins;
    cfg.background.cleanup_min_area = 123;
    cfg.leaf.hue_tolerance_deg = 17.5;
    cfg.refinement.anomaly_k = 3.25;

    PipelineConfig back = parse_config_text(serialize_config(cfg));
    CHECK(serialize_config(back) == serialize_config(cfg));
    CHECK(back.method == SegMethod::GraphCut);
    CHECK(back.background.cleanup_min_area == 123);
    CHECK(back.leaf.hue_tolerance_deg == 17.5);
}

TEST_CASE("config rejects unknown keys and bad values") {
    CHECK_THROWS_AS(parse_config_text("no_such_key = 3\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config_text("resize_limit = 0\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config_text("method = sorcery\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config_text("resize_limit\n"), std::invalid_argument);
    PipelineConfig cfg = parse_config_text("# comment only\n\nresize_limit = 400\n");
    CHECK(cfg.resize_limit == 400);
}

TEST_CASE("cli extract writes a mask and is byte-identical across runs") {
    TempDir tmp;
    SyntheticScene scene = generate_synthetic_scene(3, SceneKind::Easy);
    std::string input = tmp / "scene.png";
    write_png(input, scene.image);

    std::string mask1 = tmp / "mask1.png", mask2 = tmp / "mask2.png";
    CHECK(run_cli({"extract", input, "--out-mask", mask1}) == 0);
    CHECK(run_cli({"extract", input, "--out-mask", mask2}) == 0);
    CHECK(slurp(mask1) == slurp(mask2));
    CHECK(!slurp(mask1).empty());

    BinaryMask mask = read_mask(mask1);
    auto [p, r] = precision_recall(mask, scene.truth);
    CHECK(p >= 0.9);
}

TEST_CASE("cli extract on an all-black image exits 2") {
    TempDir tmp;
    RgbImage black(64, 48);
    for (auto& px : black.data()) px = {4, 4, 4};
    std::string input = tmp / "black.png";
    write_png(input, black);
    CHECK(run_cli({"extract", input, "--out-mask", tmp / "m.png"}) == 2);
}

TEST_CASE("cli extract with a missing input exits 1") {
    TempDir tmp;
    CHECK(run_cli({"extract", tmp / "missing.png", "--out-mask", tmp / "m.png"}) == 1);
}

TEST_CASE("cli extract dump directory holds the stage images") {
    TempDir tmp;
    SyntheticScene scene = generate_synthetic_scene(4, SceneKind::Easy);
    std::string input = tmp / "scene.png";
    write_png(input, scene.image);
    std::string dumps = tmp / "stages";
    CHECK(run_cli({"extract", input, "--out-mask", tmp / "m.png", "--out-overlay",
                   tmp / "overlay.png", "--dump-intermediate", dumps}) == 0);
    for (const char* name : {"bg_index.png", "bg_rules.png", "bg_entropy.png", "bg_marker.png",
                             "maxima.png", "leaf_marker.png", "initial_mask.png",
                             "refined_mask.png"})
        CHECK(fs::exists(fs::path(dumps) / name));
    CHECK(fs::exists(tmp / "overlay.png"));
}

TEST_CASE("cli eval prints the fixed-format scores") {
    TempDir tmp;
    BinaryMask a(32, 32), b(32, 32);
    for (int y = 8; y < 24; ++y)
        for (int x = 8; x < 24; ++x) {
            a.set(x, y, true);
            b.set(x, y, true);
        }
    write_png(tmp / "a.png", a);
    write_png(tmp / "b.png", b);
    CHECK(run_cli({"eval", tmp / "a.png", tmp / "b.png"}) == 0);

    BinaryMask c(16, 16); // dimension mismatch
    write_png(tmp / "c.png", c);
    CHECK(run_cli({"eval", tmp / "a.png", tmp / "c.png"}) == 1);
}

TEST_CASE("cli batch over synthetic scenes produces identical reports per run") {
    TempDir tmp;
    std::string r1 = tmp / "r1.txt", r2 = tmp / "r2.txt";
    CHECK(run_cli({"batch", "--synthetic", "4", "--seed", "7", "--report", r1,
                   "--refine", "none"}) == 0);
    CHECK(run_cli({"batch", "--synthetic", "4", "--seed", "7", "--report", r2,
                   "--refine", "none"}) == 0);
    std::string text1 = slurp(r1);
    CHECK(text1 == slurp(r2));
    CHECK(text1.find("aggregate images=4") != std::string::npos);
}

TEST_CASE("cli batch over an empty directory exits 1") {
    TempDir tmp;
    fs::create_directories(fs::path(tmp / "imgs"));
    fs::create_directories(fs::path(tmp / "gt"));
    CHECK(run_cli({"batch", tmp / "imgs", "--gt", tmp / "gt"}) == 1);
}

TEST_CASE("cli batch pairs directory images with ground truths by stem") {
    TempDir tmp;
    fs::create_directories(fs::path(tmp / "imgs"));
    fs::create_directories(fs::path(tmp / "gt"));
    for (int i = 0; i < 2; ++i) {
        SyntheticScene scene = generate_synthetic_scene(20 + i, SceneKind::Easy);
        std::string stem = "leaf" + std::to_string(i);
        write_png((fs::path(tmp / "imgs") / (stem + ".png")).string(), scene.image);
        write_png((fs::path(tmp / "gt") / (stem + ".png")).string(), scene.truth);
    }
    std::string report = tmp / "report.txt";
    CHECK(run_cli({"batch", tmp / "imgs", "--gt", tmp / "gt", "--report", report,
                   "--refine", "none"}) == 0);
    std::string text = slurp(report);
    CHECK(text.find("image=leaf0") != std::string::npos);
    CHECK(text.find("image=leaf1") != std::string::npos);
}
