#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>

#include "segrobust/manifest.hpp"
#include "segrobust/png_io.hpp"
#include "segrobust/score_map.hpp"
#include "test_util.hpp"

using namespace segrobust;
using testutil::TempDir;

namespace {

DatasetManifest make_manifest(int n_classes = 19) {
  DatasetManifest m;
  m.n_classes = n_classes;
  return m;
}

}  // namespace

TEST_SUITE("labelmap") {

TEST_CASE("png grey8 round-trip is byte identical") {
  TempDir dir("png");
  LabelMap map;
  map.grid.resize(2, 3);
  map.grid << 0, 7, 255, 18, 1, 0;
  save_label_map(map, dir.path() / "m.png");
  const LabelMap back = load_label_map(dir.path() / "m.png", make_manifest());
  CHECK((back.grid == map.grid).all());
  CHECK(back.ignore_value == 255);
}

TEST_CASE("decode of valid bytes") {
  TempDir dir("png");
  LabelMap map;
  map.grid.resize(1, 2);
  map.grid << 0, 255;
  save_label_map(map, dir.path() / "m.png");
  const LabelMap back = load_label_map(dir.path() / "m.png", make_manifest());
  CHECK(back.grid(0, 0) == 0);
  CHECK(back.grid(0, 1) == 255);
}

TEST_CASE("out-of-range pixel reports its coordinate") {
  TempDir dir("png");
  LabelGrid grid(1, 1);
  grid << 19;
  write_png_grey8(dir.path() / "bad.png", grid);
  CHECK_THROWS_WITH_AS(load_label_map(dir.path() / "bad.png", make_manifest()),
                       doctest::Contains("class id out of range at (0,0)"),
                       std::runtime_error);
}

TEST_CASE("missing file") {
  CHECK_THROWS_AS(load_label_map("/nonexistent/x.png", make_manifest()),
                  std::runtime_error);
}

TEST_CASE("rgb png rejects as label input") {
  TempDir dir("png");
  RgbImage img;
  img.width = 2;
  img.height = 1;
  img.data = {1, 2, 3, 4, 5, 6};
  write_png_rgb8(dir.path() / "rgb.png", img);
  CHECK_THROWS_WITH_AS(load_label_map(dir.path() / "rgb.png", make_manifest()),
                       doctest::Contains("greyscale"), std::runtime_error);
}

TEST_CASE("all-ignore map round-trips") {
  TempDir dir("png");
  LabelMap map;
  map.grid = LabelGrid::Constant(4, 4, 255);
  save_label_map(map, dir.path() / "ign.png");
  const LabelMap back = load_label_map(dir.path() / "ign.png", make_manifest());
  CHECK((back.grid == 255).all());
}

TEST_CASE("property: random maps round-trip") {
  TempDir dir("png");
  SplitMix64 rng(0xfeed);
  for (int i = 0; i < 1000; ++i) {
    const Index h = 1 + Index(rng.below(12)), w = 1 + Index(rng.below(12));
    const LabelMap map =
        testutil::random_label_map(rng, h, w, 19, /*ignore_fraction=*/0.1);
    const auto path = dir.path() / ("rt_" + std::to_string(i) + ".png");
    save_label_map(map, path);
    const LabelMap back = load_label_map(path, make_manifest());
    REQUIRE((back.grid == map.grid).all());
  }
}

TEST_CASE("property: rgb round-trip") {
  TempDir dir("png");
  SplitMix64 rng(0xbeef);
  for (int i = 0; i < 50; ++i) {
    RgbImage img;
    img.height = 1 + Index(rng.below(16));
    img.width = 1 + Index(rng.below(16));
    img.data.resize(3 * img.width * img.height);
    for (auto& b : img.data) b = std::uint8_t(rng.below(256));
    const auto path = dir.path() / ("rgb_" + std::to_string(i) + ".png");
    write_png_rgb8(path, img);
    const RgbImage back = read_png_rgb8(path);
    REQUIRE(back.width == img.width);
    REQUIRE(back.height == img.height);
    REQUIRE(back.data == img.data);
  }
}

TEST_CASE("mask png 1-bit round-trip") {
  TempDir dir("png");
  SplitMix64 rng(0x11);
  for (int i = 0; i < 50; ++i) {
    const Index h = 1 + Index(rng.below(20)), w = 1 + Index(rng.below(20));
    MaskGrid mask(h, w);
    for (Index y = 0; y < h; ++y)
      for (Index x = 0; x < w; ++x)
        mask(y, x) = std::uint8_t(rng.below(2));
    const auto path = dir.path() / ("mask_" + std::to_string(i) + ".png");
    write_png_mask(path, mask);
    const MaskGrid back = read_png_mask(path);
    REQUIRE((back == mask).all());
  }
}

TEST_CASE("manifest: minimal valid") {
  TempDir dir("manifest");
  std::ofstream(dir.path() / "m.json")
      << R"({"n_classes": 19, "items": [{"id": "a", "label": "a.png"}]})";
  const DatasetManifest m = load_manifest(dir.path() / "m.json");
  CHECK(m.n_classes == 19);
  CHECK(m.ignore_value == 255);
  CHECK(m.items.size() == 1);
  CHECK(m.items[0].label == dir.path() / "a.png");
}

TEST_CASE("manifest: n_classes below 2 rejected") {
  TempDir dir("manifest");
  std::ofstream(dir.path() / "m.json") << R"({"n_classes": 1, "items": []})";
  CHECK_THROWS_WITH_AS(load_manifest(dir.path() / "m.json"),
                       doctest::Contains("n_classes"), std::runtime_error);
}

TEST_CASE("manifest: duplicate ids rejected") {
  TempDir dir("manifest");
  std::ofstream(dir.path() / "m.json") << R"({"n_classes": 19, "items": [
      {"id": "a", "label": "a.png"}, {"id": "a", "label": "b.png"}]})";
  CHECK_THROWS_WITH_AS(load_manifest(dir.path() / "m.json"),
                       doctest::Contains("duplicate item id"),
                       std::runtime_error);
}

TEST_CASE("manifest: duplicate paths within an item rejected") {
  TempDir dir("manifest");
  std::ofstream(dir.path() / "m.json") << R"({"n_classes": 19, "items": [
      {"id": "a", "label": "a.png", "prediction": "a.png"}]})";
  CHECK_THROWS_WITH_AS(load_manifest(dir.path() / "m.json"),
                       doctest::Contains("same path twice"),
                       std::runtime_error);
}

TEST_CASE("manifest: parse failure") {
  TempDir dir("manifest");
  std::ofstream(dir.path() / "m.json") << "{not json";
  CHECK_THROWS_WITH_AS(load_manifest(dir.path() / "m.json"),
                       doctest::Contains("parse failure"), std::runtime_error);
}

TEST_CASE("manifest: missing label file fails lazily at item access") {
  TempDir dir("manifest");
  std::ofstream(dir.path() / "m.json")
      << R"({"n_classes": 19, "items": [{"id": "a", "label": "gone.png"}]})";
  const DatasetManifest m = load_manifest(dir.path() / "m.json");  // no throw
  CHECK_THROWS_AS(load_label_map(m.items[0].label, m), std::runtime_error);
}

TEST_CASE("manifest: save/load round-trip keeps items and order") {
  TempDir dir("manifest");
  DatasetManifest m = make_manifest();
  m.directory = dir.path();
  for (int i = 0; i < 3; ++i) {
    ManifestItem item;
    item.id = "item" + std::to_string(i);
    item.label = dir.path() / (item.id + ".png");
    m.items.push_back(item);
  }
  save_manifest(m, dir.path() / "m.json");
  const DatasetManifest back = load_manifest(dir.path() / "m.json");
  REQUIRE(back.items.size() == 3);
  for (int i = 0; i < 3; ++i) {
    CHECK(back.items[i].id == m.items[i].id);
    CHECK(back.items[i].label == m.items[i].label);
  }
}

TEST_CASE("score map round-trip and validation") {
  TempDir dir("smap");
  ScoreMap m;
  m.height = 2;
  m.width = 2;
  m.n_classes = 3;
  m.data = {0.5f, 0.25f, 0.25f, 1.f, 0.f, 0.f,
            0.2f, 0.3f, 0.5f,  0.f, 0.f, 1.f};
  write_score_map(dir.path() / "s.smap", m);
  const ScoreMap back = read_score_map(dir.path() / "s.smap");
  CHECK(back.height == 2);
  CHECK(back.width == 2);
  CHECK(back.n_classes == 3);
  CHECK(back.data == m.data);
}

TEST_CASE("score map rejects vectors that do not sum to 1") {
  TempDir dir("smap");
  ScoreMap m;
  m.height = 1;
  m.width = 1;
  m.n_classes = 2;
  m.data = {0.9f, 0.2f};
  CHECK_THROWS_WITH_AS(write_score_map(dir.path() / "bad.smap", m),
                       doctest::Contains("sums to"), std::runtime_error);
}

TEST_CASE("single-channel score maps are exempt from the sum rule") {
  TempDir dir("smap");
  ScoreMap m;
  m.height = 1;
  m.width = 2;
  m.n_classes = 1;
  m.data = {0.15f, 7.5f};
  write_score_map(dir.path() / "a.smap", m);
  const ScoreMap back = read_score_map(dir.path() / "a.smap");
  CHECK(back.data == m.data);
}

TEST_CASE("score map detects truncation") {
  TempDir dir("smap");
  ScoreMap m;
  m.height = 2;
  m.width = 2;
  m.n_classes = 1;
  m.data = {1.f, 2.f, 3.f, 4.f};
  write_score_map(dir.path() / "t.smap", m);
  auto full = std::filesystem::file_size(dir.path() / "t.smap");
  std::filesystem::resize_file(dir.path() / "t.smap", full - 4);
  CHECK_THROWS_WITH_AS(read_score_map(dir.path() / "t.smap"),
                       doctest::Contains("truncated"), std::runtime_error);
}

TEST_CASE("eval report accepts only documented metric keys") {
  EvalReport report;
  report.set("miou", 0.5);
  report.set("iou.12", 0.25);
  CHECK_THROWS_AS(report.set("bogus", 1.0), std::logic_error);
  const std::string json = report.to_json();
  CHECK(json.find("\"miou\"") != std::string::npos);
  CHECK(json.find("config_digest") != std::string::npos);
}

}  // TEST_SUITE
