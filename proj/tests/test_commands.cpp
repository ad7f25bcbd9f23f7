#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <set>
#include <sstream>

#include "salvol/commands.hpp"
#include "salvol/volume_io.hpp"

using namespace salvol;
namespace fs = std::filesystem;

namespace {

const std::string dataset = std::string(SALVOL_DATA_DIR) + "/synthetic_fixations.csv";

fs::path scratch(const std::string& name) {
    auto dir = fs::temp_directory_path() / "salvol_test_commands";
    fs::create_directories(dir);
    return dir / name;
}

struct Captured {
    std::ostringstream out, err;
    CommandStreams io() { return {out, err}; }
    nlohmann::json config() const {
        std::istringstream lines(err.str());
        std::string first;
        std::getline(lines, first);
        return nlohmann::json::parse(first);
    }
};

// Small two-peak volume written to disk once per test.
std::string small_volume(const std::string& name) {
    SaliencyVolume v({3, 10, 20}, 25.0 / 3.0);
    for (std::size_t t = 0; t < 3; ++t) {
        v.at(t, 2, 4) = 0.6;
        v.at(t, 7, 15) = 0.4;
    }
    const auto path = scratch(name).string();
    write_volume(path, v);
    return path;
}

} // namespace

TEST_CASE("build-volume") {
    BuildVolumeOptions o;
    o.fixations_path = dataset;
    o.image_id = "synth-01";
    o.out_path = scratch("synth-01.salvol").string();

    Captured a;
    cmd_build_volume(o, a.io());
    const auto bytes = read_file(o.out_path);
    const auto v = decode_volume(bytes);
    CHECK(v.dims() == VolumeDims{12, 300, 600});

    const auto cfg = a.config();
    CHECK(cfg["command"] == "build-volume");
    CHECK(cfg["dims"] == nlohmann::json::array({12, 300, 600}));
    CHECK(cfg["bandwidths"] == nlohmann::json::array({4.0, 20.0, 20.0}));
    CHECK(cfg["dt_s"].get<double>() == 25.0 / 12.0);
    CHECK(cfg["wrap_width"] == false);
    CHECK(cfg["image_dims"] == nlohmann::json::array({6000, 3000}));

    std::istringstream out(a.out.str());
    std::string line;
    std::getline(out, line);
    CHECK(line == "dims 12 300 600");
    int slices = 0;
    while (std::getline(out, line)) {
        CHECK(line.starts_with("slice " + std::to_string(slices) + " sum "));
        CHECK(std::abs(std::stod(line.substr(line.rfind(' '))) - 1.0) <= 1e-6);
        ++slices;
    }
    CHECK(slices == 12);

    // Byte-identical rerun; reload matches in-memory construction.
    Captured b;
    const auto second = scratch("synth-01-again.salvol").string();
    o.out_path = second;
    cmd_build_volume(o, b.io());
    CHECK(read_file(second) == bytes);
    const auto ds = load_fixations(dataset);
    const auto& rec = ds.image("synth-01");
    CHECK(read_volume(second) == to_file_precision(build_saliency_volume(rec.scanpaths, rec.dims, {})));

    o.image_id = "nope";
    CHECK_THROWS_AS(cmd_build_volume(o, b.io()), ValidationError);
    o.image_id = "";
    CHECK_THROWS_AS(cmd_build_volume(o, b.io()), ValidationError);
    o.image_id = "synth-01";
    o.fixations_path = scratch("missing.csv").string();
    CHECK_THROWS_AS(cmd_build_volume(o, b.io()), Error);
}

TEST_CASE("sample") {
    SampleOptions o;
    o.volume_path = small_volume("two_peaks.salvol");
    o.fixations_path = dataset;
    o.sampling.seed = 7;

    Captured a, b;
    cmd_sample(o, a.io());
    cmd_sample(o, b.io());
    CHECK(a.out.str() == b.out.str());
    CHECK(a.config()["n"] == 40);
    CHECK(a.config()["seed"] == 7);
    CHECK(a.config()["strategy"] == "naive");
    CHECK(a.config()["mask_sigma_px"] == 40.0);
    const auto paths = parse_scanpaths(a.out.str());
    CHECK(paths.size() == 40);

    // Every generated length was seen in the data.
    const auto counts = fit_count_distribution(load_fixations(dataset));
    std::set<double> support;
    for (const auto& atom : counts.support()) support.insert(atom.value);
    for (const auto& sp : paths) CHECK(support.count(static_cast<double>(sp.fixations.size())) == 1);

    for (auto s : {Strategy::distance_limited, Strategy::inhibition_of_return, Strategy::random_baseline}) {
        o.sampling.strategy = s;
        o.out_path = scratch("sample.json").string();
        Captured c;
        cmd_sample(o, c.io());
        CHECK(c.out.str().empty());
        CHECK(parse_scanpaths(read_file(o.out_path)).size() == 40);
    }
}

TEST_CASE("sample from a point-mass volume") {
    SaliencyVolume v({2, 4, 8}, 12.5);
    v.at(0, 1, 6) = v.at(1, 1, 6) = 1.0;
    SampleOptions o;
    o.volume_path = scratch("point.salvol").string();
    write_volume(o.volume_path, v);
    o.fixations_path = dataset;
    o.sampling.num_scanpaths = 5;
    Captured c;
    cmd_sample(o, c.io());
    for (const auto& sp : parse_scanpaths(c.out.str()))
        for (const auto& f : sp.fixations) {
            CHECK(f.x_px == 6.5 * 6000 / 8);
            CHECK(f.y_px == 1.5 * 3000 / 4);
        }
}

TEST_CASE("evaluate") {
    const auto ds = load_fixations(dataset);
    const auto& truth = ds.image("synth-02").scanpaths;
    const auto generated = scratch("truth_as_generated.json").string();
    write_file(generated, serialize_scanpaths(truth));

    EvaluateOptions o;
    o.generated_path = generated;
    o.truth_path = dataset;
    o.image_id = "synth-02";
    Captured c;
    cmd_evaluate(o, c.io());
    const auto report = nlohmann::json::parse(c.out.str());
    CHECK(report["mean_cost"].get<double>() <= 1e-9);
    CHECK(report["matrix_shape"] == nlohmann::json::array({truth.size(), truth.size()}));

    // Fewer generated than truth: pairs cover min(m, n) without repeats.
    std::vector<ScanPath> few(truth.begin(), truth.begin() + 3);
    std::reverse(few.begin(), few.end());
    write_file(generated, serialize_scanpaths(few));
    o.truth_path = generated; // scanpath JSON truth too
    o.image_id = "";
    Captured self;
    cmd_evaluate(o, self.io());
    CHECK(nlohmann::json::parse(self.out.str())["mean_cost"].get<double>() <= 1e-9);

    o.truth_path = dataset;
    o.image_id = "synth-02";
    Captured d;
    cmd_evaluate(o, d.io());
    const auto r = nlohmann::json::parse(d.out.str());
    CHECK(r["pairs"].size() == 3);
    std::set<int> rows, cols;
    for (const auto& p : r["pairs"]) {
        rows.insert(p[0].get<int>());
        cols.insert(p[1].get<int>());
    }
    CHECK(rows.size() == 3);
    CHECK(cols.size() == 3);
    CHECK(r["mean_cost"].get<double>() <= 1e-9);

    o.image_id = "";
    CHECK_THROWS_AS(cmd_evaluate(o, d.io()), ValidationError);
}

TEST_CASE("load_truth") {
    const auto ds = load_fixations(dataset);
    CHECK(load_truth(dataset, "synth-03", {}) == ds.image("synth-03").scanpaths);

    const auto rows_json = scratch("rows.json").string();
    write_file(rows_json, serialize_fixations(ds, FixationFormat::json));
    CHECK(load_truth(rows_json, "synth-01", {}) == ds.image("synth-01").scanpaths);

    const auto paths_json = scratch("paths.json").string();
    write_file(paths_json, serialize_scanpaths(ds.image("synth-01").scanpaths));
    CHECK(load_truth(paths_json, "", {}) == ds.image("synth-01").scanpaths);
    CHECK(load_truth(paths_json, "synth-02", {}).empty());
    CHECK_THROWS_AS(load_truth(paths_json, "", {100, 50}), ValidationError);
}

TEST_CASE("export") {
    Captured c;
    ExportOptions o;
    SaliencyVolume v({12, 6, 10}, 1.0);
    Rng rng(3);
    for (auto& x : v.values()) x = rng.uniform();
    o.volume_path = scratch("random.salvol").string();
    write_volume(o.volume_path, v);

    o.mode = ExportMode::slices;
    o.out_dir = scratch("slices").string();
    fs::remove_all(o.out_dir);
    cmd_export(o, c.io());
    CHECK(std::distance(fs::directory_iterator(o.out_dir), fs::directory_iterator{}) == 12);
    for (const auto& entry : fs::directory_iterator(o.out_dir)) {
        const auto img = read_png(entry.path().string());
        CHECK(img.width == 10);
        CHECK(*std::max_element(img.pixels.begin(), img.pixels.end()) == 255);
    }

    o.mode = ExportMode::map;
    o.out_dir = scratch("maps").string();
    cmd_export(o, c.io());
    o.mode = ExportMode::weighted;
    o.weights.assign(12, 1.0);
    cmd_export(o, c.io());
    const auto map = read_png(o.out_dir + "/map.png"), weighted = read_png(o.out_dir + "/weighted.png");
    CHECK(map == weighted);
    CHECK(*std::max_element(map.pixels.begin(), map.pixels.end()) == 255);

    o.weights.assign(3, 1.0);
    CHECK_THROWS_AS(cmd_export(o, c.io()), ValidationError);
    CHECK(parse_export_mode("slices") == ExportMode::slices);
    CHECK_THROWS_AS(parse_export_mode("gif"), ValidationError);
}

TEST_CASE("fit-dists") {
    FitDistsOptions o;
    o.fixations_path = dataset;
    o.bin_width_s = 0.05;
    Captured c;
    cmd_fit_dists(o, c.io());
    const auto doc = nlohmann::json::parse(c.out.str());
    const auto ds = load_fixations(dataset);
    CHECK(distribution_from_json(doc["count"]) == fit_count_distribution(ds));
    CHECK(distribution_from_json(doc["duration"]) == fit_duration_distribution(ds, 0.05));
    CHECK(c.config()["bin_width_s"] == 0.05);

    o.image_id = "synth-01";
    Captured one;
    cmd_fit_dists(o, one.io());
    FixationDataset only;
    only.images.emplace("synth-01", ds.image("synth-01"));
    CHECK(distribution_from_json(nlohmann::json::parse(one.out.str())["count"]) == fit_count_distribution(only));
}
