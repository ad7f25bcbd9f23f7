#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "salvol/fixation_data.hpp"
#include "salvol/metric.hpp"
#include "salvol/sampler.hpp"
#include "salvol/volume.hpp"

namespace salvol {

/// Where a command writes data (out) and diagnostics (err).
struct CommandStreams {
    std::ostream& out;
    std::ostream& err;
};

struct BuildVolumeOptions {
    std::string fixations_path;
    std::string image_id;
    std::string out_path;
    ImageDims image;
    VolumeOptions volume;
};

struct SampleOptions {
    std::string volume_path;
    std::string fixations_path; // source of the count and duration distributions
    std::string out_path;       // stdout when empty
    std::string image_id = "image";
    ImageDims image;
    double bin_width_s = default_duration_bin_s;
    SamplingConfig sampling;
};

struct EvaluateOptions {
    std::string generated_path;
    std::string truth_path; // scanpath JSON, or a fixation CSV/JSON file
    std::string image_id;   // selects the truth image in a fixation file
    std::string out_path;   // stdout when empty
    ImageDims image;
    JarodzkaConfig metric;
};

enum class ExportMode { map, weighted, slices };

std::string_view to_string(ExportMode m);
ExportMode parse_export_mode(std::string_view name);

struct ExportOptions {
    std::string volume_path;
    ExportMode mode = ExportMode::map;
    std::vector<double> weights; // weighted mode only, one per slice
    std::string out_dir;
};

struct FitDistsOptions {
    std::string fixations_path;
    std::string image_id; // all images when empty
    std::string out_path; // stdout when empty
    ImageDims image;
    double bin_width_s = default_duration_bin_s;
};

// Resolved configuration of each command, as echoed on the error stream.
nlohmann::json to_json(const BuildVolumeOptions& o);
nlohmann::json to_json(const SampleOptions& o);
nlohmann::json to_json(const EvaluateOptions& o);
nlohmann::json to_json(const ExportOptions& o);
nlohmann::json to_json(const FitDistsOptions& o);

// Each command echoes its configuration, then does its work. Failures throw salvol::Error.
void cmd_build_volume(const BuildVolumeOptions& o, CommandStreams io);
void cmd_sample(const SampleOptions& o, CommandStreams io);
void cmd_evaluate(const EvaluateOptions& o, CommandStreams io);
void cmd_export(const ExportOptions& o, CommandStreams io);
void cmd_fit_dists(const FitDistsOptions& o, CommandStreams io);

/// Truth scanpaths from either format; `image_id` may be empty when the file holds one image.
std::vector<ScanPath> load_truth(const std::string& path, const std::string& image_id, ImageDims image,
                                 const WarningSink& warnings = {});

} // namespace salvol
