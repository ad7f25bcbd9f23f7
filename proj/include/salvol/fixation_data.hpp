#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "salvol/error.hpp"
#include "salvol/random.hpp"

namespace salvol {

struct Fixation {
    double x_px = 0.0;
    double y_px = 0.0;
    double start_s = 0.0;
    double duration_s = 0.0;

    bool operator==(const Fixation&) const = default;
};

struct ScanPath {
    std::string image_id;
    std::string observer_id;
    std::vector<Fixation> fixations; // sorted by start_s, strictly increasing

    bool operator==(const ScanPath&) const = default;
};

struct ImageDims {
    int width_px = 6000;
    int height_px = 3000;

    bool operator==(const ImageDims&) const = default;
};

struct ImageRecord {
    ImageDims dims;
    std::vector<ScanPath> scanpaths; // in order of first appearance in the source

    bool operator==(const ImageRecord&) const = default;
};

struct FixationDataset {
    std::map<std::string, ImageRecord> images;

    std::size_t scanpath_count() const;
    std::size_t fixation_count() const;

    /// Throws ValidationError when the image is absent.
    const ImageRecord& image(const std::string& image_id) const;

    bool operator==(const FixationDataset&) const = default;
};

enum class FixationFormat { csv, json };

/// Picks the format from a file name extension (".json" or anything else as CSV).
FixationFormat format_from_path(std::string_view path);

inline constexpr std::string_view fixation_csv_header =
    "image_id,observer_id,x_px,y_px,start_s,duration_s";

/// Parses a fixation log. The log carries no image sizes, so every image is
/// given `dims`. Rows are grouped by (image_id, observer_id); fixations out of
/// time order are sorted and reported through `warnings`.
FixationDataset parse_fixations(std::string_view bytes, FixationFormat format,
                                ImageDims dims = {}, const WarningSink& warnings = {});

FixationDataset load_fixations(const std::string& path, ImageDims dims = {},
                               const WarningSink& warnings = {});

/// Inverse of parse_fixations. Numbers use the shortest round-trip representation.
std::string serialize_fixations(const FixationDataset& ds, FixationFormat format);

/// Checks position, timing and ordering invariants of one scanpath against its image.
void validate_scanpath(const ScanPath& sp, ImageDims dims);

// Scanpath JSON: {"image_id":…,"observer_id":…,"fixations":[{"x_px":…,…},…]}
nlohmann::json scanpath_to_json(const ScanPath& sp);
ScanPath scanpath_from_json(const nlohmann::json& j);
std::string serialize_scanpaths(const std::vector<ScanPath>& scanpaths);
/// Accepts a single scanpath object or an array of them.
std::vector<ScanPath> parse_scanpaths(std::string_view text);

enum class DistributionKind { discrete_count, binned_duration };

struct DistributionAtom {
    double value;
    double probability;

    bool operator==(const DistributionAtom&) const = default;
};

/// Finite discrete distribution with a validated support.
class EmpiricalDistribution {
public:
    /// Throws ValidationError unless the support is non-empty, strictly
    /// increasing, non-negative and sums to 1 within 1e-9.
    EmpiricalDistribution(std::vector<DistributionAtom> support, DistributionKind kind,
                          double bin_width_s = 0.0);

    const std::vector<DistributionAtom>& support() const { return support_; }
    DistributionKind kind() const { return kind_; }
    double bin_width_s() const { return bin_width_s_; }
    double mean() const;

    double sample(Rng& rng) const;

    bool operator==(const EmpiricalDistribution& o) const {
        return support_ == o.support_ && kind_ == o.kind_ && bin_width_s_ == o.bin_width_s_;
    }

private:
    std::vector<DistributionAtom> support_;
    std::vector<double> cumulative_;
    DistributionKind kind_;
    double bin_width_s_;
};

inline constexpr double default_duration_bin_s = 0.1;

EmpiricalDistribution fit_count_distribution(const FixationDataset& ds);
EmpiricalDistribution fit_duration_distribution(const FixationDataset& ds,
                                                double bin_width_s = default_duration_bin_s);

inline double sample_distribution(const EmpiricalDistribution& d, Rng& rng) { return d.sample(rng); }

nlohmann::json distribution_to_json(const EmpiricalDistribution& d);
EmpiricalDistribution distribution_from_json(const nlohmann::json& j);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

} // namespace salvol
