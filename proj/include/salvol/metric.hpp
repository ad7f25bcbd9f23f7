#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include <json.hpp>

#include "salvol/fixation_data.hpp"

namespace salvol {

/// Radians: lat in [-pi/2, pi/2], lon in [-pi, pi).
struct SphericalPoint {
    double lat;
    double lon;
};

/// Equirectangular pixel center to sphere. Throws ValidationError out of bounds.
SphericalPoint pixel_to_sphere(double x_px, double y_px, double width_px, double height_px);

/// Great-circle angle in [0, pi] (Vincenty form of the haversine problem).
double orthodromic_distance(SphericalPoint a, SphericalPoint b);

/// Dense non-negative matrix, row-major.
class CostMatrix {
public:
    CostMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries);
    CostMatrix(std::size_t rows, std::size_t cols) : CostMatrix(rows, cols, std::vector<double>(rows * cols, 0.0)) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    double operator()(std::size_t i, std::size_t j) const { return entries_[i * cols_ + j]; }
    void set(std::size_t i, std::size_t j, double value);
    std::span<const double> entries() const { return entries_; }

private:
    std::size_t rows_, cols_;
    std::vector<double> entries_;
};

struct Assignment {
    std::vector<std::pair<std::size_t, std::size_t>> pairs; // sorted by row
    double total_cost = 0.0;
};

/// Minimum-cost one-to-one matching of min(rows, cols) pairs.
Assignment hungarian_min_assignment(const CostMatrix& c);

/// Weights of the per-step alignment cost. Only the position term is used by
/// default; the duration term adds the mean absolute difference of the
/// endpoint fixation durations, in seconds.
struct JarodzkaConfig {
    double position_weight = 1.0;
    double duration_weight = 0.0;
};

/// Alignment lattice between the saccades of `a` (rows) and `b` (columns).
/// A single-fixation scanpath contributes one zero-length saccade.
CostMatrix saccade_alignment_lattice(const ScanPath& a, const ScanPath& b, ImageDims image,
                                     const JarodzkaConfig& cfg = {});

/// Cheapest monotone path (right, down, diagonal) from the top-left to the
/// bottom-right cell; ties in total cost go to the path with fewer cells.
/// Returns the mean cell cost along that path.
double cheapest_path_mean(const CostMatrix& lattice);

double jarodzka_distance(const ScanPath& a, const ScanPath& b, ImageDims image, const JarodzkaConfig& cfg = {});

struct EvaluationResult {
    double mean_cost;
    Assignment assignment;
    CostMatrix matrix;
};

EvaluationResult evaluate_sets(std::span<const ScanPath> generated, std::span<const ScanPath> truth,
                               ImageDims image, const JarodzkaConfig& cfg = {});

/// {"mean_cost":…, "pairs":[[i,j,cost],…], "matrix_shape":[m,n]}
nlohmann::json evaluation_report(const EvaluationResult& r);

} // namespace salvol
