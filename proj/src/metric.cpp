#include "salvol/metric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <utility>

namespace salvol {

SphericalPoint pixel_to_sphere(double x_px, double y_px, double width_px, double height_px) {
    if (!(width_px > 0.0) || !(height_px > 0.0)) throw ValidationError("image dimensions must be positive");
    if (!(x_px >= 0.0 && x_px < width_px && y_px >= 0.0 && y_px < height_px))
        throw ValidationError("pixel (" + std::to_string(x_px) + ", " + std::to_string(y_px) +
                              ") outside the equirectangular frame");
    constexpr double pi = std::numbers::pi;
    double lat = pi / 2.0 - ((y_px + 0.5) / height_px) * pi;
    double lon = ((x_px + 0.5) / width_px) * 2.0 * pi - pi;
    // The last half pixel of each axis runs past the seam or the pole.
    if (lon >= pi) lon -= 2.0 * pi;
    lat = std::max(lat, -pi / 2.0);
    return {lat, lon};
}

double orthodromic_distance(SphericalPoint a, SphericalPoint b) {
    // Fixed operand order makes the result exactly symmetric.
    if (b.lat < a.lat || (b.lat == a.lat && b.lon < a.lon)) std::swap(a, b);
    const double dlon = b.lon - a.lon;
    const double sa = std::sin(a.lat), ca = std::cos(a.lat);
    const double sb = std::sin(b.lat), cb = std::cos(b.lat);
    const double sd = std::sin(dlon), cd = std::cos(dlon);
    const double y1 = cb * sd;
    const double y2 = ca * sb - sa * cb * cd;
    const double x = sa * sb + ca * cb * cd;
    return std::atan2(std::hypot(y1, y2), x);
}

CostMatrix::CostMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
    if (entries_.size() != rows_ * cols_) throw ValidationError("cost matrix size mismatch");
    for (double x : entries_)
        if (!(x >= 0.0) || !std::isfinite(x)) throw ValidationError("cost entries must be finite and >= 0");
}

void CostMatrix::set(std::size_t i, std::size_t j, double value) {
    if (!(value >= 0.0) || !std::isfinite(value)) throw ValidationError("cost entries must be finite and >= 0");
    entries_.at(i * cols_ + j) = value;
}

namespace {

// Shortest augmenting path with potentials; requires rows <= cols.
// Returns the column matched to each row.
std::vector<std::size_t> solve_wide(const CostMatrix& c) {
    const std::size_t n = c.rows(), m = c.cols();
    constexpr double inf = std::numeric_limits<double>::infinity();
    // 1-based; column 0 is a virtual start node.
    std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
    std::vector<std::size_t> p(m + 1, 0), way(m + 1, 0);
    for (std::size_t i = 1; i <= n; ++i) {
        p[0] = i;
        std::size_t j0 = 0;
        std::vector<double> minv(m + 1, inf);
        std::vector<char> used(m + 1, false);
        do {
            used[j0] = true;
            const std::size_t i0 = p[j0];
            double delta = inf;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= m; ++j) {
                if (used[j]) continue;
                const double cur = c(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= m; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    std::vector<std::size_t> row_to_col(n);
    for (std::size_t j = 1; j <= m; ++j)
        if (p[j] != 0) row_to_col[p[j] - 1] = j - 1;
    return row_to_col;
}

} // namespace

Assignment hungarian_min_assignment(const CostMatrix& c) {
    if (c.rows() == 0 || c.cols() == 0) throw ValidationError("cannot assign an empty cost matrix");

    Assignment a;
    if (c.rows() <= c.cols()) {
        const auto cols = solve_wide(c);
        for (std::size_t i = 0; i < cols.size(); ++i) a.pairs.emplace_back(i, cols[i]);
    } else {
        std::vector<double> t(c.rows() * c.cols());
        for (std::size_t i = 0; i < c.rows(); ++i)
            for (std::size_t j = 0; j < c.cols(); ++j) t[j * c.rows() + i] = c(i, j);
        const auto rows = solve_wide(CostMatrix(c.cols(), c.rows(), std::move(t)));
        for (std::size_t j = 0; j < rows.size(); ++j) a.pairs.emplace_back(rows[j], j);
        std::sort(a.pairs.begin(), a.pairs.end());
    }
    for (auto [i, j] : a.pairs) a.total_cost += c(i, j);
    return a;
}

CostMatrix saccade_alignment_lattice(const ScanPath& a, const ScanPath& b, ImageDims image,
                                     const JarodzkaConfig& cfg) {
    if (a.fixations.empty() || b.fixations.empty()) throw ValidationError("scanpaths must be non-empty");
    const double w = image.width_px, h = image.height_px;

    auto to_sphere = [&](const ScanPath& sp) {
        std::vector<SphericalPoint> pts;
        pts.reserve(sp.fixations.size());
        for (const auto& f : sp.fixations) pts.push_back(pixel_to_sphere(f.x_px, f.y_px, w, h));
        return pts;
    };
    const auto pa = to_sphere(a), pb = to_sphere(b);

    const std::size_t na = pa.size(), nb = pb.size();
    std::vector<double> dist(na * nb);
    for (std::size_t i = 0; i < na; ++i)
        for (std::size_t j = 0; j < nb; ++j) dist[i * nb + j] = orthodromic_distance(pa[i], pb[j]);

    const std::size_t rows = std::max<std::size_t>(na - 1, 1), cols = std::max<std::size_t>(nb - 1, 1);
    auto end_a = [&](std::size_t i) { return std::min(i + 1, na - 1); };
    auto end_b = [&](std::size_t j) { return std::min(j + 1, nb - 1); };

    std::vector<double> cells(rows * cols);
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) {
            double cost = 0.0;
            if (cfg.position_weight != 0.0)
                cost += cfg.position_weight * 0.5 * (dist[i * nb + j] + dist[end_a(i) * nb + end_b(j)]);
            if (cfg.duration_weight != 0.0) {
                const auto& fa = a.fixations;
                const auto& fb = b.fixations;
                cost += cfg.duration_weight * 0.5 *
                        (std::abs(fa[i].duration_s - fb[j].duration_s) +
                         std::abs(fa[end_a(i)].duration_s - fb[end_b(j)].duration_s));
            }
            cells[i * cols + j] = cost;
        }
    }
    return CostMatrix(rows, cols, std::move(cells));
}

double cheapest_path_mean(const CostMatrix& lattice) {
    const std::size_t rows = lattice.rows(), cols = lattice.cols();
    if (rows == 0 || cols == 0) throw ValidationError("empty alignment lattice");

    struct Best {
        double sum;
        std::size_t cells;
        bool operator<(const Best& o) const { return sum < o.sum || (sum == o.sum && cells < o.cells); }
    };
    std::vector<Best> best(rows * cols);
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) {
            const double c = lattice(i, j);
            if (i == 0 && j == 0) {
                best[0] = {c, 1};
                continue;
            }
            Best pick{std::numeric_limits<double>::infinity(), 0};
            if (i > 0) pick = std::min(pick, best[(i - 1) * cols + j]);
            if (j > 0) pick = std::min(pick, best[i * cols + j - 1]);
            if (i > 0 && j > 0) pick = std::min(pick, best[(i - 1) * cols + j - 1]);
            best[i * cols + j] = {pick.sum + c, pick.cells + 1};
        }
    }
    const auto& end = best.back();
    return end.sum / static_cast<double>(end.cells);
}

double jarodzka_distance(const ScanPath& a, const ScanPath& b, ImageDims image, const JarodzkaConfig& cfg) {
    return cheapest_path_mean(saccade_alignment_lattice(a, b, image, cfg));
}

EvaluationResult evaluate_sets(std::span<const ScanPath> generated, std::span<const ScanPath> truth,
                               ImageDims image, const JarodzkaConfig& cfg) {
    if (generated.empty() || truth.empty()) throw ValidationError("scanpath sets must be non-empty");
    CostMatrix matrix(generated.size(), truth.size());
    for (std::size_t i = 0; i < generated.size(); ++i)
        for (std::size_t j = 0; j < truth.size(); ++j)
            matrix.set(i, j, jarodzka_distance(generated[i], truth[j], image, cfg));
    auto assignment = hungarian_min_assignment(matrix);
    const double mean = assignment.total_cost / static_cast<double>(assignment.pairs.size());
    return EvaluationResult{mean, std::move(assignment), std::move(matrix)};
}

nlohmann::json evaluation_report(const EvaluationResult& r) {
    auto pairs = nlohmann::json::array();
    for (auto [i, j] : r.assignment.pairs) pairs.push_back({i, j, r.matrix(i, j)});
    return {{"mean_cost", r.mean_cost},
            {"pairs", pairs},
            {"matrix_shape", {r.matrix.rows(), r.matrix.cols()}}};
}

} // namespace salvol
