#include <doctest.h>

#include <cmath>
#include <numeric>
#include <string>

#include "salvol/sampler.hpp"
#include "test_support.hpp"

using namespace salvol;

namespace {

EmpiricalDistribution point_count(double n) { return {{{n, 1.0}}, DistributionKind::discrete_count}; }
EmpiricalDistribution point_duration(double d) { return {{{d, 1.0}}, DistributionKind::binned_duration, 0.1}; }

std::size_t cell_of(GridPoint p, std::size_t width) {
    return static_cast<std::size_t>(p.y) * width + static_cast<std::size_t>(p.x);
}

std::vector<double> frequencies(std::size_t cells, std::size_t draws, auto&& draw) {
    std::vector<double> f(cells, 0.0);
    for (std::size_t i = 0; i < draws; ++i) f[draw()] += 1.0 / static_cast<double>(draws);
    return f;
}

SaliencyVolume repeat_slices(std::size_t t_bins, std::size_t h, std::size_t w, const std::vector<double>& slice,
                             double dt = 1.0) {
    std::vector<double> values;
    for (std::size_t t = 0; t < t_bins; ++t) values.insert(values.end(), slice.begin(), slice.end());
    return SaliencyVolume({t_bins, h, w}, dt, values);
}

} // namespace

TEST_CASE("strategy names") {
    for (auto s : {Strategy::naive, Strategy::distance_limited, Strategy::inhibition_of_return,
                   Strategy::random_baseline})
        CHECK(parse_strategy(to_string(s)) == s);
    CHECK_THROWS_AS(parse_strategy("greedy"), ValidationError);

    SamplingConfig cfg;
    CHECK(cfg.num_scanpaths == 40);
    CHECK(cfg.mask_sigma_px == 40.0);
    cfg.mask_sigma_px = 0;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
    cfg = {};
    cfg.num_scanpaths = 0;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
}

TEST_CASE("plan_scanpath") {
    Rng rng(1);
    const auto plan = plan_scanpath(point_count(3), point_duration(0.5), rng);
    CHECK(plan == std::vector<PlannedFixation>{{0.0, 0.5}, {0.5, 0.5}, {1.0, 0.5}});

    const EmpiricalDistribution counts({{2, 0.25}, {5, 0.5}, {9, 0.25}}, DistributionKind::discrete_count);
    const EmpiricalDistribution durs({{0.15, 0.5}, {0.45, 0.5}}, DistributionKind::binned_duration, 0.1);
    Rng a(9), b(9);
    CHECK(plan_scanpath(counts, durs, a) == plan_scanpath(counts, durs, b));

    double total = 0.0;
    const int n = 10000;
    for (int i = 0; i < n; ++i) {
        const auto p = plan_scanpath(counts, durs, rng);
        total += static_cast<double>(p.size());
        for (std::size_t k = 1; k < p.size(); ++k) CHECK(p[k].start_s == p[k - 1].start_s + p[k - 1].duration_s);
    }
    CHECK(std::abs(total / n - counts.mean()) <= 0.01 * counts.mean());
}

TEST_CASE("slice_for_time") {
    const double dt = 25.0 / 12.0;
    CHECK(slice_for_time(0.0, dt, 12) == 0);
    CHECK(slice_for_time(2.0, dt, 12) == 0);
    CHECK(slice_for_time(2.1, dt, 12) == 1);
    CHECK(slice_for_time(24.9, dt, 12) == 11);
    CHECK(slice_for_time(400.0, dt, 12) == 11);
}

TEST_CASE("sample_naive") {
    Rng rng(2);
    std::vector<double> point(12, 0.0);
    point[7] = 1.0;
    for (int i = 0; i < 100; ++i) CHECK(sample_naive({point, 3, 4}, rng) == GridPoint{3.5, 1.5});

    const std::vector<double> uniform(4, 0.25);
    const auto f = frequencies(4, 100000, [&] { return cell_of(sample_naive({uniform, 2, 2}, rng), 2); });
    for (double x : f) CHECK(std::abs(x - 0.25) <= 0.01);

    const std::vector<double> skew{0.9, 0.1};
    const auto g = frequencies(2, 100000, [&] { return cell_of(sample_naive({skew, 1, 2}, rng), 2); });
    CHECK(std::abs(g[0] - 0.9) <= 0.01);
    CHECK(std::abs(g[1] - 0.1) <= 0.01);

    std::vector<double> bad(3, 0.0);
    CHECK_THROWS_AS(sample_naive({bad, 2, 2}, rng), ValidationError);
}

TEST_CASE("sample_naive frequency convergence on a random slice") {
    Rng rng(3);
    std::vector<double> slice(15);
    for (auto& x : slice) x = rng.uniform();
    const double total = std::accumulate(slice.begin(), slice.end(), 0.0);
    for (auto& x : slice) x /= total;
    const auto f = frequencies(15, 100000, [&] { return cell_of(sample_naive({slice, 3, 5}, rng), 5); });
    for (std::size_t i = 0; i < 15; ++i) CHECK(std::abs(f[i] - slice[i]) <= 0.01);
}

TEST_CASE("gaussian_mask") {
    const auto m = gaussian_mask({2.5, 1.5}, 1.0, 3, 6, false);
    CHECK(m[1 * 6 + 2] == 1.0);
    CHECK(m[1 * 6 + 3] == doctest::Approx(std::exp(-0.5)));
    CHECK(m[0 * 6 + 3] == doctest::Approx(std::exp(-1.0)));
    CHECK(m[1 * 6 + 5] == doctest::Approx(std::exp(-4.5)));
    for (double x : m) CHECK(x <= 1.0);

    // Across the seam, column 5 is one step from column 0.
    const auto wrapped = gaussian_mask({0.5, 0.5}, 1.0, 1, 6, true);
    CHECK(wrapped[5] == doctest::Approx(std::exp(-0.5)));
    const auto flat = gaussian_mask({0.5, 0.5}, 1.0, 1, 6, false);
    CHECK(flat[5] == doctest::Approx(std::exp(-12.5)));
}

TEST_CASE("sample_distance_limited") {
    Rng rng(4);
    // Two equal point masses 30 sigma apart.
    std::vector<double> two(40, 0.0);
    two[0] = two[39] = 0.5;
    const GridView view{two, 1, 40};
    int near = 0;
    for (int i = 0; i < 10000; ++i) near += sample_distance_limited(view, {0.5, 0.5}, 1.0, false, rng).x == 0.5;
    CHECK(near > 9990);

    // Uniform slice: draws follow the normalized mask.
    const std::size_t h = 5, w = 7;
    const std::vector<double> uniform(h * w, 1.0 / (h * w));
    const GridPoint prev{3.5, 2.5};
    auto mask = gaussian_mask(prev, 1.5, h, w, false);
    const double total = std::accumulate(mask.begin(), mask.end(), 0.0);
    const auto f = frequencies(h * w, 100000, [&] {
        return cell_of(sample_distance_limited({uniform, h, w}, prev, 1.5, false, rng), w);
    });
    for (std::size_t i = 0; i < h * w; ++i) CHECK(std::abs(f[i] - mask[i] / total) <= 0.01);

    std::vector<double> point(h * w, 0.0);
    point[3] = 1.0;
    for (int i = 0; i < 100; ++i) CHECK(sample_distance_limited({point, h, w}, {0.5, 4.5}, 2.0, false, rng) == GridPoint{3.5, 0.5});
}

TEST_CASE("distance-limited never favors far cells more than naive") {
    Rng rng(5);
    const std::size_t h = 4, w = 12;
    std::vector<double> slice(h * w);
    for (auto& x : slice) x = 0.2 + rng.uniform();
    const double total = std::accumulate(slice.begin(), slice.end(), 0.0);
    for (auto& x : slice) x /= total;

    const GridPoint prev{1.5, 1.5};
    const double sigma = 1.0;
    const auto f = frequencies(h * w, 100000, [&] {
        return cell_of(sample_distance_limited({slice, h, w}, prev, sigma, false, rng), w);
    });
    for (std::size_t r = 0; r < h; ++r)
        for (std::size_t c = 0; c < w; ++c) {
            const double d = std::hypot(c + 0.5 - prev.x, r + 0.5 - prev.y);
            if (d >= 4.0 * sigma) CHECK(f[r * w + c] <= slice[r * w + c]);
        }
}

TEST_CASE("zero-mass product falls back to naive with a warning") {
    Rng rng(6);
    std::vector<double> slice(100, 0.0);
    slice[99] = 1.0;
    std::vector<std::string> warnings;
    const WarningSink sink = [&](std::string_view m) { warnings.emplace_back(m); };
    // The mask underflows to zero at the only massive cell.
    const auto p = sample_distance_limited({slice, 1, 100}, {0.5, 0.5}, 0.1, false, rng, sink);
    CHECK(p == GridPoint{99.5, 0.5});
    CHECK(warnings.size() == 1);

    std::vector<double> one{1.0};
    const std::vector<GridPoint> prev{{0.5, 0.5}};
    CHECK(sample_inhibition_of_return({one, 1, 1}, prev, 1.0, false, rng, sink) == GridPoint{0.5, 0.5});
    CHECK(warnings.size() == 2);
}

TEST_CASE("sample_inhibition_of_return") {
    Rng rng(7);
    std::vector<double> slice(12);
    for (auto& x : slice) x = rng.uniform();
    for (int i = 0; i < 200; ++i) {
        Rng a(i), b(i);
        CHECK(sample_inhibition_of_return({slice, 3, 4}, {}, 1.0, false, a) == sample_naive({slice, 3, 4}, b));
    }

    std::vector<double> two(40, 0.0);
    two[0] = two[39] = 0.5;
    const std::vector<GridPoint> at_first{{0.5, 0.5}};
    int other = 0;
    for (int i = 0; i < 10000; ++i)
        other += sample_inhibition_of_return({two, 1, 40}, at_first, 1.0, false, rng).x == 39.5;
    CHECK(other > 9990);

    const std::size_t h = 9, w = 9;
    const std::vector<double> uniform(h * w, 1.0 / (h * w));
    const std::vector<GridPoint> center{{4.5, 4.5}};
    const auto f = frequencies(h * w, 100000, [&] {
        return cell_of(sample_inhibition_of_return({uniform, h, w}, center, 1.0, false, rng), w);
    });
    const double at_prev = f[4 * w + 4];
    for (std::size_t r = 0; r < h; ++r)
        for (std::size_t c = 0; c < w; ++c)
            if (std::hypot(c + 0.5 - 4.5, r + 0.5 - 4.5) >= 4.0) CHECK(at_prev < f[r * w + c]);
}

TEST_CASE("generate_scanpaths on a point-mass volume") {
    std::vector<double> slice(6 * 8, 0.0);
    slice[2 * 8 + 5] = 1.0;
    const auto v = repeat_slices(3, 6, 8, slice);
    const EmpiricalDistribution counts({{1, 0.3}, {4, 0.7}}, DistributionKind::discrete_count);
    const ImageDims image{800, 400};
    for (auto s : {Strategy::naive, Strategy::distance_limited, Strategy::inhibition_of_return}) {
        SamplingConfig cfg;
        cfg.strategy = s;
        cfg.mask_sigma_px = 2.0;
        const auto paths = generate_scanpaths(v, counts, point_duration(0.9), cfg, image, "img");
        CHECK(paths.size() == 40);
        for (const auto& sp : paths)
            for (const auto& f : sp.fixations) {
                CHECK(f.x_px == 550.0);
                CHECK(f.y_px == 2.5 * 400.0 / 6.0);
            }
    }
}

TEST_CASE("generated scanpaths are valid and reproducible") {
    Rng rng(8);
    const std::size_t h = 10, w = 20;
    std::vector<double> values(4 * h * w);
    for (auto& x : values) x = rng.uniform() * rng.uniform();
    const auto v = normalize_slices(SaliencyVolume({4, h, w}, 0.5, values));
    const EmpiricalDistribution counts({{1, 0.2}, {3, 0.3}, {7, 0.5}}, DistributionKind::discrete_count);
    const EmpiricalDistribution durs({{0.05, 0.4}, {0.35, 0.6}}, DistributionKind::binned_duration, 0.1);
    const ImageDims image{2000, 1000};

    for (auto s : {Strategy::naive, Strategy::distance_limited, Strategy::inhibition_of_return,
                   Strategy::random_baseline}) {
        for (bool wrap : {false, true}) {
            SamplingConfig cfg;
            cfg.strategy = s;
            cfg.seed = 77;
            cfg.num_scanpaths = 25;
            cfg.mask_sigma_px = 3.0;
            cfg.wrap_width = wrap;
            const auto a = generate_scanpaths(v, counts, durs, cfg, image, "img");
            CHECK(a == generate_scanpaths(v, counts, durs, cfg, image, "img"));
            CHECK(a.size() == 25);
            for (const auto& sp : a) {
                CHECK_NOTHROW(validate_scanpath(sp, image));
                const double len = static_cast<double>(sp.fixations.size());
                CHECK((len == 1 || len == 3 || len == 7));
                for (const auto& f : sp.fixations) CHECK((f.duration_s == 0.05 || f.duration_s == 0.35));
            }
            cfg.seed = 78;
            CHECK(a != generate_scanpaths(v, counts, durs, cfg, image, "img"));
        }
    }
}

TEST_CASE("scanpath i depends only on the seed and its index") {
    Rng rng(9);
    std::vector<double> values(2 * 6 * 6);
    for (auto& x : values) x = rng.uniform();
    const SaliencyVolume v({2, 6, 6}, 1.0, values);
    const EmpiricalDistribution counts({{2, 0.5}, {5, 0.5}}, DistributionKind::discrete_count);
    SamplingConfig cfg;
    cfg.strategy = Strategy::inhibition_of_return;
    cfg.mask_sigma_px = 1.0;
    cfg.num_scanpaths = 10;
    const auto ten = generate_scanpaths(v, counts, point_duration(0.7), cfg, {600, 300});
    cfg.num_scanpaths = 4;
    const auto four = generate_scanpaths(v, counts, point_duration(0.7), cfg, {600, 300});
    CHECK(std::equal(four.begin(), four.end(), ten.begin()));
}

TEST_CASE("naive generation on a two-peak volume visits peaks by mass") {
    std::vector<double> slice(5 * 10, 0.0);
    slice[1 * 10 + 2] = 0.7;
    slice[3 * 10 + 8] = 0.3;
    const auto v = repeat_slices(2, 5, 10, slice);
    SamplingConfig cfg;
    cfg.seed = 3;
    const auto paths = generate_scanpaths(v, point_count(10), point_duration(0.3), cfg, {1000, 500});
    double first = 0, n = 0;
    for (const auto& sp : paths)
        for (const auto& f : sp.fixations) {
            CHECK(((f.x_px == 250 && f.y_px == 150) || (f.x_px == 850 && f.y_px == 350)));
            first += f.x_px == 250;
            n += 1;
        }
    CHECK(std::abs(first / n - 0.7) <= 0.05);
}

TEST_CASE("random baseline") {
    const auto one = generate_random_scanpaths({600, 300}, 1, 1, point_count(4), point_duration(0.2), {});
    for (const auto& sp : one)
        for (const auto& f : sp.fixations) CHECK((f.x_px == 300 && f.y_px == 150));

    SamplingConfig cfg;
    cfg.strategy = Strategy::random_baseline;
    cfg.num_scanpaths = 1000;
    cfg.seed = 5;
    const auto a = generate_random_scanpaths({100, 100}, 10, 10, point_count(100), point_duration(0.01), cfg);
    CHECK(a == generate_random_scanpaths({100, 100}, 10, 10, point_count(100), point_duration(0.01), cfg));
    std::vector<double> freq(100, 0.0);
    for (const auto& sp : a)
        for (const auto& f : sp.fixations) freq[std::size_t(f.y_px / 10) * 10 + std::size_t(f.x_px / 10)] += 1e-5;
    for (double x : freq) CHECK(std::abs(x - 0.01) <= 0.002);
}
