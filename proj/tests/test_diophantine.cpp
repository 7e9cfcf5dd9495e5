#include "doctest.h"
#include "nflab/diophantine.hpp"
#include "nflab/presets.hpp"

#include <cmath>
#include <map>
#include <set>

using namespace nflab;

namespace {

const FieldHandle& cached(const std::string& name) {
    static std::map<std::string, FieldHandle> cache;
    auto it = cache.find(name);
    if (it == cache.end()) it = cache.emplace(name, field_from_preset(name)).first;
    return it->second;
}

RegionSpec e_region(double c, double T) { return RegionSpec{RegionSpec::Kind::E, c, T, {}, {}}; }

} // namespace

TEST_CASE("analytic volume: hand values, linearity, validation") {
    const FieldHandle& q = cached("Q");
    WeightScheme w = equal_weights(q, 1, 1);
    CHECK(analytic_volume_E(q, w, 1.0, 1.0) == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(analytic_volume_E(q, w, 0.25, 1.0) == doctest::Approx(1.0).epsilon(1e-12));

    const FieldHandle& qi = cached("Qi");
    WeightScheme wi = equal_weights(qi, 1, 1);
    CHECK(analytic_volume_E(qi, wi, 1.0, 1.0) ==
          doctest::Approx(9.869604401089358).epsilon(1e-12));

    const FieldHandle& s2 = cached("Qsqrt2");
    WeightScheme ws = equal_weights(s2, 1, 1);
    CHECK(analytic_volume_E(s2, ws, 1.0, 1.0) == doctest::Approx(2.0).epsilon(1e-12));

    WeightScheme w21 = equal_weights(q, 2, 1);
    CHECK(analytic_volume_E(q, w21, 1.0, 1.0) == doctest::Approx(8.0).epsilon(1e-12));

    // the weight entries themselves never matter, only block shapes
    RngStream rng(31, 0);
    WeightScheme wr = random_weights(s2, 2, 2, rng);
    CHECK(analytic_volume_E(s2, wr, 1.0, 1.0) ==
          doctest::Approx(analytic_volume_E(s2, equal_weights(s2, 2, 2), 1.0, 1.0))
              .epsilon(1e-12));

    CHECK(analytic_volume_E(q, w, 0.3, 2.5) ==
          doctest::Approx(0.3 * 2.5 * analytic_volume_E(q, w, 1.0, 1.0)).epsilon(1e-12));
    CHECK(analytic_volume_E(q, w, 0.0, 1.0) == 0.0);

    CHECK(quasi_ball_volume(q, 1) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(quasi_ball_volume(qi, 1) == doctest::Approx(std::acos(-1.0)).epsilon(1e-14));
    const FieldHandle& cb = cached("cubic");
    CHECK(quasi_ball_volume(cb, 2) ==
          doctest::Approx(std::pow(2.0 * std::acos(-1.0), 2)).epsilon(1e-14));
    CHECK_THROWS_AS(quasi_ball_volume(q, 0), ValidationError);

    CHECK_THROWS_AS(analytic_volume_E(q, w, -1.0, 1.0), ValidationError);
    CHECK_THROWS_AS(analytic_volume_E(q, w, 1.0, 0.0), ValidationError);
    CHECK_THROWS_AS(analytic_volume_E(q, w, 1.0, std::numeric_limits<double>::infinity()),
                    ValidationError);
}

TEST_CASE("mc volume: agrees with the product formula on every preset") {
    std::uint64_t run = 0;
    for (const auto& name : list_presets()) {
        const FieldHandle& f = cached(name);
        RngStream seeder(32, run);
        for (int scheme = 0; scheme < 2; ++scheme) {
            WeightScheme w = scheme == 0 ? equal_weights(f, 1, 1)
                                         : random_weights(f, 1, 1, seeder);
            const double c = scheme == 0 ? 1.0 : 0.7;
            const double T = scheme == 0 ? 1.0 : 2.3;
            double exact = analytic_volume_E(f, w, c, T);
            McResult mc = mc_volume(f, w, e_region(c, T), 40000, 900 + run);
            INFO(name, " scheme ", scheme, " exact ", exact, " mc ", mc.estimate, " se ",
                 mc.standard_error);
            CHECK(std::abs(mc.estimate - exact) <= 3.0 * mc.standard_error);
            CHECK(mc.standard_error > 0.0);
            CHECK(mc.standard_error < 0.05 * exact);
            ++run;
        }
    }
}

TEST_CASE("mc volume: determinism and validation") {
    const FieldHandle& f = cached("Qsqrt2");
    WeightScheme w = equal_weights(f, 1, 1);
    McResult a = mc_volume(f, w, e_region(1.0, 1.5), 5000, 77);
    McResult b = mc_volume(f, w, e_region(1.0, 1.5), 5000, 77);
    CHECK(a.estimate == b.estimate);
    CHECK(a.standard_error == b.standard_error);
    CHECK(a.samples == 5000);

    McResult c = mc_volume(f, w, e_region(1.0, 1.5), 5000, 78);
    CHECK(c.estimate != a.estimate);

    // a directional region with full caps is the same region, sampled the same way
    RegionSpec full{RegionSpec::Kind::E_AB, 1.0, 1.5, CapSpec::full_sphere(),
                    CapSpec::full_sphere()};
    McResult d = mc_volume(f, w, full, 5000, 77);
    CHECK(d.estimate == a.estimate);
    CHECK(d.standard_error == a.standard_error);

    McResult zero = mc_volume(f, w, e_region(0.0, 1.5), 5000, 77);
    CHECK(zero.estimate == 0.0);
    CHECK(zero.standard_error == 0.0);

    CHECK_THROWS_AS(mc_volume(f, w, e_region(1.0, 1.5), 999, 77), ValidationError);
    RegionSpec unbounded{RegionSpec::Kind::F, 1.0, 1.5, {}, {}};
    CHECK_THROWS_AS(mc_volume(f, w, unbounded, 5000, 77), ValidationError);
}

TEST_CASE("mc volume: hemispheres halve and quarter the region") {
    const FieldHandle& f = cached("Qsqrt2");
    WeightScheme w = equal_weights(f, 1, 1);
    const double exact = analytic_volume_E(f, w, 1.0, 1.0);

    RegionSpec half_x{RegionSpec::Kind::E_AB, 1.0, 1.0, CapSpec::hemisphere(0, +1),
                      CapSpec::full_sphere()};
    McResult hx = mc_volume(f, w, half_x, 60000, 41);
    CHECK(std::abs(hx.estimate - 0.5 * exact) <= 3.0 * hx.standard_error);

    RegionSpec half_y{RegionSpec::Kind::E_AB, 1.0, 1.0, CapSpec::full_sphere(),
                      CapSpec::hemisphere(0, -1)};
    McResult hy = mc_volume(f, w, half_y, 60000, 42);
    CHECK(std::abs(hy.estimate - 0.5 * exact) <= 3.0 * hy.standard_error);

    RegionSpec quarter{RegionSpec::Kind::E_AB, 1.0, 1.0, CapSpec::hemisphere(0, +1),
                       CapSpec::hemisphere(0, -1)};
    McResult qr = mc_volume(f, w, quarter, 60000, 43);
    CHECK(std::abs(qr.estimate - 0.25 * exact) <= 3.0 * qr.standard_error);
}

TEST_CASE("counting: zero-theta hand count and agreement with enumeration") {
    const FieldHandle& q = cached("Q");
    LatticeSpec plain = zero_theta_lattice(q, 1, 1);
    WeightScheme w = equal_weights(q, 1, 1);

    // theta = 0, c = 1/2: only p = 0 passes the product bound, so the count
    // is twice the number of integers 1 <= n < e^T
    CHECK(count_approximates(plain, w, e_region(0.5, 1.0)) == 4);
    CHECK(count_approximates(plain, w, e_region(0.5, 2.0)) == 14);
    CHECK(count_approximates(plain, w, e_region(0.5, 3.0)) == 40);

    RegionSpec unbounded{RegionSpec::Kind::F, 0.5, 1.0, {}, {}};
    CHECK_THROWS_AS(count_approximates(plain, w, unbounded), ValidationError);

    std::uint64_t trial = 0;
    for (const auto& name : list_presets()) {
        const FieldHandle& f = cached(name);
        WeightScheme wf = equal_weights(f, 1, 1);
        RngStream rng(33, trial++);
        LatticeSpec spec = random_theta_lattice(f, 1, 1, rng);
        RegionSpec region = e_region(1.0, std::log(20.0));
        auto recs = enumerate_lattice_points(spec, region, wf);
        CHECK(count_approximates(spec, wf, region) ==
              static_cast<std::int64_t>(recs.size()));
    }
}

TEST_CASE("counting: hemisphere halves add back up exactly") {
    const FieldHandle& f = cached("Qsqrt2");
    WeightScheme w = equal_weights(f, 1, 1);
    RngStream rng(34, 0);
    LatticeSpec spec = random_theta_lattice(f, 1, 1, rng);
    RegionSpec whole = e_region(1.0, 2.5);
    std::int64_t all = count_approximates(spec, w, whole);
    CHECK(all > 0);

    auto directional = [&](int idx, int sign, bool on_x) {
        RegionSpec r{RegionSpec::Kind::E_AB, 1.0, 2.5, CapSpec::full_sphere(),
                     CapSpec::full_sphere()};
        if (on_x)
            r.cap_x = CapSpec::hemisphere(idx, sign);
        else
            r.cap_y = CapSpec::hemisphere(idx, sign);
        return count_approximates(spec, w, r);
    };

    // y = iota(q) is never zero, so the two y-hemispheres split every record
    CHECK(directional(0, +1, false) + directional(0, -1, false) == all);
    CHECK(directional(1, +1, false) + directional(1, -1, false) == all);
    // x = theta q - p is nonzero for a generic theta, so the same holds on x
    CHECK(directional(0, +1, true) + directional(0, -1, true) == all);
}

TEST_CASE("error series: one pass matches per-window counts and the volume line") {
    const FieldHandle& q = cached("Q");
    LatticeSpec plain = zero_theta_lattice(q, 1, 1);
    WeightScheme w = equal_weights(q, 1, 1);

    auto series = error_series(plain, w, 0.5, {1.0, 2.0, 3.0});
    REQUIRE(series.size() == 3);
    CHECK(series[0].count == 4);
    CHECK(series[1].count == 14);
    CHECK(series[2].count == 40);
    CHECK(series[0].volume == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(series[1].volume == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(series[2].volume == doctest::Approx(6.0).epsilon(1e-12));
    for (const auto& pt : series)
        CHECK(pt.error == doctest::Approx(pt.count - pt.volume).epsilon(1e-12));

    const FieldHandle& s2 = cached("Qsqrt2");
    WeightScheme ws = equal_weights(s2, 1, 1);
    RngStream rng(35, 0);
    LatticeSpec spec = random_theta_lattice(s2, 1, 1, rng);
    std::vector<double> grid{0.7, 1.4, 2.1, 2.8};
    auto sweep = error_series(spec, ws, 1.0, grid);
    for (std::size_t k = 0; k < grid.size(); ++k)
        CHECK(sweep[k].count == count_approximates(spec, ws, e_region(1.0, grid[k])));

    CHECK_THROWS_AS(error_series(plain, w, 0.5, {}), ValidationError);
    CHECK_THROWS_AS(error_series(plain, w, 0.5, {1.0, 1.0}), ValidationError);
    CHECK_THROWS_AS(error_series(plain, w, 0.5, {2.0, 1.0}), ValidationError);
    CHECK_THROWS_AS(error_series(plain, w, 0.5, {-1.0, 1.0}), ValidationError);
}

TEST_CASE("scaling fit: recovers planted exponents") {
    std::vector<SeriesPoint> sqrt_series, linear_series;
    for (int k = 6; k <= 20; ++k) {
        double T = std::exp(0.5 * k);
        SeriesPoint a{T, 0, 0.0, (k % 2 == 0 ? 1.0 : -1.0) * std::sqrt(T)};
        SeriesPoint b{T, 0, 0.0, 3.0 * T};
        sqrt_series.push_back(a);
        linear_series.push_back(b);
    }

    ScalingFit fa = fit_scaling_exponent(sqrt_series, 0.0);
    CHECK(fa.slope == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(fa.intercept == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(fa.r_squared >= 1.0 - 1e-12);
    CHECK(fa.points_used == 15);
    CHECK(fa.max_rate_ratio == doctest::Approx(0.18343721454818296).epsilon(1e-9));

    ScalingFit fb = fit_scaling_exponent(linear_series, 0.0);
    CHECK(fb.slope == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(fb.intercept == doctest::Approx(std::log(3.0)).epsilon(1e-9));

    // cutting away all but four points is rejected, as is an all-zero error column
    CHECK_THROWS_AS(fit_scaling_exponent(sqrt_series, std::exp(0.5 * 16) + 1.0),
                    ValidationError);
    std::vector<SeriesPoint> flat(8, SeriesPoint{10.0, 5, 5.0, 0.0});
    CHECK_THROWS_AS(fit_scaling_exponent(flat, 0.0), ValidationError);
}

TEST_CASE("scaling fit: seed-42 rational window experiment stays shallow") {
    const FieldHandle& f = cached("Q");
    WeightScheme w = equal_weights(f, 1, 1);
    std::vector<double> grid;
    for (int t = 5; t <= 15; ++t) grid.push_back(t);
    RngStream rng(42, 0);
    LatticeSpec spec = random_theta_lattice(f, 1, 1, rng);
    ScalingFit fit = fit_scaling_exponent(error_series(spec, w, 1.0, grid), 4.5);
    CHECK(fit.slope <= 0.7);
    CHECK(fit.slope == doctest::Approx(-0.13261941370098346).epsilon(1e-9));
    CHECK(fit.points_used == 11);
}

TEST_CASE("target rate: envelope values and domain") {
    CHECK(target_rate(20.0, 0.01) == doctest::Approx(24.31156808251364).epsilon(1e-12));
    CHECK(target_rate(20.0, 0.0) == doctest::Approx(24.28902927001908).epsilon(1e-12));
    CHECK(target_rate(40.0, 0.01) > target_rate(20.0, 0.01));
    CHECK_THROWS_AS(target_rate(15.0, 0.01), ValidationError);
    CHECK_THROWS_AS(target_rate(std::exp(std::exp(1.0)), 0.01), ValidationError);
    CHECK_THROWS_AS(target_rate(20.0, -0.1), ValidationError);
}
