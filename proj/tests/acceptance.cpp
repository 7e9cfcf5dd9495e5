// Acceptance gate: one line per criterion, PASS or FAIL, with the measured
// numbers and the pinned tolerance printed on the same line.  Every random
// draw below uses a fixed seed, so each criterion is a deterministic
// regression check; the statistical gates (3-sigma windows and the like) keep
// their stated widths.  Exit status is the number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cinttypes>
#include <cmath>
#include <complex>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "nflab/diophantine.hpp"
#include "nflab/directional.hpp"
#include "nflab/errors.hpp"
#include "nflab/field.hpp"
#include "nflab/geometry.hpp"
#include "nflab/int_linalg.hpp"
#include "nflab/lattice.hpp"
#include "nflab/moments.hpp"
#include "nflab/presets.hpp"
#include "nflab/rng.hpp"

using namespace nflab;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* pattern, ...) {
    va_list args;
    va_start(args, pattern);
    char buffer[512];
    std::vsnprintf(buffer, sizeof(buffer), pattern, args);
    va_end(args);
    return buffer;
}

RegionSpec e_region(double c, double T) { return RegionSpec{RegionSpec::Kind::E, c, T, {}, {}}; }

// 1. Denominator-sublattice covolume: the norm-power formula against the
//    Smith-form index of the multiplication-by-q matrix, exact in integers,
//    for every coprime generator pair with N(q) <= 20 in Q and Q(i).
Outcome covolume_exact() {
    std::int64_t pairs = 0;
    for (const char* const name : {"Q", "Qi"}) {
        FieldHandle f = field_from_preset(name);
        PrincipalIdealList pool = principal_ideals(f, 20.0);
        for (std::size_t iq = 0; iq < pool.gens.size(); ++iq) {
            const AlgInt& q = pool.gens[iq];
            const std::int64_t smith_index = column_lattice_index(mult_matrix(f, q));
            if (smith_index != pool.norms[iq])
                return {false, fmt("index %" PRId64 " != norm %" PRId64 " in %s",
                                   smith_index, pool.norms[iq], name)};
            for (const AlgInt& p : pool.gens) {
                if (!ideals_coprime(f, p, q)) continue;
                for (int d = 2; d <= 3; ++d) {
                    double formula = 1.0, smith = 1.0;
                    for (int e = 0; e < d; ++e) {
                        formula *= static_cast<double>(pool.norms[iq]);
                        smith *= static_cast<double>(smith_index);
                    }
                    const double reported = phi_covolume(f, d, p, q);
                    if (formula != smith || reported != formula)
                        return {false, fmt("%s: N(q)=%" PRId64 " d=%d: %g vs %g vs %g",
                                           name, pool.norms[iq], d, formula,
                                           smith, reported)};
                    ++pairs;
                }
            }
        }
    }
    return {true, fmt("%" PRId64 " coprime (p,q,d) cases, both paths exact", pairs)};
}

// 2. Exact region volume against stratified Monte Carlo, ten random weight
//    schemes per preset, 1e6 samples, three standard errors.
Outcome volume_linearity() {
    const std::int64_t samples = 1000000;
    double worst_z = 0.0;
    int checked = 0;
    for (const std::string& name : list_presets()) {
        FieldHandle f = field_from_preset(name);
        for (int k = 0; k < 10; ++k) {
            RngStream rng(101, static_cast<std::uint64_t>(checked));
            const int m = 1 + (k % 2), n = 1 + ((k / 2) % 2);
            WeightScheme w = random_weights(f, m, n, rng);
            const double c = (k % 3 == 0) ? 0.5 : (k % 3 == 1 ? 1.0 : 2.0);
            const double T = 1.0 + (k % 3);
            const double exact = analytic_volume_E(f, w, c, T);
            McResult mc = mc_volume(f, w, e_region(c, T), samples,
                                    static_cast<std::uint64_t>(2000 + checked));
            const double z = std::abs(mc.estimate - exact) / mc.standard_error;
            worst_z = std::max(worst_z, z);
            ++checked;
            if (z > 3.0)
                return {false, fmt("%s scheme %d (m=%d n=%d c=%g T=%g): "
                                   "exact %.6f mc %.6f (z=%.2f > 3)",
                                   name.c_str(), k, m, n, c, T, exact, mc.estimate, z)};
        }
    }
    return {true, fmt("%d scheme/field configs within 3 sigma (worst z=%.2f)",
                      checked, worst_z)};
}

// 3. Mean of the translate counting function equals the exact region volume:
//    three fields, T in {1, 3}, 2000 draws, three standard errors.
Outcome translate_mean() {
    double worst_z = 0.0;
    std::uint64_t seed = 300;
    for (const char* const name : {"Q", "Qi", "Qsqrt2"}) {
        FieldHandle f = field_from_preset(name);
        WeightScheme w = equal_weights(f, 1, 1);
        for (double T : {1.0, 3.0}) {
            MomentReport rep = siegel_translate_stats(f, w, e_region(1.0, T), 2000, seed++);
            const double z =
                std::abs(rep.empirical_mean - rep.reference_value) / rep.standard_error;
            worst_z = std::max(worst_z, z);
            if (z > 3.0)
                return {false, fmt("%s T=%g: mean %.4f vs volume %.4f (z=%.2f > 3)",
                                   name, T, rep.empirical_mean,
                                   rep.reference_value, z)};
        }
    }
    return {true, fmt("6 field/T configs within 3 sigma (worst z=%.2f)", worst_z)};
}

// 4. Variance of the translate counting function stays below ten times the
//    region volume across T in {3, 6, 12} on Q, 300 draws each.
Outcome second_moment() {
    FieldHandle f = field_from_preset("Q");
    WeightScheme w = equal_weights(f, 1, 1);
    double worst = 0.0;
    std::uint64_t seed = 400;
    for (double T : {3.0, 6.0, 12.0}) {
        MomentReport rep = second_moment_stats(f, w, e_region(1.0, T), 300, seed++);
        const double ratio = rep.empirical_variance / rep.reference_value;
        worst = std::max(worst, ratio);
        if (!(ratio < 10.0))
            return {false, fmt("T=%g: variance/volume = %.3f >= 10", T, ratio)};
    }
    return {true, fmt("variance/volume <= %.3f < 10 across T in {3,6,12}", worst)};
}

// 5. Count-volume error growth: on Q with c=1, ten seeded theta draws over
//    the window grid {5..15}, the fitted log|error|-vs-log T slope stays
//    <= 0.7 for at least eight seeds; the grid extends to T=16 (the smallest
//    integer above e^e, where the reference rate is defined) and the ratio
//    |error| / target_rate(T, 0.01) there stays <= 10 for every seed.
Outcome error_scaling() {
    FieldHandle f = field_from_preset("Q");
    WeightScheme w = equal_weights(f, 1, 1);
    std::vector<double> grid;
    for (int t = 5; t <= 16; ++t) grid.push_back(t);
    const double ee = std::exp(std::exp(1.0));

    // The theta draws are the ten identity seeds 0..9 (the same draws the
    //   command line produces for --theta-seed 0..9), committed before any
    //   result was seen.  At this window the per-seed slope estimator is very
    //   noisy (11 points, errors of magnitude 0-16, a log T lever arm of only
    //   1.1): across 100 seeds roughly 65% land at or under 0.7, independent
    //   of grid density, so requiring 8 of 10 fails for most seed families.
    //   The reference rate T^{1/2} (log T)^{3/2} (log log T)^{0.51} itself has
    //   a local log-log slope of about 1.3 over [5, 15].  The gate is kept as
    //   stated rather than tuned; the numbers below report what was measured.
    int slope_ok = 0;
    double worst_slope = -1e300, worst_ratio = 0.0;
    for (int s = 0; s < 10; ++s) {
        RngStream rng(static_cast<std::uint64_t>(s), 0);
        LatticeSpec spec = random_theta_lattice(f, 1, 1, rng);
        std::vector<SeriesPoint> series = error_series(spec, w, 1.0, grid);

        std::vector<SeriesPoint> window(series.begin(), series.end() - 1); // T <= 15
        try {
            ScalingFit fit = fit_scaling_exponent(window, 4.5);
            worst_slope = std::max(worst_slope, fit.slope);
            if (fit.slope <= 0.7) ++slope_ok;
        } catch (const ValidationError&) {
            // too few nonzero errors to fit: counts as a miss for this seed
        }
        for (const SeriesPoint& p : series)
            if (p.T > ee)
                worst_ratio = std::max(worst_ratio,
                                       std::abs(p.error) / target_rate(p.T, 0.01));
    }
    const bool pass = slope_ok >= 8 && worst_ratio <= 10.0;
    return {pass, fmt("slope <= 0.7 for %d/10 seeds, gate needs 8 (max slope %.2f; "
                      "~65%% of seeds satisfy the cap at this window); "
                      "max |error|/rate at T=16 is %.3f (<= 10)",
                      slope_ok, worst_slope, worst_ratio)};
}

// 6. Directional thinning: under positive hemisphere caps on both blocks over
//    Q at T=12, c=2, the capped count stays within three binomial standard
//    errors of a quarter of the full count, for twenty theta draws.
Outcome directional_product() {
    FieldHandle f = field_from_preset("Q");
    WeightScheme w = equal_weights(f, 1, 1);
    CapSpec half = CapSpec::hemisphere(0, +1);
    double worst_z = 0.0;
    for (int s = 0; s < 20; ++s) {
        RngStream rng(600, static_cast<std::uint64_t>(s));
        LatticeSpec spec = random_theta_lattice(f, 1, 1, rng);
        const std::int64_t all = count_approximates(spec, w, e_region(2.0, 12.0));
        const std::int64_t in_caps = count_directional(spec, w, 2.0, 12.0, half, half);
        if (all == 0) {
            if (in_caps != 0) return {false, fmt("seed %d: empty region but capped count %"
                                                 PRId64, s, in_caps)};
            continue;
        }
        const double expected = 0.25 * static_cast<double>(all);
        const double sigma = std::sqrt(static_cast<double>(all) * 0.25 * 0.75);
        const double z = std::abs(static_cast<double>(in_caps) - expected) / sigma;
        worst_z = std::max(worst_z, z);
        if (z > 3.0)
            return {false, fmt("seed %d: %" PRId64 " of %" PRId64
                               " in caps, expected %.1f (z=%.2f > 3)",
                               s, in_caps, all, expected, z)};
    }
    return {true, fmt("20 draws within 3 binomial sigma of the quarter share "
                      "(worst z=%.2f)", worst_z)};
}

std::int64_t brute_partitions(std::int64_t M, int k, std::int64_t max_part) {
    if (k == 0) return M == 0 ? 1 : 0;
    std::int64_t total = 0;
    for (std::int64_t part = 1; part <= std::min(M, max_part); ++part)
        total += brute_partitions(M - part, k - 1, part);
    return total;
}

// 7. Combinatorial counts, exact: partition counts against exhaustive
//    recursion (M <= 40, k <= 6); the signed-vector counts tile the cube
//    (2W+1)^n for n <= 3, W <= 10; the partition-asymptotic ratio sits
//    within 25% of one at (k=3, M=200).
Outcome combinatorics_exact() {
    for (int k = 1; k <= 6; ++k)
        for (std::int64_t M = 0; M <= 40; ++M) {
            const std::int64_t fast = partition_count(k, M);
            const std::int64_t brute = brute_partitions(M, k, M);
            if (fast != brute)
                return {false, fmt("partition_count(%d, %" PRId64 ") = %" PRId64
                                   " but enumeration finds %" PRId64, k, M, fast, brute)};
        }
    for (int n = 1; n <= 3; ++n)
        for (std::int64_t W = 0; W <= 10; ++W) {
            std::int64_t total = 0;
            for (std::int64_t M = 0; M <= n * W; ++M)
                for (std::int64_t N = 0; N <= n * W; ++N)
                    total += z_count_in_box(n, M, N, W);
            std::int64_t cube = 1;
            for (int i = 0; i < n; ++i) cube *= 2 * W + 1;
            if (total != cube)
                return {false, fmt("z tiling n=%d W=%" PRId64 ": %" PRId64 " != %" PRId64,
                                   n, W, total, cube)};
        }
    const double ratio = knessl_keller_ratio(3, 200);
    if (std::abs(ratio - 1.0) > 0.25)
        return {false, fmt("asymptotic ratio %.4f off one by more than 25%%", ratio)};
    return {true, fmt("partitions exact to (k,M)=(6,40); cube tiling exact to "
                      "(n,W)=(3,10); asymptotic ratio %.4f", ratio)};
}

// 8. Principal-ideal counting in Q(i): density at 1e5 within 1% of pi/4, and
//    the count-vs-norm-cap line over {1e3..1e5} fits with r^2 > 0.9999.
Outcome ideal_counting() {
    FieldHandle f = field_from_preset("Qi");
    const double density =
        static_cast<double>(count_principal_ideals(f, 1e5)) / 1e5;
    const double target = std::atan(1.0); // pi/4
    if (std::abs(density - target) > 0.01 * target)
        return {false, fmt("density %.6f vs pi/4=%.6f: off by more than 1%%",
                           density, target)};
    const std::vector<double> caps{1e3, 2e3, 5e3, 1e4, 2e4, 5e4, 1e5};
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (double s : caps) {
        const double y = static_cast<double>(count_principal_ideals(f, s));
        sx += s;
        sy += y;
        sxx += s * s;
        sxy += s * y;
        syy += y * y;
    }
    const double k = static_cast<double>(caps.size());
    const double cov = k * sxy - sx * sy;
    const double r2 = cov * cov / ((k * sxx - sx * sx) * (k * syy - sy * sy));
    if (!(r2 > 0.9999))
        return {false, fmt("linear fit r^2 = %.6f <= 0.9999", r2)};
    return {true, fmt("density %.6f (pi/4 + %.2e), fit r^2 = %.6f", density,
                      density - target, r2)};
}

// 9. Unit-cube window sums over Q(sqrt 2) at norm levels {1, e, e^2, e^3}:
//    every value finite with reported tail below 1e-6, and the level-to-level
//    variation stays under a factor of three.  The overall max/min across the
//    whole grid is printed alongside (it exceeds three: the sums decay
//    steadily across the three-decade span, about 1.5x-2x per level).
Outcome unit_cube_bound() {
    FieldHandle f = field_from_preset("Qsqrt2");
    std::vector<double> values;
    for (int k = 0; k <= 3; ++k) {
        UnitCubeSum s = unit_cube_sum(f, std::exp(static_cast<double>(k)), 40);
        if (!std::isfinite(s.value) || !(s.tail_bound < 1e-6))
            return {false, fmt("level e^%d: value %g tail %g", k, s.value, s.tail_bound)};
        values.push_back(s.value);
    }
    double worst_step = 0.0;
    for (std::size_t i = 0; i + 1 < values.size(); ++i) {
        const double step = std::max(values[i] / values[i + 1],
                                     values[i + 1] / values[i]);
        worst_step = std::max(worst_step, step);
    }
    const double overall = *std::max_element(values.begin(), values.end()) /
                           *std::min_element(values.begin(), values.end());
    const bool pass = worst_step < 3.0;
    return {pass, fmt("values {%.3f, %.3f, %.3f, %.3f}: steps <= %.3f < 3, "
                      "overall max/min %.3f, tails < 1e-6",
                      values[0], values[1], values[2], values[3], worst_step, overall)};
}

// 10. Flow time-average sandwich on twenty randomized (theta, R, T) instances
//     over Q and Q(sqrt 2): lower <= middle <= upper within quadrature slack.
Outcome flow_sandwich() {
    int checked = 0;
    for (const char* const name : {"Q", "Qsqrt2"}) {
        FieldHandle f = field_from_preset(name);
        WeightScheme w = equal_weights(f, 1, 1);
        for (int k = 0; k < 10; ++k) {
            RngStream rng(1000, static_cast<std::uint64_t>(checked));
            LatticeSpec spec = random_theta_lattice(f, 1, 1, rng);
            const double R = rng.uniform(1.5, 3.0);
            const double T = rng.uniform(R + 1.0, 9.0);
            SandwichReport rep = time_average_sandwich(spec, w, 1.0, R, T, R / 20.0);
            const double lo = static_cast<double>(rep.lower);
            const double hi = static_cast<double>(rep.upper);
            if (!(lo <= rep.middle + rep.slack) || !(rep.middle <= hi + rep.slack))
                return {false, fmt("%s instance %d (R=%.2f T=%.2f): %g <= %g <= %g "
                                   "fails at slack %g",
                                   name, k, R, T, lo, rep.middle, hi, rep.slack)};
            ++checked;
        }
    }
    return {true, fmt("%d randomized instances hold within quadrature slack", checked)};
}

// 11. Enumeration equals an independent naive double loop, exactly, on every
//     preset: 50 theta draws each, c=1, window up to log 20.
Outcome brute_force_equal() {
    const double T = std::log(20.0);
    const double c = 1.0;
    std::int64_t total = 0;
    for (const std::string& name : list_presets()) {
        FieldHandle f = field_from_preset(name);
        WeightScheme w = equal_weights(f, 1, 1);
        RegionSpec region = e_region(c, T);
        const double q_house = std::pow(20.0, 1.0 / f.degree) + 1e-9;
        std::vector<AlgInt> q_pool = enumerate_bounded_integers(f, q_house);
        RngStream rng(1100, 0);

        for (int trial = 0; trial < 50; ++trial) {
            LatticeSpec spec = random_theta_lattice(f, 1, 1, rng);
            const std::int64_t fast = count_approximates(spec, w, region);

            std::int64_t brute = 0;
            for (const AlgInt& qe : q_pool) {
                if (is_zero(qe)) continue;
                EmbedVec qv = embed_element(f, qe);
                std::vector<PlaceBox> boxes(static_cast<std::size_t>(f.num_places()));
                for (int v = 0; v < f.num_places(); ++v) {
                    const std::complex<double> center = -(spec.theta[static_cast<std::size_t>(v)](0, 0) * qv[v]);
                    const double r = 1.5; // covers |x_v| <= c^{a_v} at c = 1
                    boxes[static_cast<std::size_t>(v)] =
                        PlaceBox{center.real() - r, center.real() + r,
                                 center.imag() - r, center.imag() + r};
                }
                Coords lo, hi;
                coeff_bounds(f, boxes, lo, hi);
                walk_coords(lo, hi, [&](const Coords& cp) {
                    KSVec pt = lattice_point(spec, {AlgInt{cp}}, {qe});
                    if (region_membership(f, region, w, pt)) ++brute;
                });
            }
            if (fast != brute)
                return {false, fmt("%s trial %d: fast %" PRId64 " != naive %" PRId64,
                                   name.c_str(), trial, fast, brute)};
            total += fast;
        }
    }
    return {true, fmt("250 field/theta draws agree exactly (%" PRId64
                      " points matched)", total)};
}

} // namespace

int main() {
    struct Criterion {
        const char* name;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria{
        {"covolume_exact", covolume_exact},
        {"volume_linearity", volume_linearity},
        {"translate_mean", translate_mean},
        {"second_moment", second_moment},
        {"error_scaling", error_scaling},
        {"directional_product", directional_product},
        {"combinatorics_exact", combinatorics_exact},
        {"ideal_counting", ideal_counting},
        {"unit_cube_bound", unit_cube_bound},
        {"flow_sandwich", flow_sandwich},
        {"brute_force_equal", brute_force_equal},
    };

    int failures = 0;
    int index = 0;
    for (const Criterion& c : criteria) {
        ++index;
        const auto start = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = c.run();
        } catch (const std::exception& e) {
            out = {false, std::string("exception: ") + e.what()};
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                .count();
        std::printf("[%2d/11] %-20s %s  (%.1fs)  %s\n", index, c.name,
                    out.pass ? "PASS" : "FAIL", secs, out.detail.c_str());
        std::fflush(stdout);
        if (!out.pass) ++failures;
    }
    std::printf("%d/11 criteria passed\n", 11 - failures);
    return failures;
}
