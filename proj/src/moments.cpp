#include "nflab/moments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nflab/errors.hpp"
#include "nflab/rng.hpp"

namespace nflab {

namespace {

MomentReport translate_report(const FieldHandle& field, const WeightScheme& weights,
                              const RegionSpec& region, std::int64_t n_theta,
                              std::uint64_t seed, TranslateMode mode, const EnumLimits& limits) {
    validate_weights(field, weights);
    validate_region(region);
    if (region.kind != RegionSpec::Kind::E)
        throw ValidationError("translate stats: needs the plain product region");
    if (n_theta < 100) throw ValidationError("translate stats: needs at least 100 draws");

    const int m = weights.m(), n = weights.n();
    std::vector<double> counts;
    counts.reserve(static_cast<std::size_t>(n_theta));
    for (std::int64_t i = 0; i < n_theta; ++i) {
        RngStream rng(seed, static_cast<std::uint64_t>(i));
        LatticeSpec spec = random_theta_lattice(field, m, n, rng);
        TranslationVec u;
        const TranslationVec* up = nullptr;
        if (mode == TranslateMode::affine) {
            u.u_x = random_fundamental_block(field, m, rng);
            u.u_y = random_fundamental_block(field, n, rng);
            up = &u;
        }
        std::int64_t cnt = 0;
        for_each_approximate(spec, weights, region.c, 0.0, region.T, up, limits,
                             [&](const ApproximateRecord&) { ++cnt; });
        counts.push_back(static_cast<double>(cnt));
    }

    MomentReport report;
    report.sample_count = n_theta;
    report.reference_value = analytic_volume_E(field, weights, region.c, region.T);
    double sum = 0.0;
    for (double c : counts) sum += c;
    report.empirical_mean = sum / static_cast<double>(n_theta);
    double sq = 0.0;
    for (double c : counts) sq += (c - report.empirical_mean) * (c - report.empirical_mean);
    report.empirical_variance = sq / static_cast<double>(n_theta - 1);
    report.standard_error =
        std::sqrt(report.empirical_variance / static_cast<double>(n_theta));
    return report;
}

double adaptive_simpson(const std::function<double(double)>& g, double a, double b, double fa,
                        double fm, double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = g(lm), frm = g(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson(g, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson(g, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double integrate(const std::function<double(double)>& g, double a, double b, double tol) {
    const double fa = g(a), fb = g(b), fm = g(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson(g, a, b, fa, fm, fb, whole, tol, 40);
}

} // namespace

MomentReport siegel_translate_stats(const FieldHandle& field, const WeightScheme& weights,
                                    const RegionSpec& region, std::int64_t n_theta,
                                    std::uint64_t seed, TranslateMode mode,
                                    const EnumLimits& limits) {
    return translate_report(field, weights, region, n_theta, seed, mode, limits);
}

MomentReport second_moment_stats(const FieldHandle& field, const WeightScheme& weights,
                                 const RegionSpec& region, std::int64_t n_theta,
                                 std::uint64_t seed, TranslateMode mode,
                                 const EnumLimits& limits) {
    return translate_report(field, weights, region, n_theta, seed, mode, limits);
}

Eigen::VectorXd overlap_scale_factors(const FieldHandle& field, const KElem& alpha) {
    if (is_zero(alpha.num) || is_zero(alpha.den))
        throw ValidationError("overlap: alpha must be a nonzero field element");
    EmbedVec ge = embed_element(field, alpha);
    Eigen::VectorXd factors(field.num_places());
    for (int v = 0; v < field.num_places(); ++v)
        factors[v] = std::pow(std::min(1.0, std::abs(ge[v])), field.places[v].d_nu);
    return factors;
}

McResult overlap_volume(const FieldHandle& field, const WeightScheme& weights,
                        const RegionSpec& region, const KElem& gamma, std::int64_t samples,
                        std::uint64_t seed) {
    if (is_zero(gamma.num) || is_zero(gamma.den))
        throw ValidationError("overlap: gamma must be a nonzero field element");
    validate_region(region);
    if (region.kind != RegionSpec::Kind::E)
        throw ValidationError("overlap: needs the plain product region");
    EmbedVec ge = embed_element(field, gamma);
    KSVec scaled;
    auto keep = [&field, &region, &weights, ge, scaled](const KSVec& z) mutable {
        scaled.x = z.x;
        scaled.y = z.y;
        for (int v = 0; v < field.num_places(); ++v) {
            scaled.x.col(v) *= ge[v];
            scaled.y.col(v) *= ge[v];
        }
        return region_membership(field, region, weights, scaled);
    };
    return mc_volume_where(field, weights, region, samples, seed, keep);
}

double rogers_tail_sum(const FieldHandle& field, int d, double norm_cap,
                       const EnumLimits& limits) {
    if (d <= 2)
        throw ValidationError("rogers tail: exponent must be at least 3 (sum diverges below)");
    if (!std::isfinite(norm_cap) || norm_cap < 1.0)
        throw ValidationError("rogers tail: norm cap must be at least 1");
    const double s = 0.5 * d;

    if (field.degree == 1) {
        // rationals: inclusion-exclusion over the prime divisors of q turns the
        // inner coprime sum into a few prefix-sum lookups
        const std::int64_t cap = static_cast<std::int64_t>(std::floor(norm_cap));
        if (cap < 2) return 0.0;
        std::vector<std::int32_t> spf(static_cast<std::size_t>(cap) + 1, 0);
        for (std::int64_t i = 2; i <= cap; ++i)
            if (spf[static_cast<std::size_t>(i)] == 0)
                for (std::int64_t j = i; j <= cap; j += i)
                    if (spf[static_cast<std::size_t>(j)] == 0)
                        spf[static_cast<std::size_t>(j)] = static_cast<std::int32_t>(i);
        std::vector<double> inv_pow(static_cast<std::size_t>(cap) + 1, 0.0);
        std::vector<double> prefix(static_cast<std::size_t>(cap) + 1, 0.0);
        for (std::int64_t i = 1; i <= cap; ++i) {
            inv_pow[static_cast<std::size_t>(i)] = std::pow(static_cast<double>(i), -s);
            prefix[static_cast<std::size_t>(i)] =
                prefix[static_cast<std::size_t>(i - 1)] + inv_pow[static_cast<std::size_t>(i)];
        }
        double total = 0.0;
        for (std::int64_t q = 2; q <= cap; ++q) {
            std::int64_t primes[16];
            int np = 0;
            for (std::int64_t x = q; x > 1;) {
                std::int64_t p = spf[static_cast<std::size_t>(x)];
                primes[np++] = p;
                while (x % p == 0) x /= p;
            }
            double inner = 0.0;
            for (int mask = 0; mask < (1 << np); ++mask) {
                std::int64_t div = 1;
                int bits = 0;
                for (int k = 0; k < np; ++k)
                    if (mask & (1 << k)) {
                        div *= primes[k];
                        ++bits;
                    }
                const double mu = (bits % 2 == 0) ? 1.0 : -1.0;
                inner += mu * inv_pow[static_cast<std::size_t>(div)] *
                         prefix[static_cast<std::size_t>((q - 1) / div)];
            }
            total += inv_pow[static_cast<std::size_t>(q)] * inner;
        }
        return total;
    }

    PrincipalIdealList ideals = principal_ideals(field, norm_cap, limits);
    double total = 0.0;
    for (std::size_t j = 0; j < ideals.gens.size(); ++j)
        for (std::size_t i = 0; i < j; ++i) {
            if (ideals.norms[i] >= ideals.norms[j]) continue;
            if (!ideals_coprime(field, ideals.gens[i], ideals.gens[j])) continue;
            total += std::pow(static_cast<double>(ideals.norms[i]) *
                                  static_cast<double>(ideals.norms[j]),
                              -s);
        }
    return total;
}

double zeta_bound_value(const FieldHandle& field, int d, double zeta_cap,
                        const EnumLimits& limits) {
    if (d <= 2) throw ValidationError("zeta bound: exponent must be at least 3");
    if (!std::isfinite(zeta_cap) || zeta_cap < 2.0)
        throw ValidationError("zeta bound: truncation cap must be at least 2");
    const double half = 0.5 * d;
    const double z_top = zeta_partial(field, d - 1.0, zeta_cap, limits);
    const double z_half = zeta_partial(field, half, zeta_cap, limits);
    return 1.0 + std::abs(1.0 / (1.0 - half)) * z_top +
           (std::pow(2.0, half - 1.0) / (half - 1.0)) * z_half + z_half;
}

UnitCubeSum unit_cube_sum(const FieldHandle& field, double norm_gamma, int box_cap) {
    if (!std::isfinite(norm_gamma) || norm_gamma <= 0.0)
        throw ValidationError("unit cube sum: norm value must be positive");
    if (box_cap < 10) throw ValidationError("unit cube sum: box cap must be at least 10");
    const int S = field.num_places();
    const double lo_sum = -std::log(norm_gamma);
    const double hi_sum = static_cast<double>(S) + lo_sum;

    double cells = 1.0;
    for (int v = 0; v < S; ++v) cells *= 2.0 * box_cap + 1.0;
    if (cells > 1e8) throw ResourceError("unit cube sum: box has more than 1e8 cells");

    std::vector<int> v(static_cast<std::size_t>(S), -box_cap);
    UnitCubeSum out;
    while (true) {
        long sum = 0;
        for (int value : v) sum += value;
        if (lo_sum <= sum && sum <= hi_sum) {
            double term = 1.0;
            for (int k = 0; k < S; ++k)
                term *= std::min(1.0, std::exp(field.places[k].d_nu * v[static_cast<std::size_t>(k)]));
            out.value += term;
        }
        int i = S - 1;
        while (i >= 0) {
            if (v[static_cast<std::size_t>(i)] < box_cap) {
                ++v[static_cast<std::size_t>(i)];
                break;
            }
            v[static_cast<std::size_t>(i)] = -box_cap;
            --i;
        }
        if (i < 0) break;
    }

    // every slab vector with a coordinate beyond the box has unweighted
    // negative part k > box_cap - max(0, hi_sum); terms are <= A e^{-k} and
    // the vectors with negative part k number at most
    // width (k+1)^{S-1} (k + max(0,hi_sum) + 1)^{S-1}
    const double hi_pos = std::max(0.0, hi_sum);
    const double width = std::max(0.0, std::floor(hi_sum) - std::ceil(lo_sum) + 1.0);
    const double amp = std::max(1.0, std::exp(hi_sum));
    double k0 = std::max(0.0, std::floor(box_cap - hi_pos));
    for (double k = k0; k < k0 + 4000.0; k += 1.0) {
        const double count =
            width * std::pow(k + 1.0, S - 1) * std::pow(k + hi_pos + 1.0, S - 1);
        const double term = amp * count * std::exp(-k);
        out.tail_bound += term;
        if (term < 1e-300) break;
    }
    return out;
}

std::int64_t partition_count(int k, std::int64_t M) {
    if (k < 1) throw ValidationError("partition count: k must be positive");
    if (M < 0) throw ValidationError("partition count: M must be nonnegative");
    if (M < k) return 0;
    const double table_cells = (static_cast<double>(k) + 1.0) * (static_cast<double>(M) + 1.0);
    if (table_cells > 5e7) throw ResourceError("partition count: table larger than 5e7 cells");
    std::vector<std::vector<std::int64_t>> p(
        static_cast<std::size_t>(k) + 1,
        std::vector<std::int64_t>(static_cast<std::size_t>(M) + 1, 0));
    p[0][0] = 1;
    for (int j = 1; j <= k; ++j)
        for (std::int64_t r = 0; r <= M; ++r) {
            std::int64_t a = (r >= 1) ? p[static_cast<std::size_t>(j - 1)]
                                         [static_cast<std::size_t>(r - 1)]
                                      : 0;
            std::int64_t b = (r >= j) ? p[static_cast<std::size_t>(j)]
                                         [static_cast<std::size_t>(r - j)]
                                      : 0;
            std::int64_t sum = 0;
            if (__builtin_add_overflow(a, b, &sum))
                throw ResourceError("partition count: value exceeds 64-bit range");
            p[static_cast<std::size_t>(j)][static_cast<std::size_t>(r)] = sum;
        }
    return p[static_cast<std::size_t>(k)][static_cast<std::size_t>(M)];
}

double knessl_keller_ratio(int k, std::int64_t M) {
    if (k < 1 || M < 1) throw ValidationError("partition ratio: needs k >= 1 and M >= 1");
    const double exact = static_cast<double>(partition_count(k, M));
    const double pi = std::acos(-1.0);
    const double approx = std::exp(2.0 * k) *
                          std::pow(static_cast<double>(M) / (static_cast<double>(k) * k), k) /
                          (2.0 * pi * static_cast<double>(M));
    return exact / approx;
}

namespace {

std::int64_t signed_sum_count(int n, std::int64_t M, std::int64_t N, std::int64_t lo,
                              std::int64_t hi) {
    if (n < 1) throw ValidationError("z count: dimension must be positive");
    if (M < 0 || N < 0) throw ValidationError("z count: part sums must be nonnegative");
    if (lo > hi) return 0;
    const double cells = std::pow(static_cast<double>(hi - lo + 1), n);
    if (cells > 2e8) throw ResourceError("z count: enumeration box larger than 2e8 cells");

    std::int64_t count = 0;
    std::function<void(int, std::int64_t, std::int64_t)> rec =
        [&](int idx, std::int64_t pos, std::int64_t neg) {
            if (pos > M || neg > N) return;
            if (idx == n) {
                if (pos == M && neg == N) ++count;
                return;
            }
            for (std::int64_t z = lo; z <= hi; ++z)
                rec(idx + 1, pos + std::max<std::int64_t>(0, z),
                    neg - std::min<std::int64_t>(0, z));
        };
    rec(0, 0, 0);
    return count;
}

} // namespace

std::int64_t z_count(int n, std::int64_t M, std::int64_t N) {
    return signed_sum_count(n, M, N, -N, M);
}

std::int64_t z_count_in_box(int n, std::int64_t M, std::int64_t N, std::int64_t W) {
    if (W < 0) throw ValidationError("z count: box radius must be nonnegative");
    return signed_sum_count(n, M, N, std::max(-N, -W), std::min(M, W));
}

ThunderOracle make_integer_oracle() {
    return [](double t) {
        if (!std::isfinite(t)) throw ValidationError("integer oracle: cap must be finite");
        if (t > 2e7) throw ResourceError("integer oracle: cap larger than 2e7");
        JumpList out;
        for (std::int64_t k = 1; k <= static_cast<std::int64_t>(std::floor(t)); ++k)
            out.emplace_back(static_cast<double>(k), 1);
        return out;
    };
}

ThunderOracle make_ideal_oracle(const FieldHandle& field, const EnumLimits& limits) {
    const FieldHandle* f = &field;
    return [f, limits](double t) {
        PrincipalIdealList ideals = principal_ideals(*f, t, limits);
        JumpList out;
        for (std::size_t i = 0; i < ideals.norms.size(); ++i) {
            const double value = static_cast<double>(ideals.norms[i]);
            if (!out.empty() && out.back().first == value)
                ++out.back().second;
            else
                out.emplace_back(value, 1);
        }
        return out;
    };
}

ThunderReport thunder_check(double c1, double c2, double c3, const ThunderOracle& oracle,
                            const std::function<double(double)>& F, double t) {
    if (!std::isfinite(c1) || !std::isfinite(c2) || !std::isfinite(c3) || c1 <= 0.0 ||
        c2 <= 0.0)
        throw ValidationError("summation bound: counting exponents must be positive");
    if (!std::isfinite(t) || t <= 0.5)
        throw ValidationError("summation bound: cap must exceed 1/2");
    if (!oracle || !F) throw ValidationError("summation bound: oracle and F are required");

    // grid check: F nonincreasing and convex (so |F'| shrinks) on [1/2, t]
    const int grid = 256;
    const double h = (t - 0.5) / grid;
    double prev = F(0.5), prev_slope = -std::numeric_limits<double>::infinity();
    double scale = std::abs(prev);
    for (int i = 1; i <= grid; ++i) {
        const double x = 0.5 + i * h;
        const double fx = F(x);
        if (!std::isfinite(fx)) throw ValidationError("summation bound: F must be finite");
        scale = std::max(scale, std::abs(fx));
        if (fx > prev + 1e-9 * (1.0 + scale))
            throw ValidationError("summation bound: F must be nonincreasing");
        const double slope = (fx - prev) / h;
        if (slope < prev_slope - 1e-7 * (1.0 + std::abs(prev_slope)))
            throw ValidationError("summation bound: |F'| must be nonincreasing");
        prev = fx;
        prev_slope = slope;
    }

    ThunderReport report;
    for (const auto& [value, mult] : oracle(t))
        if (value <= t) report.lhs += static_cast<double>(mult) * F(value);
    auto integrand = [&](double x) { return std::pow(x, c2 - 1.0) * F(x); };
    report.rhs = integrate(integrand, 0.5, t, 1e-9) + std::pow(2.0, -c2) * F(0.5);
    report.holds = report.lhs < report.rhs;
    return report;
}

SandwichReport time_average_sandwich(const LatticeSpec& spec, const WeightScheme& weights,
                                     double c, double R, double T, double dt,
                                     const EnumLimits& limits) {
    if (!std::isfinite(R) || !std::isfinite(T) || R <= 1.0 || R >= T)
        throw ValidationError("time average: needs 1 < R < T");
    if (!std::isfinite(dt) || dt <= 0.0 || dt > R / 10.0)
        throw ValidationError("time average: step must lie in (0, R/10]");

    std::vector<double> lys;
    for_each_approximate(spec, weights, c, 0.0, T + R, nullptr, limits,
                         [&](const ApproximateRecord& rec) {
                             lys.push_back(log_quasi_norm(rec.point.y, weights.b));
                         });
    std::sort(lys.begin(), lys.end());
    auto count_in = [&](double lo, double hi) {
        return static_cast<std::int64_t>(
            std::lower_bound(lys.begin(), lys.end(), hi) -
            std::lower_bound(lys.begin(), lys.end(), lo));
    };

    SandwichReport report;
    report.lower = count_in(R, T);
    report.upper = static_cast<std::int64_t>(lys.size());

    const auto steps = static_cast<std::int64_t>(std::ceil(T / dt - 1e-12));
    const double h = T / static_cast<double>(steps);
    double acc = 0.0;
    for (std::int64_t j = 0; j < steps; ++j) {
        const double tj = (static_cast<double>(j) + 0.5) * h;
        acc += static_cast<double>(count_in(tj, tj + R));
    }
    report.middle = acc * h / R;
    report.slack = 2.0 * static_cast<double>(report.upper) * h / R;
    return report;
}

} // namespace nflab
