#include "nflab/diophantine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nflab/errors.hpp"
#include "nflab/rng.hpp"

namespace nflab {

namespace {

constexpr std::int64_t kMcChunk = 65536;

} // namespace

double quasi_ball_volume(const FieldHandle& field, int rows) {
    if (rows < 1) throw ValidationError("quasi_ball_volume: rows must be positive");
    double vol = 1.0;
    for (int r = 0; r < rows; ++r) {
        vol *= std::pow(2.0, field.num_real);
        vol *= std::pow(std::acos(-1.0), field.num_complex);
    }
    return vol;
}

double analytic_volume_E(const FieldHandle& field, const WeightScheme& weights, double c,
                         double T) {
    validate_weights(field, weights);
    if (!std::isfinite(c) || c < 0.0)
        throw ValidationError("analytic_volume_E: scale must be finite and nonnegative");
    if (!std::isfinite(T) || T <= 0.0)
        throw ValidationError("analytic_volume_E: window size must be finite and positive");
    const double ball = quasi_ball_volume(field, weights.m()) * quasi_ball_volume(field, weights.n());
    const double covol = std::pow(field.covolume, weights.m() + weights.n());
    return ball * c * T / covol;
}

McResult mc_volume(const FieldHandle& field, const WeightScheme& weights,
                   const RegionSpec& region, std::int64_t samples, std::uint64_t seed) {
    return mc_volume_where(field, weights, region, samples, seed, {});
}

McResult mc_volume_where(const FieldHandle& field, const WeightScheme& weights,
                         const RegionSpec& region, std::int64_t samples, std::uint64_t seed,
                         const std::function<bool(const KSVec&)>& keep) {
    validate_weights(field, weights);
    validate_region(region);
    if (region.kind == RegionSpec::Kind::F)
        throw ValidationError("mc_volume: region without a lower y bound has infinite measure");
    if (samples < 1000) throw ValidationError("mc_volume: needs at least 1000 samples");

    McResult out;
    out.samples = samples;
    if (region.c == 0.0) return out;

    const int P = field.num_places();
    const int m = weights.m(), n = weights.n();
    const double T = region.T;
    const double log_c = std::log(region.c);
    const int shells = std::max(1, static_cast<int>(std::ceil(T)));

    Eigen::MatrixXcd zx(m, P), zy(n, P);
    KSVec z;

    double total = 0.0, variance = 0.0;
    for (int l = 0; l < shells; ++l) {
        const double lo = (l == 0) ? 0.0 : l * T / shells;
        const double hi = (l == shells - 1) ? T : (l + 1) * T / shells;

        // envelope of the shell slice: |x| < (c/R_lo)^a, |y| < R_hi^b per entry
        Eigen::MatrixXd rx(m, P), ry(n, P);
        double proposal_vol = 1.0;
        for (int v = 0; v < P; ++v) {
            const bool real_place = field.places[v].kind == PlaceKind::real;
            for (int i = 0; i < m; ++i) {
                rx(i, v) = std::exp(weights.a(i, v) * (log_c - lo));
                proposal_vol *= real_place ? 2.0 * rx(i, v)
                                           : std::acos(-1.0) * rx(i, v) * rx(i, v);
            }
            for (int j = 0; j < n; ++j) {
                ry(j, v) = std::exp(weights.b(j, v) * hi);
                proposal_vol *= real_place ? 2.0 * ry(j, v)
                                           : std::acos(-1.0) * ry(j, v) * ry(j, v);
            }
        }

        std::int64_t shell_samples = samples / shells + (l < samples % shells ? 1 : 0);
        std::int64_t hits = 0;
        std::int64_t done = 0;
        for (std::int64_t chunk = 0; done < shell_samples; ++chunk) {
            RngStream rng(seed, static_cast<std::uint64_t>(l) * (1ull << 20) + chunk);
            const std::int64_t batch = std::min(kMcChunk, shell_samples - done);
            for (std::int64_t s = 0; s < batch; ++s) {
                for (int v = 0; v < P; ++v) {
                    const bool real_place = field.places[v].kind == PlaceKind::real;
                    for (int i = 0; i < m; ++i) {
                        if (real_place) {
                            zx(i, v) = rng.uniform(-rx(i, v), rx(i, v));
                        } else {
                            double rad = rx(i, v) * std::sqrt(rng.uniform01());
                            double ang = 6.283185307179586476925286766559 * rng.uniform01();
                            zx(i, v) = std::complex<double>(rad * std::cos(ang), rad * std::sin(ang));
                        }
                    }
                    for (int j = 0; j < n; ++j) {
                        if (real_place) {
                            zy(j, v) = rng.uniform(-ry(j, v), ry(j, v));
                        } else {
                            double rad = ry(j, v) * std::sqrt(rng.uniform01());
                            double ang = 6.283185307179586476925286766559 * rng.uniform01();
                            zy(j, v) = std::complex<double>(rad * std::cos(ang), rad * std::sin(ang));
                        }
                    }
                }
                z.x = zx;
                z.y = zy;
                const double ly = log_quasi_norm(zy, weights.b);
                if (ly >= lo && ly < hi && region_membership(field, region, weights, z) &&
                    (!keep || keep(z)))
                    ++hits;
            }
            done += batch;
        }

        const double p = static_cast<double>(hits) / static_cast<double>(shell_samples);
        total += proposal_vol * p;
        variance += proposal_vol * proposal_vol * p * (1.0 - p) /
                    static_cast<double>(shell_samples);
    }

    const double covol = std::pow(field.covolume, m + n);
    out.estimate = total / covol;
    out.standard_error = std::sqrt(variance) / covol;
    return out;
}

std::int64_t count_approximates(const LatticeSpec& spec, const WeightScheme& weights,
                                const RegionSpec& region, const EnumLimits& limits) {
    validate_region(region);
    if (region.kind == RegionSpec::Kind::F)
        throw ValidationError("count_approximates: region without a lower y bound is unbounded");
    std::int64_t count = 0;
    const bool directional = region.kind == RegionSpec::Kind::E_AB;
    for_each_approximate(spec, weights, region.c, 0.0, region.T, nullptr, limits,
                         [&](const ApproximateRecord& rec) {
                             if (directional &&
                                 !region_membership(*spec.field, region, weights, rec.point))
                                 return;
                             ++count;
                         });
    return count;
}

std::vector<SeriesPoint> error_series(const LatticeSpec& spec, const WeightScheme& weights,
                                      double c, const std::vector<double>& t_grid,
                                      const EnumLimits& limits) {
    if (t_grid.empty()) throw ValidationError("error_series: empty window grid");
    for (std::size_t k = 0; k < t_grid.size(); ++k) {
        if (!std::isfinite(t_grid[k]) || t_grid[k] <= 0.0)
            throw ValidationError("error_series: window sizes must be finite and positive");
        if (k > 0 && !(t_grid[k - 1] < t_grid[k]))
            throw ValidationError("error_series: window grid must be strictly increasing");
    }

    std::vector<double> ly_values;
    for_each_approximate(spec, weights, c, 0.0, t_grid.back(), nullptr, limits,
                         [&](const ApproximateRecord& rec) {
                             ly_values.push_back(log_quasi_norm(rec.point.y, weights.b));
                         });
    std::sort(ly_values.begin(), ly_values.end());

    std::vector<SeriesPoint> out;
    out.reserve(t_grid.size());
    for (double T : t_grid) {
        SeriesPoint pt;
        pt.T = T;
        pt.count = static_cast<std::int64_t>(
            std::lower_bound(ly_values.begin(), ly_values.end(), T) - ly_values.begin());
        pt.volume = analytic_volume_E(*spec.field, weights, c, T);
        pt.error = static_cast<double>(pt.count) - pt.volume;
        out.push_back(pt);
    }
    return out;
}

ScalingFit fit_scaling_exponent(const std::vector<SeriesPoint>& series, double t_min) {
    std::vector<double> xs, ys;
    double max_ratio = 0.0;
    const double ee = std::exp(std::exp(1.0));
    for (const auto& pt : series) {
        if (!(pt.T > t_min) || pt.error == 0.0) continue;
        xs.push_back(std::log(pt.T));
        ys.push_back(std::log(std::abs(pt.error)));
        if (pt.T > ee)
            max_ratio = std::max(max_ratio, std::abs(pt.error) / target_rate(pt.T, 0.01));
    }
    if (xs.size() < 5)
        throw ValidationError("scaling fit: need at least 5 points above the cut with nonzero error");

    const double N = static_cast<double>(xs.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        sx += xs[k];
        sy += ys[k];
        sxx += xs[k] * xs[k];
        sxy += xs[k] * ys[k];
    }
    const double denom = N * sxx - sx * sx;
    if (std::abs(denom) < 1e-12)
        throw ValidationError("scaling fit: degenerate window grid");

    ScalingFit fit;
    fit.slope = (N * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.slope * sx) / N;
    fit.points_used = static_cast<std::int64_t>(xs.size());
    fit.max_rate_ratio = max_ratio;

    double ss_res = 0.0, ss_tot = 0.0;
    const double mean_y = sy / N;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        const double fitted = fit.intercept + fit.slope * xs[k];
        ss_res += (ys[k] - fitted) * (ys[k] - fitted);
        ss_tot += (ys[k] - mean_y) * (ys[k] - mean_y);
    }
    fit.r_squared = ss_tot < 1e-300 ? 1.0 : 1.0 - ss_res / ss_tot;
    return fit;
}

double target_rate(double T, double eps) {
    if (!std::isfinite(T) || T <= std::exp(std::exp(1.0)))
        throw ValidationError("target_rate: needs T > e^e");
    if (!std::isfinite(eps) || eps < 0.0)
        throw ValidationError("target_rate: exponent shift must be nonnegative");
    return std::sqrt(T) * std::pow(std::log(T), 1.5) * std::pow(std::log(std::log(T)), 0.5 + eps);
}

} // namespace nflab
