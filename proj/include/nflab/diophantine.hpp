#pragma once

// Volumes and counting statistics for the weighted approximation regions.
//
// The measure on K_S^{m+n} is Haar normalized so the standard integer lattice
// has covolume one: Lebesgue volume divided by covolume(O_K)^{m+n}.  The main
// region has an exact product formula; a stratified Monte Carlo estimator
// covers the directional variants that do not.  Counting runs stream through
// the lattice enumerator, and the series/fit helpers turn count-vs-volume
// discrepancies into an empirical growth exponent.

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <vector>

#include "nflab/geometry.hpp"
#include "nflab/lattice.hpp"

namespace nflab {

// Lebesgue volume of { block : quasi-norm < 1 } for a block with the given
// number of rows: 2 per real coordinate, pi per complex one.  The weight
// entries drop out of the product because each block sums to one.
double quasi_ball_volume(const FieldHandle& field, int rows);

// Haar volume of the untranslated region: c * T times the two ball constants
// over covolume^{m+n}.  Only plain product regions; directional ones need the
// Monte Carlo path.
double analytic_volume_E(const FieldHandle& field, const WeightScheme& weights, double c,
                         double T);

struct McResult {
    double estimate = 0.0;
    double standard_error = 0.0;
    std::int64_t samples = 0;
};

// Stratified Monte Carlo volume of a region with a finite y-window.  The
// window [0, T) splits into ceil(T) logarithmic shells; each shell draws
// uniformly from the smallest product of boxes and discs that contains its
// part of the region, so the acceptance rate stays bounded away from zero at
// every scale.  Streams derive from (seed, shell, chunk) only: results are
// bit-identical for a fixed seed regardless of scheduling.  Needs at least
// 1000 samples.
McResult mc_volume(const FieldHandle& field, const WeightScheme& weights,
                   const RegionSpec& region, std::int64_t samples, std::uint64_t seed);

// Volume of the subset of the region that also satisfies `keep`, sampled with
// the same stratified proposal and draw order as mc_volume (which is the
// keep-everything case).
McResult mc_volume_where(const FieldHandle& field, const WeightScheme& weights,
                         const RegionSpec& region, std::int64_t samples, std::uint64_t seed,
                         const std::function<bool(const KSVec&)>& keep);

// Number of lattice points inside the region (same membership rules as
// enumerate_lattice_points, without materializing the records).
std::int64_t count_approximates(const LatticeSpec& spec, const WeightScheme& weights,
                                const RegionSpec& region, const EnumLimits& limits = {});

struct SeriesPoint {
    double T = 0.0;
    std::int64_t count = 0;
    double volume = 0.0;
    double error = 0.0; // count - volume, signed
};

// Counts against volumes along an increasing grid of window sizes, from one
// enumeration pass up to the largest T.  The grid must be strictly increasing
// and positive.
std::vector<SeriesPoint> error_series(const LatticeSpec& spec, const WeightScheme& weights,
                                      double c, const std::vector<double>& t_grid,
                                      const EnumLimits& limits = {});

struct ScalingFit {
    double slope = 0.0;       // least-squares slope of log|error| against log T
    double intercept = 0.0;
    double r_squared = 0.0;
    double max_rate_ratio = 0.0; // max |error| / target_rate(T, 0.01) over T > e^e
    std::int64_t points_used = 0;
};

// Fit the growth exponent of |count - volume| over the points with T above
// the cut and a nonzero error.  Needs at least 5 usable points.
ScalingFit fit_scaling_exponent(const std::vector<SeriesPoint>& series, double t_min);

// Reference error envelope sqrt(T) * (log T)^{3/2} * (log log T)^{1/2 + eps};
// defined for T > e^e so the last factor stays above one.
double target_rate(double T, double eps);

} // namespace nflab
