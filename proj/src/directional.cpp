#include "nflab/directional.hpp"

namespace nflab {

std::int64_t count_directional(const LatticeSpec& spec, const WeightScheme& weights, double c,
                               double T, const CapSpec& cap_x, const CapSpec& cap_y,
                               const EnumLimits& limits) {
    RegionSpec region{RegionSpec::Kind::E_AB, c, T, cap_x, cap_y};
    return count_approximates(spec, weights, region, limits);
}

double analytic_volume_AB(const FieldHandle& field, const WeightScheme& weights, double c,
                          double T, const CapSpec& cap_x, const CapSpec& cap_y,
                          std::int64_t mc_samples, std::uint64_t mc_seed) {
    const double base = analytic_volume_E(field, weights, c, T);
    const int dim_x = weights.m() * field.degree;
    const int dim_y = weights.n() * field.degree;
    const double fx = cap_measure(cap_x, dim_x, mc_samples, mc_seed);
    const double fy = cap_measure(cap_y, dim_y, mc_samples, mc_seed + 1);
    return base * fx * fy;
}

} // namespace nflab
