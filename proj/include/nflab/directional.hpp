#pragma once

// Directional refinement of approximate counting: restrict both blocks of a
// record by where their weighted projections land on the unit spheres, and
// compare against the split volume.  The volume factorizes as the plain
// region volume times one normalized cap measure per block.  That split is
// exact for full caps and hemispheres under any weights; for geodesic caps it
// uses the rotation-invariant measure, which matches the projection geometry
// when the capped block carries equal weights (the flow lines are then
// Euclidean rays).

#include <cstdint>

#include "nflab/diophantine.hpp"

namespace nflab {

// Lattice points of the plain region whose x-projection lies in cap_x and
// y-projection in cap_y.  Full caps reduce to count_approximates; a record
// with a zero block is only admitted when that side's cap is full.
std::int64_t count_directional(const LatticeSpec& spec, const WeightScheme& weights, double c,
                               double T, const CapSpec& cap_x, const CapSpec& cap_y,
                               const EnumLimits& limits = {});

// analytic_volume_E times the normalized measures of the two caps.  Caps
// without a closed-form measure fall back to Monte Carlo with the given
// sample budget (at least 1000) and seed.
double analytic_volume_AB(const FieldHandle& field, const WeightScheme& weights, double c,
                          double T, const CapSpec& cap_x, const CapSpec& cap_y,
                          std::int64_t mc_samples = 200000, std::uint64_t mc_seed = 0);

} // namespace nflab
