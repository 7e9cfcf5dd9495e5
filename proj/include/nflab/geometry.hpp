#pragma once

// Geometry of K_S^d: block vectors, weighted quasi-norms, weighted sphere
// projections, caps, and the counting regions.

#include <Eigen/Dense>
#include <optional>

#include "nflab/field.hpp"
#include "nflab/rng.hpp"

namespace nflab {

// Point of K_S^m x K_S^n: rows = block components, columns = places.
// Real-place entries carry |Im| < 1e-12.
struct KSVec {
    Eigen::MatrixXcd x; // m x #places
    Eigen::MatrixXcd y; // n x #places
};

// Positive weights per (component, place); both grids satisfy
// sum_{i,nu} d_nu * w(i,nu) = 1.
struct WeightScheme {
    Eigen::MatrixXd a; // m x #places
    Eigen::MatrixXd b; // n x #places
    int m() const { return static_cast<int>(a.rows()); }
    int n() const { return static_cast<int>(b.rows()); }
};

void validate_weights(const FieldHandle& field, const WeightScheme& w);
WeightScheme equal_weights(const FieldHandle& field, int m, int n);
// Random positive weights with per-entry skew in [1/2, 2] before
// renormalization (keeps enumeration boxes tame).
WeightScheme random_weights(const FieldHandle& field, int m, int n, RngStream& rng);

// log of max |block(i,nu)|^{1/w(i,nu)}; -infinity for the zero block.
double log_quasi_norm(const Eigen::MatrixXcd& block, const Eigen::MatrixXd& w);
double quasi_norm(const Eigen::MatrixXcd& block, const Eigen::MatrixXd& w);

// ---- weighted sphere ---------------------------------------------------------

// Point on the Euclidean unit sphere of a block space: sum |coords|^2 = 1.
struct SpherePoint {
    Eigen::MatrixXcd coords; // block shape (rows x places)
};

// Scale x along its weighted flow line until the Euclidean norm is 1.
SpherePoint project_weighted(const Eigen::MatrixXcd& block, const Eigen::MatrixXd& w);

// Flatten a block to real coordinates: row-major over components, per place
// one value (real) or a Re,Im pair (complex).
Eigen::VectorXd flatten_block(const FieldHandle& field, const Eigen::MatrixXcd& block);

// Direction sets on the unit sphere.  A "+" hemisphere keeps flattened
// coordinate >= 0 and "-" keeps < 0, so a hemisphere and its mirror partition
// the sphere exactly (directional counts over the pair add up exactly).
struct CapSpec {
    enum class Kind { full, hemisphere, cap };
    Kind kind = Kind::full;
    int hemi_index = 0; // flattened real coordinate tested by the hemisphere
    int hemi_sign = +1;
    Eigen::VectorXd center; // flattened, unit norm (cap kind)
    double angular_radius = 0.0; // in (0, pi)

    static CapSpec full_sphere();
    static CapSpec hemisphere(int flat_index, int sign);
    static CapSpec cap(const Eigen::VectorXd& center, double radius);
};

// Membership test against flattened sphere coordinates.
bool cap_contains_flat(const CapSpec& cap, const Eigen::VectorXd& flat);

bool cap_contains(const CapSpec& cap, const FieldHandle& field, const SpherePoint& p);

struct CapVolume {
    double estimate = 0.0;
    double standard_error = 0.0;
};

// Closed-form normalized cap measure where one exists: full and hemisphere in
// any dimension, geodesic caps on S^0, S^1, S^2.
std::optional<double> cap_measure_exact(const CapSpec& cap, int ambient_real_dim);

// Monte-Carlo normalized surface measure on S^{ambient_real_dim - 1}.
CapVolume cap_volume(const CapSpec& cap, int ambient_real_dim, std::int64_t samples,
                     std::uint64_t seed);

// Best available measure: exact if closed form, else Monte Carlo.
double cap_measure(const CapSpec& cap, int ambient_real_dim, std::int64_t samples,
                   std::uint64_t seed);

// ---- regions -----------------------------------------------------------------

// kind E:    ||x||_a ||y||_b < c  and  1 <= ||y||_b < e^T
// kind F:    ||x||_a ||y||_b < c  and  ||y||_b < e^T (no lower bound)
// kind E_AB: E plus directional cap constraints on both blocks
struct RegionSpec {
    enum class Kind { E, F, E_AB };
    Kind kind = Kind::E;
    double c = 1.0;
    double T = 1.0;
    std::optional<CapSpec> cap_x;
    std::optional<CapSpec> cap_y;
};

void validate_region(const RegionSpec& region);

bool region_membership(const FieldHandle& field, const RegionSpec& region,
                       const WeightScheme& w, const KSVec& point);

// Placewise relaxation of the region: the product/window conditions are
// imposed per place on the single-place quasi-norms, with the lower bound
// read as "some place reaches 1".  Coincides with region_membership when the
// field has a single archimedean place, and contains the region otherwise.
// E and F kinds only.
bool placewise_region_membership(const FieldHandle& field, const RegionSpec& region,
                                 const WeightScheme& w, const KSVec& point);

} // namespace nflab
