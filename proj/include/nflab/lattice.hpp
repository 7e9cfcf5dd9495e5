#pragma once

// Lattices in K_S^d: the standard integer lattice, its unipotent translate by
// a parameter matrix theta, the diagonal weighted flow, exhaustive point
// enumeration inside the counting regions, and denominator-sublattice
// covolumes.

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "nflab/field.hpp"
#include "nflab/geometry.hpp"
#include "nflab/rng.hpp"

namespace nflab {

// Lattice {(p + theta q, q) : p in O_K^m, q in O_K^n} embedded in K_S^{m+n}.
// theta[v] is the m x n parameter block at place v.
struct LatticeSpec {
    const FieldHandle* field = nullptr;
    int m = 1;
    int n = 1;
    std::vector<Eigen::MatrixXcd> theta;
};

LatticeSpec make_lattice(const FieldHandle& field, int m, int n,
                         std::vector<Eigen::MatrixXcd> theta);
LatticeSpec zero_theta_lattice(const FieldHandle& field, int m, int n);

// Each theta entry is an independent uniform draw from the fundamental box of
// the integer lattice in K_S (coordinates in [0,1) over the basis embeddings).
LatticeSpec random_theta_lattice(const FieldHandle& field, int m, int n, RngStream& rng);

// Block of `rows` independent fundamental-box draws, one per row.
Eigen::MatrixXcd random_fundamental_block(const FieldHandle& field, int rows, RngStream& rng);

// (p + theta q, q) at every place.
KSVec lattice_point(const LatticeSpec& spec, const std::vector<AlgInt>& p,
                    const std::vector<AlgInt>& q);

// A solution of the weighted inequality: value = ||theta q - p||_a ||q||_b and
// point = (theta q - p, q) blockwise (the lattice element has -p in its first
// block).
struct ApproximateRecord {
    std::vector<AlgInt> p;
    std::vector<AlgInt> q;
    KSVec point;
    double value = 0.0;
    double q_size = 0.0;
};

// Optional affine offset: the enumerated set becomes Lambda_theta + (u_x, u_y).
struct TranslationVec {
    Eigen::MatrixXcd u_x; // m x #places
    Eigen::MatrixXcd u_y; // n x #places
};

// Stream every point of the (optionally translated) lattice with
// ||x||_a ||y||_b < c and log||y||_b in [y_log_lo, y_log_hi), exhaustively:
// the q block ranges over a per-entry cover of the y window and the p block
// over a cover of the x constraint around theta q.  Emission order is the
// nested coefficient walk (deterministic but unsorted).
void for_each_approximate(const LatticeSpec& spec, const WeightScheme& weights, double c,
                          double y_log_lo, double y_log_hi, const TranslationVec* translation,
                          const EnumLimits& limits,
                          const std::function<void(const ApproximateRecord&)>& emit);

// All solutions in the region, sorted by (max house of q, q coordinates,
// p coordinates).  Regions without a lower y bound are rejected as unbounded;
// direction caps are applied as a final filter.
std::vector<ApproximateRecord> enumerate_lattice_points(const LatticeSpec& spec,
                                                        const RegionSpec& region,
                                                        const WeightScheme& weights,
                                                        const EnumLimits& limits = {});

struct FlowParams {
    WeightScheme weights;
    double t = 0.0;
};

// Diagonal flow: x entries scale by e^{a t}, y entries by e^{-b t}.
KSVec apply_flow(const FieldHandle& field, const FlowParams& flow, const KSVec& v);

// Real determinant of the flow restricted to each place; the product over
// places is 1 for any valid weight scheme.
Eigen::VectorXd flow_place_determinants(const FieldHandle& field, const FlowParams& flow);

// Covolume N(q)^d of the denominator sublattice {x in O_K : (p/q) x in O_K}^d
// = (q O_K)^d, for coprime principal ideals (p), (q).  The norm-power formula
// is cross-checked exactly against the Smith-form index of multiplication by
// q on basis coordinates.
double phi_covolume(const FieldHandle& field, int d, const AlgInt& p, const AlgInt& q);

// Axis box in K_S^m x K_S^n: one rectangle per (component, place), row-major
// (component * #places + place).  Membership is half-open: lo <= coord < hi
// in every real coordinate.
struct BoxRegion {
    std::vector<PlaceBox> x;
    std::vector<PlaceBox> y;
};

double box_lambda_volume(const FieldHandle& field, int m, int n, const BoxRegion& box);

std::int64_t count_lattice_in_box(const LatticeSpec& spec, const BoxRegion& box,
                                  const EnumLimits& limits = {});

} // namespace nflab
