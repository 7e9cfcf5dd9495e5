#pragma once

// Exact arithmetic in a number field K over a fixed integral basis, together
// with the numeric data attached to its archimedean places: embeddings,
// norms, logarithmic unit coordinates, covolume of the integer lattice.
//
// Elements are integer coordinate vectors over the basis; multiplication goes
// through a 3-index structure table, so everything ring-theoretic is exact.
// Place data (roots, embeddings) is double precision, Newton-refined.

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "nflab/errors.hpp"
#include "nflab/int_linalg.hpp"

namespace nflab {

constexpr int kMaxDegree = 8;

// Stack-allocated coordinate vectors (degree <= kMaxDegree).
using Coords = Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDegree, 1>;
using EmbedVec = Eigen::Matrix<std::complex<double>, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDegree, 1>;

struct AlgInt {
    Coords c;
};

bool operator==(const AlgInt& a, const AlgInt& b);
bool lex_less(const AlgInt& a, const AlgInt& b);

enum class PlaceKind { real, complex_pair };

struct PlaceInfo {
    PlaceKind kind = PlaceKind::real;
    int d_nu = 1;                       // local degree: 1 real, 2 complex
    std::complex<double> root{0.0, 0.0}; // refined root of min_poly picked for this place
};

// Preset description as read from JSON (see docs/schema.md for the key set).
struct FieldPreset {
    std::string name;
    std::vector<std::int64_t> min_poly;                  // a_0 .. a_deg, monic
    bool power_basis = true;
    std::vector<std::int64_t> mult_table;                // deg^3 entries if !power_basis
    std::vector<std::vector<std::int64_t>> fundamental_units;
    int torsion_order = 2;
    std::vector<std::int64_t> torsion_gen;
};

struct FieldHandle {
    std::string name;
    int degree = 0;
    int num_real = 0;     // real places
    int num_complex = 0;  // conjugate pairs
    std::vector<std::int64_t> min_poly;
    std::vector<PlaceInfo> places;

    // mult_table[(i*degree + j)*degree + k] = coefficient of b_k in b_i * b_j
    std::vector<std::int64_t> mult_table;

    // basis_embeddings(v, i) = value of basis element i at place v
    Eigen::MatrixXcd basis_embeddings;

    // degree x degree real matrix: row = basis element, columns = place
    // coordinates (one column per real place, Re/Im pair per complex place)
    Eigen::MatrixXd real_embedding;
    Eigen::MatrixXd real_embedding_inv;
    double covolume = 1.0; // |det real_embedding|

    std::vector<AlgInt> fundamental_units;
    std::vector<AlgInt> fundamental_unit_invs;
    int torsion_order = 2;
    AlgInt torsion_gen;
    std::vector<AlgInt> torsion_orbit; // gen^0 .. gen^(order-1)

    int unit_rank = 0;
    Eigen::MatrixXd unit_log;      // #places x rank, columns = log vectors of units
    Eigen::MatrixXd unit_log_pinv; // rank x #places, left inverse of unit_log

    int num_places() const { return num_real + num_complex; }
};

// Element of K as a fraction of algebraic integers.
struct KElem {
    AlgInt num;
    AlgInt den;
};

struct EnumLimits {
    std::int64_t cell_cap = std::int64_t(1) << 25; // coefficient-box cells per enumeration
};

// ---- construction -----------------------------------------------------------

FieldHandle build_field(const FieldPreset& preset);

AlgInt make_elem(const FieldHandle& field, const std::vector<std::int64_t>& coords);
AlgInt zero_elem(const FieldHandle& field);
AlgInt one_elem(const FieldHandle& field);

// ---- exact ring operations --------------------------------------------------

AlgInt add(const FieldHandle& field, const AlgInt& x, const AlgInt& y);
AlgInt sub(const FieldHandle& field, const AlgInt& x, const AlgInt& y);
AlgInt neg(const AlgInt& x);
AlgInt mul(const FieldHandle& field, const AlgInt& x, const AlgInt& y);
AlgInt pow_elem(const FieldHandle& field, const AlgInt& x, std::int64_t e); // e < 0 needs a unit
bool is_zero(const AlgInt& x);

// Matrix of multiplication by x on basis coordinates.
IntMat mult_matrix(const FieldHandle& field, const AlgInt& x);

// |N(x)| as an exact integer (absolute value of det of the multiplication matrix).
std::int64_t norm_exact(const FieldHandle& field, const AlgInt& x);

// Exact inverse of a unit (|N| = 1); rejects non-units.
AlgInt unit_inverse(const FieldHandle& field, const AlgInt& u);

// True when the principal ideals (p) and (q) are coprime, i.e. the lattice
// generated by the columns of [M_p | M_q] is all of the integer lattice.
bool ideals_coprime(const FieldHandle& field, const AlgInt& p, const AlgInt& q);

// ---- embeddings and numeric norms ------------------------------------------

EmbedVec embed_element(const FieldHandle& field, const AlgInt& x);
EmbedVec embed_element(const FieldHandle& field, const KElem& x);

// max over places of |embedding|
double house(const FieldHandle& field, const AlgInt& x);

// prod over places of |embedding|^{d_nu}; = |N(x)| up to roundoff, 0 for x = 0
double field_norm(const FieldHandle& field, const AlgInt& x);
double field_norm(const FieldHandle& field, const KElem& x);

// log coordinates (d_nu * log|embedding|) per place; rejects non-units
Eigen::VectorXd log_unit(const FieldHandle& field, const AlgInt& u);

double covolume_ok(const FieldHandle& field);

// ---- enumeration ------------------------------------------------------------

// Per-place rectangle bounds on embedding values (imaginary part ignored at
// real places).
struct PlaceBox {
    double re_lo = 0, re_hi = 0, im_lo = 0, im_hi = 0;
};

// Integer coefficient box guaranteed to cover every algebraic integer whose
// embeddings lie inside the given per-place rectangles.
void coeff_bounds(const FieldHandle& field, const std::vector<PlaceBox>& boxes,
                  Coords& lo, Coords& hi);

// Number of integer points of the box, saturating at cap + 1.
std::int64_t box_cells(const Coords& lo, const Coords& hi, std::int64_t cap);

// Visit every coordinate vector in [lo, hi] in lexicographic order.
template <class Fn>
void walk_coords(const Coords& lo, const Coords& hi, Fn&& fn) {
    const int n = static_cast<int>(lo.size());
    for (int i = 0; i < n; ++i)
        if (lo[i] > hi[i]) return;
    Coords cur = lo;
    while (true) {
        fn(static_cast<const Coords&>(cur));
        int i = n - 1;
        while (i >= 0) {
            if (cur[i] < hi[i]) {
                ++cur[i];
                break;
            }
            cur[i] = lo[i];
            --i;
        }
        if (i < 0) break;
    }
}

// All algebraic integers with house <= bound, sorted lexicographically by
// coordinates (0 included).  Throws ResourceError if the coefficient box
// exceeds limits.cell_cap.
std::vector<AlgInt> enumerate_bounded_integers(const FieldHandle& field, double bound,
                                               const EnumLimits& limits = {});

// All units with house <= bound (torsion times fundamental-unit powers found
// through a log-coordinate box), sorted lexicographically.
std::vector<AlgInt> enumerate_units(const FieldHandle& field, double bound);

// Canonical generator of the principal ideal (x): the lexicographically
// smallest associate among those whose house lies under the intrinsic
// reduction bound for |N(x)|.  Generator-independent.
AlgInt canonical_associate(const FieldHandle& field, const AlgInt& x);

// Nonzero principal ideals with norm <= norm_cap, one canonical generator per
// ideal, sorted by (norm, coordinates).
struct PrincipalIdealList {
    std::vector<AlgInt> gens;
    std::vector<std::int64_t> norms;
};
PrincipalIdealList principal_ideals(const FieldHandle& field, double norm_cap,
                                    const EnumLimits& limits = {});

// Count of nonzero principal ideals with norm <= s.
std::int64_t count_principal_ideals(const FieldHandle& field, double s,
                                    const EnumLimits& limits = {});

// Truncated Dirichlet series over principal ideals: sum of N^{-s}, N <= cap.
double zeta_partial(const FieldHandle& field, double s, double cap,
                    const EnumLimits& limits = {});

} // namespace nflab
