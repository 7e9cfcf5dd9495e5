#include "nflab/field.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

namespace nflab {

namespace {

using cplx = std::complex<double>;

// ---- exact polynomial helpers ----------------------------------------------

cplx poly_eval(const std::vector<std::int64_t>& f, cplx z) {
    cplx acc(0.0, 0.0);
    for (size_t i = f.size(); i-- > 0;) acc = acc * z + static_cast<double>(f[i]);
    return acc;
}

double poly_eval(const std::vector<std::int64_t>& f, double x) {
    double acc = 0.0;
    for (size_t i = f.size(); i-- > 0;) acc = acc * x + static_cast<double>(f[i]);
    return acc;
}

std::vector<std::int64_t> poly_derivative(const std::vector<std::int64_t>& f) {
    std::vector<std::int64_t> d;
    for (size_t i = 1; i < f.size(); ++i)
        d.push_back(checked_mul(f[i], static_cast<std::int64_t>(i)));
    if (d.empty()) d.push_back(0);
    return d;
}

__int128 poly_eval_exact(const std::vector<std::int64_t>& f, std::int64_t x) {
    __int128 acc = 0;
    for (size_t i = f.size(); i-- > 0;) acc = acc * x + f[i];
    return acc;
}

// Resultant of f and g via the Sylvester matrix; zero iff common root.
std::int64_t sylvester_resultant(const std::vector<std::int64_t>& f,
                                 const std::vector<std::int64_t>& g) {
    const int m = static_cast<int>(f.size()) - 1;
    const int n = static_cast<int>(g.size()) - 1;
    if (m <= 0 || n <= 0) return 1;
    IntMat s = IntMat::Zero(m + n, m + n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c <= m; ++c) s(r, r + c) = f[static_cast<size_t>(m - c)];
    for (int r = 0; r < m; ++r)
        for (int c = 0; c <= n; ++c) s(n + r, r + c) = g[static_cast<size_t>(n - c)];
    return det_exact(s);
}

// Exact division check: does x^2 + bx + c divide f?
bool quadratic_divides(const std::vector<std::int64_t>& f, std::int64_t b, std::int64_t c) {
    std::vector<__int128> r(f.begin(), f.end());
    const int deg = static_cast<int>(f.size()) - 1;
    for (int i = deg; i >= 2; --i) {
        __int128 q = r[static_cast<size_t>(i)];
        r[static_cast<size_t>(i)] = 0;
        r[static_cast<size_t>(i - 1)] -= q * b;
        r[static_cast<size_t>(i - 2)] -= q * c;
        const __int128 lim = static_cast<__int128>(1) << 100;
        if (r[static_cast<size_t>(i - 1)] > lim || r[static_cast<size_t>(i - 1)] < -lim) return false;
    }
    return r[0] == 0 && r[1] == 0;
}

void check_irreducible(const std::vector<std::int64_t>& f) {
    const int deg = static_cast<int>(f.size()) - 1;
    if (deg == 1) return;

    // squarefree: resultant(f, f') != 0
    if (sylvester_resultant(f, poly_derivative(f)) == 0)
        throw ValidationError("min_poly is not squarefree");

    // rational roots (monic, so candidates divide the constant term)
    std::int64_t a0 = f[0];
    if (a0 == 0) throw ValidationError("min_poly divisible by x");
    std::int64_t abs0 = std::llabs(a0);
    for (std::int64_t d = 1; d * d <= abs0; ++d) {
        if (abs0 % d != 0) continue;
        for (std::int64_t r : {d, -d, abs0 / d, -abs0 / d})
            if (poly_eval_exact(f, r) == 0)
                throw ValidationError("min_poly has rational root, field not simple");
    }

    if (deg >= 4) {
        // search for a monic quadratic factor; complete for degree 4 and 5
        double norm2 = 0;
        for (auto a : f) norm2 += static_cast<double>(a) * static_cast<double>(a);
        std::int64_t bound = static_cast<std::int64_t>(4.0 * std::sqrt(norm2)) + 1;
        if (bound > 2000)
            throw ValidationError("min_poly coefficients too large for irreducibility check");
        for (std::int64_t b = -bound; b <= bound; ++b)
            for (std::int64_t c = -bound; c <= bound; ++c)
                if (quadratic_divides(f, b, c))
                    throw ValidationError("min_poly has a quadratic factor");
        if (deg >= 6)
            throw ValidationError("degree > 5 presets are not supported");
    }
}

// ---- roots ------------------------------------------------------------------

cplx newton_refine(const std::vector<std::int64_t>& f, const std::vector<std::int64_t>& df,
                   cplx z) {
    for (int it = 0; it < 100; ++it) {
        cplx fv = poly_eval(f, z);
        cplx dv = poly_eval(df, z);
        if (std::abs(dv) < 1e-300) break;
        cplx step = fv / dv;
        z -= step;
        if (std::abs(step) < 1e-16 * (1.0 + std::abs(z))) break;
    }
    return z;
}

double newton_refine_real(const std::vector<std::int64_t>& f, const std::vector<std::int64_t>& df,
                          double x) {
    for (int it = 0; it < 100; ++it) {
        double fv = poly_eval(f, x);
        double dv = poly_eval(df, x);
        if (std::fabs(dv) < 1e-300) break;
        double step = fv / dv;
        x -= step;
        if (std::fabs(step) < 1e-16 * (1.0 + std::fabs(x))) break;
    }
    return x;
}

std::vector<PlaceInfo> find_places(const std::vector<std::int64_t>& f) {
    const int deg = static_cast<int>(f.size()) - 1;
    auto df = poly_derivative(f);

    Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(deg, deg);
    for (int i = 0; i < deg; ++i) comp(i, deg - 1) = -static_cast<double>(f[static_cast<size_t>(i)]);
    for (int i = 1; i < deg; ++i) comp(i, i - 1) = 1.0;

    Eigen::VectorXcd eig;
    if (deg == 1) {
        eig.resize(1);
        eig(0) = cplx(-static_cast<double>(f[0]), 0.0);
    } else {
        Eigen::EigenSolver<Eigen::MatrixXd> solver(comp, /*computeEigenvectors=*/false);
        eig = solver.eigenvalues();
    }

    std::vector<PlaceInfo> places;
    int complex_dropped = 0;
    for (int i = 0; i < deg; ++i) {
        cplx z = newton_refine(f, df, eig(i));
        if (std::abs(z.imag()) < 1e-8 * (1.0 + std::abs(z))) {
            double x = newton_refine_real(f, df, z.real());
            if (std::fabs(poly_eval(f, x)) > 1e-10)
                throw NumericError("root refinement failed to converge (real place)");
            places.push_back({PlaceKind::real, 1, cplx(x, 0.0)});
        } else if (z.imag() > 0) {
            if (std::abs(poly_eval(f, z)) > 1e-10)
                throw NumericError("root refinement failed to converge (complex place)");
            places.push_back({PlaceKind::complex_pair, 2, z});
        } else {
            ++complex_dropped;
        }
    }

    int r2 = 0;
    for (auto& p : places)
        if (p.kind == PlaceKind::complex_pair) ++r2;
    if (r2 != complex_dropped || static_cast<int>(places.size()) + complex_dropped != deg)
        throw NumericError("conjugate pairing of roots failed");

    std::sort(places.begin(), places.end(), [](const PlaceInfo& a, const PlaceInfo& b) {
        if (a.kind != b.kind) return a.kind == PlaceKind::real;
        if (a.kind == PlaceKind::real) return a.root.real() > b.root.real();
        if (a.root.imag() != b.root.imag()) return a.root.imag() < b.root.imag();
        return a.root.real() < b.root.real();
    });
    return places;
}

// ---- structure table helpers ------------------------------------------------

// coords of b_i * b_j read off the table
void table_mul(const std::vector<std::int64_t>& table, int deg, const Coords& x,
               const Coords& y, Coords& out) {
    out.setZero(deg);
    for (int i = 0; i < deg; ++i) {
        if (x[i] == 0) continue;
        for (int j = 0; j < deg; ++j) {
            if (y[j] == 0) continue;
            std::int64_t xy = checked_mul(x[i], y[j]);
            const std::int64_t* cell = table.data() + (static_cast<size_t>(i) * deg + j) * deg;
            for (int k = 0; k < deg; ++k)
                if (cell[k] != 0) out[k] = checked_add(out[k], checked_mul(xy, cell[k]));
        }
    }
}

std::vector<std::int64_t> power_basis_table(const std::vector<std::int64_t>& f) {
    const int deg = static_cast<int>(f.size()) - 1;
    // powers of the generator reduced mod f, up to exponent 2deg-2
    std::vector<std::vector<std::int64_t>> pw(static_cast<size_t>(2 * deg - 1),
                                              std::vector<std::int64_t>(static_cast<size_t>(deg), 0));
    for (int k = 0; k < deg; ++k) pw[static_cast<size_t>(k)][static_cast<size_t>(k)] = 1;
    for (int k = deg; k <= 2 * deg - 2; ++k) {
        const auto& prev = pw[static_cast<size_t>(k - 1)];
        auto& cur = pw[static_cast<size_t>(k)];
        std::int64_t carry = prev[static_cast<size_t>(deg - 1)];
        for (int j = deg - 1; j >= 1; --j)
            cur[static_cast<size_t>(j)] =
                checked_add(prev[static_cast<size_t>(j - 1)],
                            -checked_mul(carry, f[static_cast<size_t>(j)]));
        cur[0] = -checked_mul(carry, f[0]);
    }
    std::vector<std::int64_t> table(static_cast<size_t>(deg) * deg * deg, 0);
    for (int i = 0; i < deg; ++i)
        for (int j = 0; j < deg; ++j)
            for (int k = 0; k < deg; ++k)
                table[(static_cast<size_t>(i) * deg + j) * deg + k] =
                    pw[static_cast<size_t>(i + j)][static_cast<size_t>(k)];
    return table;
}

void check_table(const std::vector<std::int64_t>& table, int deg) {
    if (static_cast<int>(table.size()) != deg * deg * deg)
        throw ValidationError("mult_table must have degree^3 entries");
    auto cell = [&](int i, int j, int k) {
        return table[(static_cast<size_t>(i) * deg + j) * deg + k];
    };
    for (int j = 0; j < deg; ++j)
        for (int k = 0; k < deg; ++k)
            if (cell(0, j, k) != (j == k ? 1 : 0))
                throw ValidationError("mult_table: first basis element must be the identity");
    for (int i = 0; i < deg; ++i)
        for (int j = 0; j < deg; ++j)
            for (int k = 0; k < deg; ++k)
                if (cell(i, j, k) != cell(j, i, k))
                    throw ValidationError("mult_table is not commutative");
    // associativity on basis triples
    Coords t1(deg), t2(deg), lhs(deg), rhs(deg);
    for (int i = 0; i < deg; ++i)
        for (int j = 0; j < deg; ++j)
            for (int k = 0; k < deg; ++k) {
                Coords ei = Coords::Zero(deg), ej = Coords::Zero(deg), ek = Coords::Zero(deg);
                ei[i] = 1;
                ej[j] = 1;
                ek[k] = 1;
                table_mul(table, deg, ei, ej, t1);
                table_mul(table, deg, t1, ek, lhs);
                table_mul(table, deg, ej, ek, t2);
                table_mul(table, deg, ei, t2, rhs);
                if (lhs != rhs) throw ValidationError("mult_table is not associative");
            }
}

} // namespace

// ---- small element utilities ------------------------------------------------

bool operator==(const AlgInt& a, const AlgInt& b) {
    return a.c.size() == b.c.size() && a.c == b.c;
}

bool lex_less(const AlgInt& a, const AlgInt& b) {
    for (int i = 0; i < a.c.size(); ++i) {
        if (a.c[i] != b.c[i]) return a.c[i] < b.c[i];
    }
    return false;
}

AlgInt make_elem(const FieldHandle& field, const std::vector<std::int64_t>& coords) {
    if (static_cast<int>(coords.size()) != field.degree)
        throw ValidationError("element coordinate count does not match field degree");
    AlgInt x;
    x.c.resize(field.degree);
    for (int i = 0; i < field.degree; ++i) x.c[i] = coords[static_cast<size_t>(i)];
    return x;
}

AlgInt zero_elem(const FieldHandle& field) {
    AlgInt x;
    x.c = Coords::Zero(field.degree);
    return x;
}

AlgInt one_elem(const FieldHandle& field) {
    AlgInt x = zero_elem(field);
    x.c[0] = 1;
    return x;
}

AlgInt add(const FieldHandle&, const AlgInt& x, const AlgInt& y) {
    AlgInt r;
    r.c = x.c + y.c;
    return r;
}

AlgInt sub(const FieldHandle&, const AlgInt& x, const AlgInt& y) {
    AlgInt r;
    r.c = x.c - y.c;
    return r;
}

AlgInt neg(const AlgInt& x) {
    AlgInt r;
    r.c = -x.c;
    return r;
}

AlgInt mul(const FieldHandle& field, const AlgInt& x, const AlgInt& y) {
    AlgInt r;
    r.c.resize(field.degree);
    Coords out;
    table_mul(field.mult_table, field.degree, x.c, y.c, out);
    r.c = out;
    return r;
}

bool is_zero(const AlgInt& x) {
    for (int i = 0; i < x.c.size(); ++i)
        if (x.c[i] != 0) return false;
    return true;
}

AlgInt pow_elem(const FieldHandle& field, const AlgInt& x, std::int64_t e) {
    if (e < 0) {
        AlgInt inv = unit_inverse(field, x);
        return pow_elem(field, inv, -e);
    }
    AlgInt acc = one_elem(field);
    AlgInt base = x;
    while (e > 0) {
        if (e & 1) acc = mul(field, acc, base);
        base = mul(field, base, base);
        e >>= 1;
    }
    return acc;
}

IntMat mult_matrix(const FieldHandle& field, const AlgInt& x) {
    const int deg = field.degree;
    IntMat m(deg, deg);
    Coords col(deg), ek(deg);
    for (int k = 0; k < deg; ++k) {
        ek.setZero();
        ek[k] = 1;
        table_mul(field.mult_table, deg, x.c, ek, col);
        for (int j = 0; j < deg; ++j) m(j, k) = col[j];
    }
    return m;
}

std::int64_t norm_exact(const FieldHandle& field, const AlgInt& x) {
    return std::llabs(det_exact(mult_matrix(field, x)));
}

AlgInt unit_inverse(const FieldHandle& field, const AlgInt& u) {
    IntMat m = mult_matrix(field, u);
    std::int64_t det = det_exact(m);
    if (det != 1 && det != -1) {
        std::ostringstream msg;
        msg << "unit_inverse: element has |N| = " << std::llabs(det) << ", not a unit";
        throw ValidationError(msg.str());
    }
    IntMat adj = adjugate(m);
    AlgInt r;
    r.c.resize(field.degree);
    for (int i = 0; i < field.degree; ++i) r.c[i] = det * adj(i, 0);
    return r;
}

bool ideals_coprime(const FieldHandle& field, const AlgInt& p, const AlgInt& q) {
    if (is_zero(p) || is_zero(q)) throw ValidationError("ideals_coprime: zero element");
    const int deg = field.degree;
    IntMat both(deg, 2 * deg);
    both.leftCols(deg) = mult_matrix(field, p);
    both.rightCols(deg) = mult_matrix(field, q);
    return column_lattice_index(both) == 1;
}

// ---- embeddings -------------------------------------------------------------

EmbedVec embed_element(const FieldHandle& field, const AlgInt& x) {
    const int np = field.num_places();
    EmbedVec v(np);
    for (int p = 0; p < np; ++p) {
        cplx acc(0, 0);
        for (int i = 0; i < field.degree; ++i)
            acc += static_cast<double>(x.c[i]) * field.basis_embeddings(p, i);
        if (field.places[static_cast<size_t>(p)].kind == PlaceKind::real) acc = cplx(acc.real(), 0.0);
        v(p) = acc;
    }
    return v;
}

EmbedVec embed_element(const FieldHandle& field, const KElem& x) {
    if (is_zero(x.den)) throw ValidationError("K element has zero denominator");
    EmbedVec n = embed_element(field, x.num);
    EmbedVec d = embed_element(field, x.den);
    EmbedVec r(n.size());
    for (int p = 0; p < n.size(); ++p) r(p) = n(p) / d(p);
    return r;
}

double house(const FieldHandle& field, const AlgInt& x) {
    EmbedVec v = embed_element(field, x);
    double h = 0;
    for (int p = 0; p < v.size(); ++p) h = std::max(h, std::abs(v(p)));
    return h;
}

double field_norm(const FieldHandle& field, const AlgInt& x) {
    if (is_zero(x)) return 0.0;
    EmbedVec v = embed_element(field, x);
    double n = 1.0;
    for (int p = 0; p < v.size(); ++p) {
        double a = std::abs(v(p));
        n *= (field.places[static_cast<size_t>(p)].d_nu == 2) ? a * a : a;
    }
    return n;
}

double field_norm(const FieldHandle& field, const KElem& x) {
    if (is_zero(x.den)) throw ValidationError("K element has zero denominator");
    if (is_zero(x.num)) return 0.0;
    return field_norm(field, x.num) / field_norm(field, x.den);
}

Eigen::VectorXd log_unit(const FieldHandle& field, const AlgInt& u) {
    double n = field_norm(field, u);
    if (std::fabs(n - 1.0) > 1e-9) {
        std::ostringstream msg;
        msg << "log_unit: |N| = " << n << " differs from 1 beyond 1e-9";
        throw ValidationError(msg.str());
    }
    EmbedVec v = embed_element(field, u);
    Eigen::VectorXd lg(field.num_places());
    for (int p = 0; p < v.size(); ++p)
        lg(p) = field.places[static_cast<size_t>(p)].d_nu * std::log(std::abs(v(p)));
    return lg;
}

double covolume_ok(const FieldHandle& field) { return field.covolume; }

// ---- build ------------------------------------------------------------------

FieldHandle build_field(const FieldPreset& preset) {
    FieldHandle f;
    f.name = preset.name;
    f.min_poly = preset.min_poly;

    if (f.min_poly.size() < 2) throw ValidationError("min_poly must have degree >= 1");
    if (f.min_poly.back() != 1) throw ValidationError("min_poly must be monic");
    f.degree = static_cast<int>(f.min_poly.size()) - 1;
    if (f.degree > kMaxDegree) throw ValidationError("field degree exceeds supported maximum");
    check_irreducible(f.min_poly);

    f.places = find_places(f.min_poly);
    for (auto& p : f.places)
        (p.kind == PlaceKind::real ? f.num_real : f.num_complex) += 1;
    if (f.num_real + 2 * f.num_complex != f.degree)
        throw NumericError("place signature does not add up to the degree");

    const int deg = f.degree;
    const int np = f.num_places();

    if (preset.power_basis) {
        f.mult_table = power_basis_table(f.min_poly);
        f.basis_embeddings.resize(np, deg);
        for (int p = 0; p < np; ++p) {
            cplx r = f.places[static_cast<size_t>(p)].root;
            cplx acc(1.0, 0.0);
            for (int i = 0; i < deg; ++i) {
                f.basis_embeddings(p, i) = acc;
                acc *= r;
            }
        }
    } else {
        f.mult_table = preset.mult_table;
        check_table(f.mult_table, deg);
        // second basis element must be a root of min_poly: check min_poly(M_b1) = 0 exactly
        FieldHandle tmp = f; // enough structure for mult_matrix
        AlgInt b1 = zero_elem(tmp);
        if (deg < 2) throw ValidationError("explicit mult_table needs degree >= 2");
        b1.c[1] = 1;
        IntMat m1 = mult_matrix(tmp, b1);
        IntMat acc = IntMat::Zero(deg, deg);
        for (size_t i = f.min_poly.size(); i-- > 0;) {
            IntMat next = m1 * acc; // entries stay small for supported presets
            for (int r = 0; r < deg; ++r) next(r, r) = checked_add(next(r, r), f.min_poly[i]);
            acc = next;
        }
        if (!acc.isZero())
            throw ValidationError("mult_table: second basis element is not a root of min_poly");

        // embeddings from left eigenvectors of the multiplication matrix
        Eigen::MatrixXcd m1t = m1.cast<cplx>().transpose();
        f.basis_embeddings.resize(np, deg);
        for (int p = 0; p < np; ++p) {
            cplx rho = f.places[static_cast<size_t>(p)].root;
            Eigen::MatrixXcd shifted = m1t - rho * Eigen::MatrixXcd::Identity(deg, deg);
            Eigen::JacobiSVD<Eigen::MatrixXcd> svd(shifted, Eigen::ComputeFullV);
            Eigen::VectorXcd w = svd.matrixV().col(deg - 1);
            if (std::abs(w(0)) < 1e-10)
                throw NumericError("embedding eigenvector has vanishing identity component");
            w /= w(0);
            for (int i = 0; i < deg; ++i) f.basis_embeddings(p, i) = w(i);
        }
        // ring-homomorphism sanity on basis products
        Coords prod(deg);
        for (int i = 0; i < deg; ++i)
            for (int j = 0; j < deg; ++j) {
                Coords ei = Coords::Zero(deg), ej = Coords::Zero(deg);
                ei[i] = 1;
                ej[j] = 1;
                table_mul(f.mult_table, deg, ei, ej, prod);
                for (int p = 0; p < np; ++p) {
                    cplx lhs = f.basis_embeddings(p, i) * f.basis_embeddings(p, j);
                    cplx rhs(0, 0);
                    for (int k = 0; k < deg; ++k)
                        rhs += static_cast<double>(prod[k]) * f.basis_embeddings(p, k);
                    if (std::abs(lhs - rhs) > 1e-8)
                        throw NumericError("embeddings do not respect the mult_table");
                }
            }
    }

    // real embedding matrix and covolume
    f.real_embedding.resize(deg, deg);
    int col = 0;
    for (int p = 0; p < np; ++p) {
        if (f.places[static_cast<size_t>(p)].kind == PlaceKind::real) {
            for (int i = 0; i < deg; ++i) f.real_embedding(i, col) = f.basis_embeddings(p, i).real();
            col += 1;
        } else {
            for (int i = 0; i < deg; ++i) {
                f.real_embedding(i, col) = f.basis_embeddings(p, i).real();
                f.real_embedding(i, col + 1) = f.basis_embeddings(p, i).imag();
            }
            col += 2;
        }
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(f.real_embedding);
    f.covolume = std::fabs(lu.determinant());
    if (f.covolume < 1e-10) throw NumericError("degenerate embedding matrix");
    f.real_embedding_inv = lu.inverse();

    // torsion subgroup
    if (preset.torsion_order < 1) throw ValidationError("torsion order must be >= 1");
    f.torsion_order = preset.torsion_order;
    f.torsion_gen = make_elem(f, preset.torsion_gen);
    AlgInt t = one_elem(f);
    bool saw_minus_one = false;
    AlgInt minus_one = neg(one_elem(f));
    for (int j = 0; j < f.torsion_order; ++j) {
        if (j > 0 && t == one_elem(f))
            throw ValidationError("torsion generator has smaller order than declared");
        f.torsion_orbit.push_back(t);
        if (t == minus_one) saw_minus_one = true;
        t = mul(f, t, f.torsion_gen);
    }
    if (!(t == one_elem(f)))
        throw ValidationError("torsion generator does not have the declared order");
    if (!saw_minus_one) throw ValidationError("torsion subgroup must contain -1");
    for (const auto& z : f.torsion_orbit) {
        EmbedVec v = embed_element(f, z);
        for (int p = 0; p < np; ++p)
            if (std::fabs(std::abs(v(p)) - 1.0) > 1e-9)
                throw ValidationError("torsion element does not have unit modulus");
    }

    // fundamental units
    f.unit_rank = f.num_real + f.num_complex - 1;
    if (static_cast<int>(preset.fundamental_units.size()) != f.unit_rank)
        throw ValidationError("fundamental unit count must equal the unit rank");
    f.unit_log.resize(np, f.unit_rank);
    for (int i = 0; i < f.unit_rank; ++i) {
        AlgInt u = make_elem(f, preset.fundamental_units[static_cast<size_t>(i)]);
        if (norm_exact(f, u) != 1)
            throw ValidationError("declared fundamental unit is not a unit");
        AlgInt inv = unit_inverse(f, u);
        if (!(mul(f, u, inv) == one_elem(f)))
            throw NumericError("unit inverse check failed");
        f.fundamental_units.push_back(u);
        f.fundamental_unit_invs.push_back(inv);
        Eigen::VectorXd lg = log_unit(f, u);
        if (std::fabs(lg.sum()) > 1e-9)
            throw NumericError("unit log vector does not lie in the trace-zero hyperplane");
        f.unit_log.col(i) = lg;
    }
    if (f.unit_rank > 0) {
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(f.unit_log, Eigen::ComputeThinU | Eigen::ComputeThinV);
        if (svd.singularValues()(f.unit_rank - 1) < 1e-9)
            throw ValidationError("fundamental unit log vectors are dependent");
        f.unit_log_pinv =
            (f.unit_log.transpose() * f.unit_log).inverse() * f.unit_log.transpose();
    } else {
        f.unit_log_pinv.resize(0, np);
    }

    return f;
}

// ---- enumeration ------------------------------------------------------------

void coeff_bounds(const FieldHandle& field, const std::vector<PlaceBox>& boxes,
                  Coords& lo, Coords& hi) {
    const int deg = field.degree;
    if (static_cast<int>(boxes.size()) != field.num_places())
        throw ValidationError("coeff_bounds: one box per place required");

    // real coordinate intervals in embedding space, ordered as the columns of
    // the real embedding matrix
    double vlo[kMaxDegree], vhi[kMaxDegree];
    int col = 0;
    for (int p = 0; p < field.num_places(); ++p) {
        const PlaceBox& b = boxes[static_cast<size_t>(p)];
        vlo[col] = b.re_lo;
        vhi[col] = b.re_hi;
        ++col;
        if (field.places[static_cast<size_t>(p)].kind == PlaceKind::complex_pair) {
            vlo[col] = b.im_lo;
            vhi[col] = b.im_hi;
            ++col;
        }
    }

    lo.resize(deg);
    hi.resize(deg);
    const Eigen::MatrixXd& binv = field.real_embedding_inv;
    for (int j = 0; j < deg; ++j) {
        // coords = (B^T)^{-1} v, so coordinate j pairs with column j of B^{-1}
        double mn = 0, mx = 0;
        for (int k = 0; k < deg; ++k) {
            double a = binv(k, j) * vlo[k];
            double b = binv(k, j) * vhi[k];
            mn += std::min(a, b);
            mx += std::max(a, b);
        }
        double margin = 1e-7 * (1.0 + std::max(std::fabs(mn), std::fabs(mx)));
        lo[j] = static_cast<std::int64_t>(std::ceil(mn - margin));
        hi[j] = static_cast<std::int64_t>(std::floor(mx + margin));
    }
}

std::int64_t box_cells(const Coords& lo, const Coords& hi, std::int64_t cap) {
    __int128 cells = 1;
    for (int i = 0; i < lo.size(); ++i) {
        if (hi[i] < lo[i]) return 0;
        cells *= static_cast<__int128>(hi[i] - lo[i] + 1);
        if (cells > cap) return cap + 1;
    }
    return static_cast<std::int64_t>(cells);
}

namespace {

std::vector<PlaceBox> house_boxes(const FieldHandle& field, double bound) {
    std::vector<PlaceBox> boxes(static_cast<size_t>(field.num_places()));
    for (auto& b : boxes) b = {-bound, bound, -bound, bound};
    return boxes;
}

void require_cells(const FieldHandle& field, const Coords& lo, const Coords& hi,
                   const EnumLimits& limits, const char* what) {
    std::int64_t cells = box_cells(lo, hi, limits.cell_cap);
    if (cells > limits.cell_cap) {
        std::ostringstream msg;
        msg << what << ": coefficient box for " << field.name << " exceeds cell cap "
            << limits.cell_cap << " (raise EnumLimits::cell_cap)";
        throw ResourceError(msg.str());
    }
}

} // namespace

std::vector<AlgInt> enumerate_bounded_integers(const FieldHandle& field, double bound,
                                               const EnumLimits& limits) {
    std::vector<AlgInt> out;
    if (bound < 0) return out;
    Coords lo, hi;
    coeff_bounds(field, house_boxes(field, bound), lo, hi);
    require_cells(field, lo, hi, limits, "enumerate_bounded_integers");

    const double tol = bound * (1.0 + 1e-9) + 1e-12;
    const int np = field.num_places();
    walk_coords(lo, hi, [&](const Coords& c) {
        for (int p = 0; p < np; ++p) {
            cplx acc(0, 0);
            for (int i = 0; i < field.degree; ++i)
                acc += static_cast<double>(c[i]) * field.basis_embeddings(p, i);
            if (std::abs(acc) > tol) return;
        }
        out.push_back(AlgInt{c});
    });
    // walk order is already lexicographic; keep the sort as a guarantee
    std::sort(out.begin(), out.end(), lex_less);
    return out;
}

std::vector<AlgInt> enumerate_units(const FieldHandle& field, double bound) {
    std::vector<AlgInt> out;
    if (bound < 1.0 - 1e-9) return out;
    const int np = field.num_places();
    const double log_h = std::log(std::max(bound, 1.0));

    // log coordinates of any unit below the house bound live in this box
    Eigen::VectorXd box_lo(np), box_hi(np);
    for (int p = 0; p < np; ++p) {
        int d = field.places[static_cast<size_t>(p)].d_nu;
        box_hi(p) = d * log_h + 1e-9;
        box_lo(p) = -(field.degree - d) * log_h - 1e-9;
    }

    std::vector<std::int64_t> klo(static_cast<size_t>(field.unit_rank));
    std::vector<std::int64_t> khi(static_cast<size_t>(field.unit_rank));
    for (int i = 0; i < field.unit_rank; ++i) {
        double mn = 0, mx = 0;
        for (int p = 0; p < np; ++p) {
            double a = field.unit_log_pinv(i, p) * box_lo(p);
            double b = field.unit_log_pinv(i, p) * box_hi(p);
            mn += std::min(a, b);
            mx += std::max(a, b);
        }
        klo[static_cast<size_t>(i)] = static_cast<std::int64_t>(std::floor(mn - 1e-6));
        khi[static_cast<size_t>(i)] = static_cast<std::int64_t>(std::ceil(mx + 1e-6));
    }

    const double tol = bound * (1.0 + 1e-9) + 1e-12;
    std::vector<std::int64_t> k(static_cast<size_t>(field.unit_rank));
    auto emit = [&](const AlgInt& u) {
        for (const auto& z : field.torsion_orbit) {
            AlgInt cand = mul(field, z, u);
            if (house(field, cand) <= tol) out.push_back(cand);
        }
    };
    std::function<void(int, const AlgInt&)> rec = [&](int i, const AlgInt& acc) {
        if (i == field.unit_rank) {
            emit(acc);
            return;
        }
        for (std::int64_t e = klo[static_cast<size_t>(i)]; e <= khi[static_cast<size_t>(i)]; ++e) {
            const AlgInt& base = e >= 0 ? field.fundamental_units[static_cast<size_t>(i)]
                                        : field.fundamental_unit_invs[static_cast<size_t>(i)];
            AlgInt p = pow_elem(field, base, std::llabs(e));
            rec(i + 1, mul(field, acc, p));
        }
    };
    rec(0, one_elem(field));

    std::sort(out.begin(), out.end(), lex_less);
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

namespace {

// max over places of exp(B_nu / d_nu) with B_nu the l1 row sums of the unit
// log matrix; house headroom needed to reach the reduced associate
double reduction_slack(const FieldHandle& field) {
    double s = 1.0;
    for (int p = 0; p < field.num_places(); ++p) {
        double b = 0;
        for (int i = 0; i < field.unit_rank; ++i) b += std::fabs(field.unit_log(p, i));
        s = std::max(s, std::exp(b / field.places[static_cast<size_t>(p)].d_nu));
    }
    return s;
}

} // namespace

AlgInt canonical_associate(const FieldHandle& field, const AlgInt& x) {
    if (is_zero(x)) return x;
    const int np = field.num_places();
    const std::int64_t n = norm_exact(field, x);
    const double log_n = std::log(static_cast<double>(n));
    const double cap =
        std::exp(log_n / field.degree) * reduction_slack(field) * (1.0 + 1e-7) + 1e-7;
    const double log_cap = std::log(cap);

    AlgInt best = x;
    bool have = false;
    auto consider = [&](const AlgInt& u_times_x) {
        for (const auto& z : field.torsion_orbit) {
            AlgInt cand = mul(field, z, u_times_x);
            if (house(field, cand) > cap * (1.0 + 1e-12)) continue;
            if (!have || lex_less(cand, best)) {
                best = cand;
                have = true;
            }
        }
    };

    if (field.unit_rank == 0) {
        consider(x);
    } else {
        // exponent box for unit multipliers keeping u*x under the house cap
        Eigen::VectorXd xlog(np);
        EmbedVec v = embed_element(field, x);
        for (int p = 0; p < np; ++p)
            xlog(p) = field.places[static_cast<size_t>(p)].d_nu * std::log(std::abs(v(p)));
        Eigen::VectorXd box_lo(np), box_hi(np);
        for (int p = 0; p < np; ++p) {
            int d = field.places[static_cast<size_t>(p)].d_nu;
            box_hi(p) = d * log_cap - xlog(p) + 1e-9;
            box_lo(p) = (log_n - (field.degree - d) * log_cap) - xlog(p) - 1e-9;
        }
        std::vector<std::int64_t> klo(static_cast<size_t>(field.unit_rank));
        std::vector<std::int64_t> khi(static_cast<size_t>(field.unit_rank));
        for (int i = 0; i < field.unit_rank; ++i) {
            double mn = 0, mx = 0;
            for (int p = 0; p < np; ++p) {
                double a = field.unit_log_pinv(i, p) * box_lo(p);
                double b = field.unit_log_pinv(i, p) * box_hi(p);
                mn += std::min(a, b);
                mx += std::max(a, b);
            }
            klo[static_cast<size_t>(i)] = static_cast<std::int64_t>(std::floor(mn - 1e-6));
            khi[static_cast<size_t>(i)] = static_cast<std::int64_t>(std::ceil(mx + 1e-6));
        }
        std::function<void(int, const AlgInt&)> rec = [&](int i, const AlgInt& acc) {
            if (i == field.unit_rank) {
                consider(acc);
                return;
            }
            for (std::int64_t e = klo[static_cast<size_t>(i)]; e <= khi[static_cast<size_t>(i)];
                 ++e) {
                const AlgInt& base = e >= 0 ? field.fundamental_units[static_cast<size_t>(i)]
                                            : field.fundamental_unit_invs[static_cast<size_t>(i)];
                AlgInt p = pow_elem(field, base, std::llabs(e));
                rec(i + 1, mul(field, acc, p));
            }
        };
        rec(0, x);
    }

    if (!have) throw NumericError("canonical_associate: reduction produced no candidate");
    return best;
}

PrincipalIdealList principal_ideals(const FieldHandle& field, double norm_cap,
                                    const EnumLimits& limits) {
    PrincipalIdealList list;
    if (norm_cap < 1.0) return list;

    const double bound =
        std::pow(norm_cap, 1.0 / field.degree) * reduction_slack(field) * (1.0 + 1e-7) + 1e-7;
    Coords lo, hi;
    coeff_bounds(field, house_boxes(field, bound), lo, hi);
    require_cells(field, lo, hi, limits, "principal_ideals");

    const double tol = bound * (1.0 + 1e-9) + 1e-12;
    const int np = field.num_places();
    const auto cap_n = static_cast<std::int64_t>(std::floor(norm_cap * (1.0 + 1e-12)));

    std::vector<std::pair<std::vector<std::int64_t>, std::int64_t>> reps;
    walk_coords(lo, hi, [&](const Coords& c) {
        bool nonzero = false;
        for (int i = 0; i < field.degree; ++i)
            if (c[i] != 0) nonzero = true;
        if (!nonzero) return;
        for (int p = 0; p < np; ++p) {
            cplx acc(0, 0);
            for (int i = 0; i < field.degree; ++i)
                acc += static_cast<double>(c[i]) * field.basis_embeddings(p, i);
            if (std::abs(acc) > tol) return;
        }
        AlgInt x{c};
        std::int64_t n = norm_exact(field, x);
        if (n < 1 || n > cap_n) return;
        AlgInt can = canonical_associate(field, x);
        std::vector<std::int64_t> key(static_cast<size_t>(field.degree));
        for (int i = 0; i < field.degree; ++i) key[static_cast<size_t>(i)] = can.c[i];
        reps.emplace_back(std::move(key), n);
    });

    std::sort(reps.begin(), reps.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second < b.second;
        return a.first < b.first;
    });
    reps.erase(std::unique(reps.begin(), reps.end()), reps.end());

    list.gens.reserve(reps.size());
    list.norms.reserve(reps.size());
    for (auto& [key, n] : reps) {
        list.gens.push_back(make_elem(field, key));
        list.norms.push_back(n);
    }
    return list;
}

std::int64_t count_principal_ideals(const FieldHandle& field, double s,
                                    const EnumLimits& limits) {
    return static_cast<std::int64_t>(principal_ideals(field, s, limits).norms.size());
}

double zeta_partial(const FieldHandle& field, double s, double cap, const EnumLimits& limits) {
    if (s <= 1.0) throw ValidationError("zeta_partial requires exponent s > 1");
    PrincipalIdealList list = principal_ideals(field, cap, limits);
    double acc = 0.0;
    for (size_t i = list.norms.size(); i-- > 0;)
        acc += std::pow(static_cast<double>(list.norms[i]), -s);
    return acc;
}

} // namespace nflab
