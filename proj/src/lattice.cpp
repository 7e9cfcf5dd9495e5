#include "nflab/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace nflab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_spec(const LatticeSpec& spec) {
    if (spec.field == nullptr) throw ValidationError("lattice: missing field handle");
    if (spec.m < 1 || spec.n < 1) throw ValidationError("lattice: block sizes must be positive");
    const int P = spec.field->num_places();
    if (static_cast<int>(spec.theta.size()) != P)
        throw ValidationError("lattice: one theta block per place required");
    for (int v = 0; v < P; ++v) {
        const Eigen::MatrixXcd& th = spec.theta[static_cast<std::size_t>(v)];
        if (th.rows() != spec.m || th.cols() != spec.n)
            throw ValidationError("lattice: theta block must be m x n");
        for (int i = 0; i < spec.m; ++i)
            for (int j = 0; j < spec.n; ++j) {
                std::complex<double> z = th(i, j);
                if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
                    throw ValidationError("lattice: theta entries must be finite");
                if (spec.field->places[static_cast<std::size_t>(v)].kind == PlaceKind::real &&
                    std::abs(z.imag()) >= 1e-12)
                    throw ValidationError("lattice: theta at a real place must be real");
            }
    }
}

void check_scheme_shape(const LatticeSpec& spec, const WeightScheme& w) {
    validate_weights(*spec.field, w);
    if (w.m() != spec.m || w.n() != spec.n)
        throw ValidationError("lattice: weight scheme blocks must match (m, n)");
}

// Conservative integer cover of one lattice coordinate from per-place discs
// |value + center| < radius; throws when a disc is degenerate or enormous.
void component_cover(const FieldHandle& f, const Eigen::VectorXcd& center,
                     const Eigen::VectorXd& radius, const EnumLimits& limits, Coords& lo,
                     Coords& hi) {
    const int P = f.num_places();
    std::vector<PlaceBox> boxes(static_cast<std::size_t>(P));
    for (int v = 0; v < P; ++v) {
        double r = radius[v];
        if (!(r >= 0.0) || r > 1e12)
            throw ResourceError("enumeration: per-place window larger than 1e12");
        PlaceBox& b = boxes[static_cast<std::size_t>(v)];
        b.re_lo = -center[v].real() - r;
        b.re_hi = -center[v].real() + r;
        b.im_lo = -center[v].imag() - r;
        b.im_hi = -center[v].imag() + r;
    }
    coeff_bounds(f, boxes, lo, hi);
    if (box_cells(lo, hi, limits.cell_cap) > limits.cell_cap)
        throw ResourceError("enumeration: coefficient box exceeds the cell cap");
}

struct ApproximateEnumerator {
    const LatticeSpec& spec;
    const FieldHandle& f;
    const WeightScheme& w;
    double log_c;
    double y_lo, y_hi;
    const TranslationVec* u;
    const EnumLimits& limits;
    const std::function<void(const ApproximateRecord&)>& emit;

    int P;
    std::vector<Coords> q_lo, q_hi, p_lo, p_hi;
    std::vector<AlgInt> q_cur, p_cur;
    Eigen::MatrixXcd y_pure, y_full, x_center, x_full;
    double ly = 0.0;

    ApproximateEnumerator(const LatticeSpec& s, const WeightScheme& ws, double logc, double ylo,
                          double yhi, const TranslationVec* trans, const EnumLimits& lims,
                          const std::function<void(const ApproximateRecord&)>& cb)
        : spec(s),
          f(*s.field),
          w(ws),
          log_c(logc),
          y_lo(ylo),
          y_hi(yhi),
          u(trans),
          limits(lims),
          emit(cb),
          P(f.num_places()),
          q_lo(s.n),
          q_hi(s.n),
          p_lo(s.m),
          p_hi(s.m),
          q_cur(s.n),
          p_cur(s.m),
          y_pure(s.n, P),
          y_full(s.n, P),
          x_center(s.m, P),
          x_full(s.m, P) {
        for (int j = 0; j < spec.n; ++j) {
            Eigen::VectorXcd center = Eigen::VectorXcd::Zero(P);
            Eigen::VectorXd radius(P);
            for (int v = 0; v < P; ++v) {
                double r = std::exp(y_hi * w.b(j, v));
                if (u) r += std::abs(u->u_y(j, v));
                radius[v] = r;
            }
            component_cover(f, center, radius, limits, q_lo[j], q_hi[j]);
        }
    }

    void run() { q_level(0); }

    void q_level(int j) {
        if (j == spec.n) {
            q_leaf();
            return;
        }
        walk_coords(q_lo[j], q_hi[j], [&](const Coords& cq) {
            q_cur[j].c = cq;
            EmbedVec e = embed_element(f, q_cur[j]);
            for (int v = 0; v < P; ++v) {
                y_pure(j, v) = e[v];
                y_full(j, v) = u ? e[v] + u->u_y(j, v) : e[v];
            }
            q_level(j + 1);
        });
    }

    void q_leaf() {
        ly = log_quasi_norm(y_full, w.b);
        if (!(ly >= y_lo) || !(ly < y_hi)) return;

        for (int i = 0; i < spec.m; ++i) {
            Eigen::VectorXcd center(P);
            Eigen::VectorXd radius(P);
            for (int v = 0; v < P; ++v) {
                std::complex<double> acc = u ? u->u_x(i, v) : std::complex<double>(0.0);
                for (int j = 0; j < spec.n; ++j)
                    acc += spec.theta[static_cast<std::size_t>(v)](i, j) * y_pure(j, v);
                x_center(i, v) = acc;
                center[v] = acc;
                radius[v] = std::exp(w.a(i, v) * (log_c - ly));
            }
            component_cover(f, center, radius, limits, p_lo[i], p_hi[i]);
        }
        p_level(0);
    }

    void p_level(int i) {
        if (i == spec.m) {
            p_leaf();
            return;
        }
        walk_coords(p_lo[i], p_hi[i], [&](const Coords& cp) {
            p_cur[i].c = cp;
            EmbedVec e = embed_element(f, p_cur[i]);
            for (int v = 0; v < P; ++v) x_full(i, v) = x_center(i, v) + e[v];
            p_level(i + 1);
        });
    }

    void p_leaf() {
        double lx = log_quasi_norm(x_full, w.a);
        if (lx != -kInf && !(lx + ly < log_c)) return;

        ApproximateRecord rec;
        rec.p.reserve(static_cast<std::size_t>(spec.m));
        for (int i = 0; i < spec.m; ++i) rec.p.push_back(neg(p_cur[i]));
        rec.q = q_cur;
        rec.point.x = x_full;
        rec.point.y = y_full;
        rec.value = lx == -kInf ? 0.0 : std::exp(lx + ly);
        rec.q_size = std::exp(ly);
        emit(rec);
    }
};

bool coords_vec_less(const std::vector<AlgInt>& a, const std::vector<AlgInt>& b) {
    for (std::size_t k = 0; k < a.size(); ++k) {
        if (lex_less(a[k], b[k])) return true;
        if (lex_less(b[k], a[k])) return false;
    }
    return false;
}

} // namespace

LatticeSpec make_lattice(const FieldHandle& field, int m, int n,
                         std::vector<Eigen::MatrixXcd> theta) {
    LatticeSpec spec;
    spec.field = &field;
    spec.m = m;
    spec.n = n;
    spec.theta = std::move(theta);
    check_spec(spec);
    return spec;
}

LatticeSpec zero_theta_lattice(const FieldHandle& field, int m, int n) {
    std::vector<Eigen::MatrixXcd> theta(static_cast<std::size_t>(field.num_places()),
                                        Eigen::MatrixXcd::Zero(m, n));
    return make_lattice(field, m, n, std::move(theta));
}

Eigen::MatrixXcd random_fundamental_block(const FieldHandle& field, int rows, RngStream& rng) {
    const int P = field.num_places();
    Eigen::MatrixXcd block = Eigen::MatrixXcd::Zero(rows, P);
    for (int r = 0; r < rows; ++r)
        for (int k = 0; k < field.degree; ++k) {
            double uk = rng.uniform01();
            for (int v = 0; v < P; ++v) block(r, v) += uk * field.basis_embeddings(v, k);
        }
    return block;
}

LatticeSpec random_theta_lattice(const FieldHandle& field, int m, int n, RngStream& rng) {
    const int P = field.num_places();
    std::vector<Eigen::MatrixXcd> theta(static_cast<std::size_t>(P),
                                        Eigen::MatrixXcd::Zero(m, n));
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < field.degree; ++k) {
                double uk = rng.uniform01();
                for (int v = 0; v < P; ++v)
                    theta[static_cast<std::size_t>(v)](i, j) += uk * field.basis_embeddings(v, k);
            }
    LatticeSpec spec;
    spec.field = &field;
    spec.m = m;
    spec.n = n;
    spec.theta = std::move(theta);
    check_spec(spec);
    return spec;
}

KSVec lattice_point(const LatticeSpec& spec, const std::vector<AlgInt>& p,
                    const std::vector<AlgInt>& q) {
    check_spec(spec);
    if (static_cast<int>(p.size()) != spec.m || static_cast<int>(q.size()) != spec.n)
        throw ValidationError("lattice_point: coordinate vectors must have lengths (m, n)");
    const FieldHandle& f = *spec.field;
    const int P = f.num_places();
    KSVec out;
    out.x.resize(spec.m, P);
    out.y.resize(spec.n, P);
    for (int j = 0; j < spec.n; ++j) {
        EmbedVec e = embed_element(f, q[static_cast<std::size_t>(j)]);
        for (int v = 0; v < P; ++v) out.y(j, v) = e[v];
    }
    for (int i = 0; i < spec.m; ++i) {
        EmbedVec e = embed_element(f, p[static_cast<std::size_t>(i)]);
        for (int v = 0; v < P; ++v) {
            std::complex<double> acc = e[v];
            for (int j = 0; j < spec.n; ++j)
                acc += spec.theta[static_cast<std::size_t>(v)](i, j) * out.y(j, v);
            out.x(i, v) = acc;
        }
    }
    return out;
}

void for_each_approximate(const LatticeSpec& spec, const WeightScheme& weights, double c,
                          double y_log_lo, double y_log_hi, const TranslationVec* translation,
                          const EnumLimits& limits,
                          const std::function<void(const ApproximateRecord&)>& emit) {
    check_spec(spec);
    check_scheme_shape(spec, weights);
    if (!(c >= 0.0) || !std::isfinite(c))
        throw ValidationError("enumeration: c must be a finite nonnegative real");
    if (!std::isfinite(y_log_lo) || !std::isfinite(y_log_hi))
        throw ValidationError("enumeration: the y window must be finite on both sides");
    if (translation) {
        if (translation->u_x.rows() != spec.m || translation->u_x.cols() != spec.field->num_places() ||
            translation->u_y.rows() != spec.n || translation->u_y.cols() != spec.field->num_places())
            throw ValidationError("enumeration: translation blocks must match (m, n) x places");
    }
    if (c == 0.0 || !(y_log_lo < y_log_hi)) return;

    ApproximateEnumerator en(spec, weights, std::log(c), y_log_lo, y_log_hi, translation, limits,
                             emit);
    en.run();
}

std::vector<ApproximateRecord> enumerate_lattice_points(const LatticeSpec& spec,
                                                        const RegionSpec& region,
                                                        const WeightScheme& weights,
                                                        const EnumLimits& limits) {
    validate_region(region);
    if (region.kind == RegionSpec::Kind::F)
        throw ValidationError("enumeration: region without a lower y bound is unbounded");

    std::vector<ApproximateRecord> out;
    for_each_approximate(spec, weights, region.c, 0.0, region.T, nullptr, limits,
                         [&](const ApproximateRecord& rec) { out.push_back(rec); });

    if (region.kind == RegionSpec::Kind::E_AB) {
        out.erase(std::remove_if(out.begin(), out.end(),
                                 [&](const ApproximateRecord& rec) {
                                     return !region_membership(*spec.field, region, weights,
                                                               rec.point);
                                 }),
                  out.end());
    }

    std::sort(out.begin(), out.end(), [](const ApproximateRecord& a, const ApproximateRecord& b) {
        double ha = a.point.y.cwiseAbs().maxCoeff();
        double hb = b.point.y.cwiseAbs().maxCoeff();
        if (ha != hb) return ha < hb;
        if (coords_vec_less(a.q, b.q)) return true;
        if (coords_vec_less(b.q, a.q)) return false;
        return coords_vec_less(a.p, b.p);
    });
    return out;
}

KSVec apply_flow(const FieldHandle& field, const FlowParams& flow, const KSVec& v) {
    validate_weights(field, flow.weights);
    if (v.x.rows() != flow.weights.m() || v.y.rows() != flow.weights.n() ||
        v.x.cols() != field.num_places() || v.y.cols() != field.num_places())
        throw ValidationError("apply_flow: point blocks must match the weight scheme");
    KSVec out;
    out.x = v.x;
    out.y = v.y;
    for (int i = 0; i < v.x.rows(); ++i)
        for (int p = 0; p < v.x.cols(); ++p)
            out.x(i, p) *= std::exp(flow.t * flow.weights.a(i, p));
    for (int j = 0; j < v.y.rows(); ++j)
        for (int p = 0; p < v.y.cols(); ++p)
            out.y(j, p) *= std::exp(-flow.t * flow.weights.b(j, p));
    return out;
}

Eigen::VectorXd flow_place_determinants(const FieldHandle& field, const FlowParams& flow) {
    validate_weights(field, flow.weights);
    const int P = field.num_places();
    Eigen::VectorXd dets(P);
    for (int v = 0; v < P; ++v) {
        double rate = flow.weights.a.col(v).sum() - flow.weights.b.col(v).sum();
        dets[v] = std::exp(flow.t * field.places[static_cast<std::size_t>(v)].d_nu * rate);
    }
    return dets;
}

double phi_covolume(const FieldHandle& field, int d, const AlgInt& p, const AlgInt& q) {
    if (d < 1) throw ValidationError("phi_covolume: dimension must be positive");
    if (is_zero(p) || is_zero(q)) throw ValidationError("phi_covolume: p and q must be nonzero");
    if (!ideals_coprime(field, p, q))
        throw ValidationError("phi_covolume: (p) and (q) must be coprime ideals");

    std::int64_t norm = norm_exact(field, q);
    std::int64_t power = 1;
    for (int k = 0; k < d; ++k) power = checked_mul(power, norm);

    // independent path: index of q O_K inside O_K from the Smith form of the
    // multiplication matrix
    std::int64_t index = column_lattice_index(mult_matrix(field, q));
    std::int64_t index_power = 1;
    for (int k = 0; k < d; ++k) index_power = checked_mul(index_power, index);
    if (index_power != power)
        throw NumericError("phi_covolume: norm power and Smith-form index disagree");
    return static_cast<double>(power);
}

double box_lambda_volume(const FieldHandle& field, int m, int n, const BoxRegion& box) {
    const int P = field.num_places();
    if (static_cast<int>(box.x.size()) != m * P || static_cast<int>(box.y.size()) != n * P)
        throw ValidationError("box volume: need one rectangle per (component, place)");
    double vol = 1.0;
    auto accumulate = [&](const std::vector<PlaceBox>& rects) {
        for (std::size_t k = 0; k < rects.size(); ++k) {
            const PlaceBox& r = rects[k];
            int v = static_cast<int>(k) % P;
            if (!(r.re_hi >= r.re_lo)) throw ValidationError("box volume: inverted rectangle");
            vol *= r.re_hi - r.re_lo;
            if (field.places[static_cast<std::size_t>(v)].kind == PlaceKind::complex_pair) {
                if (!(r.im_hi >= r.im_lo)) throw ValidationError("box volume: inverted rectangle");
                vol *= r.im_hi - r.im_lo;
            }
        }
    };
    accumulate(box.x);
    accumulate(box.y);
    return vol / std::pow(field.covolume, m + n);
}

std::int64_t count_lattice_in_box(const LatticeSpec& spec, const BoxRegion& box,
                                  const EnumLimits& limits) {
    check_spec(spec);
    const FieldHandle& f = *spec.field;
    const int P = f.num_places();
    if (static_cast<int>(box.x.size()) != spec.m * P ||
        static_cast<int>(box.y.size()) != spec.n * P)
        throw ValidationError("box count: need one rectangle per (component, place)");

    auto inside = [&](const PlaceBox& r, std::complex<double> z, int v) {
        if (!(z.real() >= r.re_lo) || !(z.real() < r.re_hi)) return false;
        if (f.places[static_cast<std::size_t>(v)].kind == PlaceKind::complex_pair)
            return z.imag() >= r.im_lo && z.imag() < r.im_hi;
        return true;
    };

    std::vector<Coords> q_lo(spec.n), q_hi(spec.n), p_lo(spec.m), p_hi(spec.m);
    std::vector<PlaceBox> rects(static_cast<std::size_t>(P));
    for (int j = 0; j < spec.n; ++j) {
        for (int v = 0; v < P; ++v) rects[static_cast<std::size_t>(v)] = box.y[j * P + v];
        coeff_bounds(f, rects, q_lo[j], q_hi[j]);
        if (box_cells(q_lo[j], q_hi[j], limits.cell_cap) > limits.cell_cap)
            throw ResourceError("box count: coefficient box exceeds the cell cap");
    }

    std::vector<AlgInt> q(spec.n), p(spec.m);
    Eigen::MatrixXcd y(spec.n, P), xc(spec.m, P);
    std::int64_t count = 0;

    std::function<void(int)> walk_p = [&](int i) {
        if (i == spec.m) {
            ++count;
            return;
        }
        walk_coords(p_lo[i], p_hi[i], [&](const Coords& cp) {
            p[i].c = cp;
            EmbedVec e = embed_element(f, p[i]);
            for (int v = 0; v < P; ++v)
                if (!inside(box.x[i * P + v], xc(i, v) + e[v], v)) return;
            walk_p(i + 1);
        });
    };

    std::function<void(int)> walk_q = [&](int j) {
        if (j == spec.n) {
            for (int i = 0; i < spec.m; ++i) {
                for (int v = 0; v < P; ++v) {
                    std::complex<double> acc(0.0);
                    for (int jj = 0; jj < spec.n; ++jj)
                        acc += spec.theta[static_cast<std::size_t>(v)](i, jj) * y(jj, v);
                    xc(i, v) = acc;
                    const PlaceBox& r = box.x[i * P + v];
                    rects[static_cast<std::size_t>(v)] =
                        PlaceBox{r.re_lo - acc.real(), r.re_hi - acc.real(),
                                 r.im_lo - acc.imag(), r.im_hi - acc.imag()};
                }
                coeff_bounds(f, rects, p_lo[i], p_hi[i]);
                if (box_cells(p_lo[i], p_hi[i], limits.cell_cap) > limits.cell_cap)
                    throw ResourceError("box count: coefficient box exceeds the cell cap");
            }
            walk_p(0);
            return;
        }
        walk_coords(q_lo[j], q_hi[j], [&](const Coords& cq) {
            q[j].c = cq;
            EmbedVec e = embed_element(f, q[j]);
            for (int v = 0; v < P; ++v) {
                if (!inside(box.y[j * P + v], e[v], v)) return;
                y(j, v) = e[v];
            }
            walk_q(j + 1);
        });
    };
    walk_q(0);
    return count;
}

} // namespace nflab
