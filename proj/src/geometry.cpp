#include "nflab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace nflab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_block_shape(const FieldHandle& field, const Eigen::MatrixXcd& block,
                       const Eigen::MatrixXd& w, const char* what) {
    if (block.rows() != w.rows() || block.cols() != w.cols())
        throw ValidationError(std::string(what) + ": block and weight shapes differ");
    if (block.cols() != field.num_places())
        throw ValidationError(std::string(what) + ": column count must equal the number of places");
}

void check_weight_block(const FieldHandle& field, const Eigen::MatrixXd& w, const char* what) {
    if (w.rows() < 1) throw ValidationError(std::string(what) + ": needs at least one component");
    if (w.cols() != field.num_places())
        throw ValidationError(std::string(what) + ": one weight column per place required");
    double total = 0.0;
    for (int i = 0; i < w.rows(); ++i) {
        for (int v = 0; v < w.cols(); ++v) {
            double wv = w(i, v);
            if (!(wv > 0.0) || !std::isfinite(wv))
                throw ValidationError(std::string(what) + ": weights must be strictly positive");
            total += field.places[static_cast<std::size_t>(v)].d_nu * wv;
        }
    }
    if (std::abs(total - 1.0) > 1e-12)
        throw ValidationError(std::string(what) +
                              ": local-degree-weighted sum must equal 1 (got " +
                              std::to_string(total) + ")");
}

} // namespace

void validate_weights(const FieldHandle& field, const WeightScheme& w) {
    check_weight_block(field, w.a, "weights (x block)");
    check_weight_block(field, w.b, "weights (y block)");
}

WeightScheme equal_weights(const FieldHandle& field, int m, int n) {
    if (m < 1 || n < 1) throw ValidationError("equal_weights: block sizes must be positive");
    const int P = field.num_places();
    WeightScheme w;
    w.a = Eigen::MatrixXd::Constant(m, P, 1.0 / (m * field.degree));
    w.b = Eigen::MatrixXd::Constant(n, P, 1.0 / (n * field.degree));
    return w;
}

WeightScheme random_weights(const FieldHandle& field, int m, int n, RngStream& rng) {
    WeightScheme w = equal_weights(field, m, n);
    auto skew = [&](Eigen::MatrixXd& block) {
        double total = 0.0;
        for (int i = 0; i < block.rows(); ++i)
            for (int v = 0; v < block.cols(); ++v) {
                block(i, v) *= std::exp2(rng.uniform(-1.0, 1.0)); // factor in [1/2, 2]
                total += field.places[static_cast<std::size_t>(v)].d_nu * block(i, v);
            }
        block /= total;
    };
    skew(w.a);
    skew(w.b);
    return w;
}

double log_quasi_norm(const Eigen::MatrixXcd& block, const Eigen::MatrixXd& w) {
    if (block.rows() != w.rows() || block.cols() != w.cols())
        throw ValidationError("log_quasi_norm: block and weight shapes differ");
    double best = -kInf;
    for (int i = 0; i < block.rows(); ++i) {
        for (int v = 0; v < block.cols(); ++v) {
            double mag = std::abs(block(i, v));
            if (mag > 0.0) best = std::max(best, std::log(mag) / w(i, v));
        }
    }
    return best;
}

double quasi_norm(const Eigen::MatrixXcd& block, const Eigen::MatrixXd& w) {
    return std::exp(log_quasi_norm(block, w));
}

// ---- weighted sphere ---------------------------------------------------------

SpherePoint project_weighted(const Eigen::MatrixXcd& block, const Eigen::MatrixXd& w) {
    if (block.rows() != w.rows() || block.cols() != w.cols())
        throw ValidationError("project_weighted: block and weight shapes differ");
    double sq = 0.0, min_w = kInf;
    for (int i = 0; i < block.rows(); ++i)
        for (int v = 0; v < block.cols(); ++v) {
            if (!(w(i, v) > 0.0))
                throw ValidationError("project_weighted: weights must be strictly positive");
            sq += std::norm(block(i, v));
            min_w = std::min(min_w, w(i, v));
        }
    if (!(sq > 0.0)) throw ValidationError("project_weighted: zero block has no direction");

    // g(t) = sum |x|^2 e^{2 t w} is strictly increasing with g(0) = sq, and the
    // root of g = 1 lies within |t| <= |log sq| / (2 min w).
    auto g = [&](double t, double* deriv) {
        double s = 0.0, d = 0.0;
        for (int i = 0; i < block.rows(); ++i)
            for (int v = 0; v < block.cols(); ++v) {
                double term = std::norm(block(i, v)) * std::exp(2.0 * t * w(i, v));
                s += term;
                d += 2.0 * w(i, v) * term;
            }
        if (deriv) *deriv = d;
        return s;
    };

    double half_width = std::abs(std::log(sq)) / (2.0 * min_w) + 1e-6;
    double lo = -half_width, hi = half_width;
    double t = 0.0;
    for (int it = 0; it < 80; ++it) {
        t = 0.5 * (lo + hi);
        if (g(t, nullptr) < 1.0)
            lo = t;
        else
            hi = t;
    }
    for (int it = 0; it < 8; ++it) {
        double d = 0.0;
        double val = g(t, &d);
        if (std::abs(val - 1.0) <= 1e-14) break;
        t -= (val - 1.0) / d;
    }

    SpherePoint p;
    p.coords.resize(block.rows(), block.cols());
    for (int i = 0; i < block.rows(); ++i)
        for (int v = 0; v < block.cols(); ++v)
            p.coords(i, v) = block(i, v) * std::exp(t * w(i, v));
    return p;
}

Eigen::VectorXd flatten_block(const FieldHandle& field, const Eigen::MatrixXcd& block) {
    if (block.cols() != field.num_places())
        throw ValidationError("flatten_block: one column per place required");
    Eigen::VectorXd flat(block.rows() * field.degree);
    Eigen::Index k = 0;
    for (int i = 0; i < block.rows(); ++i) {
        for (int v = 0; v < block.cols(); ++v) {
            flat[k++] = block(i, v).real();
            if (field.places[static_cast<std::size_t>(v)].kind == PlaceKind::complex_pair)
                flat[k++] = block(i, v).imag();
        }
    }
    return flat;
}

CapSpec CapSpec::full_sphere() { return CapSpec{}; }

CapSpec CapSpec::hemisphere(int flat_index, int sign) {
    if (flat_index < 0) throw ValidationError("hemisphere: coordinate index must be nonnegative");
    if (sign != +1 && sign != -1) throw ValidationError("hemisphere: sign must be +1 or -1");
    CapSpec c;
    c.kind = Kind::hemisphere;
    c.hemi_index = flat_index;
    c.hemi_sign = sign;
    return c;
}

CapSpec CapSpec::cap(const Eigen::VectorXd& center, double radius) {
    double norm = center.norm();
    if (!(norm > 0.0)) throw ValidationError("cap: center must be a nonzero direction");
    if (!(radius > 0.0) || !(radius < 3.14159265358979323846))
        throw ValidationError("cap: angular radius must lie in (0, pi)");
    CapSpec c;
    c.kind = Kind::cap;
    c.center = center / norm;
    c.angular_radius = radius;
    return c;
}

bool cap_contains_flat(const CapSpec& cap, const Eigen::VectorXd& flat) {
    switch (cap.kind) {
        case CapSpec::Kind::full:
            return true;
        case CapSpec::Kind::hemisphere: {
            if (cap.hemi_index >= flat.size())
                throw ValidationError("hemisphere: coordinate index exceeds sphere dimension");
            double v = flat[cap.hemi_index];
            return cap.hemi_sign > 0 ? v >= 0.0 : v < 0.0;
        }
        case CapSpec::Kind::cap: {
            if (cap.center.size() != flat.size())
                throw ValidationError("cap: center dimension does not match sphere dimension");
            double dot = std::clamp(cap.center.dot(flat), -1.0, 1.0);
            return std::acos(dot) < cap.angular_radius;
        }
    }
    return false;
}

bool cap_contains(const CapSpec& cap, const FieldHandle& field, const SpherePoint& p) {
    return cap_contains_flat(cap, flatten_block(field, p.coords));
}

std::optional<double> cap_measure_exact(const CapSpec& cap, int ambient_real_dim) {
    if (ambient_real_dim < 1) throw ValidationError("cap measure: dimension must be positive");
    switch (cap.kind) {
        case CapSpec::Kind::full:
            return 1.0;
        case CapSpec::Kind::hemisphere:
            return 0.5;
        case CapSpec::Kind::cap:
            // geodesic ball fractions with closed forms: the two-point sphere,
            // the circle, and the ordinary sphere
            if (ambient_real_dim == 1) return 0.5;
            if (ambient_real_dim == 2) return cap.angular_radius / 3.14159265358979323846;
            if (ambient_real_dim == 3) return 0.5 * (1.0 - std::cos(cap.angular_radius));
            return std::nullopt;
    }
    return std::nullopt;
}

CapVolume cap_volume(const CapSpec& cap, int ambient_real_dim, std::int64_t samples,
                     std::uint64_t seed) {
    if (ambient_real_dim < 1) throw ValidationError("cap_volume: dimension must be positive");
    if (samples < 1000) throw ValidationError("cap_volume: needs at least 1000 samples");

    constexpr std::int64_t kChunk = 65536;
    std::int64_t hits = 0;
    Eigen::VectorXd flat(ambient_real_dim);
    for (std::int64_t start = 0, chunk = 0; start < samples; start += kChunk, ++chunk) {
        RngStream rng(seed, static_cast<std::uint64_t>(chunk));
        std::int64_t count = std::min(kChunk, samples - start);
        for (std::int64_t s = 0; s < count; ++s) {
            double norm2 = 0.0;
            do {
                for (int i = 0; i < ambient_real_dim; ++i) flat[i] = rng.normal();
                norm2 = flat.squaredNorm();
            } while (norm2 < 1e-300);
            flat /= std::sqrt(norm2);
            if (cap_contains_flat(cap, flat)) ++hits;
        }
    }
    CapVolume out;
    double n = static_cast<double>(samples);
    out.estimate = static_cast<double>(hits) / n;
    out.standard_error = std::sqrt(out.estimate * (1.0 - out.estimate) / n);
    return out;
}

double cap_measure(const CapSpec& cap, int ambient_real_dim, std::int64_t samples,
                   std::uint64_t seed) {
    if (auto exact = cap_measure_exact(cap, ambient_real_dim)) return *exact;
    return cap_volume(cap, ambient_real_dim, samples, seed).estimate;
}

// ---- regions -----------------------------------------------------------------

void validate_region(const RegionSpec& region) {
    if (!(region.c >= 0.0) || !std::isfinite(region.c))
        throw ValidationError("region: c must be a finite nonnegative real");
    if (!(region.T > 0.0) || !std::isfinite(region.T))
        throw ValidationError("region: T must be a finite positive real");
}

bool region_membership(const FieldHandle& field, const RegionSpec& region,
                       const WeightScheme& w, const KSVec& point) {
    validate_region(region);
    check_block_shape(field, point.x, w.a, "region membership (x block)");
    check_block_shape(field, point.y, w.b, "region membership (y block)");

    double lx = log_quasi_norm(point.x, w.a);
    double ly = log_quasi_norm(point.y, w.b);

    // ||x||_a ||y||_b < c, evaluated in log space (a zero block makes the
    // product vanish, so any c > 0 passes)
    if (!(region.c > 0.0)) return false;
    if (lx != -kInf && ly != -kInf && !(lx + ly < std::log(region.c))) return false;

    if (region.kind == RegionSpec::Kind::F) {
        if (!(ly < region.T)) return false;
        return true;
    }

    // E and E_AB carry the window 1 <= ||y||_b < e^T
    if (!(ly >= 0.0) || !(ly < region.T)) return false;

    if (region.kind == RegionSpec::Kind::E_AB) {
        if (region.cap_x && region.cap_x->kind != CapSpec::Kind::full) {
            if (lx == -kInf) return false; // zero x has no direction
            if (!cap_contains(*region.cap_x, field, project_weighted(point.x, w.a)))
                return false;
        }
        if (region.cap_y && region.cap_y->kind != CapSpec::Kind::full) {
            if (!cap_contains(*region.cap_y, field, project_weighted(point.y, w.b)))
                return false;
        }
    }
    return true;
}

bool placewise_region_membership(const FieldHandle& field, const RegionSpec& region,
                                 const WeightScheme& w, const KSVec& point) {
    validate_region(region);
    if (region.kind == RegionSpec::Kind::E_AB)
        throw ValidationError("placewise membership: direction caps are not placewise");
    check_block_shape(field, point.x, w.a, "placewise membership (x block)");
    check_block_shape(field, point.y, w.b, "placewise membership (y block)");
    if (!(region.c > 0.0)) return false;

    const double log_c = std::log(region.c);
    bool some_place_reaches_one = false;
    for (int v = 0; v < field.num_places(); ++v) {
        double lx = log_quasi_norm(point.x.col(v), w.a.col(v));
        double ly = log_quasi_norm(point.y.col(v), w.b.col(v));
        if (lx != -kInf && ly != -kInf && !(lx + ly < log_c)) return false;
        if (!(ly < region.T)) return false;
        if (ly >= 0.0) some_place_reaches_one = true;
    }
    if (region.kind == RegionSpec::Kind::E && !some_place_reaches_one) return false;
    return true;
}

} // namespace nflab
