#include "nflab/int_linalg.hpp"

#include <cstdlib>
#include <numeric>

namespace nflab {

namespace {

const std::int64_t kInt64Max = std::numeric_limits<std::int64_t>::max();

std::int64_t narrow(__int128 v, const char* what) {
    if (v > static_cast<__int128>(kInt64Max) || v < -static_cast<__int128>(kInt64Max)) {
        throw NumericError(std::string("integer overflow in ") + what);
    }
    return static_cast<std::int64_t>(v);
}

} // namespace

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
    return narrow(static_cast<__int128>(a) * b, "multiply");
}

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
    return narrow(static_cast<__int128>(a) + b, "add");
}

std::int64_t det_exact(const IntMat& m) {
    if (m.rows() != m.cols()) throw ValidationError("det_exact: matrix not square");
    const int n = static_cast<int>(m.rows());
    if (n == 0) return 1;
    // Bareiss: every division below is exact.
    std::vector<__int128> a(static_cast<size_t>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a[static_cast<size_t>(i) * n + j] = m(i, j);
    auto at = [&](int i, int j) -> __int128& { return a[static_cast<size_t>(i) * n + j]; };

    int sign = 1;
    __int128 prev = 1;
    for (int k = 0; k < n - 1; ++k) {
        if (at(k, k) == 0) {
            int p = -1;
            for (int i = k + 1; i < n; ++i)
                if (at(i, k) != 0) { p = i; break; }
            if (p < 0) return 0;
            for (int j = 0; j < n; ++j) std::swap(at(k, j), at(p, j));
            sign = -sign;
        }
        for (int i = k + 1; i < n; ++i) {
            for (int j = k + 1; j < n; ++j) {
                __int128 num = at(i, j) * at(k, k) - at(i, k) * at(k, j);
                at(i, j) = num / prev;
            }
            at(i, k) = 0;
        }
        prev = at(k, k);
    }
    return narrow(sign * at(n - 1, n - 1), "det_exact");
}

IntMat adjugate(const IntMat& m) {
    if (m.rows() != m.cols()) throw ValidationError("adjugate: matrix not square");
    const int n = static_cast<int>(m.rows());
    IntMat adj(n, n);
    if (n == 1) {
        adj(0, 0) = 1;
        return adj;
    }
    IntMat minor(n - 1, n - 1);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            int r = 0;
            for (int ii = 0; ii < n; ++ii) {
                if (ii == i) continue;
                int c = 0;
                for (int jj = 0; jj < n; ++jj) {
                    if (jj == j) continue;
                    minor(r, c++) = m(ii, jj);
                }
                ++r;
            }
            std::int64_t cof = det_exact(minor);
            adj(j, i) = ((i + j) % 2 == 0) ? cof : -cof; // transposed cofactor
        }
    }
    return adj;
}

std::vector<std::int64_t> smith_diagonal(IntMat m) {
    const int rows = static_cast<int>(m.rows());
    const int cols = static_cast<int>(m.cols());
    const int n = std::min(rows, cols);
    std::vector<std::int64_t> diag;
    diag.reserve(static_cast<size_t>(n));

    int t = 0; // current pivot position
    while (t < n) {
        // find a nonzero pivot in the remaining block
        int pi = -1, pj = -1;
        for (int i = t; i < rows && pi < 0; ++i)
            for (int j = t; j < cols; ++j)
                if (m(i, j) != 0) { pi = i; pj = j; break; }
        if (pi < 0) break; // remaining block is zero
        m.row(t).swap(m.row(pi));
        m.col(t).swap(m.col(pj));

        // clear row and column t by gcd steps
        bool dirty = true;
        while (dirty) {
            dirty = false;
            for (int i = t + 1; i < rows; ++i) {
                while (m(i, t) != 0) {
                    std::int64_t q = m(i, t) / m(t, t);
                    for (int j = t; j < cols; ++j)
                        m(i, j) = checked_add(m(i, j), -checked_mul(q, m(t, j)));
                    if (m(i, t) != 0) m.row(t).swap(m.row(i));
                }
            }
            for (int j = t + 1; j < cols; ++j) {
                while (m(t, j) != 0) {
                    std::int64_t q = m(t, j) / m(t, t);
                    for (int i = t; i < rows; ++i)
                        m(i, j) = checked_add(m(i, j), -checked_mul(q, m(i, t)));
                    if (m(t, j) != 0) {
                        m.col(t).swap(m.col(j));
                        dirty = true; // column swap may have refilled row t
                    }
                }
            }
        }
        ++t;
    }

    for (int i = 0; i < t; ++i) diag.push_back(std::llabs(m(i, i)));
    for (int i = t; i < n; ++i) diag.push_back(0);

    // enforce the divisibility chain d_1 | d_2 | ...
    for (size_t i = 0; i + 1 < diag.size(); ++i) {
        for (size_t j = i + 1; j < diag.size(); ++j) {
            if (diag[j] % (diag[i] == 0 ? 1 : diag[i]) == 0 && diag[i] != 0) continue;
            std::int64_t a = diag[i], b = diag[j];
            std::int64_t g = std::gcd(a, b);
            if (g == 0) { diag[i] = 0; continue; }
            std::int64_t l = (a / g == 0) ? 0 : checked_mul(a / g, b);
            diag[i] = g;
            diag[j] = l;
        }
    }
    return diag;
}

std::int64_t column_lattice_index(const IntMat& m) {
    auto d = smith_diagonal(m);
    if (static_cast<Eigen::Index>(d.size()) < m.rows())
        throw ValidationError("column_lattice_index: fewer columns than rows");
    std::int64_t idx = 1;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        if (d[static_cast<size_t>(i)] == 0)
            throw ValidationError("column_lattice_index: column lattice not full rank");
        idx = checked_mul(idx, d[static_cast<size_t>(i)]);
    }
    return idx;
}

} // namespace nflab
