#pragma once

// Dense symmetric linear algebra: covariance estimation, Jacobi
// eigendecomposition and random orthogonal matrices. Sized for D <= ~100.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "fcpo/core.hpp"

namespace fcpo::linalg {

struct Matrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> a;

    Matrix() = default;
    Matrix(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, 0.0) {}

    double& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * cols + j]; }
    double operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * cols + j]; }

    static Matrix identity(int n) {
        Matrix m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    Vec col(int j) const {
        Vec v(rows);
        for (int i = 0; i < rows; ++i) v[i] = (*this)(i, j);
        return v;
    }

    // y = M x
    Vec apply(const Vec& x) const {
        Vec y(rows, 0.0);
        for (int i = 0; i < rows; ++i) {
            double s = 0.0;
            for (int j = 0; j < cols; ++j) s += (*this)(i, j) * x[j];
            y[i] = s;
        }
        return y;
    }
};

struct EigenSystem {
    Matrix Q;     // columns are eigenvectors
    Vec lambda;   // eigenvalues, sorted descending
};

// Sample covariance with the n-1 divisor.
inline Matrix covariance(const std::vector<Vec>& points) {
    const int n = static_cast<int>(points.size());
    if (n < 2) throw std::invalid_argument("covariance: need at least 2 samples");
    const int d = static_cast<int>(points[0].size());
    Vec mean(d, 0.0);
    for (const Vec& p : points)
        for (int j = 0; j < d; ++j) mean[j] += p[j];
    for (int j = 0; j < d; ++j) mean[j] /= n;
    Matrix c(d, d);
    for (const Vec& p : points)
        for (int i = 0; i < d; ++i)
            for (int j = i; j < d; ++j)
                c(i, j) += (p[i] - mean[i]) * (p[j] - mean[j]);
    for (int i = 0; i < d; ++i)
        for (int j = i; j < d; ++j) {
            c(i, j) /= (n - 1);
            c(j, i) = c(i, j);
        }
    return c;
}

// Symmetric eigendecomposition via cyclic Jacobi rotations.
// Converges when the largest off-diagonal magnitude drops below
// 1e-12 * max|diagonal|, capped at 100 sweeps.
inline EigenSystem eigh(const Matrix& s_in) {
    if (s_in.rows != s_in.cols)
        throw std::invalid_argument("eigh: matrix must be square");
    const int n = s_in.rows;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (std::abs(s_in(i, j) - s_in(j, i)) > 1e-10)
                throw std::invalid_argument("eigh: matrix not symmetric");

    Matrix a = s_in;
    Matrix v = Matrix::identity(n);

    auto max_offdiag = [&]() {
        double m = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) m = std::max(m, std::abs(a(i, j)));
        return m;
    };
    auto max_diag = [&]() {
        double m = 0.0;
        for (int i = 0; i < n; ++i) m = std::max(m, std::abs(a(i, i)));
        return m;
    };

    for (int sweep = 0; sweep < 100; ++sweep) {
        const double threshold = 1e-12 * std::max(max_diag(), 1e-300);
        if (max_offdiag() < threshold) break;
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (std::abs(apq) < threshold) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                double t;
                if (std::abs(theta) > 1e30) {
                    t = 1.0 / (2.0 * theta);
                } else {
                    t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                    if (theta < 0.0) t = -t;
                }
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                const double tau = s / (1.0 + c);
                const double app = a(p, p), aqq = a(q, q);
                a(p, p) = app - t * apq;
                a(q, q) = aqq + t * apq;
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                for (int k = 0; k < n; ++k) {
                    if (k == p || k == q) continue;
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = akp - s * (akq + tau * akp);
                    a(p, k) = a(k, p);
                    a(k, q) = akq + s * (akp - tau * akq);
                    a(q, k) = a(k, q);
                }
                for (int k = 0; k < n; ++k) {
                    const double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = vkp - s * (vkq + tau * vkp);
                    v(k, q) = vkq + s * (vkp - tau * vkq);
                }
            }
        }
    }

    EigenSystem es;
    es.lambda.resize(n);
    for (int i = 0; i < n; ++i) es.lambda[i] = a(i, i);

    // sort descending, carrying eigenvector columns along
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](int x, int y) { return es.lambda[x] > es.lambda[y]; });
    EigenSystem out;
    out.lambda.resize(n);
    out.Q = Matrix(n, n);
    for (int j = 0; j < n; ++j) {
        out.lambda[j] = es.lambda[order[j]];
        for (int i = 0; i < n; ++i) out.Q(i, j) = v(i, order[j]);
    }
    return out;
}

inline double determinant(Matrix m) {
    const int n = m.rows;
    double det = 1.0;
    for (int c = 0; c < n; ++c) {
        int pivot = c;
        for (int r = c + 1; r < n; ++r)
            if (std::abs(m(r, c)) > std::abs(m(pivot, c))) pivot = r;
        if (m(pivot, c) == 0.0) return 0.0;
        if (pivot != c) {
            for (int j = 0; j < n; ++j) std::swap(m(pivot, j), m(c, j));
            det = -det;
        }
        det *= m(c, c);
        for (int r = c + 1; r < n; ++r) {
            const double f = m(r, c) / m(c, c);
            for (int j = c; j < n; ++j) m(r, j) -= f * m(c, j);
        }
    }
    return det;
}

// Haar-like random orthogonal matrix: modified Gram-Schmidt of a standard
// normal matrix (column norms on the triangular diagonal are positive by
// construction), with the determinant sign normalized to +1.
inline Matrix random_orthogonal(int d, RngStream& rng) {
    if (d < 1) throw std::invalid_argument("random_orthogonal: D must be >= 1");
    Matrix q(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) q(i, j) = rng.next_normal();
    for (int j = 0; j < d; ++j) {
        for (int k = 0; k < j; ++k) {
            double dot = 0.0;
            for (int i = 0; i < d; ++i) dot += q(i, k) * q(i, j);
            for (int i = 0; i < d; ++i) q(i, j) -= dot * q(i, k);
        }
        double norm = 0.0;
        for (int i = 0; i < d; ++i) norm += q(i, j) * q(i, j);
        norm = std::sqrt(norm);
        if (norm < 1e-12) {
            // practically unreachable for Gaussian input; re-seed the column
            for (int i = 0; i < d; ++i) q(i, j) = (i == j) ? 1.0 : 0.0;
            norm = 1.0;
        }
        for (int i = 0; i < d; ++i) q(i, j) /= norm;
    }
    if (determinant(q) < 0.0)
        for (int i = 0; i < d; ++i) q(i, d - 1) = -q(i, d - 1);
    return q;
}

}  // namespace fcpo::linalg
