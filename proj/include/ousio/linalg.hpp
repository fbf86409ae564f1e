#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>

namespace ousio {

using Vec3 = std::array<double, 3>;
/// Row-major 3x3 matrix.
using Mat3 = std::array<Vec3, 3>;

namespace linalg {

inline constexpr Mat3 identity() { return {{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}}; }

inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

inline Vec3 apply(const Mat3& m, const Vec3& v) { return {dot(m[0], v), dot(m[1], v), dot(m[2], v)}; }

inline Mat3 transpose(const Mat3& m) {
    Mat3 t{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) t[i][j] = m[j][i];
    return t;
}

inline Mat3 multiply(const Mat3& a, const Mat3& b) {
    Mat3 c{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k) c[i][j] += a[i][k] * b[k][j];
    return c;
}

inline double determinant(const Mat3& m) {
    return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
           m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

inline Vec3 negate(const Vec3& v) { return {-v[0], -v[1], -v[2]}; }

inline double squared_distance(const Vec3& a, const Vec3& b) {
    const double dx = a[0] - b[0], dy = a[1] - b[1], dz = a[2] - b[2];
    return dx * dx + dy * dy + dz * dz;
}

/// Largest absolute entry of m - n.
inline double max_abs_diff(const Mat3& m, const Mat3& n) {
    double worst = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) worst = std::max(worst, std::abs(m[i][j] - n[i][j]));
    return worst;
}

struct SymmetricEigen {
    Vec3 values;   ///< descending
    Mat3 vectors;  ///< row i is the unit eigenvector for values[i]
    int sweeps = 0;
};

/// Cyclic Jacobi eigendecomposition of a symmetric 3x3 matrix. Sweeps until the
/// off-diagonal Frobenius norm falls below `tolerance` times the matrix norm.
inline SymmetricEigen jacobi_eigen(Mat3 a, double tolerance = 1e-14, int max_sweeps = 64) {
    Mat3 v = identity(); // columns accumulate the eigenvectors
    double norm = 0.0;
    for (const auto& row : a)
        for (double x : row) norm += x * x;
    norm = std::sqrt(norm);

    int sweep = 0;
    for (; sweep < max_sweeps; ++sweep) {
        const double off = std::sqrt(2.0 * (a[0][1] * a[0][1] + a[0][2] * a[0][2] + a[1][2] * a[1][2]));
        if (off <= tolerance * norm) break;
        for (int p = 0; p < 2; ++p) {
            for (int q = p + 1; q < 3; ++q) {
                if (a[p][q] == 0.0) continue;
                const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                // a <- J^T a J with J the Givens rotation in the (p, q) plane.
                for (int k = 0; k < 3; ++k) {
                    const double akp = a[k][p], akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for (int k = 0; k < 3; ++k) {
                    const double apk = a[p][k], aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for (int k = 0; k < 3; ++k) {
                    const double vkp = v[k][p], vkq = v[k][q];
                    v[k][p] = c * vkp - s * vkq;
                    v[k][q] = s * vkp + c * vkq;
                }
            }
        }
    }

    std::array<int, 3> order{0, 1, 2};
    std::sort(order.begin(), order.end(), [&](int i, int j) { return a[i][i] > a[j][j]; });
    SymmetricEigen out;
    out.sweeps = sweep;
    for (int r = 0; r < 3; ++r) {
        out.values[r] = a[order[r]][order[r]];
        for (int k = 0; k < 3; ++k) out.vectors[r][k] = v[k][order[r]];
    }
    return out;
}

} // namespace linalg
} // namespace ousio
