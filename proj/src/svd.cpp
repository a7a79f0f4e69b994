#include "crossnet/svd.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace crossnet {

namespace {
constexpr double kSweepTol = 1e-12;
constexpr int kMaxSweeps = 60;
}  // namespace

Vector singular_values(const Matrix& a) {
    if (a.empty()) throw std::invalid_argument("singular_values: empty matrix");
    if (!all_finite(a)) throw std::invalid_argument("singular_values: non-finite entries");

    // Work on the tall orientation; singular values are transpose-invariant.
    const Matrix& src = a;
    const bool tall = src.rows() >= src.cols();
    const std::size_t m = tall ? src.rows() : src.cols();
    const std::size_t n = tall ? src.cols() : src.rows();

    // Column-major copy so the Jacobi rotations stream through memory.
    std::vector<Vector> col(n, Vector(m));
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < m; ++i)
            col[j][i] = tall ? src(i, j) : src(j, i);

    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        bool rotated = false;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                double alpha = 0.0, beta = 0.0, gamma = 0.0;
                for (std::size_t i = 0; i < m; ++i) {
                    alpha += col[p][i] * col[p][i];
                    beta += col[q][i] * col[q][i];
                    gamma += col[p][i] * col[q][i];
                }
                if (alpha == 0.0 || beta == 0.0) continue;
                if (std::abs(gamma) <= kSweepTol * std::sqrt(alpha * beta)) continue;
                rotated = true;
                const double zeta = (beta - alpha) / (2.0 * gamma);
                const double t = (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                for (std::size_t i = 0; i < m; ++i) {
                    const double vp = col[p][i], vq = col[q][i];
                    col[p][i] = c * vp - s * vq;
                    col[q][i] = s * vp + c * vq;
                }
            }
        }
        if (!rotated) break;
    }

    Vector sigma(n);
    for (std::size_t j = 0; j < n; ++j) sigma[j] = norm2(col[j]);
    std::sort(sigma.begin(), sigma.end(), std::greater<double>());
    return sigma;
}

}  // namespace crossnet
