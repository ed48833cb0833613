#pragma once

#include <array>
#include <cmath>

namespace ehss {

using Mat3 = std::array<std::array<double, 3>, 3>;

/// Eigenvalues of a symmetric 3x3 matrix by cyclic Jacobi rotations with a
/// relative off-diagonal threshold (|a_ij| <= tol * sqrt(a_ii a_jj)), which
/// preserves the relative accuracy of small eigenvalues of positive-definite
/// matrices. Returns the eigenvalues in ascending order.
inline std::array<double, 3> jacobi_eigenvalues_sym3(Mat3 a, int max_sweeps = 50) {
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        bool rotated = false;
        for (int p = 0; p < 2; ++p) {
            for (int q = p + 1; q < 3; ++q) {
                const double apq = a[p][q];
                const double scale = std::sqrt(std::fabs(a[p][p]) * std::fabs(a[q][q]));
                if (std::fabs(apq) <= 1e-16 * scale || apq == 0.0) continue;
                rotated = true;
                const double theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                // Apply the rotation J(p,q) on both sides.
                const double app = a[p][p], aqq = a[q][q];
                a[p][p] = app - t * apq;
                a[q][q] = aqq + t * apq;
                a[p][q] = a[q][p] = 0.0;
                const int r = 3 - p - q;  // the remaining index
                const double arp = a[r][p], arq = a[r][q];
                a[r][p] = a[p][r] = c * arp - s * arq;
                a[r][q] = a[q][r] = s * arp + c * arq;
            }
        }
        if (!rotated) break;
    }
    std::array<double, 3> ev{a[0][0], a[1][1], a[2][2]};
    if (ev[0] > ev[1]) std::swap(ev[0], ev[1]);
    if (ev[1] > ev[2]) std::swap(ev[1], ev[2]);
    if (ev[0] > ev[1]) std::swap(ev[0], ev[1]);
    return ev;
}

}  // namespace ehss
