#ifndef TDLSM_JACOBI_HPP
#define TDLSM_JACOBI_HPP

#include "tdlsm/math.hpp"

#include <cmath>

namespace tdlsm {

/// Jacobi polynomial P_n^{(a,b)}(x), normalized to unit L2 norm on [-1,1]
/// with weight (1-x)^a (1+x)^b.
inline double jacobi_p(double x, double a, double b, int n)
{
    const double gamma0 = std::pow(2.0, a + b + 1.0) / (a + b + 1.0) *
                          std::tgamma(a + 1.0) * std::tgamma(b + 1.0) /
                          std::tgamma(a + b + 1.0);
    double pl0 = 1.0 / std::sqrt(gamma0);
    if (n == 0) return pl0;
    const double gamma1 = (a + 1.0) * (b + 1.0) / (a + b + 3.0) * gamma0;
    double pl1 = ((a + b + 2.0) * x / 2.0 + (a - b) / 2.0) / std::sqrt(gamma1);
    if (n == 1) return pl1;

    double aold = 2.0 / (2.0 + a + b) *
                  std::sqrt((a + 1.0) * (b + 1.0) / (a + b + 3.0));
    for (int i = 1; i <= n - 1; ++i) {
        const double h1 = 2.0 * i + a + b;
        double anew = 2.0 / (h1 + 2.0) *
                      std::sqrt((i + 1.0) * (i + 1.0 + a + b) * (i + 1.0 + a) *
                                (i + 1.0 + b) / ((h1 + 1.0) * (h1 + 3.0)));
        const double bnew = -(a * a - b * b) / (h1 * (h1 + 2.0));
        const double plnew = (-aold * pl0 + (x - bnew) * pl1) / anew;
        pl0 = pl1;
        pl1 = plnew;
        aold = anew;
    }
    return pl1;
}

/// Derivative of the normalized Jacobi polynomial.
inline double grad_jacobi_p(double x, double a, double b, int n)
{
    if (n == 0) return 0.0;
    return std::sqrt(n * (n + a + b + 1.0)) *
           jacobi_p(x, a + 1.0, b + 1.0, n - 1);
}

/// Gauss quadrature nodes for the Jacobi weight (eigenvalues of the
/// symmetric recurrence matrix); returns n+1 nodes.
inline Vec jacobi_gq_nodes(double a, double b, int n)
{
    if (n == 0) {
        Vec x(1);
        x(0) = (a - b) / (a + b + 2.0);
        return x;
    }
    Mat J = Mat::Zero(n + 1, n + 1);
    for (int i = 0; i <= n; ++i) {
        const double h1 = 2.0 * i + a + b;
        J(i, i) = -0.5 * (a * a - b * b) / ((h1 + 2.0) * h1);
    }
    if (a + b < 10.0 * std::numeric_limits<double>::epsilon()) J(0, 0) = 0.0;
    for (int i = 1; i <= n; ++i) {
        const double h1 = 2.0 * (i - 1.0) + a + b;
        J(i - 1, i) = 2.0 / (h1 + 2.0) *
                      std::sqrt(i * (i + a + b) * (i + a) * (i + b) /
                                ((h1 + 1.0) * (h1 + 3.0)));
        J(i, i - 1) = J(i - 1, i);
    }
    Eigen::SelfAdjointEigenSolver<Mat> es(J);
    return es.eigenvalues();
}

/// Gauss-Lobatto nodes on [-1,1] for the Jacobi weight; n+1 nodes with the
/// endpoints included (n >= 1).
inline Vec jacobi_gl_nodes(double a, double b, int n)
{
    Vec x(n + 1);
    x(0) = -1.0;
    x(n) = 1.0;
    if (n >= 2) x.segment(1, n - 1) = jacobi_gq_nodes(a + 1.0, b + 1.0, n - 2);
    return x;
}

} // namespace tdlsm

#endif
