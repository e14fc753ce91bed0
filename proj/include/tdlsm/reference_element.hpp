#ifndef TDLSM_REFERENCE_ELEMENT_HPP
#define TDLSM_REFERENCE_ELEMENT_HPP

#include "tdlsm/jacobi.hpp"
#include "tdlsm/math.hpp"

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace tdlsm {

namespace detail {

/// One-dimensional edge warp: displacement field moving equispaced nodes to
/// Gauss-Lobatto positions, evaluated at arbitrary coordinates in [-1,1].
inline Vec eval_warp(int p, const Vec& xnodes, const Vec& xout)
{
    Vec warp = Vec::Zero(xout.size());
    Vec xeq(p + 1);
    for (int i = 0; i <= p; ++i) xeq(i) = -1.0 + 2.0 * (p - i) / double(p);
    for (int i = 0; i <= p; ++i) {
        Vec d = Vec::Constant(xout.size(), xnodes(i) - xeq(i));
        for (int j = 1; j <= p - 1; ++j) {
            if (i != j)
                d = d.cwiseProduct((xout.array() - xeq(j)).matrix()) /
                    (xeq(i) - xeq(j));
        }
        if (i != 0) d = -d / (xeq(i) - xeq(0));
        if (i != p) d = d / (xeq(i) - xeq(p));
        warp += d;
    }
    return warp;
}

/// Two-dimensional warp on an equilateral-triangle face expressed through
/// the three barycentric coordinates of that face.
inline void eval_shift(int p, double pval, const Vec& l1, const Vec& l2,
                       const Vec& l3, Vec& dx, Vec& dy)
{
    Vec gauss_x = -jacobi_gl_nodes(0.0, 0.0, p);

    Vec blend1 = l2.cwiseProduct(l3);
    Vec blend2 = l1.cwiseProduct(l3);
    Vec blend3 = l1.cwiseProduct(l2);

    Vec warpfactor1 = 4.0 * eval_warp(p, gauss_x, l3 - l2);
    Vec warpfactor2 = 4.0 * eval_warp(p, gauss_x, l1 - l3);
    Vec warpfactor3 = 4.0 * eval_warp(p, gauss_x, l2 - l1);

    Vec warp1 = blend1.cwiseProduct(warpfactor1)
                    .cwiseProduct((1.0 + (pval * l1.array()).square()).matrix());
    Vec warp2 = blend2.cwiseProduct(warpfactor2)
                    .cwiseProduct((1.0 + (pval * l2.array()).square()).matrix());
    Vec warp3 = blend3.cwiseProduct(warpfactor3)
                    .cwiseProduct((1.0 + (pval * l3.array()).square()).matrix());

    dx = warp1 + std::cos(2.0 * M_PI / 3.0) * warp2 +
         std::cos(4.0 * M_PI / 3.0) * warp3;
    dy = std::sin(2.0 * M_PI / 3.0) * warp2 + std::sin(4.0 * M_PI / 3.0) * warp3;
}

/// Collapsed coordinates (a,b,c) of the reference tetrahedron.
inline void rst_to_abc(double r, double s, double t, double& a, double& b,
                       double& c)
{
    a = (std::abs(s + t) > 1e-12) ? 2.0 * (1.0 + r) / (-s - t) - 1.0 : -1.0;
    b = (std::abs(t - 1.0) > 1e-12) ? 2.0 * (1.0 + s) / (1.0 - t) - 1.0 : -1.0;
    c = t;
}

/// Orthonormal PKD basis on the reference tetrahedron.
inline double simplex3dp(double a, double b, double c, int i, int j, int k)
{
    const double h1 = jacobi_p(a, 0, 0, i);
    const double h2 = jacobi_p(b, 2.0 * i + 1.0, 0, j);
    const double h3 = jacobi_p(c, 2.0 * (i + j) + 2.0, 0, k);
    return 2.0 * std::sqrt(2.0) * h1 * h2 * std::pow(1.0 - b, i) * h3 *
           std::pow(1.0 - c, i + j);
}

/// Reference-coordinate gradient of the PKD basis.
inline void grad_simplex3dp(double a, double b, double c, int id, int jd,
                            int kd, double& vr, double& vs, double& vt)
{
    const double fa = jacobi_p(a, 0, 0, id);
    const double dfa = grad_jacobi_p(a, 0, 0, id);
    const double gb = jacobi_p(b, 2.0 * id + 1.0, 0, jd);
    const double dgb = grad_jacobi_p(b, 2.0 * id + 1.0, 0, jd);
    const double hc = jacobi_p(c, 2.0 * (id + jd) + 2.0, 0, kd);
    const double dhc = grad_jacobi_p(c, 2.0 * (id + jd) + 2.0, 0, kd);

    double v3dr = dfa * gb * hc;
    if (id > 0) v3dr *= std::pow(0.5 * (1.0 - b), id - 1);
    if (id + jd > 0) v3dr *= std::pow(0.5 * (1.0 - c), id + jd - 1);

    double v3ds = 0.5 * (1.0 + a) * v3dr;
    double tmp = dgb * std::pow(0.5 * (1.0 - b), id);
    if (id > 0) tmp += (-0.5 * id) * gb * std::pow(0.5 * (1.0 - b), id - 1);
    if (id + jd > 0) tmp *= std::pow(0.5 * (1.0 - c), id + jd - 1);
    tmp = fa * tmp * hc;
    v3ds += tmp;

    double v3dt = 0.5 * (1.0 + a) * v3dr + 0.5 * (1.0 + b) * tmp;
    double tmp2 = dhc * std::pow(0.5 * (1.0 - c), id + jd);
    if (id + jd > 0)
        tmp2 -= 0.5 * (id + jd) * hc * std::pow(0.5 * (1.0 - c), id + jd - 1);
    tmp2 = fa * gb * tmp2 * std::pow(0.5 * (1.0 - b), id);
    v3dt += tmp2;

    const double norm = std::pow(2.0, 2.0 * id + jd + 1.5);
    vr = v3dr * norm;
    vs = v3ds * norm;
    vt = v3dt * norm;
}

/// Orthonormal basis on the reference triangle (used for face mass matrices).
inline double simplex2dp(double r, double s, int i, int j)
{
    const double a =
        (std::abs(1.0 - s) > 1e-12) ? 2.0 * (1.0 + r) / (1.0 - s) - 1.0 : -1.0;
    const double b = s;
    return std::sqrt(2.0) * jacobi_p(a, 0, 0, i) *
           jacobi_p(b, 2.0 * i + 1.0, 0, j) * std::pow(1.0 - b, i);
}

inline Mat vandermonde2d(int n, const Vec& r, const Vec& s)
{
    const int np = (n + 1) * (n + 2) / 2;
    Mat v(r.size(), np);
    int sk = 0;
    for (int i = 0; i <= n; ++i)
        for (int j = 0; j <= n - i; ++j, ++sk)
            for (int m = 0; m < r.size(); ++m)
                v(m, sk) = simplex2dp(r(m), s(m), i, j);
    return v;
}

} // namespace detail

/// Nodal basis data on the reference tetrahedron
/// (-1,-1,-1),(1,-1,-1),(-1,1,-1),(-1,-1,1).
///
/// Faces are ordered: 0: t=-1, 1: s=-1, 2: r+s+t=-1, 3: r=-1.
class ReferenceElement {
public:
    int order = 0;
    int np = 0;  ///< nodes per element, (N+1)(N+2)(N+3)/6
    int nfp = 0; ///< nodes per face, (N+1)(N+2)/2

    Vec r, s, t;                            ///< nodal coordinates
    Mat v, inv_v;                           ///< Vandermonde and inverse
    Mat dr, ds, dt;                         ///< differentiation matrices
    Mat lift;                               ///< np x 4*nfp face lift
    Mat mass, mass_inv;                     ///< reference mass matrix and inverse
    std::array<std::vector<int>, 4> fmask;  ///< face node index lists

    explicit ReferenceElement(int n)
    {
        if (n < 1) throw std::invalid_argument("polynomial order must be >= 1");
        order = n;
        np = (n + 1) * (n + 2) * (n + 3) / 6;
        nfp = (n + 1) * (n + 2) / 2;

        build_nodes();
        v = vandermonde(r, s, t);
        inv_v = v.inverse();
        build_dmatrices();
        build_fmask();
        build_lift();
        mass_inv = v * v.transpose();
        mass = mass_inv.inverse();
    }

    /// Vandermonde matrix of the orthonormal basis at given points.
    Mat vandermonde(const Vec& rr, const Vec& ss, const Vec& tt) const
    {
        Mat vm(rr.size(), np);
        int sk = 0;
        for (int i = 0; i <= order; ++i)
            for (int j = 0; j <= order - i; ++j)
                for (int k = 0; k <= order - i - j; ++k, ++sk)
                    for (int m = 0; m < rr.size(); ++m) {
                        double a, b, c;
                        detail::rst_to_abc(rr(m), ss(m), tt(m), a, b, c);
                        vm(m, sk) = detail::simplex3dp(a, b, c, i, j, k);
                    }
        return vm;
    }

    /// Lagrange basis values at a reference point; interpolation weights.
    Vec interp_weights(double rr, double ss, double tt) const
    {
        Vec p(np);
        int sk = 0;
        for (int i = 0; i <= order; ++i)
            for (int j = 0; j <= order - i; ++j)
                for (int k = 0; k <= order - i - j; ++k, ++sk) {
                    double a, b, c;
                    detail::rst_to_abc(rr, ss, tt, a, b, c);
                    p(sk) = detail::simplex3dp(a, b, c, i, j, k);
                }
        return inv_v.transpose() * p;
    }

private:
    void build_nodes()
    {
        const int n = order;
        static const double alpha_store[15] = {0,      0,      0,      0.1002,
                                               1.1332, 1.5608, 1.3413, 1.2577,
                                               1.1603, 1.10153, 0.6080, 0.4523,
                                               0.8856, 0.8717, 0.9655};
        const double alpha = (n <= 15) ? alpha_store[n - 1] : 1.0;

        // equidistributed barycentric-style seed nodes
        Vec re(np), se(np), te(np);
        int sk = 0;
        for (int i = 0; i <= n; ++i)
            for (int j = 0; j <= n - i; ++j)
                for (int k = 0; k <= n - i - j; ++k, ++sk) {
                    re(sk) = -1.0 + 2.0 * k / double(n);
                    se(sk) = -1.0 + 2.0 * j / double(n);
                    te(sk) = -1.0 + 2.0 * i / double(n);
                }

        Vec l1 = 0.5 * (1.0 + te.array());
        Vec l2 = 0.5 * (1.0 + se.array());
        Vec l3 = (-0.5 * (1.0 + re.array() + se.array() + te.array())).matrix();
        Vec l4 = 0.5 * (1.0 + re.array());

        const Vec3 v1(-1.0, -1.0 / std::sqrt(3.0), -1.0 / std::sqrt(6.0));
        const Vec3 v2(1.0, -1.0 / std::sqrt(3.0), -1.0 / std::sqrt(6.0));
        const Vec3 v3(0.0, 2.0 / std::sqrt(3.0), -1.0 / std::sqrt(6.0));
        const Vec3 v4(0.0, 0.0, 3.0 / std::sqrt(6.0));

        std::array<Vec3, 4> t1 = {v2 - v1, v2 - v1, v3 - v2, v3 - v1};
        std::array<Vec3, 4> t2 = {v3 - 0.5 * (v1 + v2), v4 - 0.5 * (v1 + v2),
                                  v4 - 0.5 * (v2 + v3), v4 - 0.5 * (v1 + v3)};
        for (int f = 0; f < 4; ++f) {
            t1[f].normalize();
            t2[f].normalize();
        }

        Mat xyz(np, 3);
        for (int m = 0; m < np; ++m)
            xyz.row(m) = (l3(m) * v1 + l4(m) * v2 + l2(m) * v3 + l1(m) * v4)
                             .transpose();

        Mat shift = Mat::Zero(np, 3);
        for (int face = 0; face < 4; ++face) {
            Vec la, lb, lc, ld;
            switch (face) {
            case 0: la = l1; lb = l2; lc = l3; ld = l4; break;
            case 1: la = l2; lb = l1; lc = l3; ld = l4; break;
            case 2: la = l3; lb = l1; lc = l4; ld = l2; break;
            default: la = l4; lb = l1; lc = l3; ld = l2; break;
            }
            Vec warp1, warp2;
            detail::eval_shift(n, alpha, lb, lc, ld, warp1, warp2);

            for (int m = 0; m < np; ++m) {
                double blend = lb(m) * lc(m) * ld(m);
                const double denom = (lb(m) + 0.5 * la(m)) *
                                     (lc(m) + 0.5 * la(m)) *
                                     (ld(m) + 0.5 * la(m));
                if (denom > 1e-10)
                    blend *= (1.0 + alpha * alpha * la(m) * la(m)) / denom;
                shift.row(m) += blend * warp1(m) * t1[face].transpose() +
                                blend * warp2(m) * t2[face].transpose();
            }
            // nodes on the face itself take the pure 2D face warp
            for (int m = 0; m < np; ++m) {
                const int interior_count = (lb(m) > 1e-10) + (lc(m) > 1e-10) +
                                           (ld(m) > 1e-10);
                if (la(m) < 1e-10 && interior_count < 3)
                    shift.row(m) = warp1(m) * t1[face].transpose() +
                                   warp2(m) * t2[face].transpose();
            }
        }
        xyz += shift;

        // map equilateral coordinates back to the reference (r,s,t)
        r.resize(np);
        s.resize(np);
        t.resize(np);
        Eigen::Matrix3d a_mat;
        a_mat.col(0) = 0.5 * (v2 - v1);
        a_mat.col(1) = 0.5 * (v3 - v1);
        a_mat.col(2) = 0.5 * (v4 - v1);
        const Eigen::Matrix3d a_inv = a_mat.inverse();
        for (int m = 0; m < np; ++m) {
            const Vec3 rhs =
                xyz.row(m).transpose() - 0.5 * (v2 + v3 + v4 - v1);
            const Vec3 rst = a_inv * rhs;
            r(m) = rst(0);
            s(m) = rst(1);
            t(m) = rst(2);
        }
    }

    void build_dmatrices()
    {
        Mat vr(np, np), vs(np, np), vt(np, np);
        int sk = 0;
        for (int i = 0; i <= order; ++i)
            for (int j = 0; j <= order - i; ++j)
                for (int k = 0; k <= order - i - j; ++k, ++sk)
                    for (int m = 0; m < np; ++m) {
                        double a, b, c;
                        detail::rst_to_abc(r(m), s(m), t(m), a, b, c);
                        detail::grad_simplex3dp(a, b, c, i, j, k, vr(m, sk),
                                                vs(m, sk), vt(m, sk));
                    }
        dr = vr * inv_v;
        ds = vs * inv_v;
        dt = vt * inv_v;
    }

    void build_fmask()
    {
        const double tol = 1e-8;
        for (int m = 0; m < np; ++m) {
            if (std::abs(t(m) + 1.0) < tol) fmask[0].push_back(m);
            if (std::abs(s(m) + 1.0) < tol) fmask[1].push_back(m);
            if (std::abs(r(m) + s(m) + t(m) + 1.0) < tol) fmask[2].push_back(m);
            if (std::abs(r(m) + 1.0) < tol) fmask[3].push_back(m);
        }
        for (const auto& f : fmask)
            if (int(f.size()) != nfp)
                throw std::runtime_error("face node count mismatch");
    }

    void build_lift()
    {
        Mat emat = Mat::Zero(np, 4 * nfp);
        for (int face = 0; face < 4; ++face) {
            Vec face_r(nfp), face_s(nfp);
            for (int m = 0; m < nfp; ++m) {
                const int id = fmask[face][m];
                switch (face) {
                case 0: face_r(m) = r(id); face_s(m) = s(id); break;
                case 1: face_r(m) = r(id); face_s(m) = t(id); break;
                case 2: face_r(m) = s(id); face_s(m) = t(id); break;
                default: face_r(m) = s(id); face_s(m) = t(id); break;
                }
            }
            const Mat vface = detail::vandermonde2d(order, face_r, face_s);
            const Mat mass_face = (vface * vface.transpose()).inverse();
            for (int m = 0; m < nfp; ++m)
                for (int q = 0; q < nfp; ++q)
                    emat(fmask[face][m], face * nfp + q) += mass_face(m, q);
        }
        lift = v * (v.transpose() * emat);
    }
};

} // namespace tdlsm

#endif
