#ifndef TDLSM_DG_HPP
#define TDLSM_DG_HPP

#include "tdlsm/geometry.hpp"
#include "tdlsm/incident.hpp"
#include "tdlsm/mesh.hpp"
#include "tdlsm/reference_element.hpp"
#include "tdlsm/sponge.hpp"

#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>

namespace tdlsm {

/// Boundary treatment of one exterior face kind.
struct BoundarySpec {
    BoundaryTag kind = BoundaryTag::PEC;
    double eps_bc = 1.0; ///< Impedance only
    double mu_bc = 1.0;  ///< Impedance only
};

struct TraceState {
    Vec3 E = Vec3::Zero();
    Vec3 H = Vec3::Zero();
};

/// Upwind interface flux terms nu.(F- - F*) for the E and H equations.
/// Jumps are exterior minus interior.
inline void upwind_flux(const TraceState& interior, const TraceState& exterior,
                        const Vec3& nu, double z_m, double z_p, double y_m,
                        double y_p, Vec3& flux_e, Vec3& flux_h)
{
    const Vec3 de = exterior.E - interior.E;
    const Vec3 dh = exterior.H - interior.H;
    flux_e = (1.0 / (z_p + z_m)) * nu.cross(z_p * dh - nu.cross(de));
    flux_h = -(1.0 / (y_p + y_m)) * nu.cross(y_p * de + nu.cross(dh));
}

/// Exterior ghost trace and ghost materials for a boundary face.
inline TraceState ghost_state(const BoundarySpec& bc, const TraceState& interior,
                              double eps_m, double mu_m, double& eps_p,
                              double& mu_p)
{
    TraceState g;
    switch (bc.kind) {
    case BoundaryTag::PEC:
        g.E = -interior.E;
        g.H = interior.H;
        eps_p = eps_m;
        mu_p = mu_m;
        break;
    case BoundaryTag::Impedance:
        g.E = Vec3::Zero();
        g.H = Vec3::Zero();
        eps_p = bc.eps_bc;
        mu_p = bc.mu_bc;
        break;
    case BoundaryTag::SilverMuller:
        // impedance condition with the interior element's materials
        g.E = Vec3::Zero();
        g.H = Vec3::Zero();
        eps_p = eps_m;
        mu_p = mu_m;
        break;
    default:
        throw std::invalid_argument("unknown boundary kind");
    }
    return g;
}

/// Nodal damping field beta for the sponge layer, evaluated on the stretched
/// nodal coordinates.
inline Mat compute_nodal_beta(const Mat& x, const Mat& y, const Mat& z,
                              const SpongeSpec& spec)
{
    Mat beta = Mat::Zero(x.rows(), x.cols());
    if (!spec.enabled()) return beta;
    for (int e = 0; e < x.cols(); ++e)
        for (int m = 0; m < x.rows(); ++m)
            beta(m, e) =
                sponge_beta3({x(m, e), y(m, e), z(m, e)}, spec);
    return beta;
}

/// CFL time step: min over elements of h_min / (2 c (N+1)^2), with h_min the
/// smallest vertex-pair distance of the element.
inline double cfl_timestep(const Mesh& mesh, const MaterialMap& materials,
                           int order)
{
    if (mesh.num_elements() == 0) throw std::invalid_argument("empty mesh");
    double dt = std::numeric_limits<double>::infinity();
    for (int e = 0; e < mesh.num_elements(); ++e) {
        double hmin = std::numeric_limits<double>::infinity();
        const auto& t = mesh.tets[e];
        for (int a = 0; a < 4; ++a)
            for (int b = a + 1; b < 4; ++b)
                hmin = std::min(
                    hmin, (mesh.vertices[t[a]] - mesh.vertices[t[b]]).norm());
        const double c = materials.wave_speed(e);
        dt = std::min(dt, hmin / (2.0 * c * (order + 1.0) * (order + 1.0)));
    }
    return dt;
}

/// Nodal E/H coefficients for all elements (np x K per component).
struct FieldState {
    std::array<Mat, 3> E;
    std::array<Mat, 3> H;
    double t = 0.0;

    static FieldState zero(int np, int nk)
    {
        FieldState q;
        for (int c = 0; c < 3; ++c) {
            q.E[c] = Mat::Zero(np, nk);
            q.H[c] = Mat::Zero(np, nk);
        }
        return q;
    }

    double max_abs() const
    {
        double m = 0.0;
        for (int c = 0; c < 3; ++c)
            m = std::max({m, E[c].cwiseAbs().maxCoeff(),
                          H[c].cwiseAbs().maxCoeff()});
        return m;
    }
};

/// Semi-discrete nodal DG Maxwell operator: volume curls, upwind face
/// fluxes, boundary ghost states, sponge damping, and optional point-dipole
/// source injection.
class DGOperator {
public:
    DGOperator(const Mesh& mesh, const GeomFactors& factors,
               const MaterialMap& materials, const ReferenceElement& ref,
               BoundarySpec impedance_bc = {BoundaryTag::Impedance, 1.0, 1.0})
        : mesh_(mesh), geo_(factors), mat_(materials), ref_(ref),
          imp_bc_(impedance_bc)
    {
        const int nk = mesh.num_elements();
        const int np = ref.np;
        x_ = Mat(np, nk);
        y_ = Mat(np, nk);
        z_ = Mat(np, nk);
        for (int e = 0; e < nk; ++e) {
            const auto& t = mesh.tets[e];
            for (int m = 0; m < np; ++m) {
                const Vec3 p =
                    mesh.vertices[t[0]] +
                    0.5 * (ref.r(m) + 1.0) *
                        (mesh.vertices[t[1]] - mesh.vertices[t[0]]) +
                    0.5 * (ref.s(m) + 1.0) *
                        (mesh.vertices[t[2]] - mesh.vertices[t[0]]) +
                    0.5 * (ref.t(m) + 1.0) *
                        (mesh.vertices[t[3]] - mesh.vertices[t[0]]);
                x_(m, e) = p(0);
                y_(m, e) = p(1);
                z_(m, e) = p(2);
            }
        }
        set_damping((materials.beta.rows() == np &&
                     materials.beta.cols() == nk)
                        ? materials.beta
                        : Mat::Zero(np, nk));
        build_face_maps();
    }

    const Mat& x() const { return x_; }
    const Mat& y() const { return y_; }
    const Mat& z() const { return z_; }
    const ReferenceElement& ref() const { return ref_; }
    const Mesh& mesh() const { return mesh_; }
    const GeomFactors& factors() const { return geo_; }
    const MaterialMap& materials() const { return mat_; }

    void set_damping(const Mat& beta)
    {
        beta_ = beta;
        has_damping_ = beta_.size() > 0 && beta_.cwiseAbs().maxCoeff() > 0.0;
    }

    FieldState zero_state() const
    {
        return FieldState::zero(ref_.np, mesh_.num_elements());
    }

    /// dq/dt at time t. An optional dipole source either drives the
    /// scatterer boundary data of a scattered-field run (as_boundary set:
    /// the ghost state is the total-field ghost of interior + incident,
    /// minus the incident trace) or is injected as a volume current by
    /// testing the Dirac against the nodal basis of the owning element.
    void rhs(const FieldState& q, double t, FieldState& dq,
             const DipoleSource* source = nullptr) const
    {
        const int nk = mesh_.num_elements();
        const int np = ref_.np;
        const int nfp4 = 4 * ref_.nfp;
        if (q.E[0].rows() != np || q.E[0].cols() != nk)
            throw std::invalid_argument("state dimensions mismatch");

        // volume curls
        std::array<Mat, 3> curl_e, curl_h;
        curl(q.E, curl_e);
        curl(q.H, curl_h);

        // face flux arrays (4*nfp x K)
        std::array<Mat, 3> fe, fh;
        for (int c = 0; c < 3; ++c) {
            fe[c] = Mat(nfp4, nk);
            fh[c] = Mat(nfp4, nk);
        }
        for (int e = 0; e < nk; ++e) {
            const double eps_m = mat_.eps_r[e];
            const double mu_m = mat_.mu_r[e];
            const double z_m = std::sqrt(mu_m / eps_m);
            for (int f = 0; f < 4; ++f) {
                const Vec3& nu = geo_.normal[e][f];
                const double fscale = geo_.sjac[e][f] / geo_.jac[e];
                const auto& nb = mesh_.face_neighbors[e][f];
                for (int m = 0; m < ref_.nfp; ++m) {
                    const int row = f * ref_.nfp + m;
                    const int im = ref_.fmask[f][m];
                    TraceState in{{q.E[0](im, e), q.E[1](im, e), q.E[2](im, e)},
                                  {q.H[0](im, e), q.H[1](im, e), q.H[2](im, e)}};
                    TraceState ex;
                    double eps_p, mu_p;
                    if (nb.interior()) {
                        const int ip = vmap_p_[(std::size_t(e) * 4 + f) *
                                                   ref_.nfp + m];
                        ex.E = {q.E[0](ip, nb.elem), q.E[1](ip, nb.elem),
                                q.E[2](ip, nb.elem)};
                        ex.H = {q.H[0](ip, nb.elem), q.H[1](ip, nb.elem),
                                q.H[2](ip, nb.elem)};
                        eps_p = mat_.eps_r[nb.elem];
                        mu_p = mat_.mu_r[nb.elem];
                    } else {
                        BoundarySpec bc = imp_bc_;
                        bc.kind = nb.tag;
                        if (source && source->as_boundary && nb.scatterer) {
                            const Vec3 xn{x_(im, e), y_(im, e), z_(im, e)};
                            TraceState inc;
                            inc.E = dipole_E(xn, t, *source);
                            inc.H = dipole_H(xn, t, *source);
                            TraceState tot{in.E + inc.E, in.H + inc.H};
                            ex = ghost_state(bc, tot, eps_m, mu_m, eps_p,
                                             mu_p);
                            ex.E -= inc.E;
                            ex.H -= inc.H;
                        } else {
                            ex = ghost_state(bc, in, eps_m, mu_m, eps_p,
                                             mu_p);
                        }
                    }
                    const double z_p = std::sqrt(mu_p / eps_p);
                    Vec3 flux_e, flux_h;
                    upwind_flux(in, ex, nu, z_m, z_p, 1.0 / z_m, 1.0 / z_p,
                                flux_e, flux_h);
                    for (int c = 0; c < 3; ++c) {
                        fe[c](row, e) = fscale * flux_e(c);
                        fh[c](row, e) = fscale * flux_h(c);
                    }
                }
            }
        }

        for (int c = 0; c < 3; ++c) {
            dq.E[c] = ref_.lift * fe[c];
            dq.E[c] += curl_h[c];
            dq.H[c] = ref_.lift * fh[c];
            dq.H[c] -= curl_e[c];
        }
        for (int e = 0; e < nk; ++e) {
            const double inv_eps = 1.0 / mat_.eps_r[e];
            const double inv_mu = 1.0 / mat_.mu_r[e];
            for (int c = 0; c < 3; ++c) {
                dq.E[c].col(e) *= inv_eps;
                dq.H[c].col(e) *= inv_mu;
            }
        }
        // sponge damping, applied nodewise to both fields
        if (has_damping_)
            for (int c = 0; c < 3; ++c) {
                dq.E[c] -= beta_.cwiseProduct(q.E[c]);
                dq.H[c] -= beta_.cwiseProduct(q.H[c]);
            }

        if (source && !source->as_boundary) inject_source(*source, t, dq);
        dq.t = 1.0; // dt/dt
    }

    /// Discrete electromagnetic energy 0.5 * sum_k J_k (eps E.M.E + mu H.M.H).
    double energy(const FieldState& q) const
    {
        double total = 0.0;
        for (int e = 0; e < mesh_.num_elements(); ++e) {
            double ee = 0.0, hh = 0.0;
            for (int c = 0; c < 3; ++c) {
                ee += q.E[c].col(e).dot(ref_.mass * q.E[c].col(e));
                hh += q.H[c].col(e).dot(ref_.mass * q.H[c].col(e));
            }
            total += 0.5 * geo_.jac[e] *
                     (mat_.eps_r[e] * ee + mat_.mu_r[e] * hh);
        }
        return total;
    }

    /// Locate the element containing a point; returns element id and the
    /// Lagrange interpolation weights, or nullopt if outside the mesh.
    std::optional<std::pair<int, Vec>> locate(const Vec3& p,
                                             double tol = 1e-8) const
    {
        for (int e = 0; e < mesh_.num_elements(); ++e) {
            const auto& t = mesh_.tets[e];
            Eigen::Matrix3d a;
            a.col(0) = mesh_.vertices[t[1]] - mesh_.vertices[t[0]];
            a.col(1) = mesh_.vertices[t[2]] - mesh_.vertices[t[0]];
            a.col(2) = mesh_.vertices[t[3]] - mesh_.vertices[t[0]];
            const Vec3 lam = a.inverse() * (p - mesh_.vertices[t[0]]);
            if (lam.minCoeff() >= -tol && lam.sum() <= 1.0 + tol) {
                const Vec w = ref_.interp_weights(2.0 * lam(0) - 1.0,
                                                  2.0 * lam(1) - 1.0,
                                                  2.0 * lam(2) - 1.0);
                return std::make_pair(e, w);
            }
        }
        return std::nullopt;
    }

    Vec3 interpolate_E(const FieldState& q, int elem, const Vec& w) const
    {
        return {w.dot(q.E[0].col(elem)), w.dot(q.E[1].col(elem)),
                w.dot(q.E[2].col(elem))};
    }

private:
    void curl(const std::array<Mat, 3>& u, std::array<Mat, 3>& out) const
    {
        const int nk = mesh_.num_elements();
        std::array<Mat, 3> ur, us, ut;
        for (int c = 0; c < 3; ++c) {
            ur[c].noalias() = ref_.dr * u[c];
            us[c].noalias() = ref_.ds * u[c];
            ut[c].noalias() = ref_.dt * u[c];
            out[c].resize(u[c].rows(), nk);
        }
        for (int e = 0; e < nk; ++e) {
            const Eigen::Matrix3d& d = geo_.dinv[e];
            // d/dxj of component c = d(0,j)*ur + d(1,j)*us + d(2,j)*ut
            auto deriv = [&](int c, int j) {
                return d(0, j) * ur[c].col(e) + d(1, j) * us[c].col(e) +
                       d(2, j) * ut[c].col(e);
            };
            out[0].col(e) = deriv(2, 1) - deriv(1, 2);
            out[1].col(e) = deriv(0, 2) - deriv(2, 0);
            out[2].col(e) = deriv(1, 0) - deriv(0, 1);
        }
    }

    void inject_source(const DipoleSource& src, double t, FieldState& dq) const
    {
        if (!src_cache_ || (src_cache_->point - src.y).norm() > 1e-14) {
            auto loc = locate(src.y);
            if (!loc)
                throw std::runtime_error("dipole source outside the mesh");
            SourceCache c;
            c.point = src.y;
            c.elem = loc->first;
            // delta tested against the nodal basis: M^{-1} l(x_s) / J
            c.coeff = (ref_.mass_inv * loc->second) / geo_.jac[c.elem];
            src_cache_ = c;
        }
        const double amp = ricker(t - src.tau, src.chi) /
                           mat_.eps_r[src_cache_->elem];
        for (int c = 0; c < 3; ++c)
            dq.E[c].col(src_cache_->elem) +=
                amp * src.p(c) * src_cache_->coeff;
    }

    void build_face_maps()
    {
        const int nk = mesh_.num_elements();
        vmap_p_.assign(std::size_t(nk) * 4 * ref_.nfp, -1);
        for (int e = 0; e < nk; ++e)
            for (int f = 0; f < 4; ++f) {
                const auto& nb = mesh_.face_neighbors[e][f];
                if (!nb.interior()) continue;
                const double href =
                    std::cbrt(geo_.jac[e]); // match tolerance scale
                for (int m = 0; m < ref_.nfp; ++m) {
                    const int im = ref_.fmask[f][m];
                    const Vec3 pm{x_(im, e), y_(im, e), z_(im, e)};
                    int best = -1;
                    double bestd = std::numeric_limits<double>::infinity();
                    for (int q = 0; q < ref_.nfp; ++q) {
                        const int ip = ref_.fmask[nb.face][q];
                        const Vec3 pp{x_(ip, nb.elem), y_(ip, nb.elem),
                                      z_(ip, nb.elem)};
                        const double dd = (pm - pp).squaredNorm();
                        if (dd < bestd) {
                            bestd = dd;
                            best = ip;
                        }
                    }
                    if (bestd > 1e-16 + 1e-12 * href * href)
                        throw std::runtime_error(
                            "non-conforming face: node match failed");
                    vmap_p_[(std::size_t(e) * 4 + f) * ref_.nfp + m] = best;
                }
            }
    }

    struct SourceCache {
        Vec3 point;
        int elem = -1;
        Vec coeff;
    };

    const Mesh& mesh_;
    const GeomFactors& geo_;
    MaterialMap mat_;
    const ReferenceElement& ref_;
    BoundarySpec imp_bc_;
    Mat x_, y_, z_;
    Mat beta_;
    bool has_damping_ = false;
    std::vector<int> vmap_p_;
    mutable std::optional<SourceCache> src_cache_;
};

} // namespace tdlsm

#endif
