#ifndef TDLSM_SVD_HPP
#define TDLSM_SVD_HPP

#include "tdlsm/math.hpp"
#include "tdlsm/sha256.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <cstring>
#include <fstream>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace tdlsm {

/// Matrix-free linear map: only products with the operator and its transpose.
struct LinearOperator {
    std::int64_t rows = 0;
    std::int64_t cols = 0;
    std::function<Vec(const Vec&)> apply;         ///< cols -> rows
    std::function<Vec(const Vec&)> apply_adjoint; ///< rows -> cols
};

struct SVDResult {
    Vec sigma;              ///< descending singular values
    Mat u;                  ///< rows x k left vectors
    Mat v;                  ///< cols x k right vectors
    Vec residuals;          ///< per-triplet residual estimates
    bool converged = true;  ///< all requested triplets met the tolerance
};

namespace detail {

/// Remove components of w along the columns of basis[0..m); two passes.
inline void reorthogonalize(Vec& w, const Mat& basis, int m)
{
    if (m == 0) return;
    for (int pass = 0; pass < 2; ++pass)
        w.noalias() -=
            basis.leftCols(m) * (basis.leftCols(m).transpose() * w);
}

} // namespace detail

/// Truncated SVD of a matrix-free operator by Golub-Kahan-Lanczos
/// bidiagonalization with full reorthogonalization. Expands the Krylov
/// subspace in rounds until the leading n_sv Ritz triplets have residual
/// estimate beta_m * |last component of the small left vector| below
/// tol_rel * sigma_1, or the subspace budget is exhausted (then the
/// converged subset is returned with converged = false).
inline SVDResult truncated_svd(const LinearOperator& op, int n_sv,
                               std::uint64_t seed = 42,
                               double tol_rel = 1e-6,
                               int max_subspace = -1)
{
    const std::int64_t n = op.cols, m_rows = op.rows;
    const std::int64_t dim = std::min(n, m_rows);
    if (n_sv < 1) throw std::invalid_argument("n_sv must be positive");
    if (n_sv > dim) n_sv = int(dim);
    if (max_subspace < 0)
        max_subspace = int(std::min<std::int64_t>(dim, 2 * n_sv + 40));
    max_subspace = int(std::min<std::int64_t>(max_subspace, dim));
    if (max_subspace < n_sv) max_subspace = n_sv;

    // deterministic unit start vector
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Vec v0(n);
    for (std::int64_t i = 0; i < n; ++i) v0(i) = gauss(rng);
    v0.normalize();

    Mat vbasis(n, max_subspace);
    Mat ubasis(m_rows, max_subspace);
    std::vector<double> alphas, betas; // betas[i] couples step i to i+1

    vbasis.col(0) = v0;
    int m = 0; // built bidiagonalization steps
    bool breakdown = false;
    double edge_beta = 0.0; // coupling left over when the budget ran out

    SVDResult out;
    Eigen::JacobiSVD<Mat> small_svd;

    while (true) {
        // expansion round: grow in chunks before re-checking convergence
        const int target =
            std::min(max_subspace, m == 0 ? std::max(n_sv + 10, 20)
                                          : m + std::max(n_sv / 2, 10));
        while (m < target && !breakdown) {
            Vec u = op.apply(vbasis.col(m));
            if (m > 0) u -= betas[m - 1] * ubasis.col(m - 1);
            detail::reorthogonalize(u, ubasis, m);
            double alpha = u.norm();
            if (alpha < 1e-14) { breakdown = true; break; }
            u /= alpha;
            ubasis.col(m) = u;
            alphas.push_back(alpha);

            Vec w = op.apply_adjoint(u);
            w -= alpha * vbasis.col(m);
            detail::reorthogonalize(w, vbasis, m + 1);
            double beta = w.norm();
            ++m;
            if (beta < 1e-14 || m == max_subspace) {
                if (beta < 1e-14) breakdown = true;
                else edge_beta = beta;
                break;
            }
            betas.push_back(beta);
            vbasis.col(m) = w / beta;
        }

        // SVD of the small upper-bidiagonal factor B: alphas on the diagonal,
        // betas on the superdiagonal, so that A V = U B exactly. On an
        // alpha-breakdown the pending beta couples to v_{m+1}, which then
        // spans an exact invariant direction and stays as an extra column.
        const bool invariant = breakdown && int(betas.size()) == m;
        const int kv = invariant ? m + 1 : m;
        Mat b = Mat::Zero(m, kv);
        for (int i = 0; i < m; ++i) b(i, i) = alphas[i];
        for (int i = 0; i + 1 < kv; ++i) b(i, i + 1) = betas[i];
        small_svd.compute(b, Eigen::ComputeFullU | Eigen::ComputeFullV);
        const Vec& s = small_svd.singularValues();
        const int k = std::min<int>(n_sv, m);
        const double sigma1 = s.size() ? s(0) : 0.0;
        double tail_beta = 0.0;
        if (!breakdown)
            tail_beta = int(betas.size()) == m ? betas[m - 1] : edge_beta;

        Vec res(k);
        bool all_ok = true;
        for (int i = 0; i < k; ++i) {
            // adjoint residual of the Ritz triplet: || A^T u_i - s_i v_i ||
            res(i) = tail_beta * std::abs(small_svd.matrixU()(m - 1, i));
            if (res(i) > tol_rel * sigma1) all_ok = false;
        }

        if (all_ok || breakdown || m >= max_subspace) {
            int kept = k;
            if (!all_ok) {
                // keep only the leading converged prefix
                kept = 0;
                while (kept < k && res(kept) <= tol_rel * sigma1) ++kept;
                if (kept == 0) kept = k; // report best effort
            }
            out.sigma = s.head(kept);
            out.u = ubasis.leftCols(m) * small_svd.matrixU().leftCols(kept);
            out.v = vbasis.leftCols(kv) * small_svd.matrixV().leftCols(kept);
            out.residuals = res.head(kept);
            out.converged = all_ok || breakdown;
            return out;
        }
    }
}

/// Leading-k prefix of a decomposition (for n_sv sweeps over one checkpoint).
inline SVDResult truncate(const SVDResult& svd, int k)
{
    if (k >= svd.sigma.size()) return svd;
    SVDResult out;
    out.sigma = svd.sigma.head(k);
    out.u = svd.u.leftCols(k);
    out.v = svd.v.leftCols(k);
    out.residuals = svd.residuals.head(k);
    out.converged = svd.converged;
    return out;
}

/// Tikhonov-regularized solve from a truncated SVD:
/// g = sum_i sigma_i / (sigma_i^2 + gamma) <u_i, b> v_i.
inline Vec solve_regularized(const SVDResult& svd, const Vec& b, double gamma)
{
    const Vec c = svd.u.transpose() * b;
    Vec f(svd.sigma.size());
    for (int i = 0; i < svd.sigma.size(); ++i)
        f(i) = svd.sigma(i) / (svd.sigma(i) * svd.sigma(i) + gamma) * c(i);
    return svd.v * f;
}

/// || g ||^2 without forming g (right singular vectors are orthonormal).
inline double regularized_norm_sq(const SVDResult& svd, const Vec& b,
                                  double gamma)
{
    const Vec c = svd.u.transpose() * b;
    double acc = 0.0;
    for (int i = 0; i < svd.sigma.size(); ++i) {
        const double f =
            svd.sigma(i) / (svd.sigma(i) * svd.sigma(i) + gamma) * c(i);
        acc += f * f;
    }
    return acc;
}

inline constexpr char kSvdMagic[9] = "TDLSVD01";

/// Checkpoint the decomposition together with the hash of the kernel data it
/// was computed from, so a stale checkpoint is detected on load.
inline void save_svd(const SVDResult& svd, const Digest& kernel_hash,
                     const std::string& path)
{
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open for write: " + path);
    f.write(kSvdMagic, 8);
    f.write(reinterpret_cast<const char*>(kernel_hash.data()), 32);
    const std::uint32_t k = std::uint32_t(svd.sigma.size());
    const std::uint64_t rows = std::uint64_t(svd.u.rows());
    const std::uint64_t cols = std::uint64_t(svd.v.rows());
    const std::uint8_t conv = svd.converged ? 1 : 0;
    f.write(reinterpret_cast<const char*>(&k), 4);
    f.write(reinterpret_cast<const char*>(&rows), 8);
    f.write(reinterpret_cast<const char*>(&cols), 8);
    f.write(reinterpret_cast<const char*>(&conv), 1);
    auto dump = [&](const double* p, std::size_t count) {
        f.write(reinterpret_cast<const char*>(p),
                std::streamsize(count * sizeof(double)));
    };
    dump(svd.sigma.data(), k);
    dump(svd.residuals.data(), k);
    dump(svd.u.data(), std::size_t(rows) * k);
    dump(svd.v.data(), std::size_t(cols) * k);
    if (!f) throw std::runtime_error("write failed: " + path);
}

/// Load a checkpoint. Throws on a malformed file; a kernel-hash mismatch
/// against `expect_hash` only sets *hash_ok = false.
inline SVDResult load_svd(const std::string& path, const Digest& expect_hash,
                          bool* hash_ok = nullptr)
{
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open checkpoint: " + path);
    char magic[8];
    f.read(magic, 8);
    if (!f || std::memcmp(magic, kSvdMagic, 8) != 0)
        throw std::runtime_error("bad checkpoint magic: " + path);
    Digest stored;
    f.read(reinterpret_cast<char*>(stored.data()), 32);
    std::uint32_t k;
    std::uint64_t rows, cols;
    std::uint8_t conv;
    f.read(reinterpret_cast<char*>(&k), 4);
    f.read(reinterpret_cast<char*>(&rows), 8);
    f.read(reinterpret_cast<char*>(&cols), 8);
    f.read(reinterpret_cast<char*>(&conv), 1);
    if (!f) throw std::runtime_error("checkpoint truncated: " + path);

    SVDResult svd;
    svd.sigma.resize(k);
    svd.residuals.resize(k);
    svd.u.resize(std::int64_t(rows), k);
    svd.v.resize(std::int64_t(cols), k);
    svd.converged = conv != 0;
    auto slurp = [&](double* p, std::size_t count) {
        f.read(reinterpret_cast<char*>(p),
               std::streamsize(count * sizeof(double)));
    };
    slurp(svd.sigma.data(), k);
    slurp(svd.residuals.data(), k);
    slurp(svd.u.data(), std::size_t(rows) * k);
    slurp(svd.v.data(), std::size_t(cols) * k);
    if (!f) throw std::runtime_error("checkpoint truncated: " + path);
    if (hash_ok) *hash_ok = (stored == expect_hash);
    return svd;
}

} // namespace tdlsm

#endif
