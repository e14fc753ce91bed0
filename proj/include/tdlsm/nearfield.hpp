#ifndef TDLSM_NEARFIELD_HPP
#define TDLSM_NEARFIELD_HPP

#include "tdlsm/dataset.hpp"
#include "tdlsm/fft.hpp"
#include "tdlsm/math.hpp"

#include <complex>
#include <memory>
#include <stdexcept>
#include <vector>

namespace tdlsm {

/// Density-side unknown of the discrete near-field equation: one column of
/// length N_T per flattened (source, polarization) index, 2*N_I columns.
using DensityVector = Mat;

/// Trace-side vector: one column of length N_T per flattened
/// (measurement, tangent) index (i,q) -> 2*i + q, 2*N_M columns.
using TraceVector = Mat;

/// Block time-convolution kernel of the discrete near-field operator.
/// kernel[(i,q)][(k,l)][m] is the measured trace scaled by w_k / N_T, with
/// the FFT of each (zero-padded, lag-shifted) time series cached.
class NearFieldKernel {
public:
    int n_i = 0; ///< source points
    int n_m = 0; ///< measurement points
    int n_t = 0; ///< time samples

    int rows() const { return 2 * n_m; }
    int cols() const { return 2 * n_i; }
    std::size_t fft_length() const { return fft_->length(); }
    const Digest& data_hash() const { return data_hash_; }

    /// time series of one (row, col) block, m = 1..N_T (index m-1)
    const double* series(int row, int col) const
    {
        return time_.data() + (std::size_t(row) * cols() + col) * n_t;
    }

    const std::complex<double>* spectrum(int row, int col) const
    {
        return spec_.data() +
               (std::size_t(row) * cols() + col) * fft_->spectrum_size();
    }

    const RealFft& fft() const { return *fft_; }

    friend NearFieldKernel build_kernel(const DataSet& ds);

private:
    std::vector<double> time_;                ///< scaled kernel series
    std::vector<std::complex<double>> spec_;  ///< cached padded transforms
    std::shared_ptr<RealFft> fft_;
    Digest data_hash_{};
};

/// Build the kernel from a dataset: entries are the traces scaled by
/// w_k / N_T; transforms are zero-padded to the next power of two
/// >= 2*N_T - 1 so the convolution is linear and causal. The one-sample
/// shift (kernel lag m corresponds to t_j - t_l = m * dt, m >= 1) is folded
/// into the padded series as a leading zero.
inline NearFieldKernel build_kernel(const DataSet& ds)
{
    NearFieldKernel k;
    k.n_i = ds.n_sources();
    k.n_m = ds.n_meas();
    k.n_t = ds.n_t;
    k.data_hash_ = ds.content_hash;

    const std::size_t nf = next_pow2(std::size_t(2) * k.n_t - 1);
    k.fft_ = std::make_shared<RealFft>(nf);

    k.time_.assign(std::size_t(k.rows()) * k.cols() * k.n_t, 0.0);
    k.spec_.assign(std::size_t(k.rows()) * k.cols() * k.fft_->spectrum_size(),
                   {0.0, 0.0});

    std::vector<double> padded(nf);
    for (int row = 0; row < k.rows(); ++row) {
        const int i = row / 2, q = row % 2;
        for (int col = 0; col < k.cols(); ++col) {
            const int src_point = col % k.n_i;
            const double scale =
                ds.source_grid.weights[src_point] / double(k.n_t);
            double* series =
                k.time_.data() + (std::size_t(row) * k.cols() + col) * k.n_t;
            for (int m = 0; m < k.n_t; ++m)
                series[m] = scale * ds.trace(col, i, q, m);
            // padded lag series: index m holds the kernel at lag m; lag 0 is
            // zero and the last stored sample (lag N_T) cannot reach any
            // in-range output, so only lags 1..N_T-1 enter the transform
            std::fill(padded.begin(), padded.end(), 0.0);
            for (int m = 1; m < k.n_t; ++m) padded[m] = series[m - 1];
            k.fft_->forward(padded.data(),
                            k.spec_.data() + (std::size_t(row) * k.cols() + col) *
                                                 k.fft_->spectrum_size());
        }
    }
    return k;
}

/// r[(i,q)][j] = sum_l sum_(k,l') K[(i,q)][(k,l')][j-l] g[(k,l')][l],
/// evaluated by per-pair FFT convolution accumulated in the spectral domain.
inline TraceVector apply(const NearFieldKernel& kernel, const DensityVector& g)
{
    if (g.rows() != kernel.n_t || g.cols() != kernel.cols())
        throw std::invalid_argument("density dimensions mismatch");
    const std::size_t nf = kernel.fft_length();
    const std::size_t ns = kernel.fft().spectrum_size();

    std::vector<std::complex<double>> ghat(std::size_t(kernel.cols()) * ns);
    {
        std::vector<double> padded(nf, 0.0);
        for (int col = 0; col < kernel.cols(); ++col) {
            std::fill(padded.begin(), padded.end(), 0.0);
            for (int l = 0; l < kernel.n_t; ++l) padded[l] = g(l, col);
            kernel.fft().forward(padded.data(), ghat.data() + col * ns);
        }
    }

    TraceVector r(kernel.n_t, kernel.rows());
    parallel_for(0, kernel.rows(), [&](std::int64_t row) {
        std::vector<std::complex<double>> acc(ns, {0.0, 0.0});
        for (int col = 0; col < kernel.cols(); ++col) {
            const auto* kf = kernel.spectrum(int(row), col);
            const auto* gf = ghat.data() + col * ns;
            for (std::size_t f = 0; f < ns; ++f) acc[f] += kf[f] * gf[f];
        }
        std::vector<double> out(nf);
        kernel.fft().inverse(acc.data(), out.data());
        for (int j = 0; j < kernel.n_t; ++j) r(j, row) = out[j] / double(nf);
    });
    return r;
}

/// Exact transpose of apply as a linear map (time correlation).
inline DensityVector apply_adjoint(const NearFieldKernel& kernel,
                                   const TraceVector& r)
{
    if (r.rows() != kernel.n_t || r.cols() != kernel.rows())
        throw std::invalid_argument("trace dimensions mismatch");
    const std::size_t nf = kernel.fft_length();
    const std::size_t ns = kernel.fft().spectrum_size();

    std::vector<std::complex<double>> rhat(std::size_t(kernel.rows()) * ns);
    {
        std::vector<double> padded(nf, 0.0);
        for (int row = 0; row < kernel.rows(); ++row) {
            std::fill(padded.begin(), padded.end(), 0.0);
            for (int j = 0; j < kernel.n_t; ++j) padded[j] = r(j, row);
            kernel.fft().forward(padded.data(), rhat.data() + row * ns);
        }
    }

    DensityVector g(kernel.n_t, kernel.cols());
    parallel_for(0, kernel.cols(), [&](std::int64_t col) {
        std::vector<std::complex<double>> acc(ns, {0.0, 0.0});
        for (int row = 0; row < kernel.rows(); ++row) {
            const auto* kf = kernel.spectrum(row, int(col));
            const auto* rf = rhat.data() + std::size_t(row) * ns;
            for (std::size_t f = 0; f < ns; ++f)
                acc[f] += std::conj(kf[f]) * rf[f];
        }
        std::vector<double> out(nf);
        kernel.fft().inverse(acc.data(), out.data());
        for (int l = 0; l < kernel.n_t; ++l) g(l, col) = out[l] / double(nf);
    });
    return g;
}

/// Direct triple-loop evaluation of the same contract as apply; verification
/// oracle for small instances.
inline TraceVector dense_oracle(const NearFieldKernel& kernel,
                                const DensityVector& g)
{
    const std::size_t mat_entries = std::size_t(kernel.rows()) * kernel.n_t *
                                    kernel.cols() * kernel.n_t;
    if (mat_entries > std::size_t(1e7))
        throw std::invalid_argument("dense_oracle size guard exceeded");
    if (g.rows() != kernel.n_t || g.cols() != kernel.cols())
        throw std::invalid_argument("density dimensions mismatch");

    TraceVector r = TraceVector::Zero(kernel.n_t, kernel.rows());
    for (int row = 0; row < kernel.rows(); ++row)
        for (int col = 0; col < kernel.cols(); ++col) {
            const double* series = kernel.series(row, col);
            for (int j = 1; j <= kernel.n_t; ++j)
                for (int l = 1; l <= kernel.n_t; ++l) {
                    const int m = j - l;
                    if (m < 1 || m > kernel.n_t) continue;
                    r(j - 1, row) += series[m - 1] * g(l - 1, col);
                }
        }
    return r;
}

} // namespace tdlsm

#endif
