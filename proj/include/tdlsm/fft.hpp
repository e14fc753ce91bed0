#ifndef TDLSM_FFT_HPP
#define TDLSM_FFT_HPP

#include <fftw3.h>

#include <complex>
#include <cstring>
#include <mutex>
#include <stdexcept>
#include <vector>

namespace tdlsm {

/// Real-input FFT of a fixed length. Plan creation is serialized (FFTW
/// planning is not thread-safe); execution on caller-owned arrays is safe
/// from any thread.
class RealFft {
public:
    explicit RealFft(std::size_t n) : n_(n)
    {
        if (n < 2) throw std::invalid_argument("fft length must be >= 2");
        std::lock_guard<std::mutex> lock(plan_mutex());
        std::vector<double> re(n);
        std::vector<std::complex<double>> cplx(n / 2 + 1);
        fwd_ = fftw_plan_dft_r2c_1d(
            int(n), re.data(), reinterpret_cast<fftw_complex*>(cplx.data()),
            FFTW_ESTIMATE | FFTW_UNALIGNED);
        inv_ = fftw_plan_dft_c2r_1d(
            int(n), reinterpret_cast<fftw_complex*>(cplx.data()), re.data(),
            FFTW_ESTIMATE | FFTW_UNALIGNED);
        if (!fwd_ || !inv_) throw std::runtime_error("fftw plan failed");
    }
    ~RealFft()
    {
        std::lock_guard<std::mutex> lock(plan_mutex());
        fftw_destroy_plan(fwd_);
        fftw_destroy_plan(inv_);
    }
    RealFft(const RealFft&) = delete;
    RealFft& operator=(const RealFft&) = delete;

    std::size_t length() const { return n_; }
    std::size_t spectrum_size() const { return n_ / 2 + 1; }

    void forward(const double* in, std::complex<double>* out) const
    {
        fftw_execute_dft_r2c(fwd_, const_cast<double*>(in),
                             reinterpret_cast<fftw_complex*>(out));
    }

    /// Unnormalized inverse (result scaled by length()); destroys `in`.
    void inverse(std::complex<double>* in, double* out) const
    {
        fftw_execute_dft_c2r(inv_, reinterpret_cast<fftw_complex*>(in), out);
    }

private:
    static std::mutex& plan_mutex()
    {
        static std::mutex m;
        return m;
    }
    std::size_t n_;
    fftw_plan fwd_;
    fftw_plan inv_;
};

} // namespace tdlsm

#endif
