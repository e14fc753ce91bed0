#include "tdlsm/nearfield.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace tdlsm;

namespace {

DataSet random_dataset(int per_face_src, int per_face_meas, int n_t,
                       unsigned seed, double scale = 1.0)
{
    DataSet ds;
    ds.source_grid = build_probe_grid(per_face_src, 4.0, GridRole::Source);
    ds.measurement_grid =
        build_probe_grid(per_face_meas, 4.0, GridRole::Measurement);
    ds.t_max = 2.0;
    ds.n_t = n_t;
    ds.allocate();
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    for (auto& v : ds.traces) v = scale * uni(rng);
    return ds;
}

DensityVector random_density(const NearFieldKernel& k, unsigned seed)
{
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    DensityVector g(k.n_t, k.cols());
    for (int c = 0; c < g.cols(); ++c)
        for (int r = 0; r < g.rows(); ++r) g(r, c) = uni(rng);
    return g;
}

} // namespace

TEST_CASE("kernel scaling and spectrum round-trip")
{
    // all-zero traces give a zero kernel
    DataSet zeros = random_dataset(1, 1, 8, 1, 0.0);
    NearFieldKernel kz = build_kernel(zeros);
    for (int row = 0; row < kz.rows(); ++row)
        for (int col = 0; col < kz.cols(); ++col)
            for (int m = 0; m < kz.n_t; ++m)
                REQUIRE(kz.series(row, col)[m] == 0.0);

    // unit trace with uniform weight 64/9 at N_T = 1250: scale 64/11250
    DataSet unit;
    unit.source_grid = build_probe_grid(3, 4.0, GridRole::Source);
    unit.measurement_grid = build_probe_grid(1, 4.0, GridRole::Measurement);
    unit.t_max = 20.0;
    unit.n_t = 1250;
    unit.allocate();
    for (auto& v : unit.traces) v = 1.0;
    NearFieldKernel ku = build_kernel(unit);
    REQUIRE(ku.series(0, 0)[0] ==
            Catch::Approx(64.0 / 11250.0).epsilon(1e-14));

    // cached spectra reproduce the padded series through the inverse FFT
    DataSet ds = random_dataset(1, 1, 16, 2);
    NearFieldKernel k = build_kernel(ds);
    const std::size_t nf = k.fft_length();
    std::vector<std::complex<double>> spec(
        k.spectrum(1, 1), k.spectrum(1, 1) + k.fft().spectrum_size());
    std::vector<double> back(nf);
    k.fft().inverse(spec.data(), back.data());
    REQUIRE(std::abs(back[0] / double(nf)) < 1e-12);
    for (int m = 1; m < k.n_t; ++m)
        REQUIRE(back[m] / double(nf) ==
                Catch::Approx(k.series(1, 1)[m - 1]).margin(1e-12));
}

TEST_CASE("apply matches the dense oracle")
{
    for (unsigned seed : {3u, 4u, 5u}) {
        DataSet ds = random_dataset(1, 1, 8 + 2 * seed, seed);
        NearFieldKernel k = build_kernel(ds);
        DensityVector g = random_density(k, seed + 100);
        const TraceVector fast = apply(k, g);
        const TraceVector slow = dense_oracle(k, g);
        REQUIRE((fast - slow).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("convolution with a unit impulse reproduces the kernel")
{
    DataSet ds = random_dataset(1, 1, 12, 7);
    NearFieldKernel k = build_kernel(ds);
    const int col0 = 1, l0 = 3; // impulse at time index l0 (1-based l0+1)
    DensityVector g = DensityVector::Zero(k.n_t, k.cols());
    g(l0, col0) = 1.0;
    const TraceVector r = apply(k, g);
    for (int row = 0; row < k.rows(); ++row)
        for (int j = 0; j < k.n_t; ++j) {
            const int m = j - l0; // lag in samples
            const double want =
                (m >= 1 && m <= k.n_t) ? k.series(row, col0)[m - 1] : 0.0;
            REQUIRE(r(j, row) == Catch::Approx(want).margin(1e-13));
        }
}

TEST_CASE("causality structure of the map")
{
    // density supported at a single time only influences strictly later
    // outputs
    DataSet ds = random_dataset(1, 1, 16, 8);
    NearFieldKernel k = build_kernel(ds);
    DensityVector g = DensityVector::Zero(k.n_t, k.cols());
    const int l0 = 9;
    for (int c = 0; c < k.cols(); ++c) g(l0, c) = 1.0;
    const TraceVector r = apply(k, g);
    for (int row = 0; row < k.rows(); ++row)
        for (int j = 0; j <= l0; ++j)
            REQUIRE(std::abs(r(j, row)) < 1e-13);
}

TEST_CASE("linearity and scale equivariance")
{
    DataSet ds = random_dataset(1, 1, 10, 9);
    NearFieldKernel k = build_kernel(ds);
    DensityVector g1 = random_density(k, 20), g2 = random_density(k, 21);
    const TraceVector sum = dense_oracle(k, g1 + g2);
    const TraceVector parts = dense_oracle(k, g1) + dense_oracle(k, g2);
    REQUIRE((sum - parts).cwiseAbs().maxCoeff() < 1e-12);
    const TraceVector scaled = apply(k, DensityVector(3.0 * g1));
    REQUIRE((scaled - 3.0 * apply(k, g1)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("adjoint identity")
{
    DataSet ds = random_dataset(1, 2, 12, 10);
    NearFieldKernel k = build_kernel(ds);
    std::mt19937 rng(30);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        DensityVector g = random_density(k, 40 + trial);
        TraceVector r(k.n_t, k.rows());
        for (int c = 0; c < r.cols(); ++c)
            for (int j = 0; j < r.rows(); ++j) r(j, c) = uni(rng);
        const double lhs = (apply(k, g).array() * r.array()).sum();
        const double rhs = (g.array() * apply_adjoint(k, r).array()).sum();
        const double scale = std::abs(lhs) + std::abs(rhs) + 1e-12;
        REQUIRE(std::abs(lhs - rhs) / scale < 1e-10);
    }
    // adjoint of zero is zero
    REQUIRE(apply_adjoint(k, TraceVector::Zero(k.n_t, k.rows()))
                .cwiseAbs()
                .maxCoeff() == 0.0);
}

TEST_CASE("one-sparse kernel has mirrored adjoint support")
{
    DataSet ds = random_dataset(1, 1, 8, 11, 0.0);
    const int i0 = 2, q0 = 1, s0 = 3, m0 = 4; // single nonzero entry
    ds.trace(s0, i0, q0, m0) = 1.0;
    NearFieldKernel k = build_kernel(ds);

    TraceVector r = TraceVector::Zero(k.n_t, k.rows());
    const int j0 = 6;
    r(j0, 2 * i0 + q0) = 1.0;
    const DensityVector g = apply_adjoint(k, r);
    for (int col = 0; col < k.cols(); ++col)
        for (int l = 0; l < k.n_t; ++l) {
            // transpose pairs output j0 with input l where j0 - l = m0 + 1
            const bool hit = (col == s0) && (j0 - l == m0 + 1);
            if (hit)
                REQUIRE(std::abs(g(l, col)) > 1e-8);
            else
                REQUIRE(std::abs(g(l, col)) < 1e-13);
        }
}

TEST_CASE("dimension guards")
{
    DataSet ds = random_dataset(1, 1, 8, 12);
    NearFieldKernel k = build_kernel(ds);
    REQUIRE_THROWS_AS(apply(k, DensityVector::Zero(k.n_t + 1, k.cols())),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(apply_adjoint(k, TraceVector::Zero(k.n_t, 3)),
                      std::invalid_argument);
    // full-scale dimension arithmetic (never materialized)
    const std::int64_t rows = 2LL * 96 * 1250;
    const std::int64_t cols = 2LL * 54 * 1250;
    REQUIRE(rows == 240000);
    REQUIRE(cols == 135000);
}
