#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "merlin/fft.hpp"
#include "merlin/random.hpp"
#include "merlin/spectral.hpp"
#include "support.hpp"

using namespace merlin;

namespace {

Dataset3D make_ds(const Eigen::MatrixXd& Ftilde, int d, const Eigen::VectorXd& v, double fs) {
  Dataset3D ds;
  ds.channels = d;
  ds.fs = fs;
  ds.Ftilde = Ftilde;
  ds.v = v;
  ds.S = Eigen::VectorXd::LinSpaced(Ftilde.cols() / d, -1.0, 1.0);
  ds.finalize();
  return ds;
}

// Reference per-channel band spectrum: center, window, direct DFT.
Eigen::VectorXcd reference_band_spectrum(const Eigen::VectorXd& series, const BandBins& bins) {
  Eigen::VectorXd x = series.array() - series.mean();
  x.array() *= hanning_window(static_cast<int>(series.size())).array();
  const Eigen::VectorXcd full = fft::direct_dft(x);
  return full.segment(bins.lo, bins.count);
}

Eigen::VectorXd randn(int n, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd x(n);
  for (int i = 0; i < n; ++i) x[i] = normal(rng);
  return x;
}

}  // namespace

TEST_CASE("band bin arithmetic follows the floor formulas") {
  const BandBins eeg = band_bins(250.0, 15000, BandSpec{55.0, 85.0});
  CHECK(eeg.lo == 3300);
  CHECK(eeg.hi == 5100);
  CHECK(eeg.count == 1801);

  const BandBins hz = band_bins(100.0, 100, BandSpec{10.0, 20.0});
  CHECK(hz.lo == 10);
  CHECK(hz.hi == 20);
  CHECK(hz.count == 11);

  CHECK_THROWS_AS(band_bins(100.0, 100, BandSpec{20.0, 10.0}), std::invalid_argument);
}

TEST_CASE("fft matches the direct summation oracle") {
  Rng rng = make_rng(61);
  for (int n : {8, 64, 257, 512}) {
    const Eigen::VectorXd x = randn(n, rng);
    const Eigen::VectorXcd fast = fft::forward(x);
    const Eigen::VectorXcd slow = fft::direct_dft(x);
    CHECK((fast - slow).cwiseAbs().maxCoeff() / slow.cwiseAbs().maxCoeff() < 1e-8);
    // Round trip through the inverse.
    CHECK((fft::inverse_real(fast) - x).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("constant signals vanish after centering") {
  const int d = 2, m = 3, n = 16;
  Eigen::MatrixXd ft(n, d * m);
  for (Eigen::Index c = 0; c < ft.cols(); ++c) ft.col(c).setConstant(3.5 + c);
  Eigen::VectorXd v(2);
  v << 1.0, 0.0;
  const Dataset3D ds = make_ds(ft, d, v, 16.0);
  const SpectralBundle b = preprocess(ds, BandSpec{2.0, 6.0});
  CHECK(b.VIm.cwiseAbs().maxCoeff() == 0.0);
  CHECK(b.VRe.cwiseAbs().maxCoeff() == 0.0);
  CHECK(b.FIm.cwiseAbs().maxCoeff() == 0.0);
  CHECK(b.FRe.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("windowed cosine concentrates on its bin") {
  // Oracle (direct DFT of the Hanning-windowed cosine, n = fs = 64, f = 16):
  // peak at bin 16 with modulus 15.75; the mainlobe neighbours 15 and 17 sit
  // at ratio 1.954, every other kept bin is down by a factor >= 181.
  const int n = 64, m = 3;
  Eigen::MatrixXd ft(n, 2 * m);
  for (int t = 0; t < n; ++t) {
    const double x = std::cos(2.0 * M_PI * 16.0 * t / n);
    for (Eigen::Index c = 0; c < ft.cols(); ++c) ft(t, c) = (c < m) ? x : 0.1 * x;
  }
  Eigen::VectorXd v(2);
  v << 1.0, 0.0;
  const Dataset3D ds = make_ds(ft, 2, v, 64.0);
  const BandSpec band{10.0, 20.0};
  const SpectralBundle b = preprocess(ds, band);
  REQUIRE(b.binLo == 10);
  REQUIRE(b.binHi == 20);

  const Eigen::VectorXd mods =
      (b.VIm.row(0).array().square() + b.VRe.row(0).array().square()).sqrt();
  int peak = 0;
  mods.maxCoeff(&peak);
  CHECK(peak + b.binLo == 16);
  for (int k = 0; k < mods.size(); ++k) {
    const int bin = k + b.binLo;
    if (bin == 16) continue;
    const double ratio = mods[peak] / mods[k];
    if (std::abs(bin - 16) == 1)
      CHECK(ratio == doctest::Approx(1.954).epsilon(1e-3));
    else
      CHECK(ratio > 10.0);
  }

  // And the pipeline agrees with the direct-DFT oracle bin by bin.
  const Eigen::VectorXcd oracle =
      reference_band_spectrum(ds.series(0, 0), band_bins(64.0, n, band));
  CHECK((b.VRe.row(0).transpose() - oracle.real()).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((b.VIm.row(0).transpose() - oracle.imag()).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("combining before or after the transform is the same") {
  Rng rng = make_rng(63);
  const int d = 3, m = 4, n = 48;
  Eigen::MatrixXd ft(n, d * m);
  for (Eigen::Index c = 0; c < ft.cols(); ++c) ft.col(c) = randn(n, rng);
  Eigen::VectorXd v = randn(d, rng).normalized();
  const Dataset3D ds = make_ds(ft, d, v, 48.0);
  const BandSpec band{3.0, 20.0};
  const SpectralBundle b = preprocess(ds, band);
  const BandBins bins = band_bins(48.0, n, band);

  for (int t = 0; t < m; ++t) {
    Eigen::VectorXd combined = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < d; ++i) combined += v[i] * ds.series(i, t);
    const Eigen::VectorXcd oracle = reference_band_spectrum(combined, bins);
    const double scale = oracle.cwiseAbs().maxCoeff();
    CHECK((b.VRe.row(t).transpose() - oracle.real()).cwiseAbs().maxCoeff() < 1e-8 * scale);
    CHECK((b.VIm.row(t).transpose() - oracle.imag()).cwiseAbs().maxCoeff() < 1e-8 * scale);
  }
}

TEST_CASE("pure v-direction data leaves nothing in the projected part") {
  Rng rng = make_rng(65);
  const int d = 3, m = 3, n = 32;
  Eigen::VectorXd v = randn(d, rng).normalized();
  Eigen::MatrixXd ft(n, d * m);
  for (int t = 0; t < m; ++t) {
    const Eigen::VectorXd s = randn(n, rng);
    for (int i = 0; i < d; ++i) ft.col(i * m + t) = v[i] * s;
  }
  const Dataset3D ds = make_ds(ft, d, v, 32.0);
  const SpectralBundle b = preprocess(ds, BandSpec{2.0, 12.0});
  const double vmag = std::max(b.VRe.cwiseAbs().maxCoeff(), b.VIm.cwiseAbs().maxCoeff());
  CHECK(b.FRe.cwiseAbs().maxCoeff() < 1e-8 * vmag);
  CHECK(b.FIm.cwiseAbs().maxCoeff() < 1e-8 * vmag);
  CHECK(vmag > 0.0);
}

TEST_CASE("projection cases from the projector algebra") {
  const int n = 32, m = 3;
  Rng rng = make_rng(67);

  // v = e1, channel 2 == channel 1: the projected row is channel 2's spectrum.
  Eigen::MatrixXd ft(n, 2 * m);
  for (int t = 0; t < m; ++t) {
    const Eigen::VectorXd s = randn(n, rng);
    ft.col(0 * m + t) = s;
    ft.col(1 * m + t) = s;
  }
  Eigen::VectorXd e1(2);
  e1 << 1.0, 0.0;
  const Dataset3D ds1 = make_ds(ft, 2, e1, 32.0);
  const BandSpec band{2.0, 12.0};
  const SpectralBundle b1 = preprocess(ds1, band);
  const BandBins bins = band_bins(32.0, n, band);
  const Eigen::VectorXcd chan2 = reference_band_spectrum(ds1.series(1, 0), bins);
  CHECK((b1.FRe.block(0, 0, 1, bins.count).transpose() - chan2.real()).cwiseAbs().maxCoeff() <
        1e-10);

  // v = (1,1)/sqrt(2) annihilates equal channels instead.
  Eigen::VectorXd diag(2);
  diag << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  const Dataset3D ds2 = make_ds(ft, 2, diag, 32.0);
  const SpectralBundle b2 = preprocess(ds2, band);
  const double vmag = std::max(b2.VRe.cwiseAbs().maxCoeff(), b2.VIm.cwiseAbs().maxCoeff());
  CHECK(b2.FRe.cwiseAbs().maxCoeff() < 1e-10 * vmag);
  CHECK(b2.FIm.cwiseAbs().maxCoeff() < 1e-10 * vmag);
}

TEST_CASE("windowed energy matches the spectrum (parseval)") {
  Rng rng = make_rng(69);
  for (int n : {16, 100, 255}) {
    Eigen::VectorXd y = randn(n, rng);
    y.array() -= y.mean();
    y.array() *= hanning_window(n).array();
    const Eigen::VectorXcd spec = fft::forward(y);
    const double lhs = spec.cwiseAbs2().sum();
    const double rhs = n * y.squaredNorm();
    CHECK(std::abs(lhs - rhs) < 1e-8 * rhs);
  }
}

TEST_CASE("log bandpower follows the extended-log formula") {
  Eigen::VectorXd zero = Eigen::VectorXd::Zero(5);
  CHECK(log_bandpower(zero, zero, 32) == 0.0);

  Eigen::VectorXd im(1), re(1);
  im << 0.0;
  re << 32.0;
  CHECK(log_bandpower(im, re, 32) == doctest::Approx(0.0));

  const double n = 64;
  Eigen::VectorXd im2(2), re2(2);
  im2 << 0.0, 0.0;
  re2 << n * std::exp(1.0), n * std::exp(2.0);
  CHECK(log_bandpower(im2, re2, 64) == doctest::Approx(1.5).epsilon(1e-12));
}
