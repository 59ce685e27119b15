#include "merlin/spectral.hpp"

#include <cmath>
#include <stdexcept>

#include "merlin/fft.hpp"
#include "merlin/stats.hpp"

namespace merlin {

namespace {

// Floating quotient of exact rational inputs; values within 1e-9 of an
// integer are treated as that integer before flooring.
int rational_floor(double omega, int n, double fs) {
  long double q = static_cast<long double>(omega) * n / fs;
  const long double nearest = std::round(q);
  if (std::abs(q - nearest) < 1e-9L * std::max<long double>(1.0L, std::abs(q))) q = nearest;
  return static_cast<int>(std::floor(q));
}

}  // namespace

BandBins band_bins(double fs, int n, const BandSpec& band) {
  if (n < 1) throw std::invalid_argument("band_bins requires n >= 1");
  band.validate_for(fs);
  BandBins bins;
  bins.lo = rational_floor(band.omega1, n, fs);
  bins.hi = rational_floor(band.omega2, n, fs);
  bins.count = bins.hi - bins.lo + 1;
  if (bins.lo > bins.hi) throw std::invalid_argument("empty frequency band");
  if (bins.hi > n - 1) throw std::invalid_argument("band exceeds the spectrum length");
  return bins;
}

Eigen::VectorXd hanning_window(int n) {
  if (n < 2) throw std::invalid_argument("hanning_window requires n >= 2");
  Eigen::VectorXd w(n);
  for (int k = 0; k < n; ++k) w[k] = 0.5 * (1.0 - std::cos(2.0 * M_PI * k / (n - 1)));
  return w;
}

SpectralBundle preprocess(const Dataset3D& ds, const BandSpec& band) {
  ds.validate();
  const BandBins bins = band_bins(ds.fs, ds.n(), band);
  const int d = ds.d();
  const int m = ds.m();
  const int n = ds.n();
  const int np = bins.count;

  const Eigen::VectorXd window = hanning_window(n);
  const Projector proj = projector(ds.v);

  SpectralBundle out;
  out.VIm.resize(m, np);
  out.VRe.resize(m, np);
  out.FIm.resize(d - 1, static_cast<Eigen::Index>(m) * np);
  out.FRe.resize(d - 1, static_cast<Eigen::Index>(m) * np);
  out.binLo = bins.lo;
  out.binHi = bins.hi;
  out.nOriginal = n;
  out.fs = ds.fs;

  Eigen::MatrixXcd chanSpec(d, np);
  Eigen::VectorXd x(n);
  for (int t = 0; t < m; ++t) {
    for (int i = 0; i < d; ++i) {
      x = ds.series(i, t);
      x.array() -= x.mean();
      x.array() *= window.array();
      const Eigen::VectorXcd spectrum = fft::forward(x);
      chanSpec.row(i) = spectrum.segment(bins.lo, np).transpose();
    }
    const Eigen::VectorXcd vPart = chanSpec.transpose() * ds.v;
    out.VRe.row(t) = vPart.real().transpose();
    out.VIm.row(t) = vPart.imag().transpose();
    const Eigen::MatrixXcd projected = proj.P * chanSpec;
    out.FRe.block(0, static_cast<Eigen::Index>(t) * np, d - 1, np) = projected.real();
    out.FIm.block(0, static_cast<Eigen::Index>(t) * np, d - 1, np) = projected.imag();
  }
  return out;
}

double log_bandpower(const Eigen::VectorXd& specIm, const Eigen::VectorXd& specRe,
                     int nOriginal) {
  if (specIm.size() != specRe.size())
    throw std::invalid_argument("log_bandpower: spectrum part lengths differ");
  if (specIm.size() == 0) throw std::invalid_argument("log_bandpower: empty spectrum");
  if (!specIm.allFinite() || !specRe.allFinite())
    throw std::invalid_argument("log_bandpower: non-finite spectrum");
  const double n = static_cast<double>(nOriginal);
  double acc = 0.0;
  for (Eigen::Index k = 0; k < specIm.size(); ++k) {
    const double modulus = std::hypot(specIm[k], specRe[k]) / n;
    if (modulus > 0.0) acc += std::log(modulus);  // log_*(0) = 0
  }
  return acc / static_cast<double>(specIm.size());
}

}  // namespace merlin
