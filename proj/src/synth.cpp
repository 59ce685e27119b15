#include "merlin/synth.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

#include "merlin/errors.hpp"
#include "merlin/fft.hpp"
#include "merlin/random.hpp"
#include "merlin/spectral.hpp"

namespace merlin {

void SynthParams::validate() const {
  if (d < 5) throw std::invalid_argument("synthetic generator requires d >= 5");
  if (m < 1) throw std::invalid_argument("m must be >= 1");
  if (a < 0.0 || b < 0.0) throw std::invalid_argument("a and b must be non-negative");
}

namespace detail {

// Modified Gram-Schmidt with a re-orthogonalization pass; entries drawn from
// a standard normal. Regenerates on (vanishingly unlikely) rank collapse.
Eigen::MatrixXd random_orthogonal(int d, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int attempt = 0; attempt < 16; ++attempt) {
    Eigen::MatrixXd q(d, d);
    for (int c = 0; c < d; ++c)
      for (int r = 0; r < d; ++r) q(r, c) = normal(rng);
    bool ok = true;
    for (int c = 0; c < d && ok; ++c) {
      for (int pass = 0; pass < 2; ++pass)
        for (int j = 0; j < c; ++j) q.col(c) -= q.col(j).dot(q.col(c)) * q.col(j);
      const double norm = q.col(c).norm();
      if (norm < 1e-12) {
        ok = false;
        break;
      }
      q.col(c) /= norm;
    }
    if (ok) return q;
  }
  throw NumericalError("orthogonalization failed repeatedly");
}

}  // namespace detail

namespace {

// Band-limited noise carrier: complex-gaussian coefficients on the kept bins
// shaped by 1/sqrt(f), conjugate-mirrored to a real signal. The returned
// signal is scaled so that the log-bandpower of its centered, windowed
// spectrum equals `target` exactly (a uniform modulus scale gamma shifts the
// mean log by log gamma).
Eigen::VectorXd synth_carrier(int n, double fs, const BandBins& bins,
                              const Eigen::VectorXd& window, double target, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int attempt = 0; attempt < 10; ++attempt) {
    Eigen::VectorXcd spec = Eigen::VectorXcd::Zero(n);
    for (int k = bins.lo; k <= bins.hi; ++k) {
      if (k == 0) continue;  // DC is annihilated by the centering step anyway
      const double freq = static_cast<double>(k) * fs / n;
      const double mag = 1.0 / std::sqrt(freq);
      const double re = normal(rng) * mag;
      const double im = normal(rng) * mag;
      if (2 * k == n)
        spec[k] = std::complex<double>(re, 0.0);  // self-conjugate bin must stay real
      else {
        spec[k] = std::complex<double>(re, im);
        spec[n - k] = std::conj(spec[k]);
      }
    }
    Eigen::VectorXd x = fft::inverse_real(spec);

    Eigen::VectorXd y = x.array() - x.mean();
    y.array() *= window.array();
    const Eigen::VectorXcd measured = fft::forward(y);

    double logSum = 0.0;
    bool usable = true;
    for (int k = bins.lo; k <= bins.hi; ++k) {
      const double modulus = std::abs(measured[k]) / n;
      if (!(modulus > 1e-300)) {
        usable = false;
        break;
      }
      logSum += std::log(modulus);
    }
    if (!usable) continue;
    const double current = logSum / bins.count;
    const double gamma = std::exp(target - current);
    return gamma * x;
  }
  throw NumericalError("carrier synthesis: band has no energy in the windowed spectrum");
}

}  // namespace

Dataset2D gen_dataset(const SynthParams& p, bool identityMixing) {
  p.validate();
  Rng rng = make_rng(p.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_int_distribution<int> coin(0, 1);

  const int d = p.d;
  const int m = p.m;
  Eigen::MatrixXd mixing;
  if (identityMixing)
    mixing = Eigen::MatrixXd::Identity(d, d);
  else
    mixing = detail::random_orthogonal(d, rng);

  Eigen::VectorXd mu(d);
  for (int k = 0; k < d; ++k) mu[k] = normal(rng);
  const double muH = normal(rng);

  Dataset2D ds;
  ds.S.resize(m);
  ds.F.resize(d, m);
  Eigen::VectorXd c(d);
  for (int j = 0; j < m; ++j) {
    const double s =
        (p.kind == StimulusKind::Binary) ? (coin(rng) ? 1.0 : -1.0) : normal(rng);
    const double h1 = muH + normal(rng);
    c[0] = mu[0] + normal(rng) + s + p.b * h1;
    c[1] = mu[1] + p.a * normal(rng) + c[0];
    c[2] = mu[2] + normal(rng) + s;
    c[3] = mu[3] + normal(rng) + p.b * h1;
    for (int k = 4; k < d; ++k) c[k] = mu[k] + normal(rng);
    ds.S[j] = s;
    if (identityMixing)
      ds.F.col(j) = c;
    else
      ds.F.col(j) = mixing * c;
  }
  ds.v = mixing.col(0);
  ds.wG0 = mixing.col(1);
  ds.finalize();
  return ds;
}

Dataset3D gen_timeseries_dataset(const SynthParams& p, int n, double fs, const BandSpec& band,
                                 std::uint64_t carrierSeed) {
  p.validate();
  if (n < 4) throw std::invalid_argument("timeseries length must be >= 4");
  const BandBins bins = band_bins(fs, n, band);

  const Dataset2D base = gen_dataset(p, /*identityMixing=*/true);
  const int d = p.d;
  const int m = p.m;

  Dataset3D ds;
  ds.S = base.S;
  ds.channels = d;
  ds.fs = fs;
  ds.v = base.v;
  ds.wG0 = base.wG0;
  ds.Ftilde.resize(n, static_cast<Eigen::Index>(d) * m);

  Rng rng = make_rng(carrierSeed);
  const Eigen::VectorXd window = hanning_window(n);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < m; ++j)
      ds.Ftilde.col(static_cast<Eigen::Index>(i) * m + j) =
          synth_carrier(n, fs, bins, window, base.F(i, j), rng);
  ds.finalize();
  return ds;
}

}  // namespace merlin
