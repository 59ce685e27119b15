#pragma once

#include <Eigen/Dense>

#include "merlin/dataset.hpp"

namespace merlin {

struct BandBins {
  int lo = 0;      // first kept FFT bin (0-based)
  int hi = 0;      // last kept FFT bin, inclusive
  int count = 0;   // hi - lo + 1
};

/// Per-trial Fourier coefficients restricted to the kept band, split into the
/// v-signal part and the v-orthogonal-complement part, real/imaginary planes.
///
/// V* are m x n' (trial x bin). F* are (d-1) x (m*n') with column t*n' + k
/// holding the projected-channel coefficients of trial t, bin k.
struct SpectralBundle {
  Eigen::MatrixXd VIm, VRe;
  Eigen::MatrixXd FIm, FRe;
  int binLo = 0;
  int binHi = 0;
  int nOriginal = 0;
  double fs = 0.0;

  int trials() const { return static_cast<int>(VIm.rows()); }
  int bins() const { return static_cast<int>(VIm.cols()); }
  int channels() const { return static_cast<int>(FIm.rows()); }  // d - 1
};

/// Kept-bin arithmetic: lo = floor(omega1 * n / fs), hi = floor(omega2 * n / fs).
/// Bins are 0-based, so bin k corresponds to frequency k * fs / n.
BandBins band_bins(double fs, int n, const BandSpec& band);

/// Symmetric Hanning window, w_k = (1 - cos(2 pi k / (n-1))) / 2.
Eigen::VectorXd hanning_window(int n);

/// Per channel and trial: subtract the time mean, apply the Hanning window,
/// take the DFT and keep the band bins; then split into the v-combination and
/// the projection onto v's orthogonal complement.
SpectralBundle preprocess(const Dataset3D& ds, const BandSpec& band);

/// Mean over kept bins of log_*(modulus / n), where log_*(0) = 0.
double log_bandpower(const Eigen::VectorXd& specIm, const Eigen::VectorXd& specRe, int nOriginal);

}  // namespace merlin
