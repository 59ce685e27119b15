#pragma once

#include <Eigen/Dense>

namespace merlin::fft {

/// Full-length DFT of a real signal with kernel exp(-i 2 pi k l / n).
/// Thread-safe; plans are cached per length.
Eigen::VectorXcd forward(const Eigen::VectorXd& x);

/// Inverse DFT with 1/n normalization; returns the real part, so the input
/// is expected to be (numerically) conjugate-symmetric.
Eigen::VectorXd inverse_real(const Eigen::VectorXcd& spectrum);

/// Reference O(n^2) summation of the same transform. Used by the self-check
/// battery and the test suites as an independent oracle.
Eigen::VectorXcd direct_dft(const Eigen::VectorXd& x);

}  // namespace merlin::fft
