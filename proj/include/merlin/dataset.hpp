#pragma once

#include <Eigen/Dense>

#include <filesystem>
#include <optional>
#include <variant>

namespace merlin {

/// Frequency band [omega1, omega2] in Hz. A band is only meaningful relative
/// to a sampling rate; validate_for enforces 0 <= omega1 < omega2 <= fs/2.
struct BandSpec {
  double omega1 = 0.0;
  double omega2 = 0.0;

  void validate_for(double fs) const;
};

/// Static mixture dataset: m stimulus samples S, a d x m channel matrix F
/// (row = channel, column = sample) and the extractor v. v and wG0 are kept
/// at unit norm; only their direction matters downstream.
struct Dataset2D {
  Eigen::VectorXd S;
  Eigen::MatrixXd F;
  Eigen::VectorXd v;
  std::optional<Eigen::VectorXd> wG0;

  int d() const { return static_cast<int>(F.rows()); }
  int m() const { return static_cast<int>(F.cols()); }

  /// Renormalizes v (and wG0 if present) and checks all invariants.
  /// Throws std::invalid_argument on violation.
  void finalize();
  void validate() const;
};

/// Trial-structured timeseries dataset. The d x m x n tensor is stored as an
/// n x (d*m) matrix whose column i*m + j holds the length-n series of channel
/// i, trial j -- the same layout as the on-disk F.bin payload.
struct Dataset3D {
  Eigen::VectorXd S;
  Eigen::MatrixXd Ftilde;
  int channels = 0;
  Eigen::VectorXd v;
  double fs = 0.0;
  std::optional<Eigen::VectorXd> wG0;

  int d() const { return channels; }
  int m() const { return channels == 0 ? 0 : static_cast<int>(Ftilde.cols()) / channels; }
  int n() const { return static_cast<int>(Ftilde.rows()); }

  auto series(int channel, int trial) const { return Ftilde.col(channel * m() + trial); }
  auto series(int channel, int trial) { return Ftilde.col(channel * m() + trial); }

  void finalize();
  void validate() const;
};

using Dataset = std::variant<Dataset2D, Dataset3D>;

/// Reads a bundle directory (meta.json + S.csv, v.csv, optional wG0.csv, and
/// F.csv or F.bin). The returned dataset is validated, with v renormalized.
Dataset load_bundle(const std::filesystem::path& dir);

/// Writes a bundle directory. Numeric payloads round-trip bit-exactly:
/// CSV values are printed with 17 significant digits, F.bin is raw
/// little-endian float64 in the layout documented on Dataset3D.
void save_bundle(const Dataset2D& ds, const std::filesystem::path& dir);
void save_bundle(const Dataset3D& ds, const std::filesystem::path& dir);
void save_bundle(const Dataset& ds, const std::filesystem::path& dir);

}  // namespace merlin
