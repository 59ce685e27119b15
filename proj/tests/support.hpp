#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace testsup {

/// Unique scratch directory, removed on destruction.
class TempDir {
public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("merlin_" + tag + "_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter.fetch_add(1)));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }

private:
  std::filesystem::path path_;
};

inline double median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const size_t n = values.size();
  return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

inline double pearson(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  const Eigen::VectorXd xc = x.array() - x.mean();
  const Eigen::VectorXd yc = y.array() - y.mean();
  return xc.dot(yc) / std::sqrt(xc.squaredNorm() * yc.squaredNorm());
}

/// Classical recursive partial correlation, rho_{xy|z}; independent of the
/// precision-matrix route it is used to check.
inline double partial_corr_recursive(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                                     const Eigen::VectorXd& z) {
  const double rxy = pearson(x, y);
  const double rxz = pearson(x, z);
  const double ryz = pearson(y, z);
  return (rxy - rxz * ryz) / std::sqrt((1.0 - rxz * rxz) * (1.0 - ryz * ryz));
}

}  // namespace testsup
