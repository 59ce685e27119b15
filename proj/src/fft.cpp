#include "merlin/fft.hpp"

#include <fftw3.h>

#include <complex>
#include <map>
#include <mutex>
#include <stdexcept>

namespace merlin::fft {

namespace {

// FFTW plan creation is not thread-safe; executions via fftw_execute_dft are.
// Plans are created once per (length, direction) with FFTW_UNALIGNED so they
// can run on arbitrary caller buffers.
class PlanCache {
public:
  fftw_plan get(int n, int sign) {
    std::scoped_lock lock(mutex_);
    auto key = std::make_pair(n, sign);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;
    std::vector<std::complex<double>> in(n), out(n);
    fftw_plan plan = fftw_plan_dft_1d(n, reinterpret_cast<fftw_complex*>(in.data()),
                                      reinterpret_cast<fftw_complex*>(out.data()), sign,
                                      FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!plan) throw std::runtime_error("fftw plan creation failed for n=" + std::to_string(n));
    plans_.emplace(key, plan);
    return plan;
  }

private:
  std::mutex mutex_;
  std::map<std::pair<int, int>, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache c;
  return c;
}

Eigen::VectorXcd execute(const Eigen::VectorXcd& in, int sign) {
  const int n = static_cast<int>(in.size());
  if (n == 0) throw std::invalid_argument("fft: empty input");
  Eigen::VectorXcd input = in;  // fftw may not read from const storage
  Eigen::VectorXcd out(n);
  fftw_plan plan = cache().get(n, sign);
  fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(input.data()),
                   reinterpret_cast<fftw_complex*>(out.data()));
  return out;
}

}  // namespace

Eigen::VectorXcd forward(const Eigen::VectorXd& x) {
  return execute(x.cast<std::complex<double>>(), FFTW_FORWARD);
}

Eigen::VectorXd inverse_real(const Eigen::VectorXcd& spectrum) {
  Eigen::VectorXcd out = execute(spectrum, FFTW_BACKWARD);
  return out.real() / static_cast<double>(spectrum.size());
}

Eigen::VectorXcd direct_dft(const Eigen::VectorXd& x) {
  const auto n = x.size();
  Eigen::VectorXcd out(n);
  const double step = -2.0 * M_PI / static_cast<double>(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    std::complex<double> acc(0.0, 0.0);
    for (Eigen::Index l = 0; l < n; ++l) {
      const double phase = step * static_cast<double>(k) * static_cast<double>(l);
      acc += x[l] * std::complex<double>(std::cos(phase), std::sin(phase));
    }
    out[k] = acc;
  }
  return out;
}

}  // namespace merlin::fft
