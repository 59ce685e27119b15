#pragma once

#include <cstdint>

#include "merlin/dataset.hpp"
#include "merlin/random.hpp"

namespace merlin {

enum class StimulusKind { Gaussian, Binary };

/// Parameters of the synthetic benchmark generator. a scales the noise on the
/// C1 -> C2 link, b the strength of the hidden confounder between C1 and C4.
struct SynthParams {
  int d = 5;
  int m = 300;
  double a = 1.0;
  double b = 0.0;
  StimulusKind kind = StimulusKind::Gaussian;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Samples the five-plus-filler-variable SEM and mixes it with a random
/// orthogonal matrix (Gram-Schmidt of a standard normal matrix). v extracts
/// C1 and wG0 extracts C2; both are returned with the dataset.
/// With identityMixing the mixing matrix is fixed to I (the timeseries
/// generator's convention) and v = e1, wG0 = e2.
Dataset2D gen_dataset(const SynthParams& p, bool identityMixing = false);

/// Timeseries variant: identity mixing, and each scalar F_{i,j} is replaced
/// by a band-limited noise carrier of length n whose windowed-spectrum
/// log-bandpower in `band` equals F_{i,j} exactly. Carrier randomness is
/// driven by carrierSeed, independently of p.seed.
Dataset3D gen_timeseries_dataset(const SynthParams& p, int n, double fs, const BandSpec& band,
                                 std::uint64_t carrierSeed);

namespace detail {

/// Gram-Schmidt orthonormalization of a standard-normal matrix (the mixing
/// matrix draw). Exposed for its orthonormality postcondition.
Eigen::MatrixXd random_orthogonal(int d, Rng& rng);

}  // namespace detail

}  // namespace merlin
