#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "digeco/rng.hpp"

namespace digeco {

enum class DistributionKind { Uniform, Gaussian, Power };

const char* distribution_name(DistributionKind k);
// Throws Error(Config) on an unknown name.
DistributionKind parse_distribution(const std::string& name);

// An integer distribution over [lo, hi]. Gaussian draws are rounded and
// redrawn until they land inside the support; power mass is proportional to
// (k - lo + 1)^-exponent.
struct DistributionSpec {
  DistributionKind kind = DistributionKind::Uniform;
  int lo = 1;
  int hi = 1;
  double mean = 0.0;
  double stddev = 1.0;
  double exponent = 1.5;

  // Throws InvalidArgument for an empty support or a non-positive stddev.
  void validate() const;
  std::size_t bins() const { return static_cast<std::size_t>(hi - lo + 1); }
};

int sample(const DistributionSpec& d, Rng& rng);
// Probability of each support value, lo first.
std::vector<double> pmf(const DistributionSpec& d);

}  // namespace digeco
