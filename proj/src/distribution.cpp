#include "digeco/distribution.hpp"

#include <boost/math/distributions/normal.hpp>
#include <cmath>

#include "digeco/core.hpp"

namespace digeco {

const char* distribution_name(DistributionKind k) {
  switch (k) {
    case DistributionKind::Uniform: return "uniform";
    case DistributionKind::Gaussian: return "gaussian";
    case DistributionKind::Power: return "power";
  }
  return "?";
}

DistributionKind parse_distribution(const std::string& name) {
  if (name == "uniform") return DistributionKind::Uniform;
  if (name == "gaussian") return DistributionKind::Gaussian;
  if (name == "power") return DistributionKind::Power;
  throw Error(Errc::Config, "unknown distribution '" + name + "'");
}

void DistributionSpec::validate() const {
  if (hi < lo) throw Error(Errc::InvalidArgument, "distribution support is empty");
  if (kind == DistributionKind::Gaussian && !(stddev > 0.0))
    throw Error(Errc::InvalidArgument, "gaussian stddev must be positive");
  if (kind == DistributionKind::Gaussian) {
    boost::math::normal_distribution<double> n(mean, stddev);
    if (boost::math::cdf(n, hi + 0.5) - boost::math::cdf(n, lo - 0.5) < 1e-6)
      throw Error(Errc::InvalidArgument, "gaussian has almost no mass on its support");
  }
  if (kind == DistributionKind::Power && !(exponent > 0.0))
    throw Error(Errc::InvalidArgument, "power exponent must be positive");
}

std::vector<double> pmf(const DistributionSpec& d) {
  d.validate();
  std::vector<double> p(d.bins());
  switch (d.kind) {
    case DistributionKind::Uniform:
      for (auto& x : p) x = 1.0 / static_cast<double>(p.size());
      return p;
    case DistributionKind::Gaussian: {
      boost::math::normal_distribution<double> n(d.mean, d.stddev);
      for (std::size_t i = 0; i < p.size(); ++i) {
        const double k = d.lo + static_cast<double>(i);
        p[i] = boost::math::cdf(n, k + 0.5) - boost::math::cdf(n, k - 0.5);
      }
      break;
    }
    case DistributionKind::Power:
      for (std::size_t i = 0; i < p.size(); ++i)
        p[i] = std::pow(static_cast<double>(i + 1), -d.exponent);
      break;
  }
  double s = 0.0;
  for (double x : p) s += x;
  if (!(s > 0.0)) throw Error(Errc::InvalidArgument, "distribution has no mass on its support");
  for (auto& x : p) x /= s;
  return p;
}

int sample(const DistributionSpec& d, Rng& rng) {
  d.validate();
  switch (d.kind) {
    case DistributionKind::Uniform:
      return static_cast<int>(rng.uniform_int(d.lo, d.hi));
    case DistributionKind::Gaussian:
      for (;;) {
        const double x = std::round(d.mean + d.stddev * rng.normal());
        if (x >= d.lo && x <= d.hi) return static_cast<int>(x);
      }
    case DistributionKind::Power: {
      const auto p = pmf(d);
      double u = rng.uniform01();
      for (std::size_t i = 0; i < p.size(); ++i) {
        if (u < p[i]) return d.lo + static_cast<int>(i);
        u -= p[i];
      }
      return d.hi;
    }
  }
  return d.lo;
}

}  // namespace digeco
