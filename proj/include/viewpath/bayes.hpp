#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace viewpath {

struct ChainConfig {
  int chains = 4;
  int draws = 20000;   // kept per chain
  int burn_in = 5000;  // step sizes adapt only here
  std::uint64_t seed = 1;
  int threads = 1;
};

/// Posterior draws for two groups with independent t likelihoods, all chains
/// concatenated in chain order.
struct PosteriorSamples {
  std::vector<double> mu1, mu2, sigma1, sigma2, nu;
  std::vector<double> acceptance;  // per parameter, post burn-in, averaged over chains
  bool degenerate = false;         // zero pooled spread; sigma prior floor widened

  std::vector<double> difference() const;  // mu1 - mu2
};

double student_t_log_density(double x, double mu, double sigma, double nu);

/// Priors: mu ~ N(pooled mean, 1000 sd), sigma ~ U(sd / 1000, 1000 sd),
/// nu - 1 ~ Exp(mean 29). Requires at least 5 samples per group.
PosteriorSamples fit_t_model(const std::vector<double>& a, const std::vector<double>& b,
                             const ChainConfig& config = {});

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double width() const { return hi - lo; }
};

/// Shortest interval containing ceil(mass * n) of the sorted draws.
Interval hdi(std::vector<double> draws, double mass = 0.95);

double median(std::vector<double> values);

struct RopeVerdict {
  enum class Kind { kEquivalent, kDistinct, kInconclusive };
  Kind kind = Kind::kInconclusive;
  double overlap = 0.0;  // |HDI n ROPE| / |HDI|
};

std::string to_string(RopeVerdict::Kind k);

RopeVerdict rope_decision(const Interval& hdi_interval, const Interval& rope);

}  // namespace viewpath
