#include "viewpath/bayes.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <thread>

namespace viewpath {

namespace {

constexpr double kLogPi = 1.1447298858494002;

double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sd_of(const std::vector<double>& v) {
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

// theta = (mu1, mu2, log sigma1, log sigma2, log(nu - 1)).
struct Model {
  const std::vector<double>* a;
  const std::vector<double>* b;
  double prior_mean;
  double prior_mu_sd;
  double sigma_lo;
  double sigma_hi;
  double nu_mean = 29.0;

  double group_loglik(const std::vector<double>& x, double mu, double sigma, double nu) const {
    const double c = std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) - 0.5 * (std::log(nu) + kLogPi) -
                     std::log(sigma);
    double s = 0.0;
    for (double v : x) {
      const double z = (v - mu) / sigma;
      s += std::log1p(z * z / nu);
    }
    return static_cast<double>(x.size()) * c - 0.5 * (nu + 1.0) * s;
  }

  // Log prior in theta coordinates (including Jacobians); -inf outside support.
  double log_prior(const std::array<double, 5>& t) const {
    double lp = 0.0;
    for (int i = 0; i < 2; ++i) {
      const double z = (t[i] - prior_mean) / prior_mu_sd;
      lp += -0.5 * z * z;
      const double sigma = std::exp(t[2 + i]);
      if (sigma < sigma_lo || sigma > sigma_hi) return -INFINITY;
      lp += t[2 + i];  // uniform on sigma, d sigma = sigma d log sigma
    }
    const double e = std::exp(t[4]);
    lp += -e / nu_mean + t[4];
    return lp;
  }

  double loglik_a(const std::array<double, 5>& t) const {
    return group_loglik(*a, t[0], std::exp(t[2]), 1.0 + std::exp(t[4]));
  }
  double loglik_b(const std::array<double, 5>& t) const {
    return group_loglik(*b, t[1], std::exp(t[3]), 1.0 + std::exp(t[4]));
  }
};

struct ChainResult {
  std::vector<std::array<double, 5>> draws;
  std::array<double, 5> acceptance{};
};

ChainResult run_chain(const Model& m, std::array<double, 5> t, std::array<double, 5> step, int burn_in,
                      int draws, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  double la = m.loglik_a(t);
  double lb = m.loglik_b(t);
  double lp = m.log_prior(t);
  std::array<int, 5> accepted{};
  std::array<int, 5> window{};
  ChainResult out;
  out.draws.reserve(static_cast<std::size_t>(draws));
  const int total = burn_in + draws;
  for (int it = 0; it < total; ++it) {
    for (int k = 0; k < 5; ++k) {
      std::array<double, 5> prop = t;
      prop[k] += step[k] * normal(rng);
      const double pp = m.log_prior(prop);
      if (!std::isfinite(pp)) continue;
      const bool touches_a = k == 0 || k == 2 || k == 4;
      const bool touches_b = k == 1 || k == 3 || k == 4;
      const double na = touches_a ? m.loglik_a(prop) : la;
      const double nb = touches_b ? m.loglik_b(prop) : lb;
      const double log_ratio = (na + nb + pp) - (la + lb + lp);
      if (log_ratio >= 0.0 || std::log(unit(rng)) < log_ratio) {
        t = prop;
        la = na;
        lb = nb;
        lp = pp;
        if (it < burn_in)
          ++window[k];
        else
          ++accepted[k];
      }
    }
    if (it < burn_in && (it + 1) % 100 == 0) {
      for (int k = 0; k < 5; ++k) {
        const double rate = window[k] / 100.0;
        step[k] *= std::exp(rate - 0.35);
        window[k] = 0;
      }
    }
    if (it >= burn_in) out.draws.push_back(t);
  }
  for (int k = 0; k < 5; ++k) out.acceptance[k] = draws > 0 ? accepted[k] / static_cast<double>(draws) : 0.0;
  return out;
}

}  // namespace

std::vector<double> PosteriorSamples::difference() const {
  std::vector<double> d(mu1.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = mu1[i] - mu2[i];
  return d;
}

double student_t_log_density(double x, double mu, double sigma, double nu) {
  const double z = (x - mu) / sigma;
  return std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) - 0.5 * (std::log(nu) + kLogPi) -
         std::log(sigma) - 0.5 * (nu + 1.0) * std::log1p(z * z / nu);
}

PosteriorSamples fit_t_model(const std::vector<double>& a, const std::vector<double>& b,
                             const ChainConfig& config) {
  if (a.size() < 5 || b.size() < 5) throw std::invalid_argument("need at least 5 samples per group");
  if (config.chains < 1 || config.draws < 1 || config.burn_in < 0)
    throw std::invalid_argument("invalid chain configuration");
  std::vector<double> pooled = a;
  pooled.insert(pooled.end(), b.begin(), b.end());
  const double pm = mean_of(pooled);
  double psd = sd_of(pooled);

  PosteriorSamples out;
  if (!(psd > 0.0)) {
    out.degenerate = true;
    psd = std::max(1e-6, 1e-6 * std::abs(pm));
  }
  Model m{&a, &b, pm, 1000.0 * psd, psd / 1000.0, psd * 1000.0};

  auto group_sd = [&](const std::vector<double>& v) {
    const double s = sd_of(v);
    return std::clamp(s > 0.0 ? s : psd, m.sigma_lo * 1.01, m.sigma_hi * 0.99);
  };
  const std::array<double, 5> init = {mean_of(a), mean_of(b), std::log(group_sd(a)), std::log(group_sd(b)),
                                      std::log(29.0)};
  const std::array<double, 5> step = {0.5 * group_sd(a) / std::sqrt(a.size()),
                                      0.5 * group_sd(b) / std::sqrt(b.size()), 0.2, 0.2, 0.5};

  std::vector<ChainResult> results(static_cast<std::size_t>(config.chains));
  auto work = [&](int c) {
    results[static_cast<std::size_t>(c)] =
        run_chain(m, init, step, config.burn_in, config.draws, config.seed * 1000003ULL + static_cast<std::uint64_t>(c));
  };
  if (config.threads > 1) {
    std::vector<std::jthread> pool;
    for (int c = 0; c < config.chains; ++c) pool.emplace_back(work, c);
  } else {
    for (int c = 0; c < config.chains; ++c) work(c);
  }

  out.acceptance.assign(5, 0.0);
  for (const ChainResult& r : results) {
    for (const auto& t : r.draws) {
      out.mu1.push_back(t[0]);
      out.mu2.push_back(t[1]);
      out.sigma1.push_back(std::exp(t[2]));
      out.sigma2.push_back(std::exp(t[3]));
      out.nu.push_back(1.0 + std::exp(t[4]));
    }
    for (int k = 0; k < 5; ++k) out.acceptance[k] += r.acceptance[k] / config.chains;
  }
  return out;
}

Interval hdi(std::vector<double> draws, double mass) {
  if (draws.empty()) throw std::invalid_argument("hdi of an empty sample");
  std::sort(draws.begin(), draws.end());
  const std::size_t n = draws.size();
  const std::size_t k = std::min(n, static_cast<std::size_t>(std::ceil(mass * static_cast<double>(n))));
  if (k == 0) return {draws.front(), draws.front()};
  Interval best{draws[0], draws[k - 1]};
  for (std::size_t i = 1; i + k <= n; ++i)
    if (draws[i + k - 1] - draws[i] < best.width()) best = {draws[i], draws[i + k - 1]};
  return best;
}

double median(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median of an empty sample");
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + mid, values.end());
  const double hi = values[mid];
  if (values.size() % 2 == 1) return hi;
  const double lo = *std::max_element(values.begin(), values.begin() + mid);
  return 0.5 * (lo + hi);
}

std::string to_string(RopeVerdict::Kind k) {
  switch (k) {
    case RopeVerdict::Kind::kEquivalent: return "equivalent";
    case RopeVerdict::Kind::kDistinct: return "distinct";
    case RopeVerdict::Kind::kInconclusive: return "inconclusive";
  }
  return "inconclusive";
}

RopeVerdict rope_decision(const Interval& h, const Interval& rope) {
  RopeVerdict v;
  const double overlap = std::max(0.0, std::min(h.hi, rope.hi) - std::max(h.lo, rope.lo));
  const double width = h.width();
  if (h.lo >= rope.lo && h.hi <= rope.hi) {
    v.kind = RopeVerdict::Kind::kEquivalent;
    v.overlap = 1.0;
  } else if (h.hi < rope.lo || h.lo > rope.hi) {
    v.kind = RopeVerdict::Kind::kDistinct;
    v.overlap = 0.0;
  } else {
    v.kind = RopeVerdict::Kind::kInconclusive;
    v.overlap = width > 0.0 ? overlap / width : 0.0;
  }
  return v;
}

}  // namespace viewpath
