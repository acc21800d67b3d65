#include "rwre/renewal_env.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>

#include "rwre/errors.hpp"
#include "rwre/text.hpp"

namespace rwre {

namespace {

constexpr double kTailCut = 1e-12;
constexpr double kGammaSnap = 1e-9;

std::vector<double> normalized(std::vector<double> pmf, const char* what) {
  double total = 0.0;
  for (double p : pmf) {
    if (!(p >= 0.0) || !std::isfinite(p)) throw UsageError(std::string(what) + ": masses must be finite and >= 0");
    total += p;
  }
  if (!(total > 0.0)) throw UsageError(std::string(what) + ": pmf has no mass");
  for (double& p : pmf) p /= total;
  while (pmf.size() > 1 && pmf.back() == 0.0) pmf.pop_back();
  return pmf;
}

Coord ceil_div(Coord a, Coord b) { return (a + b - 1) / b; }

Coord sup_norm(const Displacement& y) {
  Coord n = 0;
  for (Coord c : y) n = std::max(n, c < 0 ? -c : c);
  return n;
}

// Visits offsets y with |y|_inf == r in dimension d.
template <typename F>
bool for_each_on_ring(int d, Coord r, F&& visit) {
  Displacement y{};
  std::array<Coord, kMaxSpatialDim> idx{};
  const Coord side = 2 * r + 1;
  Coord total = 1;
  for (int i = 0; i < d; ++i) total *= side;
  for (Coord n = 0; n < total; ++n) {
    Coord rem = n;
    for (int i = d - 1; i >= 0; --i) {
      idx[static_cast<std::size_t>(i)] = rem % side;
      rem /= side;
    }
    Coord norm = 0;
    for (int i = 0; i < d; ++i) {
      const auto k = static_cast<std::size_t>(i);
      y[k] = idx[k] - r;
      norm = std::max(norm, y[k] < 0 ? -y[k] : y[k]);
    }
    if (norm != r) continue;
    if (!visit(static_cast<const Displacement&>(y))) return false;
  }
  return true;
}

double ring_size(int d, Coord r) {
  return std::pow(2.0 * r + 1.0, d) - std::pow(2.0 * r - 1.0, d);
}

}  // namespace

// --- InterarrivalLaw ---------------------------------------------------------

InterarrivalLaw::InterarrivalLaw(std::vector<double> pmf, double defect, std::string text)
    : pmf_(std::move(pmf)), defect_(defect), text_(std::move(text)) {}

InterarrivalLaw InterarrivalLaw::geometric(double q) {
  if (!(q >= 0.0 && q < 1.0)) throw UsageError("renewal.mu: geometric parameter must lie in [0, 1)");
  std::vector<double> pmf;
  double tail = 1.0;  // P(xi >= k)
  for (std::int64_t k = 0; tail >= kTailCut; ++k) {
    pmf.push_back((1.0 - q) * tail);
    tail *= q;
  }
  const double defect = tail;
  InterarrivalLaw law(normalized(std::move(pmf), "renewal.mu"), defect, "geometric " + format_real(q));
  law.geometric_q_ = q;
  return law;
}

InterarrivalLaw InterarrivalLaw::dirac(std::int64_t k) {
  if (k < 0) throw UsageError("renewal.mu: dirac atom must be >= 0");
  std::vector<double> pmf(static_cast<std::size_t>(k) + 1, 0.0);
  pmf.back() = 1.0;
  return InterarrivalLaw(std::move(pmf), 0.0, "dirac " + std::to_string(k));
}

InterarrivalLaw InterarrivalLaw::uniform(std::int64_t a, std::int64_t b) {
  if (a < 0 || b < a) throw UsageError("renewal.mu: uniform needs 0 <= a <= b");
  std::vector<double> pmf(static_cast<std::size_t>(b) + 1, 0.0);
  for (std::int64_t k = a; k <= b; ++k) pmf[static_cast<std::size_t>(k)] = 1.0;
  return InterarrivalLaw(normalized(std::move(pmf), "renewal.mu"), 0.0,
                         "uniform " + std::to_string(a) + " " + std::to_string(b));
}

InterarrivalLaw InterarrivalLaw::from_pmf(std::vector<double> pmf) {
  double total = 0.0;
  for (double p : pmf) total += p;
  if (std::abs(total - 1.0) > 1e-12) throw UsageError("renewal.mu: pmf must sum to 1 within 1e-12");
  pmf = normalized(std::move(pmf), "renewal.mu");
  std::string text = "pmf";
  for (double p : pmf) text += " " + format_real(p);
  return InterarrivalLaw(std::move(pmf), 0.0, std::move(text));
}

InterarrivalLaw InterarrivalLaw::parse(const std::string& text) {
  const auto words = split_words(text);
  if (words.empty()) throw UsageError("renewal.mu: empty law");
  const std::string& kind = words[0];
  auto need = [&](std::size_t n) {
    if (words.size() != n + 1) {
      throw UsageError("renewal.mu: '" + kind + "' takes " + std::to_string(n) + " parameter(s)");
    }
  };
  if (kind == "geometric") {
    need(1);
    return geometric(parse_real(words[1], "renewal.mu"));
  }
  if (kind == "dirac") {
    need(1);
    return dirac(parse_integer(words[1], "renewal.mu"));
  }
  if (kind == "uniform") {
    need(2);
    return uniform(parse_integer(words[1], "renewal.mu"), parse_integer(words[2], "renewal.mu"));
  }
  if (kind == "pmf") {
    if (words.size() < 2) throw UsageError("renewal.mu: pmf needs at least one mass");
    std::vector<double> pmf;
    for (std::size_t i = 1; i < words.size(); ++i) pmf.push_back(parse_real(words[i], "renewal.mu"));
    return from_pmf(std::move(pmf));
  }
  throw UsageError("renewal.mu: unknown law '" + kind + "'");
}

void InterarrivalLaw::set_moment_order(double order) {
  if (!(order > 1.0)) throw UsageError("renewal.beta: moment order 1+beta must exceed 1");
  moment_order_ = order;
}

double InterarrivalLaw::mass(std::int64_t k) const {
  if (k < 0 || k >= static_cast<std::int64_t>(pmf_.size())) return 0.0;
  return pmf_[static_cast<std::size_t>(k)];
}

double InterarrivalLaw::mean() const {
  double m = 0.0;
  for (std::size_t k = 0; k < pmf_.size(); ++k) m += static_cast<double>(k) * pmf_[k];
  return m;
}

double InterarrivalLaw::exact_mass(std::int64_t k) const {
  if (geometric_q_ < 0.0) return mass(k);
  if (k < 0) return 0.0;
  return (1.0 - geometric_q_) * std::pow(geometric_q_, static_cast<double>(k));
}

double InterarrivalLaw::exact_tail(std::int64_t k) const {
  if (k <= 0) return 1.0;
  if (geometric_q_ >= 0.0) return std::pow(geometric_q_, static_cast<double>(k));
  double t = 0.0;
  for (std::size_t j = pmf_.size(); j-- > static_cast<std::size_t>(k);) t += pmf_[j];
  return t;
}

double InterarrivalLaw::exact_mean() const {
  if (geometric_q_ >= 0.0) return geometric_q_ / (1.0 - geometric_q_);
  return mean();
}

std::vector<double> hat_mu(const InterarrivalLaw& mu) {
  const auto& pmf = mu.pmf();
  const double m = mu.mean();
  if (!std::isfinite(m)) throw UsageError("hat_mu: interarrival law has infinite mean");
  std::vector<double> out(pmf.size());
  double tail = 0.0;
  for (std::size_t k = pmf.size(); k-- > 0;) {
    tail += pmf[k];
    out[k] = tail / (m + 1.0);
  }
  return out;
}

double gamma_mu(const InterarrivalLaw& mu) {
  const auto hat = hat_mu(mu);
  double g = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < hat.size(); ++k) {
    if (hat[k] > 0.0) g = std::min(g, mu.mass(static_cast<std::int64_t>(k)) / hat[k]);
  }
  if (g > 1.0 - kGammaSnap) g = 1.0;
  return std::max(g, 0.0);
}

// --- DrivingNoise ------------------------------------------------------------

DrivingNoise::DrivingNoise(const InterarrivalLaw& mu) : gamma_(gamma_mu(mu)), hat_(hat_mu(mu)) {
  const auto& pmf = mu.pmf();
  if (gamma_ >= 1.0 || gamma_ <= 0.0) {
    y_ = pmf;
  } else {
    y_.resize(pmf.size());
    double total = 0.0;
    for (std::size_t k = 0; k < pmf.size(); ++k) {
      const double v = (pmf[k] - gamma_ * hat_[k]) / (1.0 - gamma_);
      if (v < 0.0) {
        y_defect_ -= v;
        y_[k] = 0.0;
      } else {
        y_[k] = v;
        total += v;
      }
    }
    for (double& v : y_) v /= total;
  }
  hat_sampler_ = DiscreteSampler(hat_);
  y_sampler_ = DiscreteSampler(y_);
}

NoiseTriple DrivingNoise::from_uniforms(double u_hat, double u_z, double u_y) const {
  NoiseTriple n;
  n.w_hat = hat_sampler_(u_hat);
  n.z = u_z < gamma_;
  n.y = y_sampler_(u_y);
  return n;
}

NoiseTriple DrivingNoise::at(const Displacement& x, Coord t, std::uint64_t seed) const {
  const std::int64_t words[] = {x[0], x[1], x[2], t};
  CounterRng rng(seed, hash_words(label("renewal.noise"), std::span<const std::int64_t>(words)));
  const double u_hat = rng.uniform();
  const double u_z = rng.uniform();
  const double u_y = rng.uniform();
  return from_uniforms(u_hat, u_z, u_y);
}

// --- config ------------------------------------------------------------------

void RenewalConfig::validate() const {
  if (d < 1 || d > kMaxSpatialDim) throw UsageError("d: spatial dimension out of range");
  if (R < 1) throw UsageError("kernel.R: range must be a positive integer");
  if (trunc_s < 1) throw UsageError("renewal.trunc_s: must be >= 1");
  if (K0 < 1) throw UsageError("renewal.K0: must be >= 1");
  if (K_max < K0) throw UsageError("renewal.K_max: must be >= renewal.K0");
  if (confirmations < 1) throw UsageError("renewal.confirmations: must be >= 1");
  if (horizon < 1) throw UsageError("renewal.horizon: must be >= 1");
  if (!(gamma_mu(mu) > 0.0)) throw UsageError("renewal.mu: gamma_mu must be positive");
}

// --- realization -------------------------------------------------------------

std::size_t RenewalEnvironment::BlockKeyHash::operator()(const BlockKey& k) const noexcept {
  std::uint64_t h = mix64(static_cast<std::uint64_t>(k.block));
  for (Coord c : k.x) h = mix64(h ^ static_cast<std::uint64_t>(c));
  return static_cast<std::size_t>(h);
}

RenewalEnvironment::RenewalEnvironment(RenewalConfig config, std::uint64_t seed)
    : config_(std::move(config)), seed_(seed), noise_(config_.mu) {
  config_.validate();
}

NoiseTriple RenewalEnvironment::noise(const Displacement& x, Coord t) const {
  return noise_.at(x, t, seed_);
}

std::int64_t RenewalEnvironment::certify(const Displacement& x, Coord t, std::int64_t* depth) const {
  // Chain started from `value` at time `from`, read at time `to`. Only
  // renewal epochs consume noise.
  auto run = [&](Coord from, std::int64_t value, Coord to) {
    Coord s = from;
    while (s < to) {
      if (value > 0) {
        const Coord step = std::min<Coord>(value, to - s);
        value -= step;
        s += step;
      } else {
        value = noise(x, s + 1).w();
        s += 1;
      }
    }
    return value;
  };

  std::int64_t K = config_.K0;
  std::int64_t current = run(t - K, 0, t);
  int stable = 0;
  while (true) {
    const std::int64_t next_K = 2 * K;
    if (next_K > config_.K_max) {
      throw CensoredError("renewal chain did not coalesce within renewal.K_max", current, K);
    }
    const std::int64_t mid = run(t - next_K, 0, t - K);
    const std::int64_t next = mid == 0 ? current : run(t - K, mid, t);
    K = next_K;
    if (next == current) {
      if (++stable >= config_.confirmations) {
        *depth = K;
        return next;
      }
    } else {
      stable = 0;
    }
    current = next;
  }
}

RenewalEnvironment::Block RenewalEnvironment::build_block(const Displacement& x, Coord index) const {
  const Coord len = config_.K0;
  const Coord start = index * len;
  Block b;
  b.values.resize(static_cast<std::size_t>(len));
  b.values[0] = certify(x, start, &b.depth);
  for (Coord i = 1; i < len; ++i) {
    const std::int64_t prev = b.values[static_cast<std::size_t>(i - 1)];
    b.values[static_cast<std::size_t>(i)] = prev > 0 ? prev - 1 : noise(x, start + i).w();
  }
  return b;
}

const RenewalEnvironment::Block& RenewalEnvironment::block(const Displacement& x, Coord index) const {
  BlockKey key{x, index};
  {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
  }
  Block b = build_block(x, index);
  std::lock_guard<std::mutex> lock(mutex_);
  return cache_.try_emplace(key, std::move(b)).first->second;
}

ChainValue RenewalEnvironment::chain(const Displacement& x, Coord t) const {
  const Coord len = config_.K0;
  const Coord index = t >= 0 ? t / len : -((-t + len - 1) / len);
  const Block& b = block(x, index);
  ChainValue v;
  v.value = b.values[static_cast<std::size_t>(t - index * len)];
  v.depth = b.depth;
  v.residual_bias = std::pow(static_cast<double>(b.depth), -config_.mu.moment_order());
  return v;
}

std::int64_t RenewalEnvironment::omega(const LatticePoint& z) const {
  Lattice(config_.d).check(z);
  return chain(z.x, z.t).value;
}

Coord RenewalEnvironment::T_x(const Displacement& x, const LatticePoint& anchor) const {
  Displacement y{};
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = checked_sub(x[i], anchor.x[i]);
  const Coord n = sup_norm(y);
  const Coord lower = n == 0 ? anchor.t : anchor.t - ceil_div(n, config_.R) + 1;
  Coord t = lower;
  while (t - lower <= config_.horizon) {
    const std::int64_t v = chain(x, t).value;
    if (v > 0) {
      t += v;
    } else if (noise(x, t + 1).z) {
      return t;
    } else {
      ++t;
    }
  }
  throw CensoredError("T^x scan exceeded renewal.horizon", t, config_.horizon);
}

bool RenewalEnvironment::eta_s(const LatticePoint& anchor, int s) const {
  if (s < 1) throw UsageError("eta_s: truncation must be >= 1");
  Lattice(config_.d).check(anchor);
  if (chain(anchor.x, anchor.t).value != 0 || !noise(anchor.x, anchor.t + 1).z) return false;
  for (Coord r = 1; r <= s; ++r) {
    const Coord m = ceil_div(r, config_.R);
    const bool ok = for_each_on_ring(config_.d, r, [&](const Displacement& y) {
      Displacement x{};
      for (std::size_t i = 0; i < x.size(); ++i) x[i] = anchor.x[i] + y[i];
      // Need T^x <= t0 + m - 1, scanning from t0 - m + 1.
      const Coord upper = anchor.t + m - 1;
      Coord t = anchor.t - m + 1;
      while (t <= upper) {
        const std::int64_t v = chain(x, t).value;
        if (v > 0) {
          t += v;
        } else if (noise(x, t + 1).z) {
          return true;
        } else {
          ++t;
        }
      }
      return false;
    });
    if (!ok) return false;
  }
  return true;
}

bool RenewalEnvironment::eta(const LatticePoint& z) const { return eta_s(z, config_.trunc_s); }

ChainValue omega_at(const Displacement& x, Coord t, const RenewalConfig& config, std::uint64_t seed) {
  return RenewalEnvironment(config, seed).chain(x, t);
}

Coord T_x(const Displacement& x, const LatticePoint& anchor, const RenewalConfig& config,
          std::uint64_t seed) {
  return RenewalEnvironment(config, seed).T_x(x, anchor);
}

bool eta_s_at(const LatticePoint& anchor, const RenewalConfig& config, std::uint64_t seed) {
  return RenewalEnvironment(config, seed).eta(anchor);
}

// --- exact laws --------------------------------------------------------------

std::vector<double> scan_delay_pmf(const RenewalConfig& config, std::int64_t n_max) {
  if (n_max < 0) throw UsageError("scan_delay_pmf: n_max must be >= 0");
  const InterarrivalLaw& mu = config.mu;
  const double gamma = gamma_mu(mu);
  if (!(gamma > 0.0)) throw UsageError("scan_delay_pmf: gamma_mu must be positive");
  const auto n = static_cast<std::size_t>(n_max) + 1;
  const double norm = mu.exact_mean() + 1.0;
  std::vector<double> hat(n), y(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) hat[k] = mu.exact_tail(static_cast<std::int64_t>(k)) / norm;
  if (gamma < 1.0) {
    auto y_mass = [&](std::size_t k) {
      const auto kk = static_cast<std::int64_t>(k);
      return std::max(0.0, (mu.exact_mass(kk) - gamma * mu.exact_tail(kk) / norm) / (1.0 - gamma));
    };
    double total = 0.0;
    for (std::size_t k = 0; k < std::max(n, mu.pmf().size()); ++k) {
      const double m = y_mass(k);
      total += m;
      if (k < n) y[k] = m;
    }
    for (double& v : y) v /= total;
  }
  // V = sum of (S-1) i.i.d. copies of Y+1: V = 0 w.p. gamma, else Y+1+V'.
  std::vector<double> v(n, 0.0);
  v[0] = gamma;
  for (std::size_t m = 1; m < n; ++m) {
    double acc = 0.0;
    for (std::size_t k = 0; k + 1 <= m; ++k) acc += y[k] * v[m - 1 - k];
    v[m] = (1.0 - gamma) * acc;
  }
  std::vector<double> out(n, 0.0);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; a + b < n; ++b) out[a + b] += hat[a] * v[b];
  }
  return out;
}

namespace {

struct DelayTails {
  std::vector<double> pmf;
  std::vector<double> tail;  // tail[n] = P(D > n)

  DelayTails(const RenewalConfig& config, std::int64_t n_needed)
      : pmf(scan_delay_pmf(config, 4 * n_needed + 400)) {
    tail.assign(pmf.size(), 0.0);
    double acc = 0.0;
    for (std::size_t k = pmf.size(); k-- > 0;) {
      tail[k] = acc;
      acc += pmf[k];
    }
  }
};

double log_ring_product(const RenewalConfig& config, const DelayTails& tails, Coord r_lo, Coord r_hi) {
  double acc = 0.0;
  for (Coord r = r_lo; r <= r_hi; ++r) {
    const Coord m = ceil_div(r, config.R);
    acc += ring_size(config.d, r) * std::log1p(-tails.tail[static_cast<std::size_t>(2 * m - 2)]);
  }
  return acc;
}

}  // namespace

double log_eta_probability(const RenewalConfig& config, int s) {
  config.validate();
  if (s < 1) throw UsageError("log_eta_probability: s must be >= 1");
  const DelayTails tails(config, 2 * ceil_div(s, config.R));
  const double gamma = gamma_mu(config.mu);
  const double p0 = 1.0 / (config.mu.exact_mean() + 1.0);  // hat_mu(0)
  return std::log(p0 * gamma) + log_ring_product(config, tails, 1, s);
}

double truncation_gap(const RenewalConfig& config, int s_small, int s_large) {
  config.validate();
  if (s_small < 1 || s_large < s_small) throw UsageError("truncation_gap: need 1 <= s_small <= s_large");
  const DelayTails tails(config, 2 * ceil_div(s_large, config.R));
  const double gamma = gamma_mu(config.mu);
  const double p0 = 1.0 / (config.mu.exact_mean() + 1.0);
  const double log_small = std::log(p0 * gamma) + log_ring_product(config, tails, 1, s_small);
  const double log_extra = log_ring_product(config, tails, s_small + 1, s_large);
  return std::exp(log_small) * -std::expm1(log_extra);
}

// --- family ------------------------------------------------------------------

RenewalFamily::RenewalFamily(RenewalConfig config) : config_(std::move(config)) { config_.validate(); }

std::unique_ptr<EnvironmentView> RenewalFamily::realize(std::uint64_t seed) const {
  return std::make_unique<RenewalEnvironment>(config_, seed);
}

double RenewalFamily::decoupling_shape(double r, double h, double s) const {
  const int d = config_.d;
  const double beta = config_.mu.moment_order() - 1.0;
  return std::pow(r + 1.0 + s, d) * (h + 1.0) * std::pow(std::max(s, 1.0), d - beta + 1.0);
}

}  // namespace rwre
