#include "rwre/stat_tests.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "rwre/errors.hpp"
#include "rwre/parallel.hpp"
#include "rwre/renewal_env.hpp"

namespace rwre {

const char* reducer_name(Reducer r) {
  switch (r) {
    case Reducer::kAllZero: return "all-zero";
    case Reducer::kAnyOne: return "any-one";
    case Reducer::kParity: return "parity";
    case Reducer::kThreshold: return "threshold";
  }
  return "?";
}

const char* field_name(FieldKind f) {
  switch (f) {
    case FieldKind::kEta: return "eta";
    case FieldKind::kOmegaZero: return "omega==0";
    case FieldKind::kOmegaOdd: return "omega-odd";
    case FieldKind::kNoiseZ: return "Z";
  }
  return "?";
}

std::vector<LatticePoint> BoxFunctional::points() const {
  const Lattice lattice(box.spatial_dim());
  const LatticePoint origin{};
  std::vector<LatticePoint> out;
  box.for_each([&](const LatticePoint& z) {
    if (!cone || cone_contains(lattice, origin, z, R, *cone)) out.push_back(z);
  });
  return out;
}

namespace {

int read_field(const EnvironmentView& env, FieldKind field, const LatticePoint& z) {
  switch (field) {
    case FieldKind::kEta: return env.eta(z) ? 1 : 0;
    case FieldKind::kOmegaZero: return env.omega(z) == 0 ? 1 : 0;
    case FieldKind::kOmegaOdd: return (env.omega(z) & 1) != 0 ? 1 : 0;
    case FieldKind::kNoiseZ: {
      const auto* renewal = dynamic_cast<const RenewalEnvironment*>(&env);
      if (renewal == nullptr) throw UsageError("field Z needs a renewal environment");
      return renewal->noise(z.x, z.t).z ? 1 : 0;
    }
  }
  return 0;
}

int reduce(Reducer reducer, std::int64_t ones, std::int64_t count, std::int64_t threshold) {
  switch (reducer) {
    case Reducer::kAllZero: return ones == 0 ? 1 : 0;
    case Reducer::kAnyOne: return ones > 0 ? 1 : 0;
    case Reducer::kParity: return static_cast<int>(ones & 1);
    case Reducer::kThreshold: return ones >= threshold ? 1 : 0;
  }
  (void)count;
  return 0;
}

bool reads_omega_only(FieldKind f) { return f == FieldKind::kOmegaZero || f == FieldKind::kOmegaOdd; }

}  // namespace

int BoxFunctional::evaluate(const EnvironmentView& env) const {
  if (box.spatial_dim() != env.dim()) throw UsageError("functional box dimension differs from environment");
  std::int64_t ones = 0, count = 0;
  if (field == FieldKind::kEta && !cone) {
    const BoxField f = env.eta_field(box);
    for (auto v : f.values) ones += v;
    count = static_cast<std::int64_t>(f.values.size());
  } else {
    for (const auto& z : points()) {
      ones += read_field(env, field, z);
      ++count;
    }
  }
  return reduce(reducer, ones, count, threshold);
}

std::string BoxFunctional::describe() const {
  std::ostringstream os;
  os << reducer_name(reducer);
  if (reducer == Reducer::kThreshold) os << ">=" << threshold;
  os << '(' << field_name(field) << " on ";
  for (int i = 0; i < box.spatial_dim(); ++i) {
    const auto& a = box.axis(i);
    os << '[' << a.lo << ',' << a.hi << "]x";
  }
  os << '[' << box.time().lo << ',' << box.time().hi << ']';
  if (cone) os << (*cone == ConeDirection::kPast ? " in past cone" : " in future cone");
  os << ')';
  return os.str();
}

DecouplingResult decoupling_test(const EnvironmentFamily& family, const BoxFunctional& f1,
                                 const BoxFunctional& f2, std::int64_t n, std::uint64_t seed, int jobs,
                                 int resamples) {
  if (n < 2) throw UsageError("decoupling test needs at least 2 samples");
  if (f1.box.spatial_dim() != f2.box.spatial_dim()) throw UsageError("functional boxes differ in dimension");
  const Coord s = separation(f1.box, f2.box);
  if (s < 1) throw UsageError("decoupling test needs vertically separated boxes (separation >= 1)");

  std::vector<double> a(static_cast<std::size_t>(n)), b(static_cast<std::size_t>(n));
  parallel_for(static_cast<std::size_t>(n), jobs, [&](std::size_t i) {
    auto env = family.realize(derive_seed(seed, label("sample"), i));
    a[i] = f1.evaluate(*env);
    b[i] = f2.evaluate(*env);
  });

  DecouplingResult res;
  res.r = std::max(f1.box.spatial_diameter(), f2.box.spatial_diameter());
  res.h = std::max(f1.box.height(), f2.box.height());
  res.s = s;
  res.mean1 = mean_of(a);
  res.mean2 = mean_of(b);
  std::vector<double> prod(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) prod[i] = (a[i] - res.mean1) * (b[i] - res.mean2);
  const double nd = static_cast<double>(n);
  res.covariance = mean_of(prod);
  res.se = std::sqrt(variance_of(prod) / nd);

  const auto ci = bootstrap_percentile(a.size(), resamples, derive_seed(seed, label("bootstrap")),
                                       [&](const std::vector<std::size_t>& idx) {
                                         double sa = 0, sb = 0, sab = 0;
                                         for (auto j : idx) {
                                           sa += a[j];
                                           sb += b[j];
                                           sab += a[j] * b[j];
                                         }
                                         const double m = static_cast<double>(idx.size());
                                         return std::vector<double>{sab / m - (sa / m) * (sb / m)};
                                       });
  res.ci_lo = ci[0].first;
  res.ci_hi = ci[0].second;

  TestReport& rep = res.report;
  rep.n = n;
  rep.method = "covariance z-test";
  rep.null_description = "Cov(" + f1.describe() + ", " + f2.describe() + ") = 0";
  if (res.se == 0.0) {
    rep.statistic = 0.0;
    rep.p_value = 1.0;
    rep.inconclusive = res.covariance == 0.0;
  } else {
    rep.statistic = res.covariance / res.se;
    rep.p_value = std::clamp(2.0 * normal_cdf(-std::abs(rep.statistic)), 0.0, 1.0);
  }
  return res;
}

RmpResult rmp_test(const EnvironmentFamily& family, const BoxFunctional& past, const BoxFunctional& future,
                   std::int64_t n, std::uint64_t seed, const RmpOptions& options, int jobs) {
  if (n < 1) throw UsageError("rmp test needs at least one sample");
  if (!reads_omega_only(future.field)) throw UsageError("future statistic must read omega only");
  for (const auto& z : past.points()) {
    if (z.t > 0) throw UsageError("past statistic reads a point after the apex");
  }
  for (const auto& z : future.points()) {
    if (z.t < 0) throw UsageError("future statistic reads a point before the apex");
  }
  if (!(options.acceptance_floor > 0.0 && options.acceptance_floor <= 1.0)) {
    throw UsageError("acceptance floor must lie in (0, 1]");
  }
  const std::int64_t max_attempts =
      static_cast<std::int64_t>(std::ceil(30.0 / options.acceptance_floor));

  std::vector<std::uint8_t> xs(static_cast<std::size_t>(n)), ys(static_cast<std::size_t>(n));
  std::vector<std::int64_t> draws(static_cast<std::size_t>(n), 0);
  const LatticePoint origin{};
  parallel_for(static_cast<std::size_t>(n), jobs, [&](std::size_t i) {
    const std::uint64_t sample_seed = derive_seed(seed, label("sample"), i);
    for (std::int64_t attempt = 0;; ++attempt) {
      if (attempt >= max_attempts) {
        throw DiagnosticsError("rmp test: no realization with eta_0 = 1 in " + std::to_string(max_attempts) +
                               " draws (acceptance floor " + std::to_string(options.acceptance_floor) + ")");
      }
      auto env = family.realize(derive_seed(sample_seed, label("env"), static_cast<std::uint64_t>(attempt)));
      if (options.conditioned && !env->eta(origin)) continue;
      xs[i] = static_cast<std::uint8_t>(past.evaluate(*env));
      ys[i] = static_cast<std::uint8_t>(future.evaluate(*env));
      draws[i] = attempt + 1;
      return;
    }
  });

  RmpResult res;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    ++res.table[xs[i]][ys[i]];
    res.draws += draws[i];
  }
  res.acceptance = static_cast<double>(n) / static_cast<double>(res.draws);
  if (options.conditioned && res.acceptance < options.acceptance_floor) {
    throw DiagnosticsError("rmp test: acceptance rate " + std::to_string(res.acceptance) +
                           " below floor " + std::to_string(options.acceptance_floor));
  }
  const double tie_u = options.randomize_ties ? CounterRng(seed, label("ties")).uniform() : -1.0;
  res.report = chi2_independence_2x2(res.table[0][0], res.table[0][1], res.table[1][0], res.table[1][1], tie_u);
  res.report.null_description = past.describe() + " independent of " + future.describe() +
                                (options.conditioned ? " given eta_0 = 1" : " (unconditioned)");
  return res;
}

std::vector<FieldKind> past_fields(const EnvironmentFamily& family) {
  std::vector<FieldKind> f{FieldKind::kOmegaZero, FieldKind::kEta};
  if (family.name() == "renewal") f.push_back(FieldKind::kNoiseZ);
  return f;
}

std::vector<FieldKind> future_fields(const EnvironmentFamily& family) {
  std::vector<FieldKind> f{FieldKind::kOmegaZero};
  if (family.name() == "renewal") f.push_back(FieldKind::kOmegaOdd);
  return f;
}

BoxFunctional random_cone_functional(CounterRng& rng, int d, int R, int depth, ConeDirection direction,
                                     const std::vector<FieldKind>& fields) {
  if (depth < 1) throw UsageError("cone window depth must be positive");
  if (fields.empty()) throw UsageError("no fields to draw from");
  const auto draw = [&](Coord lo, Coord hi) {
    return lo + static_cast<Coord>(rng.below(static_cast<std::uint64_t>(hi - lo + 1)));
  };
  BoxFunctional f;
  f.cone = direction;
  f.R = R;
  f.field = fields[rng.below(fields.size())];
  f.reducer = static_cast<Reducer>(rng.below(4));

  // |t| in [t_near, t_far] away from the apex.
  const Coord t_near = draw(0, depth);
  const Coord t_far = std::min<Coord>(depth, t_near + draw(0, 3));
  std::vector<Interval> axes;
  const Coord reach = static_cast<Coord>(R) * t_far;
  for (int i = 0; i < d; ++i) {
    const Coord width = draw(0, 2);
    const Coord lo = draw(-reach, std::max(-reach, reach - width));
    axes.push_back({lo, lo + width});
  }
  if (direction == ConeDirection::kPast) {
    axes.push_back({-t_far, -t_near});
  } else {
    axes.push_back({t_near, t_far});
  }
  f.box = BoxSpec(std::move(axes));
  const auto count = static_cast<Coord>(f.points().size());
  f.threshold = count > 0 ? draw(1, count) : 1;
  return f;
}

double RmpBattery::fraction() const {
  return pairs.empty() ? 0.0 : static_cast<double>(rejected) / static_cast<double>(pairs.size());
}

bool RmpBattery::pass(double lo, double hi) const {
  const double f = fraction();
  return f >= lo && f <= hi;
}

RmpBattery rmp_battery(const EnvironmentFamily& family, int n_pairs, std::int64_t n_per_pair,
                       std::uint64_t seed, int depth, int jobs, int max_redraws) {
  if (n_pairs < 1) throw UsageError("battery needs at least one pair");
  const auto pf = past_fields(family);
  const auto ff = future_fields(family);
  RmpBattery battery;
  battery.pairs.resize(static_cast<std::size_t>(n_pairs));
  // Pairs run one after another; the samples inside a pair use the jobs.
  for (std::size_t i = 0; i < battery.pairs.size(); ++i) {
    const std::uint64_t pair_seed = derive_seed(seed, label("pair"), i);
    RmpPair& pair = battery.pairs[i];
    for (int attempt = 0;; ++attempt) {
      if (attempt > max_redraws) {
        throw DiagnosticsError("rmp battery: pair " + std::to_string(i) + " stayed degenerate after " +
                               std::to_string(max_redraws) + " redraws");
      }
      const std::uint64_t s = derive_seed(pair_seed, label("attempt"), static_cast<std::uint64_t>(attempt));
      CounterRng rng(s, label("functionals"));
      pair.past = random_cone_functional(rng, family.dim(), family.range(), depth, ConeDirection::kPast, pf);
      pair.future = random_cone_functional(rng, family.dim(), family.range(), depth, ConeDirection::kFuture, ff);
      if (pair.past.points().empty() || pair.future.points().empty()) continue;
      pair.result = rmp_test(family, pair.past, pair.future, n_per_pair, s, RmpOptions{}, jobs);
      pair.redraws = attempt;
      if (!pair.result.report.inconclusive) break;
    }
    if (pair.result.report.p_value < battery.level) ++battery.rejected;
  }
  return battery;
}

std::pair<BoxFunctional, BoxFunctional> control_pair(const EnvironmentFamily& family) {
  const int d = family.dim();
  const int R = family.range();
  const FieldKind field = family.name() == "renewal" ? FieldKind::kOmegaOdd : FieldKind::kOmegaZero;
  const auto column = [&](Coord t) {
    std::vector<Interval> axes(static_cast<std::size_t>(d), Interval{0, 0});
    axes.push_back({t, t});
    BoxFunctional f;
    f.box = BoxSpec(std::move(axes));
    f.reducer = Reducer::kAnyOne;
    f.field = field;
    f.R = R;
    return f;
  };
  return {column(-1), column(1)};
}

double PowerEstimate::power() const {
  return repetitions == 0 ? 0.0 : static_cast<double>(rejected) / static_cast<double>(repetitions);
}

PowerEstimate rmp_control_power(const EnvironmentFamily& family, std::int64_t n, int repetitions,
                                std::uint64_t seed, double level, int jobs) {
  const auto [past, future] = control_pair(family);
  RmpOptions opts;
  opts.conditioned = false;
  PowerEstimate est;
  for (int k = 0; k < repetitions; ++k) {
    const auto res = rmp_test(family, past, future, n, derive_seed(seed, label("repetition"), k), opts, jobs);
    ++est.repetitions;
    if (!res.report.inconclusive && res.report.p_value < level) ++est.rejected;
  }
  return est;
}

std::int64_t DecouplingBattery::passed() const {
  return std::count_if(pairs.begin(), pairs.end(), [](const DecouplingPair& p) { return p.pass; });
}

namespace {

BoxFunctional eta_box(int d, const Displacement& corner, Coord r, Coord t0, Coord h, Reducer reducer,
                      std::int64_t threshold) {
  std::vector<Interval> axes;
  for (int i = 0; i < d; ++i) {
    const Coord lo = corner[static_cast<std::size_t>(i)];
    axes.push_back({lo, lo + r});
  }
  axes.push_back({t0, t0 + h});
  BoxFunctional f;
  f.box = BoxSpec(std::move(axes));
  f.reducer = reducer;
  f.field = FieldKind::kEta;
  f.threshold = threshold;
  return f;
}

}  // namespace

DecouplingBattery decoupling_battery(const EnvironmentFamily& family, int n_pairs, std::int64_t n_per_pair,
                                     std::int64_t n_reference, std::uint64_t seed, int jobs) {
  if (n_pairs < 1) throw UsageError("battery needs at least one pair");
  if (n_reference < 2) throw UsageError("reference fit needs at least 2 samples");
  const int d = family.dim();
  DecouplingBattery battery;

  // Reference geometry: all 16 reducer combinations on one sample set.
  {
    const Coord r = battery.ref_r, h = battery.ref_h, s = battery.ref_s;
    const Displacement zero{};
    const std::int64_t volume = static_cast<std::int64_t>(std::pow(r + 1, d)) * (h + 1);
    std::vector<BoxFunctional> lower, upper;
    for (int k = 0; k < 4; ++k) {
      lower.push_back(eta_box(d, zero, r, 0, h, static_cast<Reducer>(k), (volume + 1) / 2));
      upper.push_back(eta_box(d, zero, r, h + s, h, static_cast<Reducer>(k), (volume + 1) / 2));
    }
    std::vector<std::array<std::uint8_t, 8>> vals(static_cast<std::size_t>(n_reference));
    const std::uint64_t ref_seed = derive_seed(seed, label("reference"));
    parallel_for(vals.size(), jobs, [&](std::size_t i) {
      auto env = family.realize(derive_seed(ref_seed, label("sample"), i));
      for (std::size_t k = 0; k < 4; ++k) {
        vals[i][k] = static_cast<std::uint8_t>(lower[k].evaluate(*env));
        vals[i][4 + k] = static_cast<std::uint8_t>(upper[k].evaluate(*env));
      }
    });
    const double shape = family.decoupling_shape(static_cast<double>(r), static_cast<double>(h),
                                                 static_cast<double>(s));
    const double nd = static_cast<double>(n_reference);
    double best = 0.0;
    for (std::size_t p = 0; p < 4; ++p) {
      for (std::size_t q = 4; q < 8; ++q) {
        double sa = 0, sb = 0, sab = 0;
        for (const auto& v : vals) {
          sa += v[p];
          sb += v[q];
          sab += v[p] * v[q];
        }
        const double cov = sab / nd - (sa / nd) * (sb / nd);
        best = std::max(best, std::abs(cov));
      }
    }
    battery.c = shape > 0.0 ? best / shape : 0.0;
  }

  battery.pairs.resize(static_cast<std::size_t>(n_pairs));
  for (std::size_t i = 0; i < battery.pairs.size(); ++i) {
    const std::uint64_t pair_seed = derive_seed(seed, label("pair"), i);
    CounterRng rng(pair_seed, label("functionals"));
    const auto draw = [&](Coord lo, Coord hi) {
      return lo + static_cast<Coord>(rng.below(static_cast<std::uint64_t>(hi - lo + 1)));
    };
    const Coord r = draw(0, battery.ref_r);
    const Coord h1 = draw(0, battery.ref_h);
    const Coord h2 = draw(0, battery.ref_h);
    const Coord s = draw(battery.ref_s, 4 * battery.ref_s);
    Displacement c1{}, c2{};
    for (int k = 0; k < d; ++k) {
      c1[static_cast<std::size_t>(k)] = draw(-2, 2);
      c2[static_cast<std::size_t>(k)] = draw(-2, 2);
    }
    const auto vol = [&](Coord h) { return static_cast<Coord>(std::pow(r + 1, d)) * (h + 1); };
    const auto red1 = static_cast<Reducer>(rng.below(4));
    const auto red2 = static_cast<Reducer>(rng.below(4));
    const Coord th1 = draw(1, vol(h1));
    const Coord th2 = draw(1, vol(h2));
    DecouplingPair& pair = battery.pairs[i];
    pair.f1 = eta_box(d, c1, r, 0, h1, red1, th1);
    pair.f2 = eta_box(d, c2, r, h1 + s, h2, red2, th2);
    pair.result = decoupling_test(family, pair.f1, pair.f2, n_per_pair, pair_seed, jobs);
    pair.bound = battery.c * family.decoupling_shape(static_cast<double>(r),
                                                     static_cast<double>(std::max(h1, h2)),
                                                     static_cast<double>(s));
    pair.pass = pair.result.covariance <= pair.bound + 3.0 * pair.result.se;
  }
  return battery;
}

}  // namespace rwre
