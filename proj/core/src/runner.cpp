#include "rwre/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>

#include <boost/math/distributions/students_t.hpp>

#include "rwre/parallel.hpp"
#include "rwre/regeneration.hpp"
#include "rwre/renorm.hpp"
#include "rwre/rng.hpp"
#include "rwre/stat_tests.hpp"
#include "rwre/svg.hpp"
#include "rwre/text.hpp"

namespace rwre {

namespace {

struct Context {
  const ExperimentConfig& config;
  int jobs;
  bool brute_force;
  std::uint64_t seed;  // per-subcommand stream
};

double t_quantile(double p, double dof) {
  return boost::math::quantile(boost::math::students_t_distribution<double>(dof), p);
}

// Decay exponent alpha of the decoupling bound for the configured family.
double alpha_of(const ExperimentConfig& c) {
  return (c.family == Family::kBoolean ? c.beta : c.renewal_beta) - c.d - 1.0;
}

std::string dim_label(const char* base, int i) { return std::string(base) + "_" + std::to_string(i + 1); }

std::vector<std::string> block_header(int d) {
  std::vector<std::string> h{"index", "T1"};
  for (int i = 0; i < d; ++i) h.push_back(dim_label("disp", i));
  h.push_back("censored");
  h.push_back("rejections");
  return h;
}

BlockOptions block_options(const ExperimentConfig& c) {
  BlockOptions o;
  o.horizon = c.experiment.horizon;
  o.acceptance_floor = c.experiment.acceptance_floor;
  return o;
}

// P(T1 > 2^j) over all blocks (censored blocks exceed every t below the
// horizon); points with fewer than 10 exceedances are dropped.
std::vector<std::pair<double, double>> t1_tail(const std::vector<RegenerationBlock>& blocks, std::int64_t horizon) {
  std::vector<std::pair<double, double>> pts;
  const double n = static_cast<double>(blocks.size());
  for (std::int64_t t = 1; t < horizon; t *= 2) {
    std::int64_t above = 0;
    for (const auto& b : blocks) above += (b.censored || b.T1 > t) ? 1 : 0;
    if (above < 10) break;
    pts.emplace_back(static_cast<double>(t), static_cast<double>(above) / n);
  }
  return pts;
}

void add_limit_estimates(DiagnosticsReport& rep, const LimitEstimates& lim, int d) {
  for (int i = 0; i < d; ++i) {
    rep.estimate(dim_label("v", i), Estimate{lim.v(i), lim.v_lo(i), lim.v_hi(i), static_cast<std::int64_t>(lim.n_blocks)});
  }
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      rep.estimate("sigma_" + std::to_string(i + 1) + std::to_string(j + 1),
                   Estimate{lim.sigma(i, j), lim.sigma_lo(i, j), lim.sigma_hi(i, j),
                            static_cast<std::int64_t>(lim.n_blocks)});
    }
  }
  rep.scalar("mean_T1", lim.mean_T1);
  rep.scalar("n_blocks", static_cast<double>(lim.n_blocks));
  rep.scalar("n_censored", static_cast<double>(lim.n_censored));
}

SubcommandResult run_blocks(const Context& ctx) {
  const auto& c = ctx.config;
  const auto family = c.make_family();
  const auto kernel = c.make_kernel();
  const auto blocks = sample_blocks(*family, kernel, static_cast<std::size_t>(c.experiment.n_blocks),
                                    derive_seed(ctx.seed, label("blocks")), block_options(c), ctx.jobs);
  SubcommandResult res;
  res.table = CsvTable(block_header(c.d));
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const auto& b = blocks[i];
    std::vector<double> row{static_cast<double>(i), static_cast<double>(b.T1)};
    for (int k = 0; k < c.d; ++k) row.push_back(static_cast<double>(b.disp[static_cast<std::size_t>(k)]));
    row.push_back(b.censored ? 1.0 : 0.0);
    row.push_back(static_cast<double>(b.rejections));
    res.table.row(row);
  }
  auto& rep = res.report;
  const auto lim = estimate_limits(blocks, c.d, c.experiment.resamples, derive_seed(ctx.seed, label("bootstrap")));
  add_limit_estimates(rep, lim, c.d);
  const double censored_fraction = static_cast<double>(lim.n_censored) / static_cast<double>(blocks.size());
  rep.scalar("censored_fraction", censored_fraction);
  rep.check("censored_fraction", censored_fraction < 1e-3,
            "censored fraction " + format_real(censored_fraction) + " < 0.001");

  Series tail{"T1_tail", "t", "P(T1 > t)", t1_tail(blocks, c.experiment.horizon), true, -1.0};
  if (tail.points.size() >= 3) {
    const auto fit = loglog_slope(tail.points);
    rep.scalar("T1_tail_slope", fit.slope);
    rep.scalar("T1_tail_slope_se", fit.se);
    rep.check("T1_tail_slope", fit.slope <= -1.0, "tail slope " + format_real(fit.slope) + " <= -1");
  } else {
    rep.check("T1_tail_slope", false, "fewer than 3 tail points with >= 10 exceedances");
  }
  rep.series.push_back(std::move(tail));
  return res;
}

SubcommandResult run_simulate(const Context& ctx) {
  const auto& c = ctx.config;
  const auto family = c.make_family();
  const auto kernel = c.make_kernel();
  const int d = c.d;
  const auto blocks = sample_blocks(*family, kernel, static_cast<std::size_t>(c.experiment.n_blocks),
                                    derive_seed(ctx.seed, label("blocks")), block_options(c), ctx.jobs);
  const auto lim = estimate_limits(blocks, d, c.experiment.resamples, derive_seed(ctx.seed, label("bootstrap")));
  const auto ends = direct_run(*family, kernel, c.experiment.t_final, static_cast<std::size_t>(c.experiment.n_runs),
                               derive_seed(ctx.seed, label("direct")), ctx.jobs);
  const double t = static_cast<double>(c.experiment.t_final);
  const auto z = standardize(ends, c.experiment.t_final, lim.v);

  SubcommandResult res;
  std::vector<std::string> header{"run"};
  for (int i = 0; i < d; ++i) header.push_back(dim_label("X", i));
  for (int i = 0; i < d; ++i) header.push_back(dim_label("standardized", i));
  res.table = CsvTable(header);
  for (std::size_t r = 0; r < ends.size(); ++r) {
    std::vector<double> row{static_cast<double>(r)};
    for (int i = 0; i < d; ++i) row.push_back(ends[r](i));
    for (int i = 0; i < d; ++i) row.push_back(z[r](i));
    res.table.row(row);
  }

  auto& rep = res.report;
  add_limit_estimates(rep, lim, d);
  const double n = static_cast<double>(ends.size());
  const double tq = t_quantile(0.975, n - 1.0);
  bool lln = true;
  std::string lln_detail;
  for (int i = 0; i < d; ++i) {
    std::vector<double> speed;
    for (const auto& e : ends) speed.push_back(e(i) / t);
    const double m = mean_of(speed);
    const double hw = tq * std::sqrt(variance_of(speed) / n);
    rep.estimate(dim_label("direct_speed", i), Estimate{m, m - hw, m + hw, static_cast<std::int64_t>(n)});
    const double block_hw = 0.5 * (lim.v_hi(i) - lim.v_lo(i));
    const double gap = std::abs(lim.v(i) - m);
    lln = lln && gap <= block_hw + hw;
    if (!lln_detail.empty()) lln_detail += "; ";
    lln_detail += "|" + format_real(lim.v(i)) + " - " + format_real(m) + "| = " + format_real(gap) +
                  " <= " + format_real(block_hw + hw);
  }
  rep.check("lln_cross_check", lln, lln_detail);

  // The Gaussian comparison needs enough runs to mean anything.
  if (ends.size() >= 500) {
    const auto ks = ks_gaussian(z, Eigen::VectorXd::Zero(d), lim.sigma);
    rep.test("clt_ks_gaussian", ks);
    rep.check("clt_ks_gaussian", ks.p_value > 0.01, "p = " + format_real(ks.p_value) + " > 0.01");
    double emp = 0.0;
    for (const auto& v : z) emp += v.squaredNorm();
    emp /= n - 1.0;
    const double ratio = emp / lim.sigma.trace();
    rep.scalar("variance_ratio", ratio);
    rep.check("clt_variance_ratio", ratio >= 0.85 && ratio <= 1.15,
              "empirical / block variance " + format_real(ratio) + " in [0.85, 1.15]");
  }
  if (d == 1 && lim.sigma(0, 0) > 0.0) {
    const double sd = std::sqrt(lim.sigma(0, 0));
    for (const auto& v : z) rep.residuals.push_back(v(0) / sd);
  }
  return res;
}

SubcommandResult run_renorm(const Context& ctx) {
  const auto& c = ctx.config;
  const auto family = c.make_family();
  const auto kernel = c.make_kernel();
  const auto n = static_cast<std::size_t>(c.experiment.n_realizations);
  std::vector<FallOnTrapReport> reports(n);
  parallel_for(n, ctx.jobs, [&](std::size_t i) {
    const std::uint64_t s = derive_seed(ctx.seed, label("realization"), i);
    const auto env = family->realize(derive_seed(s, label("env")));
    reports[i] = verify_fall_on_trap(*env, kernel, c.experiment.J, c.experiment.H, c.experiment.n_walks,
                                     derive_seed(s, label("walks")));
  });
  SubcommandResult res;
  res.table = CsvTable({"realization", "M_J", "bound", "empirical", "se", "pass"});
  std::int64_t passed = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& r = reports[i];
    passed += r.pass ? 1 : 0;
    res.table.row({static_cast<double>(i), static_cast<double>(r.M_J), r.bound, r.empirical, r.se, r.pass ? 1.0 : 0.0});
  }
  auto& rep = res.report;
  rep.scalar("kappa", kernel.kappa());
  rep.scalar("realizations_passed", static_cast<double>(passed));
  const auto need = static_cast<std::int64_t>(std::ceil(0.99 * static_cast<double>(n)));
  rep.check("fall_on_trap", passed >= need,
            std::to_string(passed) + " of " + std::to_string(n) + " realizations within bound + 3 se (need " +
                std::to_string(need) + ")");
  return res;
}

SubcommandResult run_mj(const Context& ctx) {
  const auto& c = ctx.config;
  const auto n = static_cast<std::size_t>(c.experiment.n_instances);
  std::vector<std::int64_t> dp(n), brute(n, -1);
  std::vector<MjInstance> instances(n);
  parallel_for(n, ctx.jobs, [&](std::size_t i) {
    instances[i] = random_mj_instance(derive_seed(ctx.seed, label("instance"), i));
    const auto& in = instances[i];
    dp[i] = min_threats(in.J, in.H, in.traps, in.start, in.R);
    if (ctx.brute_force) brute[i] = min_threats_brute_force(in.J, in.H, in.traps, in.start, in.R);
  });
  SubcommandResult res;
  res.table = CsvTable({"instance", "R", "J", "H", "traps", "starts", "M_J", "M_J_brute_force"});
  std::int64_t mismatches = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& in = instances[i];
    if (ctx.brute_force && dp[i] != brute[i]) ++mismatches;
    res.table.row({static_cast<double>(i), static_cast<double>(in.R), static_cast<double>(in.J),
                   static_cast<double>(in.H), static_cast<double>(in.traps.points()->size()),
                   static_cast<double>(in.start.size()), static_cast<double>(dp[i]), static_cast<double>(brute[i])});
  }
  auto& rep = res.report;
  if (ctx.brute_force) {
    rep.scalar("mismatches", static_cast<double>(mismatches));
    rep.check("mj_brute_force", mismatches == 0, std::to_string(mismatches) + " mismatches over " +
                                                     std::to_string(n) + " instances");
  }
  return res;
}

SubcommandResult run_qk(const Context& ctx) {
  const auto& c = ctx.config;
  const auto family = c.make_family();
  ScaleLadder ladder{c.experiment.k_min, c.experiment.k_max};
  const auto q = estimate_qk(ladder, *family, c.experiment.n_samples, derive_seed(ctx.seed, label("qk")), ctx.jobs);
  const double alpha = alpha_of(c);
  SubcommandResult res;
  res.table = CsvTable({"k", "L_k", "q_k", "lo", "hi", "n"});
  auto& rep = res.report;
  Series series{"q_k", "L_k", "q_k", {}, true, -alpha};
  // Zero estimates enter the fit at their upper confidence limit.
  std::vector<std::pair<double, double>> fit_points;
  for (std::size_t i = 0; i < q.size(); ++i) {
    const int k = ladder.k_min + static_cast<int>(i);
    const double L = static_cast<double>(ScaleLadder::L(k));
    res.table.row({static_cast<double>(k), L, q[i].value, q[i].lo, q[i].hi, static_cast<double>(q[i].n)});
    rep.estimate("q_" + std::to_string(k), q[i]);
    if (q[i].value > 0.0) series.points.emplace_back(L, q[i].value);
    fit_points.emplace_back(L, q[i].value > 0.0 ? q[i].value : q[i].hi);
  }
  if (fit_points.size() >= 3) {
    const auto fit = loglog_slope(fit_points);
    rep.scalar("slope", fit.slope);
    rep.scalar("slope_se", fit.se);
    rep.check("qk_slope", fit.slope <= -alpha + 0.5,
              "slope " + format_real(fit.slope) + " <= " + format_real(-alpha + 0.5));
  }
  // c fitted so that the recursion is tight at the first step.
  const auto idx = [&](int k) { return static_cast<std::size_t>(k - ladder.k_min); };
  const int k0 = std::max(1, ladder.k_min);
  if (k0 + 1 <= ladder.k_max) {
    const double L0 = static_cast<double>(ScaleLadder::L(k0));
    const double qa = q[idx(k0)].value, qb = q[idx(k0 + 1)].value;
    const double c_hat = std::max(0.0, qb - qa * qa) * std::pow(L0, alpha);
    rep.scalar("c_hat", c_hat);
    for (int k = k0 + 1; k + 1 <= ladder.k_max; ++k) {
      const double Lk = static_cast<double>(ScaleLadder::L(k));
      const double rhs = q[idx(k)].hi * q[idx(k)].hi + c_hat * std::pow(Lk, -alpha);
      rep.check("qk_recursion_k" + std::to_string(k), q[idx(k + 1)].lo <= rhs,
                "q_" + std::to_string(k + 1) + " lower limit " + format_real(q[idx(k + 1)].lo) + " <= " +
                    format_real(rhs));
    }
  }
  rep.series.push_back(std::move(series));
  return res;
}

SubcommandResult run_akh(const Context& ctx) {
  const auto& c = ctx.config;
  const auto family = c.make_family();
  SubcommandResult res;
  res.table = CsvTable({"k", "L_k", "H", "P_A", "lo", "hi", "n"});
  Series series{"A_kH", "L_k", "P(A_k,H_k)", {}, true, -1.0};
  // Zero estimates enter the fit at their upper confidence limit.
  std::vector<std::pair<double, double>> fit_points;
  for (int k = std::max(1, c.experiment.k_min); k <= c.experiment.k_max; ++k) {
    const Coord L = ScaleLadder::L(k);
    const int H = static_cast<int>(std::max<Coord>(1, L / (static_cast<Coord>(k) * k)));
    const auto e = estimate_A_kH(k, H, *family, c.R, c.experiment.n_realizations,
                                 derive_seed(ctx.seed, label("akh"), static_cast<std::uint64_t>(k)), ctx.jobs);
    res.table.row({static_cast<double>(k), static_cast<double>(L), static_cast<double>(H), e.value, e.lo, e.hi,
                   static_cast<double>(e.n)});
    res.report.estimate("A_" + std::to_string(k), e);
    if (k >= 2 && e.value > 0.0) series.points.emplace_back(static_cast<double>(L), e.value);
    if (k >= 2) fit_points.emplace_back(static_cast<double>(L), e.value > 0.0 ? e.value : e.hi);
  }
  if (fit_points.size() >= 3) {
    const auto fit = loglog_slope(fit_points);
    res.report.scalar("slope", fit.slope);
    res.report.scalar("slope_se", fit.se);
    res.report.check("akh_slope", fit.slope <= -1.0, "slope " + format_real(fit.slope) + " <= -1 over k >= 2");
  } else {
    res.report.check("akh_slope", false, "fewer than 3 scales with k >= 2");
  }
  res.report.series.push_back(std::move(series));
  return res;
}

// Monte Carlo P(eta^s != eta^{2s}) at the origin for the Boolean model;
// the nearest crossing centre is found once per realization.
std::vector<Estimate> boolean_truncation_gaps(const BooleanConfig& config, const std::vector<std::int64_t>& s_list,
                                              std::int64_t n, std::uint64_t seed, int jobs) {
  const double reach = static_cast<double>(*std::max_element(s_list.begin(), s_list.end()));
  std::vector<double> nearest(static_cast<std::size_t>(n));
  parallel_for(nearest.size(), jobs, [&](std::size_t i) {
    nearest[i] = nearest_crossing_distance(LatticePoint{}, config, derive_seed(seed, label("sample"), i), reach);
  });
  std::vector<Estimate> out;
  for (auto s : s_list) {
    const double half = 0.5 * static_cast<double>(s), full = static_cast<double>(s);
    std::int64_t hits = 0;
    for (double r : nearest) hits += (r >= half && r < full) ? 1 : 0;
    out.push_back(wilson(hits, n));
  }
  return out;
}

SubcommandResult run_decouple(const Context& ctx) {
  const auto& c = ctx.config;
  const auto family = c.make_family();
  const auto battery = decoupling_battery(*family, c.experiment.n_pairs, c.experiment.n_per_pair,
                                          c.experiment.n_reference, derive_seed(ctx.seed, label("battery")), ctx.jobs);
  SubcommandResult res;
  res.table = CsvTable({"pair", "r", "h", "s", "covariance", "se", "ci_lo", "ci_hi", "bound", "pass", "f1", "f2"});
  for (std::size_t i = 0; i < battery.pairs.size(); ++i) {
    const auto& p = battery.pairs[i];
    const auto& r = p.result;
    res.table.row_text({std::to_string(i), std::to_string(r.r), std::to_string(r.h), std::to_string(r.s),
                        format_real(r.covariance), format_real(r.se), format_real(r.ci_lo), format_real(r.ci_hi),
                        format_real(p.bound), p.pass ? "1" : "0", "\"" + p.f1.describe() + "\"",
                        "\"" + p.f2.describe() + "\""});
  }
  auto& rep = res.report;
  rep.scalar("c_fitted", battery.c);
  rep.scalar("pairs_passed", static_cast<double>(battery.passed()));
  const auto need = static_cast<std::int64_t>(std::ceil(0.94 * static_cast<double>(battery.pairs.size())));
  rep.check("decoupling_battery", battery.passed() >= need,
            std::to_string(battery.passed()) + " of " + std::to_string(battery.pairs.size()) +
                " pairs within c eps + 3 se (need " + std::to_string(need) + ")");

  // Truncation error P(eta^s != eta^{2s}) against s.
  const double alpha = alpha_of(c);
  Series gaps{"truncation_gap", "s", "P(eta^s != eta^2s)", {}, true, -alpha};
  if (c.family == Family::kBoolean) {
    const auto est = boolean_truncation_gaps(c.boolean_config(), c.experiment.s_list, c.experiment.n_samples,
                                             derive_seed(ctx.seed, label("truncation")), ctx.jobs);
    for (std::size_t i = 0; i < est.size(); ++i) {
      rep.estimate("gap_s" + std::to_string(c.experiment.s_list[i]), est[i]);
      if (est[i].value > 0.0) gaps.points.emplace_back(static_cast<double>(c.experiment.s_list[i]), est[i].value);
    }
  } else {
    const auto rc = c.renewal_config();
    for (auto s : c.experiment.s_list) {
      const double g = truncation_gap(rc, static_cast<int>(s), static_cast<int>(2 * s));
      rep.scalar("gap_s" + std::to_string(s), g);
      if (g > 0.0) gaps.points.emplace_back(static_cast<double>(s), g);
    }
  }
  if (gaps.points.size() >= 3) {
    const auto fit = loglog_slope(gaps.points);
    rep.scalar("truncation_slope", fit.slope);
    rep.scalar("truncation_slope_se", fit.se);
    rep.check("truncation_slope", fit.slope <= -alpha + 0.5,
              "slope " + format_real(fit.slope) + " <= " + format_real(-alpha + 0.5));
  } else {
    rep.check("truncation_slope", false, "fewer than 3 positive truncation-gap estimates");
  }
  rep.series.push_back(std::move(gaps));
  return res;
}

SubcommandResult run_rmp(const Context& ctx) {
  const auto& c = ctx.config;
  const auto family = c.make_family();
  const auto battery = rmp_battery(*family, c.experiment.n_pairs, c.experiment.n_per_pair,
                                   derive_seed(ctx.seed, label("battery")), c.experiment.depth, ctx.jobs);
  SubcommandResult res;
  res.table = CsvTable({"pair", "statistic", "p_value", "n00", "n01", "n10", "n11", "acceptance", "redraws",
                        "method", "past", "future"});
  for (std::size_t i = 0; i < battery.pairs.size(); ++i) {
    const auto& p = battery.pairs[i];
    const auto& r = p.result;
    res.table.row_text({std::to_string(i), format_real(r.report.statistic), format_real(r.report.p_value),
                        std::to_string(r.table[0][0]), std::to_string(r.table[0][1]), std::to_string(r.table[1][0]),
                        std::to_string(r.table[1][1]), format_real(r.acceptance), std::to_string(p.redraws),
                        "\"" + r.report.method + "\"", "\"" + p.past.describe() + "\"",
                        "\"" + p.future.describe() + "\""});
  }
  auto& rep = res.report;
  rep.scalar("rejected_fraction", battery.fraction());
  rep.check("rmp_battery", battery.pass(),
            "rejected fraction " + format_real(battery.fraction()) + " in [0.02, 0.08]");
  const auto power = rmp_control_power(*family, c.experiment.control_n, c.experiment.control_repetitions,
                                       derive_seed(ctx.seed, label("control")), 0.05, ctx.jobs);
  rep.scalar("control_power", power.power());
  rep.check("rmp_control_power", power.power() >= 0.9,
            "unconditioned control power " + format_real(power.power()) + " >= 0.9");
  return res;
}

using Handler = SubcommandResult (*)(const Context&);

const std::map<std::string, Handler>& handlers() {
  static const std::map<std::string, Handler> h = {
      {"blocks", run_blocks}, {"simulate", run_simulate}, {"renorm", run_renorm}, {"qk", run_qk},
      {"mj", run_mj},         {"akh", run_akh},           {"decouple", run_decouple}, {"rmp-test", run_rmp},
  };
  return h;
}

}  // namespace

const std::vector<std::string>& subcommand_names() {
  static const std::vector<std::string> names = {"blocks", "simulate", "renorm", "mj",
                                                 "akh",    "decouple", "rmp-test", "qk"};
  return names;
}

std::string csv_schema_help() {
  return "CSV columns per subcommand:\n"
         "  blocks    index,T1,disp_1..disp_d,censored,rejections\n"
         "  simulate  run,X_1..X_d,standardized_1..standardized_d\n"
         "  renorm    realization,M_J,bound,empirical,se,pass\n"
         "  mj        instance,R,J,H,traps,starts,M_J,M_J_brute_force (-1 without --brute-force)\n"
         "  qk        k,L_k,q_k,lo,hi,n\n"
         "  akh       k,L_k,H,P_A,lo,hi,n (H = floor(L_k / k^2))\n"
         "  decouple  pair,r,h,s,covariance,se,ci_lo,ci_hi,bound,pass,f1,f2\n"
         "  rmp-test  pair,statistic,p_value,n00,n01,n10,n11,acceptance,redraws,method,past,future\n";
}

SubcommandResult run_subcommand(const std::string& name, const ExperimentConfig& config, int jobs, bool brute_force) {
  const auto it = handlers().find(name);
  if (it == handlers().end()) throw UsageError("unknown subcommand '" + name + "'");
  const Context ctx{config, jobs, brute_force, derive_seed(config.seed, label(name.c_str()))};
  SubcommandResult res = it->second(ctx);
  res.report.subcommand = name;
  res.report.family = family_name(config.family);
  res.report.config_text = config.to_text();
  res.report.config_hash = config.hash();
  res.report.seed = config.seed;
  return res;
}

int run(const RunOptions& options, std::ostream& log) {
  if (handlers().count(options.subcommand) == 0) {
    log << "error: unknown subcommand '" << options.subcommand << "'\n";
    return kExitUnknownSubcommand;
  }
  const auto start = std::chrono::steady_clock::now();
  try {
    if (options.jobs < 1) throw ConfigError("--jobs", "must be >= 1");
    ExperimentConfig config = ExperimentConfig::load(options.config_path);
    if (options.seed) config.seed = *options.seed;
    SubcommandResult res = run_subcommand(options.subcommand, config, options.jobs, options.brute_force);
    res.report.wall_clock_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    std::filesystem::create_directories(options.out_dir);
    const std::string base = options.out_dir + "/" + options.subcommand;
    res.table.write(base + ".csv");
    {
      std::ofstream out(base + ".json", std::ios::binary);
      if (!out) throw ResourceError("cannot write " + base + ".json");
      out << res.report.to_json();
    }
    if (options.plots) {
      for (const auto& p : emit_plots(res.report, options.out_dir)) log << "wrote " << p << '\n';
    }
    for (const auto& c : res.report.checks) {
      log << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
    }
    log << "wrote " << base << ".csv and " << base << ".json\n";
    if (options.check && !res.report.all_checks_pass()) return kExitCheckFailed;
    return kExitOk;
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << '\n';
    return kExitInvalidConfig;
  } catch (const UsageError& e) {
    log << "invalid input: " << e.what() << '\n';
    return kExitInvalidConfig;
  } catch (const ResourceError& e) {
    log << "resource error: " << e.what() << '\n';
    return kExitResource;
  } catch (const std::filesystem::filesystem_error& e) {
    log << "resource error: " << e.what() << '\n';
    return kExitResource;
  } catch (const DiagnosticsError& e) {
    log << "diagnostics error: " << e.what() << '\n';
    return kExitDiagnostics;
  } catch (const CensoredError& e) {
    log << "censored: " << e.what() << '\n';
    return kExitDiagnostics;
  } catch (const std::exception& e) {
    log << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
}

}  // namespace rwre
