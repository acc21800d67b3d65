#include "rwre/config.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <sstream>
#include <type_traits>

#include "rwre/rng.hpp"
#include "rwre/text.hpp"

namespace rwre {

const char* family_name(Family f) { return f == Family::kBoolean ? "boolean" : "renewal"; }

namespace {

enum class Section { kCommon, kBoolean, kRenewal, kKernel, kExperiment };

struct Key {
  const char* name;
  Section section;
  std::function<void(ExperimentConfig&, const std::string&)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

template <typename T>
T parse_int_as(const std::string& v, const char* key) {
  const long long x = parse_integer(v, key);
  if (x < static_cast<long long>(std::numeric_limits<T>::min()) ||
      static_cast<unsigned long long>(x) > static_cast<unsigned long long>(std::numeric_limits<T>::max())) {
    throw ConfigError(key, "value out of range");
  }
  return static_cast<T>(x);
}

#define RWRE_INT(key, section, field)                                                              \
  Key {                                                                                            \
    key, section,                                                                                  \
        [](ExperimentConfig& c, const std::string& v) {                                            \
          c.field = parse_int_as<std::remove_reference_t<decltype(c.field)>>(v, key);              \
        },                                                                                         \
        [](const ExperimentConfig& c) { return std::to_string(c.field); }                          \
  }
#define RWRE_REAL(key, section, field)                                                             \
  Key {                                                                                            \
    key, section, [](ExperimentConfig& c, const std::string& v) { c.field = parse_real(v, key); }, \
        [](const ExperimentConfig& c) { return format_real(c.field); }                             \
  }

const std::vector<Key>& keys() {
  static const std::vector<Key> table = {
      Key{"seed", Section::kCommon,
          [](ExperimentConfig& c, const std::string& v) {
            const auto t = trim(v);
            if (t.empty() || t.find_first_not_of("0123456789") != std::string_view::npos) {
              throw ConfigError("seed", "expected a non-negative integer, got '" + v + "'");
            }
            try {
              c.seed = std::stoull(std::string(t));
            } catch (const std::out_of_range&) {
              throw ConfigError("seed", "does not fit in 64 bits");
            }
          },
          [](const ExperimentConfig& c) { return std::to_string(c.seed); }},
      RWRE_INT("d", Section::kCommon, d),
      RWRE_INT("kernel.R", Section::kKernel, R),
      Key{"kernel.type", Section::kKernel,
          [](ExperimentConfig& c, const std::string& v) { c.kernel.type = std::string(trim(v)); },
          [](const ExperimentConfig& c) { return c.kernel.type; }},
      RWRE_REAL("kernel.kappa", Section::kKernel, kernel.kappa),

      RWRE_REAL("boolean.lambda", Section::kBoolean, lambda),
      RWRE_REAL("boolean.beta", Section::kBoolean, beta),
      RWRE_REAL("boolean.rho0", Section::kBoolean, rho0),
      RWRE_REAL("boolean.rho_max", Section::kBoolean, rho_max),
      RWRE_INT("boolean.trunc_s", Section::kBoolean, boolean_trunc_s),
      Key{"boolean.cones", Section::kBoolean,
          [](ExperimentConfig& c, const std::string& v) { c.cones = std::string(trim(v)); },
          [](const ExperimentConfig& c) { return c.cones; }},

      Key{"renewal.mu", Section::kRenewal,
          [](ExperimentConfig& c, const std::string& v) { c.mu = InterarrivalLaw::parse(v).text(); },
          [](const ExperimentConfig& c) { return c.mu; }},
      RWRE_REAL("renewal.beta", Section::kRenewal, renewal_beta),
      RWRE_INT("renewal.trunc_s", Section::kRenewal, renewal_trunc_s),
      RWRE_INT("renewal.K0", Section::kRenewal, K0),
      RWRE_INT("renewal.K_max", Section::kRenewal, K_max),
      RWRE_INT("renewal.confirmations", Section::kRenewal, confirmations),
      RWRE_INT("renewal.horizon", Section::kRenewal, scan_horizon),

      RWRE_INT("experiment.n_blocks", Section::kExperiment, experiment.n_blocks),
      RWRE_INT("experiment.horizon", Section::kExperiment, experiment.horizon),
      RWRE_INT("experiment.t_final", Section::kExperiment, experiment.t_final),
      RWRE_INT("experiment.n_runs", Section::kExperiment, experiment.n_runs),
      RWRE_INT("experiment.resamples", Section::kExperiment, experiment.resamples),
      RWRE_REAL("experiment.acceptance_floor", Section::kExperiment, experiment.acceptance_floor),
      RWRE_INT("experiment.J", Section::kExperiment, experiment.J),
      RWRE_INT("experiment.H", Section::kExperiment, experiment.H),
      RWRE_INT("experiment.n_realizations", Section::kExperiment, experiment.n_realizations),
      RWRE_INT("experiment.n_walks", Section::kExperiment, experiment.n_walks),
      RWRE_INT("experiment.n_instances", Section::kExperiment, experiment.n_instances),
      RWRE_INT("experiment.k_min", Section::kExperiment, experiment.k_min),
      RWRE_INT("experiment.k_max", Section::kExperiment, experiment.k_max),
      RWRE_INT("experiment.n_samples", Section::kExperiment, experiment.n_samples),
      RWRE_INT("experiment.n_pairs", Section::kExperiment, experiment.n_pairs),
      RWRE_INT("experiment.n_per_pair", Section::kExperiment, experiment.n_per_pair),
      RWRE_INT("experiment.n_reference", Section::kExperiment, experiment.n_reference),
      RWRE_INT("experiment.depth", Section::kExperiment, experiment.depth),
      Key{"experiment.s_list", Section::kExperiment,
          [](ExperimentConfig& c, const std::string& v) {
            c.experiment.s_list.clear();
            for (const auto& w : split_words(v)) c.experiment.s_list.push_back(parse_integer(w, "experiment.s_list"));
          },
          [](const ExperimentConfig& c) {
            std::string out;
            for (auto s : c.experiment.s_list) out += (out.empty() ? "" : " ") + std::to_string(s);
            return out;
          }},
      RWRE_INT("experiment.control_n", Section::kExperiment, experiment.control_n),
      RWRE_INT("experiment.control_repetitions", Section::kExperiment, experiment.control_repetitions),
  };
  return table;
}

#undef RWRE_INT
#undef RWRE_REAL

void require(bool ok, const char* key, const std::string& message) {
  if (!ok) throw ConfigError(key, message);
}

// Library errors are phrased "key: message"; recover the key.
[[noreturn]] void rethrow_as_config(const UsageError& e, const char* fallback) {
  const std::string what = e.what();
  const auto colon = what.find(':');
  if (colon != std::string::npos && what.find(' ') > colon) {
    throw ConfigError(what.substr(0, colon), std::string(trim(std::string_view(what).substr(colon + 1))));
  }
  throw ConfigError(fallback, what);
}

void validate(const ExperimentConfig& c, bool kappa_given) {
  require(c.d >= 1 && c.d <= kMaxSpatialDim, "d", "spatial dimension must be 1, 2 or 3");
  require(c.R >= 1 && c.R <= 8, "kernel.R", "range must lie in [1, 8]");
  require(c.kernel.type == "drift" || c.kernel.type == "lazy", "kernel.type", "expected drift or lazy");
  if (c.kernel.type == "drift") {
    require(kappa_given, "kernel.kappa", "required key missing for kernel.type = drift");
    require(c.d == 1, "kernel.type", "drift kernel needs d = 1");
    require(c.kernel.kappa > 0.0 && c.kernel.kappa <= 1.0 / 3.0, "kernel.kappa", "must lie in (0, 1/3]");
  }
  if (c.family == Family::kBoolean) {
    require(c.cones == "discrete" || c.cones == "continuous", "boolean.cones", "expected discrete or continuous");
    try {
      c.boolean_config().validate();
    } catch (const UsageError& e) {
      rethrow_as_config(e, "boolean");
    }
  } else {
    require(c.renewal_beta > 0.0, "renewal.beta", "must be positive");
    try {
      c.renewal_config().validate();
    } catch (const UsageError& e) {
      rethrow_as_config(e, "renewal");
    }
  }
  const auto& x = c.experiment;
  require(x.n_blocks >= 1, "experiment.n_blocks", "must be >= 1");
  require(x.horizon >= 1, "experiment.horizon", "must be >= 1");
  require(x.t_final >= 1, "experiment.t_final", "must be >= 1");
  require(x.n_runs >= 2, "experiment.n_runs", "must be >= 2");
  require(x.resamples >= 10, "experiment.resamples", "must be >= 10");
  require(x.acceptance_floor > 0.0 && x.acceptance_floor <= 1.0, "experiment.acceptance_floor",
          "must lie in (0, 1]");
  require(x.J >= 1, "experiment.J", "must be >= 1");
  require(x.H >= 1, "experiment.H", "must be >= 1");
  require(x.n_realizations >= 1, "experiment.n_realizations", "must be >= 1");
  require(x.n_walks >= 1, "experiment.n_walks", "must be >= 1");
  require(x.n_instances >= 1, "experiment.n_instances", "must be >= 1");
  require(x.k_min >= 0, "experiment.k_min", "must be >= 0");
  require(x.k_max >= x.k_min && x.k_max <= 8, "experiment.k_max", "must lie in [k_min, 8]");
  require(x.n_samples >= 2, "experiment.n_samples", "must be >= 2");
  require(x.n_pairs >= 1, "experiment.n_pairs", "must be >= 1");
  require(x.n_per_pair >= 2, "experiment.n_per_pair", "must be >= 2");
  require(x.n_reference >= 2, "experiment.n_reference", "must be >= 2");
  require(x.depth >= 1, "experiment.depth", "must be >= 1");
  require(!x.s_list.empty(), "experiment.s_list", "needs at least one value");
  for (auto s : x.s_list) require(s >= 1, "experiment.s_list", "values must be >= 1");
  require(x.control_n >= 2, "experiment.control_n", "must be >= 2");
  require(x.control_repetitions >= 1, "experiment.control_repetitions", "must be >= 1");
}

}  // namespace

ExperimentConfig ExperimentConfig::parse(const std::string& text) {
  std::map<std::string, std::string> values;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    const auto body = trim(std::string_view(line).substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(lineno), "expected 'key = value'");
    }
    const std::string key(trim(body.substr(0, eq)));
    const std::string value(trim(body.substr(eq + 1)));
    if (key.empty()) throw ConfigError("line " + std::to_string(lineno), "empty key");
    if (!values.emplace(key, value).second) throw ConfigError(key, "repeated key");
  }

  bool has_boolean = false, has_renewal = false;
  for (const auto& [k, v] : values) {
    has_boolean |= k.rfind("boolean.", 0) == 0;
    has_renewal |= k.rfind("renewal.", 0) == 0;
  }
  if (has_boolean && has_renewal) {
    throw ConfigError("renewal.*", "both boolean.* and renewal.* keys present; select exactly one environment");
  }
  if (!has_boolean && !has_renewal) {
    throw ConfigError("boolean.*", "no environment section; give boolean.* or renewal.* keys");
  }

  ExperimentConfig c;
  c.family = has_boolean ? Family::kBoolean : Family::kRenewal;
  for (const auto& [k, v] : values) {
    const auto& table = keys();
    const auto it = std::find_if(table.begin(), table.end(), [&](const Key& key) { return k == key.name; });
    if (it == table.end()) throw ConfigError(k, "unknown key");
    try {
      it->set(c, v);
    } catch (const ConfigError&) {
      throw;
    } catch (const UsageError& e) {
      rethrow_as_config(e, it->name);
    }
  }
  validate(c, values.count("kernel.kappa") > 0);
  return c;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("--config", "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::string ExperimentConfig::to_text() const {
  std::ostringstream out;
  const Section skip = family == Family::kBoolean ? Section::kRenewal : Section::kBoolean;
  for (const auto& key : keys()) {
    if (key.section == skip) continue;
    if (key.section == Section::kKernel && std::string(key.name) == "kernel.kappa" && kernel.type != "drift") {
      continue;
    }
    out << key.name << " = " << key.get(*this) << '\n';
  }
  return out.str();
}

std::uint64_t ExperimentConfig::hash() const {
  const std::string text = to_text();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

BooleanConfig ExperimentConfig::boolean_config() const {
  BooleanConfig b;
  b.d = d;
  b.R = R;
  b.lambda = lambda;
  b.radius = RadiusLaw::pareto(rho0, beta);
  b.trunc_s = boolean_trunc_s;
  b.rho_max = rho_max;
  b.cones = cones == "continuous" ? ConeMode::kContinuous : ConeMode::kDiscrete;
  return b;
}

RenewalConfig ExperimentConfig::renewal_config() const {
  RenewalConfig r;
  r.d = d;
  r.R = R;
  r.mu = InterarrivalLaw::parse(mu);
  r.mu.set_moment_order(1.0 + renewal_beta);
  r.trunc_s = renewal_trunc_s;
  r.K0 = K0;
  r.K_max = K_max;
  r.confirmations = confirmations;
  r.horizon = scan_horizon;
  return r;
}

std::unique_ptr<EnvironmentFamily> ExperimentConfig::make_family() const {
  if (family == Family::kBoolean) return std::make_unique<BooleanFamily>(boolean_config());
  return std::make_unique<RenewalFamily>(renewal_config());
}

JumpKernel ExperimentConfig::make_kernel() const {
  if (kernel.type == "drift") return JumpKernel::drift(kernel.kappa, R);
  return JumpKernel::lazy(d, R);
}

}  // namespace rwre
