#pragma once

// Flat key = value experiment configuration.
//
//   # comment
//   boolean.lambda = 0.3
//   kernel.kappa = 0.1
//
// Exactly one environment section (boolean.* or renewal.*) must appear.
// Unknown keys, repeated keys and out-of-range values are errors naming
// the key. to_text() writes every key in canonical form, so
// parse(to_text(c)) == c.

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "rwre/boolean_env.hpp"
#include "rwre/errors.hpp"
#include "rwre/renewal_env.hpp"
#include "rwre/walk.hpp"

namespace rwre {

class ConfigError : public UsageError {
 public:
  ConfigError(std::string key, const std::string& message)
      : UsageError(key + ": " + message), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

enum class Family { kBoolean, kRenewal };

struct KernelConfig {
  std::string type = "drift";  // drift | lazy
  double kappa = 0.1;          // drift only

  friend bool operator==(const KernelConfig&, const KernelConfig&) = default;
};

struct ExperimentParams {
  // blocks / simulate
  std::int64_t n_blocks = 20000;
  std::int64_t horizon = 100000;
  std::int64_t t_final = 100000;
  std::int64_t n_runs = 50;
  int resamples = 2000;
  double acceptance_floor = 1e-4;
  // renorm / mj / qk / akh
  int J = 4;
  int H = 4;
  std::int64_t n_realizations = 100;
  std::int64_t n_walks = 1000;
  std::int64_t n_instances = 1000;
  int k_min = 1;
  int k_max = 4;
  std::int64_t n_samples = 20000;
  // decouple / rmp-test
  int n_pairs = 100;
  std::int64_t n_per_pair = 1000;
  std::int64_t n_reference = 4000;
  int depth = 8;
  std::vector<std::int64_t> s_list{8, 16, 32, 64};
  std::int64_t control_n = 10000;
  int control_repetitions = 20;

  friend bool operator==(const ExperimentParams&, const ExperimentParams&) = default;
};

struct ExperimentConfig {
  Family family = Family::kBoolean;
  int d = 1;
  int R = 1;
  // boolean.*
  double lambda = 0.3;
  double beta = 4.0;
  double rho0 = 0.5;
  double rho_max = 0.0;
  std::string cones = "discrete";
  int boolean_trunc_s = 64;
  // renewal.*
  std::string mu = "geometric 0.5";
  double renewal_beta = 4.0;
  int renewal_trunc_s = 32;
  std::int64_t K0 = 16;
  std::int64_t K_max = std::int64_t{1} << 22;
  int confirmations = 2;
  std::int64_t scan_horizon = 100000;

  KernelConfig kernel;
  ExperimentParams experiment;
  std::uint64_t seed = 1;

  static ExperimentConfig parse(const std::string& text);
  static ExperimentConfig load(const std::string& path);
  std::string to_text() const;
  // FNV-1a of to_text().
  std::uint64_t hash() const;

  BooleanConfig boolean_config() const;
  RenewalConfig renewal_config() const;
  std::unique_ptr<EnvironmentFamily> make_family() const;
  JumpKernel make_kernel() const;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

const char* family_name(Family f);

}  // namespace rwre
