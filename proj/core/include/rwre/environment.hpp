#pragma once

// Common interface for one realization of a dynamic random environment
// (omega, eta) and for the family that produces fresh realizations.

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "rwre/lattice.hpp"

namespace rwre {

// Dense field of small values over a box, indexed like BoxSpec::for_each.
struct BoxField {
  BoxSpec box;
  std::vector<std::uint8_t> values;

  explicit BoxField(BoxSpec b);
  std::size_t index(const LatticePoint& z) const;
  std::uint8_t at(const LatticePoint& z) const { return values[index(z)]; }
  std::uint8_t& at(const LatticePoint& z) { return values[index(z)]; }
};

// One realization: answers omega_z (the state driving the walk) and the
// regeneration indicator eta_z. Implementations may memoize internally but
// must behave as pure functions of z.
class EnvironmentView {
 public:
  virtual ~EnvironmentView() = default;

  virtual int dim() const = 0;
  virtual int range() const = 0;
  virtual std::int64_t omega(const LatticePoint& z) const = 0;
  virtual bool eta(const LatticePoint& z) const = 0;

  // eta over a whole box; the default evaluates point by point.
  virtual BoxField eta_field(const BoxSpec& box) const;
};

// A law on environments. realize(seed) is deterministic in seed; distinct
// seeds give independent realizations.
class EnvironmentFamily {
 public:
  virtual ~EnvironmentFamily() = default;

  virtual std::string name() const = 0;
  virtual int dim() const = 0;
  virtual int range() const = 0;
  virtual std::unique_ptr<EnvironmentView> realize(std::uint64_t seed) const = 0;

  // Shape of the analytic decoupling function eps(r, h, s) with unit
  // constant; multiplied by a fitted c in decoupling checks.
  virtual double decoupling_shape(double r, double h, double s) const = 0;
};

// eta == eta_value everywhere, omega == omega_value everywhere.
class ConstantEnvironment final : public EnvironmentView {
 public:
  ConstantEnvironment(int d, int R, std::int64_t omega_value, bool eta_value);
  int dim() const override { return d_; }
  int range() const override { return R_; }
  std::int64_t omega(const LatticePoint&) const override { return omega_; }
  bool eta(const LatticePoint&) const override { return eta_; }

 private:
  int d_;
  int R_;
  std::int64_t omega_;
  bool eta_;
};

class ConstantFamily final : public EnvironmentFamily {
 public:
  ConstantFamily(int d, int R, std::int64_t omega_value, bool eta_value);
  std::string name() const override { return "constant"; }
  int dim() const override { return d_; }
  int range() const override { return R_; }
  std::unique_ptr<EnvironmentView> realize(std::uint64_t seed) const override;
  double decoupling_shape(double, double, double) const override { return 0.0; }

 private:
  int d_;
  int R_;
  std::int64_t omega_;
  bool eta_;
};

// Independence control: eta i.i.d. Bernoulli(p) per site; omega is 0 where
// eta = 1 and an independent fair coin elsewhere.
class CoinFieldEnvironment final : public EnvironmentView {
 public:
  CoinFieldEnvironment(int d, int R, double p, std::uint64_t seed);
  int dim() const override { return d_; }
  int range() const override { return R_; }
  std::int64_t omega(const LatticePoint& z) const override;
  bool eta(const LatticePoint& z) const override;

 private:
  int d_;
  int R_;
  double p_;
  std::uint64_t seed_;
};

class CoinFieldFamily final : public EnvironmentFamily {
 public:
  CoinFieldFamily(int d, int R, double p);
  std::string name() const override { return "coin-field"; }
  int dim() const override { return d_; }
  int range() const override { return R_; }
  std::unique_ptr<EnvironmentView> realize(std::uint64_t seed) const override;
  double decoupling_shape(double, double, double) const override { return 0.0; }

 private:
  int d_;
  int R_;
  double p_;
};

}  // namespace rwre
