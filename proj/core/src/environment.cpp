#include "rwre/environment.hpp"

#include <span>

#include "rwre/errors.hpp"
#include "rwre/rng.hpp"

namespace rwre {

BoxField::BoxField(BoxSpec b) : box(std::move(b)) {
  values.assign(static_cast<std::size_t>(box.volume()), 0);
}

std::size_t BoxField::index(const LatticePoint& z) const {
  std::size_t idx = 0;
  const int d = box.spatial_dim();
  for (int i = 0; i <= d; ++i) {
    const auto& iv = box.axis(i);
    const Coord c = i == d ? z.t : z.x[static_cast<std::size_t>(i)];
    if (c < iv.lo || c > iv.hi) throw UsageError("BoxField: point outside box");
    idx = idx * static_cast<std::size_t>(iv.length() + 1) + static_cast<std::size_t>(c - iv.lo);
  }
  return idx;
}

BoxField EnvironmentView::eta_field(const BoxSpec& box) const {
  BoxField field(box);
  std::size_t k = 0;
  box.for_each([&](const LatticePoint& z) { field.values[k++] = eta(z) ? 1 : 0; });
  return field;
}

ConstantEnvironment::ConstantEnvironment(int d, int R, std::int64_t omega_value, bool eta_value)
    : d_(Lattice(d).dim()), R_(R), omega_(omega_value), eta_(eta_value) {}

ConstantFamily::ConstantFamily(int d, int R, std::int64_t omega_value, bool eta_value)
    : d_(Lattice(d).dim()), R_(R), omega_(omega_value), eta_(eta_value) {}

std::unique_ptr<EnvironmentView> ConstantFamily::realize(std::uint64_t) const {
  return std::make_unique<ConstantEnvironment>(d_, R_, omega_, eta_);
}

namespace {

std::uint64_t point_key(std::uint64_t tag, const LatticePoint& z) {
  const std::int64_t words[] = {z.x[0], z.x[1], z.x[2], z.t};
  return hash_words(tag, std::span<const std::int64_t>(words));
}

}  // namespace

CoinFieldEnvironment::CoinFieldEnvironment(int d, int R, double p, std::uint64_t seed)
    : d_(Lattice(d).dim()), R_(R), p_(p), seed_(seed) {
  if (!(p > 0.0 && p < 1.0)) throw UsageError("coin field probability must lie in (0, 1)");
}

bool CoinFieldEnvironment::eta(const LatticePoint& z) const {
  CounterRng rng(seed_, point_key(label("coin.eta"), z));
  return rng.uniform() < p_;
}

std::int64_t CoinFieldEnvironment::omega(const LatticePoint& z) const {
  if (eta(z)) return 0;
  CounterRng rng(seed_, point_key(label("coin.omega"), z));
  return rng.uniform() < 0.5 ? 1 : 0;
}

CoinFieldFamily::CoinFieldFamily(int d, int R, double p) : d_(Lattice(d).dim()), R_(R), p_(p) {}

std::unique_ptr<EnvironmentView> CoinFieldFamily::realize(std::uint64_t seed) const {
  return std::make_unique<CoinFieldEnvironment>(d_, R_, p_, seed);
}

}  // namespace rwre
