#include "pinning/disorder.hpp"

#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include "pinning/rng.hpp"
#include "pinning/util.hpp"

namespace pinning {

std::string to_string(DisorderKind kind) {
  switch (kind) {
    case DisorderKind::zero: return "zero";
    case DisorderKind::gaussian: return "gaussian";
    case DisorderKind::uniform: return "uniform";
    case DisorderKind::rademacher: return "rademacher";
  }
  return "?";
}

DisorderKind disorder_kind_from_string(const std::string& name) {
  if (name == "zero") return DisorderKind::zero;
  if (name == "gaussian") return DisorderKind::gaussian;
  if (name == "uniform") return DisorderKind::uniform;
  if (name == "rademacher") return DisorderKind::rademacher;
  throw std::invalid_argument("unknown disorder kind '" + name + "'");
}

double DisorderSpec::variance() const {
  switch (kind) {
    case DisorderKind::zero: return 0.0;
    case DisorderKind::gaussian: return param * param;
    case DisorderKind::uniform: return param * param / 3.0;
    case DisorderKind::rademacher: return param * param;
  }
  return 0.0;
}

void validate(const DisorderSpec& spec) {
  if (spec.kind == DisorderKind::zero) return;
  if (!(spec.param > 0.0) || !std::isfinite(spec.param)) {
    throw std::invalid_argument(to_string(spec.kind) + " disorder needs a positive parameter");
  }
}

double draw_charge(const DisorderSpec& spec, std::uint64_t a) {
  switch (spec.kind) {
    case DisorderKind::zero:
      return 0.0;
    case DisorderKind::gaussian: {
      const double u1 = to_open_unit(counter_hash(spec.seed, 2 * a));
      const double u2 = to_open_unit(counter_hash(spec.seed, 2 * a + 1));
      return spec.param * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }
    case DisorderKind::uniform:
      return spec.param * (2.0 * to_open_unit(counter_hash(spec.seed, 2 * a)) - 1.0);
    case DisorderKind::rademacher:
      return (counter_hash(spec.seed, 2 * a) >> 63) ? spec.param : -spec.param;
  }
  return 0.0;
}

ChargeSequence generate(const DisorderSpec& spec, std::int64_t n) {
  validate(spec);
  if (n < 1) throw std::invalid_argument("generate: n must be >= 1");
  std::vector<double> values(static_cast<std::size_t>(n));
  for (std::int64_t a = 1; a <= n; ++a) {
    values[static_cast<std::size_t>(a - 1)] = draw_charge(spec, static_cast<std::uint64_t>(a));
  }
  return ChargeSequence(spec, 0, std::move(values));
}

ChargeSequence ChargeSequence::prefix(std::int64_t n) const {
  if (n < 0 || n > length()) throw std::out_of_range("prefix longer than the sequence");
  return ChargeSequence(spec_, offset_, std::vector<double>(values_.begin(), values_.begin() + n));
}

ChargeSequence shift(const ChargeSequence& seq, std::int64_t i) {
  if (i < 0 || i >= seq.length()) throw std::out_of_range("shift index out of range");
  const auto v = seq.values();
  return ChargeSequence(seq.spec(), seq.offset() + i, std::vector<double>(v.begin() + i, v.end()));
}

ChargeSequence zero_charges(std::int64_t n) { return generate(DisorderSpec{}, n); }

DisorderSpec replica_spec(const DisorderSpec& base, std::uint64_t replica) {
  DisorderSpec s = base;
  if (replica != 0) s.seed = counter_hash(base.seed, ~replica);
  return s;
}

void write_csv(std::ostream& os, const ChargeSequence& seq) {
  os << "index,value\n";
  for (std::int64_t a = 1; a <= seq.length(); ++a) {
    os << (seq.offset() + a) << ',' << format_double(seq[a]) << '\n';
  }
}

}  // namespace pinning
