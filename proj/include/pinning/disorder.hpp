#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace pinning {

/// Charge distributions. All have mean zero and finite exponential moments.
///   zero:       omega == 0 (pure model)
///   gaussian:   N(0, param^2)
///   uniform:    U(-param, param)
///   rademacher: +-param with probability 1/2
enum class DisorderKind { zero, gaussian, uniform, rademacher };

std::string to_string(DisorderKind kind);
DisorderKind disorder_kind_from_string(const std::string& name);

struct DisorderSpec {
  DisorderKind kind = DisorderKind::zero;
  double param = 0.0;
  std::uint64_t seed = 0;

  bool operator==(const DisorderSpec&) const = default;

  double variance() const;
};

/// A realized charge vector omega_{offset+1}, ..., omega_{offset+n}.
/// Indexing is 1-based relative to the (possibly shifted) origin.
class ChargeSequence {
 public:
  ChargeSequence(DisorderSpec spec, std::int64_t offset, std::vector<double> values)
      : spec_(spec), offset_(offset), values_(std::move(values)) {}

  const DisorderSpec& spec() const { return spec_; }
  std::int64_t offset() const { return offset_; }
  std::int64_t length() const { return static_cast<std::int64_t>(values_.size()); }

  double operator[](std::int64_t a) const { return values_[static_cast<std::size_t>(a - 1)]; }
  std::span<const double> values() const { return values_; }

  /// First n charges as a new sequence (same origin).
  ChargeSequence prefix(std::int64_t n) const;

  bool operator==(const ChargeSequence&) const = default;

 private:
  DisorderSpec spec_;
  std::int64_t offset_ = 0;
  std::vector<double> values_;
};

/// omega_a for absolute site a >= 1, a pure function of (spec, a).
double draw_charge(const DisorderSpec& spec, std::uint64_t a);

/// omega_1..omega_n. generate(spec, n) is a prefix of generate(spec, m) for m > n.
ChargeSequence generate(const DisorderSpec& spec, std::int64_t n);

/// The shifted sequence a -> omega_{a+i}; requires 0 <= i < length.
ChargeSequence shift(const ChargeSequence& seq, std::int64_t i);

/// Convenience: n zero charges.
ChargeSequence zero_charges(std::int64_t n);

/// Rejects nonpositive parameters for non-zero kinds.
void validate(const DisorderSpec& spec);

/// Derives the disorder spec for replica k (seed re-keyed, law unchanged).
DisorderSpec replica_spec(const DisorderSpec& base, std::uint64_t replica);

/// Audit export: header "index,value", absolute site index.
void write_csv(std::ostream& os, const ChargeSequence& seq);

}  // namespace pinning
