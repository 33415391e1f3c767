#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace pinning {

// SplitMix64 finalizer; a bijective 64-bit mixer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Counter-based hash: a pure function of (key, counter).
constexpr std::uint64_t counter_hash(std::uint64_t key, std::uint64_t counter) {
  return mix64(mix64(key) ^ mix64(counter * 0xd1342543de82ef95ULL + 0x632be59bd9b4e019ULL));
}

// Maps 64 random bits to a double in the open interval (0, 1).
inline double to_open_unit(std::uint64_t bits) {
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

/// Random stream owned by one sampling job. Seeded from (master seed, job id)
/// so that the stream is independent of how jobs are scheduled.
class JobRng {
 public:
  JobRng(std::uint64_t master_seed, std::uint64_t job_id)
      : engine_(counter_hash(master_seed, job_id)) {}

  double uniform() { return to_open_unit(engine_()); }
  double gumbel() { return -std::log(-std::log(uniform())); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace pinning
