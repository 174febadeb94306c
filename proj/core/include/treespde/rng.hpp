#pragma once

#include <cmath>
#include <cstdint>

namespace treespde {

// SplitMix64, reimplemented from the public-domain reference. Used for
// seeding, stream derivation, and small reproducible shuffles.
class SplitMix64 {
public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

private:
  std::uint64_t state_;
};

// xoshiro256++, reimplemented from the public-domain reference. A fixed
// algorithm (rather than std::mt19937 + distributions, whose outputs are not
// pinned by the standard) keeps trajectories bit-identical everywhere.
class Xoshiro256pp {
public:
  explicit Xoshiro256pp(std::uint64_t seed) {
    SplitMix64 sm(seed);
    for (auto& s : s_) s = sm.next();
  }
  std::uint64_t next() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }
  // Uniform in the open interval (0,1); safe as a log() argument.
  double uniform() { return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53; }

private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  std::uint64_t s_[4];
};

// Stream id for trajectory `index` under a master seed. Each trajectory owns
// an independent generator seeded by this hash, so results do not depend on
// scheduling order.
inline std::uint64_t derive_stream(std::uint64_t master_seed, std::uint64_t index) {
  SplitMix64 sm(master_seed ^ (0xD1B54A32D192ED03ULL * (index + 1)));
  return sm.next();
}

// Standard normal variates via the Marsaglia polar method on xoshiro256++.
class NormalSampler {
public:
  explicit NormalSampler(std::uint64_t seed) : rng_(seed) {}
  double next() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * rng_.uniform() - 1.0;
      v = 2.0 * rng_.uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double r = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * r;
    has_spare_ = true;
    return u * r;
  }
  double uniform() { return rng_.uniform(); }

private:
  Xoshiro256pp rng_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace treespde
