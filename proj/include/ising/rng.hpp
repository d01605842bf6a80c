#pragma once
// Philox4x32-10 counter-based generator. Chosen so that every (seed, stream)
// pair gives an independent, platform-stable sequence that can be recreated
// from the two integers alone; stream ids map replicas to disjoint
// subsequences without any state handoff.

#include <cstdint>
#include <cmath>

namespace ising {

class Philox {
 public:
  using result_type = std::uint64_t;

  explicit Philox(std::uint64_t seed = 0, std::uint64_t stream = 0) {
    key0_ = static_cast<std::uint32_t>(seed);
    key1_ = static_cast<std::uint32_t>(seed >> 32);
    ctr2_ = static_cast<std::uint32_t>(stream);
    ctr3_ = static_cast<std::uint32_t>(stream >> 32);
    ctr0_ = ctr1_ = 0;
    have_ = false;
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~static_cast<result_type>(0); }

  result_type operator()() {
    if (have_) {
      have_ = false;
      return spare_;
    }
    std::uint32_t x0 = ctr0_, x1 = ctr1_, x2 = ctr2_, x3 = ctr3_;
    std::uint32_t k0 = key0_, k1 = key1_;
    for (int round = 0; round < 10; ++round) {
      std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * x0;
      std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * x2;
      std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
      std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
      std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
      std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
      x0 = hi1 ^ x1 ^ k0;
      x1 = lo1;
      x2 = hi0 ^ x3 ^ k1;
      x3 = lo0;
      k0 += kWeyl0;
      k1 += kWeyl1;
    }
    if (++ctr0_ == 0) ++ctr1_;  // 64-bit block counter; stream words untouched
    spare_ = (static_cast<std::uint64_t>(x2) << 32) | x3;
    have_ = true;
    return (static_cast<std::uint64_t>(x0) << 32) | x1;
  }

  // uniform on [0, 1), 53-bit resolution
  double uniform01() {
    return static_cast<double>(operator()() >> 11) * 0x1p-53;
  }
  // uniform on [a, b)
  double uniform(double a, double b) { return a + (b - a) * uniform01(); }
  // exponential with the given rate, strictly positive
  double exponential(double rate) {
    double u;
    do {
      u = uniform01();
    } while (u == 0.0);
    return -std::log(u) / rate;
  }

 private:
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

  std::uint32_t key0_, key1_;
  std::uint32_t ctr0_, ctr1_, ctr2_, ctr3_;
  std::uint64_t spare_ = 0;
  bool have_ = false;
};

}  // namespace ising
