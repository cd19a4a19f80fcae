#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace dht {

/// Philox4x32-10 counter-based generator.
///
/// Streams are keyed by (seed, stream); the output sequence depends only on
/// the key and the block counter, so draws indexed by (seed, draw index) are
/// bit-reproducible under any parallel schedule.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream)
      : key_{static_cast<std::uint32_t>(seed),
             static_cast<std::uint32_t>(seed >> 32)},
        stream_(stream) {}

  std::uint64_t next_u64() {
    if (have_ == 0) refill();
    std::uint64_t hi = buf_[--have_];
    std::uint64_t lo = buf_[--have_];
    return (hi << 32) | lo;
  }

  // Uniform on [0, bound) by rejection; bound >= 1.
  std::uint64_t uniform_below(std::uint64_t bound) {
    if (bound <= 1) return 0;
    std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t v;
    do {
      v = next_u64();
    } while (v >= limit);
    return v % bound;
  }

  double uniform01() {  // in [0,1)
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(uniform_below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  static void round(std::array<std::uint32_t, 4>& ctr,
                    std::array<std::uint32_t, 2>& key) {
    constexpr std::uint64_t kMul0 = 0xD2511F53ull, kMul1 = 0xCD9E8D57ull;
    std::uint64_t p0 = kMul0 * ctr[0];
    std::uint64_t p1 = kMul1 * ctr[2];
    std::array<std::uint32_t, 4> next = {
        static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0],
        static_cast<std::uint32_t>(p1),
        static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1],
        static_cast<std::uint32_t>(p0)};
    ctr = next;
    key[0] += 0x9E3779B9u;
    key[1] += 0xBB67AE85u;
  }

  void refill() {
    std::array<std::uint32_t, 4> ctr = {
        static_cast<std::uint32_t>(counter_),
        static_cast<std::uint32_t>(counter_ >> 32),
        static_cast<std::uint32_t>(stream_),
        static_cast<std::uint32_t>(stream_ >> 32)};
    std::array<std::uint32_t, 2> key = key_;
    for (int r = 0; r < 10; ++r) round(ctr, key);
    for (int i = 0; i < 4; ++i) buf_[i] = ctr[i];
    have_ = 4;
    ++counter_;
  }

  std::array<std::uint32_t, 2> key_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
  std::array<std::uint32_t, 4> buf_{};
  int have_ = 0;
};

}  // namespace dht
