#pragma once

#include <cstdint>

namespace grpcomb {

// Counter-based generator: the value at (key, counter) never depends on how
// many other draws happened elsewhere, so parallel schedules cannot change
// results.
inline uint64_t mix64(uint64_t z)
{
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline uint64_t derive_key(uint64_t key, uint64_t label)
{
  return mix64(key ^ mix64(label + 0x632be59bd9b4e019ull));
}

class Stream {
public:
  using result_type = uint64_t;

  explicit Stream(uint64_t key) : key_(key) {}
  Stream(uint64_t seed, uint64_t a, uint64_t b = 0)
    : key_(derive_key(derive_key(seed, a), b)) {}

  uint64_t operator()() { return mix64(key_ + 0x9e3779b97f4a7c15ull * ++ctr_); }
  static constexpr uint64_t min() { return 0; }
  static constexpr uint64_t max() { return ~0ull; }

  // unbiased value in [0, bound)
  uint64_t below(uint64_t bound)
  {
    if (bound <= 1)
      return 0;
    uint64_t lim = max() - max() % bound;
    for (;;) {
      uint64_t v = (*this)();
      if (v < lim)
        return v % bound;
    }
  }

  bool coin() { return ((*this)() >> 63) != 0; }

  Stream split(uint64_t label) const { return Stream(derive_key(key_, label)); }

private:
  uint64_t key_;
  uint64_t ctr_ = 0;
};

} // namespace grpcomb
