#pragma once
#include <cstdint>

#include "polygrp/ring.hpp"

namespace polygrp {

// splitmix64. Seeds determine runs byte for byte; no platform-dependent
// distribution code anywhere.
struct Rng {
  uint64_t state;
  explicit Rng(uint64_t seed) : state(seed) {}

  uint64_t next() {
    state += 0x9e3779b97f4a7c15ull;
    uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
  uint32_t below(uint32_t n) { return static_cast<uint32_t>(next() % n); }
  int range(int lo, int hi) {  // inclusive
    return lo + static_cast<int>(below(static_cast<uint32_t>(hi - lo + 1)));
  }
  bool flip() { return (next() & 1) != 0; }
};

inline Fq random_fq(const FieldSpec* fs, Rng& rng) {
  return Fq(fs, rng.below(fs->q));
}

inline Fq random_unit(const FieldSpec* fs, Rng& rng) {
  return Fq(fs, 1 + rng.below(fs->q - 1));
}

inline RingElem random_ring_elem(const RingCtx& ctx, Rng& rng, int max_span) {
  int low = (ctx.flavor == Flavor::Laurent) ? rng.range(-max_span, 0) : 0;
  std::vector<uint32_t> coeffs(static_cast<size_t>(max_span + 1));
  for (auto& c : coeffs) c = rng.below(ctx.spec()->q);
  return RingElem::from_coeffs(ctx, low, std::move(coeffs));
}

inline RingElem random_nonzero_ring_elem(const RingCtx& ctx, Rng& rng, int max_span) {
  for (;;) {
    RingElem f = random_ring_elem(ctx, rng, max_span);
    if (!f.is_zero()) return f;
  }
}

}  // namespace polygrp
