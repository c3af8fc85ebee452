#pragma once

// Bit-by-bit reference model of the instruction semantics, written
// independently of isa.cpp (ripple-carry arithmetic, explicit bit loops).

#include <cstdint>

#include "sbst/isa.hpp"

namespace ref {

inline int bit(std::uint32_t v, int k) { return static_cast<int>((v >> k) & 1u); }

inline std::uint32_t ripple_add(std::uint32_t a, std::uint32_t b, int carry, int width) {
  std::uint32_t out = 0;
  for (int k = 0; k < width; ++k) {
    const int s = bit(a, k) + bit(b, k) + carry;
    out |= static_cast<std::uint32_t>(s & 1) << k;
    carry = s >> 1;
  }
  return out;
}

inline std::uint32_t invert(std::uint32_t a, int width) {
  std::uint32_t out = 0;
  for (int k = 0; k < width; ++k) out |= static_cast<std::uint32_t>(1 - bit(a, k)) << k;
  return out;
}

inline std::int64_t as_signed(std::uint32_t a, int width) {
  std::int64_t v = 0;
  for (int k = 0; k < width - 1; ++k) v += static_cast<std::int64_t>(bit(a, k)) << k;
  if (bit(a, width - 1)) v -= std::int64_t{1} << (width - 1);
  return v;
}

inline std::uint32_t eval(sbst::Semantics s, std::uint32_t a, std::uint32_t b, int width) {
  using sbst::Semantics;
  auto per_bit = [&](auto f) {
    std::uint32_t out = 0;
    for (int k = 0; k < width; ++k) out |= static_cast<std::uint32_t>(f(bit(a, k), bit(b, k))) << k;
    return out;
  };
  const int shift = static_cast<int>(b % static_cast<std::uint32_t>(width));
  switch (s) {
    case Semantics::kAdd: return ripple_add(a, b, 0, width);
    case Semantics::kSub: return ripple_add(a, invert(b, width), 1, width);
    case Semantics::kAnd: return per_bit([](int x, int y) { return x & y; });
    case Semantics::kOr: return per_bit([](int x, int y) { return x | y; });
    case Semantics::kXor: return per_bit([](int x, int y) { return x ^ y; });
    case Semantics::kNor: return per_bit([](int x, int y) { return 1 - (x | y); });
    case Semantics::kCmp: return per_bit([](int x, int y) { return x == y ? 1 : 0; });
    case Semantics::kMov: return a;
    case Semantics::kSlt: return as_signed(a, width) < as_signed(b, width) ? 1u : 0u;
    case Semantics::kSltu: return a < b ? 1u : 0u;
    case Semantics::kLui: {
      std::uint32_t out = 0;
      for (int k = width / 2; k < width; ++k) out |= static_cast<std::uint32_t>(bit(a, k - width / 2)) << k;
      return out;
    }
    case Semantics::kSll: {
      std::uint32_t out = 0;
      for (int k = shift; k < width; ++k) out |= static_cast<std::uint32_t>(bit(a, k - shift)) << k;
      return out;
    }
    case Semantics::kSrl: {
      std::uint32_t out = 0;
      for (int k = 0; k + shift < width; ++k) out |= static_cast<std::uint32_t>(bit(a, k + shift)) << k;
      return out;
    }
    case Semantics::kSra: {
      std::uint32_t out = 0;
      for (int k = 0; k < width; ++k) {
        const int src = k + shift < width ? k + shift : width - 1;
        out |= static_cast<std::uint32_t>(bit(a, src)) << k;
      }
      return out;
    }
  }
  return 0;
}

}  // namespace ref
