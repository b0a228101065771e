#pragma once

// Platform-stable hashing and seeded selection. std::hash and the standard
// distributions are implementation-defined, so nothing that feeds a qid or a
// sampling decision may use them.

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace forge {

constexpr std::uint64_t kFnvOffset = 14695981039346656037ull;
constexpr std::uint64_t kFnvPrime = 1099511628211ull;

inline std::uint64_t fnv1a(std::string_view data, std::uint64_t h = kFnvOffset) {
  for (unsigned char c : data) {
    h ^= c;
    h *= kFnvPrime;
  }
  return h;
}

inline std::uint64_t fnv1a_u64(std::uint64_t value, std::uint64_t h = kFnvOffset) {
  for (int i = 0; i < 8; ++i) {
    h ^= (value >> (8 * i)) & 0xffu;
    h *= kFnvPrime;
  }
  return h;
}

// Hash of a sequence of fields; a separator byte keeps ("ab","c") apart from
// ("a","bc").
inline std::uint64_t hash_fields(std::initializer_list<std::string_view> fields,
                                 std::uint64_t h = kFnvOffset) {
  for (auto f : fields) {
    h = fnv1a(f, h);
    h ^= 0x1f;
    h *= kFnvPrime;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = digits[v & 0xf];
    v >>= 4;
  }
  return out;
}

// mt19937_64 and seed_seq are fully specified by the standard, so the raw
// stream is identical everywhere.
inline std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t salt) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(salt), static_cast<std::uint32_t>(salt >> 32)};
  return std::mt19937_64(seq);
}

// Uniform double in [0,1) derived from a hash value.
inline double unit_interval(std::uint64_t h) {
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

// Fisher-Yates over the raw engine output.
template <typename T>
void stable_shuffle(std::vector<T>& items, std::mt19937_64& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(items[i - 1], items[j]);
  }
}

}  // namespace forge
