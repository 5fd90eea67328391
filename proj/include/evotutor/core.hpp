#pragma once

#include <cctype>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace evotutor {

// Session time is an abstract integer tick supplied by the caller, never wall time.
using Tick = std::int64_t;

enum class Errc {
  ordering,    // non-monotonic turn indices
  config,      // invalid configuration, dimension mismatch
  input,       // bad argument (empty text, empty batch, window misuse)
  lookup,      // unknown or tombstoned id
  time_order,  // clock moved backwards
  provider,    // remote/mock provider failure
  parse,       // structured reply could not be parsed
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::ordering: return "ordering";
    case Errc::config: return "config";
    case Errc::input: return "input";
    case Errc::lookup: return "lookup";
    case Errc::time_order: return "time_order";
    case Errc::provider: return "provider";
    case Errc::parse: return "parse";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

inline double clamp01(double x) { return x < 0.0 ? 0.0 : (x > 1.0 ? 1.0 : x); }

// --- deterministic RNG helpers -------------------------------------------
//
// All stochastic behaviour in the engine flows through an explicitly seeded
// std::mt19937_64. The draws below avoid std::*_distribution so that the
// produced streams are identical across standard libraries.

using Rng = std::mt19937_64;

inline double uniform01(Rng& rng) {
  // 53 random mantissa bits -> [0, 1)
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double gaussian(Rng& rng) {
  // Box-Muller; discards the second variate.
  double u1 = uniform01(rng);
  double u2 = uniform01(rng);
  if (u1 <= 0.0) u1 = 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

inline std::size_t pick_index(Rng& rng, std::size_t n) {
  return static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n)) % n;
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  // splitmix64 step; derives independent per-session streams from one seed.
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// --- text helpers ----------------------------------------------------------

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::string to_lower(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (unsigned char c : s) out.push_back(static_cast<char>(std::tolower(c)));
  return out;
}

// Lowercased alphanumeric runs; everything else separates tokens.
inline std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string cur;
  for (unsigned char c : text) {
    if (std::isalnum(c)) {
      cur.push_back(static_cast<char>(std::tolower(c)));
    } else if (!cur.empty()) {
      tokens.push_back(cur);
      cur.clear();
    }
  }
  if (!cur.empty()) tokens.push_back(cur);
  return tokens;
}

inline std::string first_sentence(std::string_view text) {
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (c == '.' || c == '!' || c == '?') {
      return std::string(text.substr(0, i + 1));
    }
  }
  return std::string(text);
}

inline bool contains(std::string_view haystack, std::string_view needle) {
  return haystack.find(needle) != std::string_view::npos;
}

}  // namespace evotutor
