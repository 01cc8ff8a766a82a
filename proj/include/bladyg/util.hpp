#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace bladyg {

// Error codes shared across the library. Every rejected operation names one.
enum class ErrorCode {
  SelfLoop,
  DuplicateEdge,
  MissingEdge,
  MissingVertex,
  ModeViolation,
  UnknownEndpoint,
  HookFailure,
  ParseError,
  InsufficientCandidates,
  InvalidArgument,
};

inline const char* to_string(ErrorCode c) {
  switch (c) {
    case ErrorCode::SelfLoop: return "SelfLoop";
    case ErrorCode::DuplicateEdge: return "DuplicateEdge";
    case ErrorCode::MissingEdge: return "MissingEdge";
    case ErrorCode::MissingVertex: return "MissingVertex";
    case ErrorCode::ModeViolation: return "ModeViolation";
    case ErrorCode::UnknownEndpoint: return "UnknownEndpoint";
    case ErrorCode::HookFailure: return "HookFailure";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::InsufficientCandidates: return "InsufficientCandidates";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Fixed 64-bit mix (splitmix64 finalizer). Used wherever the library needs a
// documented, seed-stable hash: edge hashing, hash partitioning, RNG seeding.
inline constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline constexpr std::uint64_t mix64_pair(std::uint64_t a, std::uint64_t b) noexcept {
  return mix64(mix64(a) ^ (b + 0x9e3779b97f4a7c15ULL));
}

using Rng = std::mt19937_64;

// Unbiased-enough index draw that does not depend on the (implementation
// defined) std::uniform_int_distribution, so streams are stable per seed.
inline std::uint64_t draw_index(Rng& rng, std::uint64_t n) {
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "draw from empty range");
  return rng() % n;
}

inline double draw_unit(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace bladyg
