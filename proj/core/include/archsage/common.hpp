#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace archsage {

enum class ErrorCode {
  ShapeMismatch,
  LengthMismatch,
  InvalidSpec,
  InvalidArgument,
  SamplingExhausted,
  IoError,
  ParseError,
  SchemaError,
  EmptyLabeledBatch,
  EmptyLabeledSet,
  DegenerateInput,
  NonDeterministicLoss,
  NonFinite,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {}

  ErrorCode code() const { return code_; }

private:
  ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

// 64-bit mixing used for seed derivation and value hashing.
inline uint64_t splitmix64(uint64_t& state) {
  uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Decorrelated sub-seed for a named purpose within one run.
inline uint64_t derive_seed(uint64_t base, uint64_t stream_id) {
  uint64_t s = base ^ (0xA0761D6478BD642FULL * (stream_id + 1));
  return splitmix64(s);
}

inline uint64_t fnv1a64(const void* data, size_t len, uint64_t h = 0xCBF29CE484222325ULL) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001B3ULL;
  }
  return h;
}

inline uint64_t fnv1a64(const std::string& s, uint64_t h = 0xCBF29CE484222325ULL) {
  return fnv1a64(s.data(), s.size(), h);
}

// Deterministic random stream. All randomness in the library flows through
// this wrapper so results do not depend on standard-library distribution
// internals; every draw is a pure function of the seed and draw order.
class RngStream {
public:
  explicit RngStream(uint64_t seed) : gen_(seed) {}

  uint64_t next_u64() { return gen_(); }

  // Uniform double in [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform index in [0, n). n must be > 0.
  size_t uniform_index(size_t n) { return static_cast<size_t>(next_u64() % n); }

  bool bernoulli(double p) { return uniform() < p; }

  // Standard normal via Box-Muller; consumes exactly two draws.
  double gaussian() {
    double u1 = 1.0 - uniform();  // (0, 1]
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      size_t j = uniform_index(i);
      std::swap(v[i - 1], v[j]);
    }
  }

private:
  std::mt19937_64 gen_;
};

}  // namespace archsage
