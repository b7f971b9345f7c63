#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace sambandit {

class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class NumericError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class EmptyHistoryError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Thrown by solver::solve when the objective leaves the finite range,
/// which means the step size 1/L was too optimistic. Carries the L that
/// failed so the caller can retry with a larger one.
class DivergenceError : public std::runtime_error {
public:
  DivergenceError(const std::string& what, double lipschitz)
      : std::runtime_error(what), lipschitz_(lipschitz) {}
  double lipschitz() const { return lipschitz_; }

private:
  double lipschitz_;
};

/// splitmix64 finalizer; used to derive independent stream seeds.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t seed_stream(std::uint64_t seed, std::uint64_t trial,
                                 std::uint64_t stream) {
  return mix64(mix64(mix64(seed) ^ trial) ^ (stream * 0x9e3779b97f4a7c15ULL));
}

/// One owned generator per trial and stream. All randomness in a run flows
/// through instances of this class, so replaying a seed replays every draw.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double normal() { return normal_(gen_); }
  double uniform() { return uniform_(gen_); }
  /// Uniform integer in [0, n).
  std::int64_t below(std::int64_t n) {
    return static_cast<std::int64_t>(gen_() % static_cast<std::uint64_t>(n));
  }

  std::mt19937_64& engine() { return gen_; }

private:
  std::mt19937_64 gen_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace sambandit
