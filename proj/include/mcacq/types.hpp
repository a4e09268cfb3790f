// Shared aliases, error types, and the deterministic RNG used across the
// library. All randomness flows through Rng64 so results are reproducible
// bit-for-bit from a single seed on any platform.

#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace mcacq {

using cplx = std::complex<double>;
using cvec = std::vector<cplx>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

// Configuration file or argument problems (CLI exit code 1).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed or inconsistent input data (CLI exit code 2).
struct DataError : std::runtime_error {
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// A requested search exceeds the enumeration cap (CLI exit code 3).
struct CapacityError : std::runtime_error {
    explicit CapacityError(const std::string& msg) : std::runtime_error(msg) {}
};

// A coset pattern whose acquisition surface cannot be scored (zero peak or
// zero retained energy at some delay).
struct DegeneratePatternError : std::runtime_error {
    explicit DegeneratePatternError(const std::string& msg) : std::runtime_error(msg) {}
};

inline uint64_t splitmix64(uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Deterministic sub-seed for a numbered stream (noise, parameter draws,
// per-trial splits). Chaining derive_seed calls never collides streams.
inline uint64_t derive_seed(uint64_t base, uint64_t stream) {
    return splitmix64(base ^ splitmix64(stream));
}

// mt19937_64 is fully specified by the standard; the distributions below are
// hand-rolled because std:: distributions are implementation-defined.
class Rng64 {
  public:
    explicit Rng64(uint64_t seed) : eng_(seed) {}

    uint64_t next_u64() { return eng_(); }

    // Uniform on [0, 1).
    double next_double() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    // Uniform on (0, 1]; safe as a log() argument.
    double next_double_open() { return static_cast<double>((eng_() >> 11) + 1) * 0x1.0p-53; }

    // Uniform integer on [0, bound] via rejection.
    uint64_t next_below(uint64_t bound_inclusive) {
        const uint64_t range = bound_inclusive + 1;
        if (range == 0) return eng_();  // full 64-bit range
        const uint64_t limit = UINT64_MAX - UINT64_MAX % range;
        uint64_t v;
        do {
            v = eng_();
        } while (v >= limit);
        return v % range;
    }

    double next_uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    // Standard normal pair via Box-Muller.
    void next_gaussian_pair(double& z0, double& z1) {
        const double u1 = next_double_open();
        const double u2 = next_double();
        const double r = std::sqrt(-2.0 * std::log(u1));
        z0 = r * std::cos(kTwoPi * u2);
        z1 = r * std::sin(kTwoPi * u2);
    }

  private:
    std::mt19937_64 eng_;
};

// Compensated accumulator; keeps aggregation independent of summation jitter
// when campaigns are re-run or re-chunked.
class KahanSum {
  public:
    void add(double x) {
        const double y = x - c_;
        const double t = s_ + y;
        c_ = (t - s_) - y;
        s_ = t;
    }
    double value() const { return s_; }

  private:
    double s_ = 0.0;
    double c_ = 0.0;
};

}  // namespace mcacq
