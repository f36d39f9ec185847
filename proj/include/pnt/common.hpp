#pragma once

// Shared vocabulary: node identifiers, the simulation clock, geometry,
// error types and the deterministic random helpers every module uses.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>

namespace pnt {

enum class NodeId : std::uint32_t {};

constexpr std::uint32_t raw(NodeId n) noexcept { return static_cast<std::uint32_t>(n); }
constexpr NodeId node_id(std::uint32_t v) noexcept { return static_cast<NodeId>(v); }

inline std::string to_string(NodeId n) { return std::to_string(raw(n)); }

// Simulation time is kept in integer microseconds so that event ordering and
// transfer completion times are exact.
using Time = std::chrono::microseconds;

inline constexpr Time kNever = Time::max();

inline Time from_seconds(double s) {
    return Time{static_cast<Time::rep>(std::llround(s * 1e6))};
}

inline double to_seconds(Time t) noexcept {
    return static_cast<double>(t.count()) / 1e6;
}

// Time needed to move `bytes` at `rate` bytes per second, rounded up to the
// next microsecond.
inline Time transfer_duration(std::uint64_t bytes, std::uint64_t rate) {
    const std::uint64_t num = bytes * 1'000'000ULL;
    return Time{static_cast<Time::rep>((num + rate - 1) / rate)};
}

// Bytes moved after `elapsed` at `rate`, capped at `total`.
inline std::uint64_t bytes_after(std::uint64_t rate, Time elapsed, std::uint64_t total) {
    if (elapsed.count() <= 0) return 0;
    const auto moved = rate * static_cast<std::uint64_t>(elapsed.count()) / 1'000'000ULL;
    return moved < total ? moved : total;
}

struct Point {
    double x = 0.0;
    double y = 0.0;
    bool operator==(const Point&) const = default;
};

inline double distance(Point a, Point b) noexcept { return std::hypot(a.x - b.x, a.y - b.y); }

struct Rect {
    double xmin = 0.0;
    double ymin = 0.0;
    double xmax = 0.0;
    double ymax = 0.0;

    double width() const noexcept { return xmax - xmin; }
    double height() const noexcept { return ymax - ymin; }
    bool contains(Point p) const noexcept {
        return p.x >= xmin && p.x <= xmax && p.y >= ymin && p.y <= ymax;
    }
    bool operator==(const Rect&) const = default;
};

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid user configuration; the CLI maps it to exit code 2.
class ConfigError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class IoError : public Error {
public:
    using Error::Error;
};

// --- deterministic randomness -------------------------------------------
//
// All randomness goes through SplitMix64 so that traces and runs are
// reproducible bit-for-bit across standard libraries.

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Seed for replication `index` of a run family with base seed `base`.
// Stable contract: derive_seed(b, r) = splitmix64(b ^ splitmix64(r + 1)).
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) noexcept {
    return splitmix64(base ^ splitmix64(index + 1));
}

class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed) noexcept : state_(seed) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept {
        state_ += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1).
    double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) noexcept {
        // Lemire's multiply-shift with rejection.
        std::uint64_t x = (*this)();
        __uint128_t m = static_cast<__uint128_t>(x) * n;
        auto low = static_cast<std::uint64_t>(m);
        if (low < n) {
            const std::uint64_t threshold = (0 - n) % n;
            while (low < threshold) {
                x = (*this)();
                m = static_cast<__uint128_t>(x) * n;
                low = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    double exponential(double mean) noexcept { return -mean * std::log1p(-uniform()); }

private:
    std::uint64_t state_;
};

}  // namespace pnt
