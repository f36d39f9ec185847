#pragma once

// When- and whom-strategies and the infection-ratio objective curves.

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>

#include "common.hpp"

namespace pnt {

enum class WhenStrategy : std::uint8_t {
    single_copy,
    ten_copies,
    quadratic,
    slow_linear,
    linear,
    fast_linear,
    square_root,
};

enum class WhomStrategy : std::uint8_t {
    random,
    entry_oldest,
    entry_average,
    entry_newest,
    gps_density,
    gps_potential,
    connected_components,
};

// Column order of the offload matrices.
inline constexpr std::array kWhenStrategies{
    WhenStrategy::single_copy, WhenStrategy::ten_copies, WhenStrategy::quadratic,
    WhenStrategy::slow_linear, WhenStrategy::linear,     WhenStrategy::fast_linear,
    WhenStrategy::square_root,
};

// Row order of the offload matrices.
inline constexpr std::array kWhomStrategies{
    WhomStrategy::random,        WhomStrategy::connected_components, WhomStrategy::entry_oldest,
    WhomStrategy::entry_average, WhomStrategy::entry_newest,         WhomStrategy::gps_density,
    WhomStrategy::gps_potential,
};

constexpr std::string_view name(WhenStrategy w) noexcept {
    switch (w) {
        case WhenStrategy::single_copy: return "single-copy";
        case WhenStrategy::ten_copies: return "ten-copies";
        case WhenStrategy::quadratic: return "quadratic";
        case WhenStrategy::slow_linear: return "slow-linear";
        case WhenStrategy::linear: return "linear";
        case WhenStrategy::fast_linear: return "fast-linear";
        case WhenStrategy::square_root: return "square-root";
    }
    return "?";
}

constexpr std::string_view name(WhomStrategy w) noexcept {
    switch (w) {
        case WhomStrategy::random: return "random";
        case WhomStrategy::entry_oldest: return "entry-oldest";
        case WhomStrategy::entry_average: return "entry-average";
        case WhomStrategy::entry_newest: return "entry-newest";
        case WhomStrategy::gps_density: return "gps-density";
        case WhomStrategy::gps_potential: return "gps-potential";
        case WhomStrategy::connected_components: return "cc";
    }
    return "?";
}

inline std::optional<WhenStrategy> parse_when(std::string_view s) {
    for (auto w : kWhenStrategies)
        if (name(w) == s) return w;
    return std::nullopt;
}

inline std::optional<WhomStrategy> parse_whom(std::string_view s) {
    for (auto w : kWhomStrategies)
        if (name(w) == s) return w;
    return std::nullopt;
}

constexpr bool needs_positions(WhomStrategy w) noexcept {
    return w == WhomStrategy::gps_density || w == WhomStrategy::gps_potential;
}

constexpr bool needs_neighbors(WhomStrategy w) noexcept {
    return w == WhomStrategy::connected_components;
}

constexpr bool is_curve(WhenStrategy w) noexcept {
    return w != WhenStrategy::single_copy && w != WhenStrategy::ten_copies;
}

// Initial copies pushed by the push-and-wait strategies.
constexpr std::size_t initial_copies(WhenStrategy w) noexcept {
    switch (w) {
        case WhenStrategy::single_copy: return 1;
        case WhenStrategy::ten_copies: return 10;
        default: return 0;
    }
}

// Target infection ratio at elapsed lifetime fraction x.
inline double objective_value(WhenStrategy w, double x) {
    if (!(x >= 0.0 && x <= 1.0)) throw Error("lifetime fraction outside [0, 1]");
    switch (w) {
        case WhenStrategy::single_copy:
        case WhenStrategy::ten_copies: return 0.0;
        case WhenStrategy::quadratic: return x * x;
        case WhenStrategy::linear: return x;
        case WhenStrategy::square_root: return std::sqrt(x);
        case WhenStrategy::slow_linear: return x <= 0.5 ? x / 2.0 : 1.5 * x - 0.5;
        case WhenStrategy::fast_linear: return std::min(1.0, x <= 0.5 ? 1.5 * x : x / 2.0 + 0.5);
    }
    return 0.0;
}

}  // namespace pnt
