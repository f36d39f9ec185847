#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "common.hpp"

namespace pnt {

enum class ControlKind : std::uint8_t { enter, leave, ack, gps_report, neighbor_report };

constexpr std::string_view name(ControlKind k) noexcept {
    switch (k) {
        case ControlKind::enter: return "ENTER";
        case ControlKind::leave: return "LEAVE";
        case ControlKind::ack: return "ACK";
        case ControlKind::gps_report: return "GPS_REPORT";
        case ControlKind::neighbor_report: return "NEIGHBOR_REPORT";
    }
    return "?";
}

// Uplink message from a node to the controller. `generated` is the instant
// the node produced it (for ENTER: the entry time).
struct ControlMessage {
    ControlKind kind = ControlKind::enter;
    NodeId node{};
    Time generated{};
    std::uint32_t message = 0;     // ACK: content message id
    Point position;                // GPS_REPORT
    std::vector<NodeId> neighbors; // NEIGHBOR_REPORT, sorted
};

struct ContentMessage {
    std::uint32_t id = 0;
    std::uint64_t size = 1'000'000;
    Time created{};
    Time expires = kNever;

    Time lifetime() const noexcept { return expires - created; }
};

}  // namespace pnt
