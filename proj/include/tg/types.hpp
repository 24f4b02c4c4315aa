#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace tg {

inline constexpr std::string_view kVersion = "0.1.0";

using NodeId = std::int32_t;
using Time = std::int64_t;      // raw timestamp, dataset-native integer ticks
using Duration = std::int64_t;  // raw tick count

// One timestamped directed edge. Transient edges have t_start == t_end.
struct Event {
    NodeId src = 0;
    NodeId dst = 0;
    Time t_start = 0;
    Time t_end = 0;
    double weight = 1.0;

    bool operator==(const Event&) const = default;
};

inline Event make_event(NodeId src, NodeId dst, Time t, double weight = 1.0) {
    return Event{src, dst, t, t, weight};
}

// A scoring request: rank destination dst for source src at time t.
struct LinkQuery {
    NodeId src = 0;
    NodeId dst = 0;
    Time t = 0;
};

// Dense (src, dst) pair key. Node ids are non-negative 32-bit, so the
// packing is collision-free.
inline std::uint64_t pair_key(NodeId src, NodeId dst) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(src)) << 32) |
           static_cast<std::uint64_t>(static_cast<std::uint32_t>(dst));
}

}  // namespace tg
