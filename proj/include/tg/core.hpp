#pragma once

#include <cstddef>
#include <vector>

#include "tg/error.hpp"
#include "tg/types.hpp"

namespace tg {

// Chronologically sorted event collection over a dense node universe.
// Immutable after construction; safe to share read-only across threads.
struct EventStream {
    std::vector<Event> events;
    NodeId num_nodes = 0;
    Time t_min = 0;  // min t_start
    Time t_max = 0;  // max t_end
    bool transient = false;  // all events have t_start == t_end

    std::size_t size() const { return events.size(); }
    Duration span() const { return t_max - t_min; }
};

struct NormalizedTime {
    double value = 0.0;  // in [0, 1]
};

// Stable-sorts by t_start if needed and derives num_nodes/t_min/t_max and
// the transient flag. num_nodes_hint widens the node universe beyond
// max(id)+1 (used by split views that must keep the parent universe).
// Throws ValidationError listing offending event indices, or on empty input.
EventStream validate_stream(std::vector<Event> events, NodeId num_nodes_hint = 0);

// (t - t_min) / (t_max - t_min); 0 for a single-instant stream.
// Throws RangeError for t outside [t_min, t_max].
NormalizedTime normalize_time(Time t, const EventStream& stream);

// Contiguous event subrange [begin, end); keeps the parent node universe,
// recomputes time bounds and the transient flag.
EventStream slice_stream(const EventStream& stream, std::size_t begin, std::size_t end);

// One interval of a discretized graph: [lo, hi) in raw timestamps, the last
// snapshot of a sequence closed on the right. `edges` holds the contributing
// edge occurrences as a multiset of (src, dst, weight); original event
// timestamps are retained so snapshots can be re-batched for event models.
struct Snapshot {
    std::int64_t index = 0;
    Time lo = 0;
    Time hi = 0;
    std::vector<NodeId> nodes;  // sorted, unique, endpoints of edges
    std::vector<Event> edges;

    std::size_t num_edges() const { return edges.size(); }
    std::size_t num_nodes() const { return nodes.size(); }
};

}  // namespace tg
