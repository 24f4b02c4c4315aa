#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tg/core.hpp"

namespace tg {

// Named interval widths in seconds. Months are fixed 30 days so regular
// partitions keep every interval the same width.
struct Granularity {
    std::string name;  // second|minute|hour|day|week|month|custom
    Duration width = 1;
};

Granularity granularity_from_name(const std::string& name);
// Finest to coarsest: second, minute, hour, day, week, month.
std::vector<Granularity> named_granularities();

// Interval scheme tau_0 < tau_1 < ... < tau_k with tau_0 == t_min and
// tau_k >= t_max. Regular partitions store (origin, width, count) and
// compute boundaries on demand; irregular ones keep the boundary vector.
class Partition {
public:
    Partition() = default;
    static Partition regular(Time origin, Duration width, std::int64_t count);
    static Partition from_boundaries(std::vector<Time> boundaries);

    std::int64_t count() const { return count_; }
    bool is_regular() const { return width_ > 0; }
    Duration width() const { return width_; }
    Time boundary(std::int64_t i) const;  // tau_i for i in [0, count]
    Time lo() const { return boundary(0); }
    Time hi() const { return boundary(count_); }
    Duration norm() const;  // max interval length

    // Index i with tau_i <= t < tau_{i+1}; the final interval is closed so
    // t == tau_k maps to k-1. Throws RangeError outside [tau_0, tau_k].
    std::int64_t index_of(Time t) const;

private:
    Time origin_ = 0;
    Duration width_ = 0;  // > 0 for regular partitions
    std::int64_t count_ = 0;
    std::vector<Time> boundaries_;  // only for irregular partitions
};

struct SnapshotSequence {
    std::vector<Snapshot> snapshots;
    Partition partition;
    NodeId num_nodes = 0;  // node universe of the source stream

    std::size_t size() const { return snapshots.size(); }
};

// Events grouped for sequential model consumption. snapshot_index is set
// when the batch is exactly one snapshot of a sequence.
struct Batch {
    std::vector<Event> events;
    std::optional<std::int64_t> snapshot_index;
    Time t_lo = 0;
    Time t_hi = 0;
};

// Regular partition over [t_min, t_max] with the given width. The boundary
// count is the least k with tau_0 + k*width > t_max, i.e.
// k = ceil((span + 1) / width); a width beyond the span collapses to one
// interval. Throws ParameterError for width < 1.
Partition make_partition(const EventStream& stream, Duration width);

// Regular partition with at most `count` intervals: width = ceil((span+1)/count),
// then the width rule above (rounding can make fewer intervals suffice).
Partition make_partition_count(const EventStream& stream, std::int64_t count);

// 1 / |P|, in (0, 1]. 1 collapses the stream to a single static snapshot.
double discretization_level(const Partition& p);

// Snapshot i collects every event with t_start < tau_{i+1} and t_end >= tau_i
// (final interval closed at tau_k). Transient events land in exactly one
// snapshot; persistent events are replicated into every interval they
// overlap. Throws CoverageError for events outside the partition.
SnapshotSequence induce_snapshots(const EventStream& stream, const Partition& p);

// Indices of snapshots with an empty edge set.
std::vector<std::int64_t> find_time_gaps(const SnapshotSequence& seq);

// Equivalent to !find_time_gaps(induce_snapshots(...)).empty() without
// materializing the snapshots; O(events) per call.
bool partition_has_gaps(const EventStream& stream, const Partition& p);

struct GranularityChoice {
    Granularity granularity;
    std::int64_t snapshot_count = 0;
};

// First candidate (ordered finest to coarsest) whose regular partition has
// no time gap. Throws ParameterError on an empty list or when every
// candidate gaps.
GranularityChoice finest_gapless_granularity(const EventStream& stream,
                                             std::span<const Granularity> candidates);
GranularityChoice finest_gapless_granularity(const EventStream& stream);

// Sub-sequence over snapshots [begin, end); snapshots keep their original
// indices, the partition narrows to the covered boundaries. Throws
// ParameterError on an empty or out-of-range slice.
SnapshotSequence slice_sequence(const SnapshotSequence& seq, std::size_t begin, std::size_t end);

// One batch per snapshot, in order, empty snapshots included. Simultaneous
// edges stay in one batch so earlier edges of a snapshot are never used to
// predict its remaining edges.
std::vector<Batch> snapshot_batches(const SnapshotSequence& seq);

// Consecutive fixed-size chunks. With respect_timestamp_boundaries a batch
// extends past batch_size until the trailing timestamp's events are
// exhausted, so equal-time events are never split across batches.
std::vector<Batch> event_batches(const EventStream& stream, std::size_t batch_size,
                                 bool respect_timestamp_boundaries);

}  // namespace tg
