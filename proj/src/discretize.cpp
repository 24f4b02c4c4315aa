#include "tg/discretize.hpp"

#include <algorithm>
#include <sstream>

namespace tg {

namespace {

constexpr Duration kSecond = 1;
constexpr Duration kMinute = 60;
constexpr Duration kHour = 3600;
constexpr Duration kDay = 86400;
constexpr Duration kWeek = 604800;
constexpr Duration kMonth = 2592000;  // fixed 30 days

}  // namespace

Granularity granularity_from_name(const std::string& name) {
    if (name == "second") return {"second", kSecond};
    if (name == "minute") return {"minute", kMinute};
    if (name == "hour") return {"hour", kHour};
    if (name == "day") return {"day", kDay};
    if (name == "week") return {"week", kWeek};
    if (name == "month") return {"month", kMonth};
    throw ParameterError("unknown granularity '" + name +
                         "' (expected second|minute|hour|day|week|month)");
}

std::vector<Granularity> named_granularities() {
    return {{"second", kSecond}, {"minute", kMinute}, {"hour", kHour},
            {"day", kDay},       {"week", kWeek},     {"month", kMonth}};
}

Partition Partition::regular(Time origin, Duration width, std::int64_t count) {
    if (width < 1) throw ParameterError("partition width must be >= 1");
    if (count < 1) throw ParameterError("partition count must be >= 1");
    Partition p;
    p.origin_ = origin;
    p.width_ = width;
    p.count_ = count;
    return p;
}

Partition Partition::from_boundaries(std::vector<Time> boundaries) {
    if (boundaries.size() < 2) {
        throw ParameterError("partition needs at least two boundaries");
    }
    if (!std::is_sorted(boundaries.begin(), boundaries.end()) ||
        std::adjacent_find(boundaries.begin(), boundaries.end()) != boundaries.end()) {
        throw ParameterError("partition boundaries must be strictly increasing");
    }
    Partition p;
    p.count_ = static_cast<std::int64_t>(boundaries.size()) - 1;
    p.origin_ = boundaries.front();
    // Detect a constant width so index_of can use integer division.
    Duration w = boundaries[1] - boundaries[0];
    bool regular = true;
    for (std::size_t i = 1; i + 1 < boundaries.size(); ++i) {
        if (boundaries[i + 1] - boundaries[i] != w) {
            regular = false;
            break;
        }
    }
    if (regular) {
        p.width_ = w;
    } else {
        p.boundaries_ = std::move(boundaries);
    }
    return p;
}

Time Partition::boundary(std::int64_t i) const {
    if (i < 0 || i > count_) throw RangeError("partition boundary index out of range");
    if (is_regular()) return origin_ + width_ * i;
    return boundaries_[static_cast<std::size_t>(i)];
}

Duration Partition::norm() const {
    if (is_regular()) return width_;
    Duration m = 0;
    for (std::int64_t i = 0; i < count_; ++i) {
        m = std::max(m, boundary(i + 1) - boundary(i));
    }
    return m;
}

std::int64_t Partition::index_of(Time t) const {
    if (t < lo() || t > hi()) {
        std::ostringstream msg;
        msg << "timestamp " << t << " outside partition [" << lo() << ", " << hi() << "]";
        throw RangeError(msg.str());
    }
    if (t == hi()) return count_ - 1;  // final interval closed on the right
    if (is_regular()) return (t - origin_) / width_;
    auto it = std::upper_bound(boundaries_.begin(), boundaries_.end(), t);
    return static_cast<std::int64_t>(it - boundaries_.begin()) - 1;
}

Partition make_partition(const EventStream& stream, Duration width) {
    if (width < 1) throw ParameterError("make_partition: width must be >= 1");
    const Duration span = stream.span();
    const std::int64_t count = (span + 1 + width - 1) / width;  // ceil((span+1)/width)
    return Partition::regular(stream.t_min, width, count);
}

Partition make_partition_count(const EventStream& stream, std::int64_t count) {
    if (count < 1) throw ParameterError("make_partition_count: count must be >= 1");
    const Duration span = stream.span();
    const Duration width = (span + 1 + count - 1) / count;  // ceil((span+1)/count)
    return make_partition(stream, width);
}

double discretization_level(const Partition& p) {
    return 1.0 / static_cast<double>(p.count());
}

SnapshotSequence induce_snapshots(const EventStream& stream, const Partition& p) {
    const std::int64_t k = p.count();
    SnapshotSequence seq;
    seq.partition = p;
    seq.num_nodes = stream.num_nodes;
    seq.snapshots.resize(static_cast<std::size_t>(k));
    for (std::int64_t i = 0; i < k; ++i) {
        Snapshot& s = seq.snapshots[static_cast<std::size_t>(i)];
        s.index = i;
        s.lo = p.boundary(i);
        s.hi = p.boundary(i + 1);
    }

    for (std::size_t ei = 0; ei < stream.events.size(); ++ei) {
        const Event& e = stream.events[ei];
        if (e.t_start < p.lo() || e.t_end > p.hi()) {
            std::ostringstream msg;
            msg << "induce_snapshots: event " << ei << " (t_start=" << e.t_start
                << ", t_end=" << e.t_end << ") outside partition [" << p.lo() << ", " << p.hi()
                << "]";
            throw CoverageError(msg.str());
        }
        // Every interval i with t_start < tau_{i+1} and t_end >= tau_i.
        const std::int64_t first = p.index_of(e.t_start);
        const std::int64_t last = p.index_of(e.t_end);
        for (std::int64_t i = first; i <= last; ++i) {
            seq.snapshots[static_cast<std::size_t>(i)].edges.push_back(e);
        }
    }

    for (Snapshot& s : seq.snapshots) {
        s.nodes.reserve(s.edges.size() * 2);
        for (const Event& e : s.edges) {
            s.nodes.push_back(e.src);
            s.nodes.push_back(e.dst);
        }
        std::sort(s.nodes.begin(), s.nodes.end());
        s.nodes.erase(std::unique(s.nodes.begin(), s.nodes.end()), s.nodes.end());
    }
    return seq;
}

std::vector<std::int64_t> find_time_gaps(const SnapshotSequence& seq) {
    std::vector<std::int64_t> gaps;
    for (const Snapshot& s : seq.snapshots) {
        if (s.edges.empty()) gaps.push_back(s.index);
    }
    return gaps;
}

bool partition_has_gaps(const EventStream& stream, const Partition& p) {
    const std::int64_t k = p.count();
    // Union of per-event interval ranges; events are sorted by t_start so the
    // range starts arrive non-decreasing and a single sweep suffices.
    std::int64_t covered_until = -1;  // highest contiguous index covered from 0
    std::int64_t covered_count = 0;
    for (const Event& e : stream.events) {
        if (e.t_start < p.lo() || e.t_end > p.hi()) {
            throw CoverageError("partition_has_gaps: event outside partition");
        }
        const std::int64_t first = p.index_of(e.t_start);
        const std::int64_t last = p.index_of(e.t_end);
        if (first > covered_until + 1) return true;  // hole before this range
        if (last > covered_until) {
            covered_count += last - covered_until;
            covered_until = last;
        }
    }
    return covered_count != k;
}

GranularityChoice finest_gapless_granularity(const EventStream& stream,
                                             std::span<const Granularity> candidates) {
    if (candidates.empty()) {
        throw ParameterError("finest_gapless_granularity: empty candidate list");
    }
    for (const Granularity& g : candidates) {
        Partition p = make_partition(stream, g.width);
        if (!partition_has_gaps(stream, p)) {
            return GranularityChoice{g, p.count()};
        }
    }
    throw ParameterError(
        "finest_gapless_granularity: every candidate induces a time gap "
        "(the coarsest candidate must be gapless)");
}

GranularityChoice finest_gapless_granularity(const EventStream& stream) {
    const auto named = named_granularities();
    return finest_gapless_granularity(stream, named);
}

SnapshotSequence slice_sequence(const SnapshotSequence& seq, std::size_t begin, std::size_t end) {
    if (begin >= end || end > seq.snapshots.size()) {
        throw ParameterError("slice_sequence: bad range [" + std::to_string(begin) + ", " +
                             std::to_string(end) + ") for " + std::to_string(seq.snapshots.size()) +
                             " snapshots");
    }
    SnapshotSequence out;
    out.num_nodes = seq.num_nodes;
    out.snapshots.assign(seq.snapshots.begin() + static_cast<std::ptrdiff_t>(begin),
                         seq.snapshots.begin() + static_cast<std::ptrdiff_t>(end));
    const auto count = static_cast<std::int64_t>(end - begin);
    if (seq.partition.is_regular()) {
        out.partition = Partition::regular(seq.partition.boundary(static_cast<std::int64_t>(begin)),
                                           seq.partition.width(), count);
    } else {
        std::vector<Time> bounds;
        bounds.reserve(static_cast<std::size_t>(count) + 1);
        for (std::size_t i = begin; i <= end; ++i) {
            bounds.push_back(seq.partition.boundary(static_cast<std::int64_t>(i)));
        }
        out.partition = Partition::from_boundaries(std::move(bounds));
    }
    return out;
}

std::vector<Batch> snapshot_batches(const SnapshotSequence& seq) {
    std::vector<Batch> batches;
    batches.reserve(seq.snapshots.size());
    for (const Snapshot& s : seq.snapshots) {
        Batch b;
        b.events = s.edges;
        b.snapshot_index = s.index;
        b.t_lo = s.lo;
        b.t_hi = s.hi;
        batches.push_back(std::move(b));
    }
    return batches;
}

std::vector<Batch> event_batches(const EventStream& stream, std::size_t batch_size,
                                 bool respect_timestamp_boundaries) {
    if (batch_size < 1) throw ParameterError("event_batches: batch_size must be >= 1");
    std::vector<Batch> batches;
    const auto& ev = stream.events;
    std::size_t i = 0;
    while (i < ev.size()) {
        std::size_t j = std::min(i + batch_size, ev.size());
        if (respect_timestamp_boundaries) {
            while (j < ev.size() && ev[j].t_start == ev[j - 1].t_start) ++j;
        }
        Batch b;
        b.events.assign(ev.begin() + static_cast<std::ptrdiff_t>(i),
                        ev.begin() + static_cast<std::ptrdiff_t>(j));
        b.t_lo = b.events.front().t_start;
        b.t_hi = b.events.back().t_start;
        batches.push_back(std::move(b));
        i = j;
    }
    return batches;
}

}  // namespace tg
