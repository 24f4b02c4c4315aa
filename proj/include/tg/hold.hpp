#pragma once

#include <vector>

#include "tg/discretize.hpp"
#include "tg/scorers.hpp"

namespace tg {

// Per-snapshot prediction scores broadcast as constants over their
// intervals (zero-order hold).
struct HeldSignal {
    std::vector<double> values;  // one per partition interval
    Partition partition;
};

// Interval index holding t: tau_i <= t < tau_{i+1}, final interval closed.
// O(1) for regular partitions. Throws RangeError outside coverage.
std::int64_t snapshot_index_of(Time t, const Partition& p);

// y(t) = values[snapshot_index_of(t)]; piecewise constant.
double zoh_query(const HeldSignal& sig, Time t);

// Score for link (src, dst) at continuous time t from a snapshot scorer
// whose state covers exactly the `snapshots_observed` intervals preceding
// t's interval. The scorer is queried at the interval's start time, so any
// two timestamps in one interval receive bit-identical scores. Throws
// ProtocolError when the state is stale (not advanced through the
// preceding snapshot) or already includes t's interval.
double continuous_link_query(const Scorer& scorer, std::int64_t snapshots_observed,
                             const Partition& p, NodeId src, NodeId dst, Time t);

// Drives a scorer snapshot by snapshot and answers continuous-time link
// queries in between, enforcing the state-freshness protocol.
class SnapshotSession {
public:
    SnapshotSession(Scorer& scorer, Partition partition)
        : scorer_(scorer), partition_(std::move(partition)) {}

    // Observe the next snapshot batch; indices must arrive consecutively.
    void advance(const Batch& batch);
    double query(NodeId src, NodeId dst, Time t) const;
    std::int64_t snapshots_observed() const { return observed_; }

private:
    Scorer& scorer_;
    Partition partition_;
    std::int64_t observed_ = 0;
};

}  // namespace tg
