#include "tg/hold.hpp"

#include <string>

#include "tg/error.hpp"

namespace tg {

std::int64_t snapshot_index_of(Time t, const Partition& p) {
    return p.index_of(t);
}

double zoh_query(const HeldSignal& sig, Time t) {
    if (sig.values.size() != static_cast<std::size_t>(sig.partition.count()))
        throw ValidationError("held signal has " + std::to_string(sig.values.size()) +
                              " values for " + std::to_string(sig.partition.count()) +
                              " intervals");
    return sig.values[static_cast<std::size_t>(snapshot_index_of(t, sig.partition))];
}

double continuous_link_query(const Scorer& scorer, std::int64_t snapshots_observed,
                             const Partition& p, NodeId src, NodeId dst, Time t) {
    const std::int64_t idx = snapshot_index_of(t, p);
    if (snapshots_observed != idx) {
        const char* kind = snapshots_observed < idx ? "stale" : "ahead";
        throw ProtocolError("scorer state is " + std::string(kind) + ": observed " +
                            std::to_string(snapshots_observed) + " snapshots but t=" +
                            std::to_string(t) + " falls in interval " + std::to_string(idx));
    }
    // Query at the interval's start so the answer is constant across the
    // whole interval.
    const Time canonical = p.boundary(idx);
    return scorer.score(LinkQuery{src, dst, canonical});
}

void SnapshotSession::advance(const Batch& batch) {
    if (!batch.snapshot_index.has_value())
        throw ProtocolError("session batches must carry a snapshot index");
    if (*batch.snapshot_index != observed_)
        throw ProtocolError("expected snapshot " + std::to_string(observed_) +
                            ", got " + std::to_string(*batch.snapshot_index));
    if (observed_ >= partition_.count())
        throw ProtocolError("all " + std::to_string(partition_.count()) +
                            " snapshots already observed");
    scorer_.observe(batch);
    ++observed_;
}

double SnapshotSession::query(NodeId src, NodeId dst, Time t) const {
    return continuous_link_query(scorer_, observed_, partition_, src, dst, t);
}

}  // namespace tg
