#pragma once

// Builders and independent oracles shared by the test suites. Oracles keep
// their own data structures (ordered-set replay, direct boundary scans) so
// they never lean on the code paths they are checking.

#include <algorithm>
#include <array>
#include <cstdint>
#include <limits>
#include <random>
#include <set>
#include <span>
#include <utility>
#include <vector>

#include "tg/core.hpp"
#include "tg/discretize.hpp"
#include "tg/eval.hpp"
#include "tg/rng.hpp"

namespace tgtest {

// Transient stream from (src, dst, t) triples.
inline tg::EventStream transient(const std::vector<std::array<std::int64_t, 3>>& rows,
                                 tg::NodeId hint = 0) {
    std::vector<tg::Event> events;
    events.reserve(rows.size());
    for (const auto& r : rows) {
        events.push_back(tg::make_event(static_cast<tg::NodeId>(r[0]),
                                        static_cast<tg::NodeId>(r[1]), r[2]));
    }
    return tg::validate_stream(std::move(events), hint);
}

// Uniform random transient stream; the hint pins the full node universe
// even when some ids never appear.
inline tg::EventStream random_stream(std::mt19937_64& gen, tg::NodeId num_nodes,
                                     std::size_t num_events, tg::Time horizon) {
    std::vector<tg::Event> events;
    events.reserve(num_events);
    for (std::size_t i = 0; i < num_events; ++i) {
        const auto s = static_cast<tg::NodeId>(tg::uniform_below(gen, static_cast<std::uint64_t>(num_nodes)));
        auto d = s;
        while (num_nodes > 1 && d == s) {
            d = static_cast<tg::NodeId>(tg::uniform_below(gen, static_cast<std::uint64_t>(num_nodes)));
        }
        const auto t = static_cast<tg::Time>(tg::uniform_below(gen, static_cast<std::uint64_t>(horizon)));
        events.push_back(tg::make_event(s, d, t));
    }
    return tg::validate_stream(std::move(events), num_nodes);
}

// Mean over a sorted copy; mirrors the aggregation convention of the
// evaluation harness so oracle comparisons can demand bit equality.
inline double sorted_mean(std::vector<double> values) {
    if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(values.begin(), values.end());
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum / static_cast<double>(values.size());
}

// Every node except the true destination, in id order: q = num_nodes - 1.
inline tg::NegativeSet exhaustive_negatives(std::span<const tg::Batch> test_batches,
                                            tg::NodeId num_nodes) {
    tg::NegativeSet neg;
    neg.q = num_nodes - 1;
    neg.offsets.push_back(0);
    for (const tg::Batch& b : test_batches) {
        for (const tg::Event& e : b.events) {
            neg.src.push_back(e.src);
            neg.dst.push_back(e.dst);
            neg.t.push_back(e.t_start);
            neg.historical_counts.push_back(0);
            for (tg::NodeId v = 0; v < num_nodes; ++v) {
                if (v != e.dst) neg.ids.push_back(v);
            }
            neg.offsets.push_back(neg.ids.size());
        }
    }
    return neg;
}

// Reorders negative rows so each positive keeps its own negative list.
inline tg::NegativeSet permute_rows(const tg::NegativeSet& in,
                                    const std::vector<std::size_t>& perm) {
    tg::NegativeSet out;
    out.seed = in.seed;
    out.q = in.q;
    out.offsets.push_back(0);
    for (std::size_t i : perm) {
        out.src.push_back(in.src[i]);
        out.dst.push_back(in.dst[i]);
        out.t.push_back(in.t[i]);
        out.historical_counts.push_back(in.historical_counts[i]);
        const auto negs = in.negatives_of(i);
        out.ids.insert(out.ids.end(), negs.begin(), negs.end());
        out.offsets.push_back(out.ids.size());
    }
    return out;
}

struct OracleMrr {
    double mrr = 0.0;
    std::vector<double> per_batch;
};

// Streaming evaluation of memorize-all-pairs against exhaustive negatives,
// replayed with an ordered set and pessimistic ranks.
inline OracleMrr memory_rank_oracle(std::span<const tg::Batch> history,
                                    std::span<const tg::Batch> test, tg::NodeId num_nodes) {
    std::set<std::pair<tg::NodeId, tg::NodeId>> seen;
    for (const tg::Batch& b : history) {
        for (const tg::Event& e : b.events) seen.insert({e.src, e.dst});
    }

    OracleMrr out;
    std::vector<double> rrs;
    for (const tg::Batch& b : test) {
        std::vector<double> batch_rrs;
        for (const tg::Event& e : b.events) {
            const bool pos_seen = seen.contains({e.src, e.dst});
            std::int64_t greater = 0;
            std::int64_t ties = 0;
            for (tg::NodeId v = 0; v < num_nodes; ++v) {
                if (v == e.dst) continue;
                const bool neg_seen = seen.contains({e.src, v});
                if (neg_seen && !pos_seen) {
                    ++greater;
                } else if (neg_seen == pos_seen) {
                    ++ties;
                }
            }
            const double rr = 1.0 / static_cast<double>(1 + greater + ties);
            batch_rrs.push_back(rr);
            rrs.push_back(rr);
        }
        for (const tg::Event& e : b.events) seen.insert({e.src, e.dst});
        out.per_batch.push_back(sorted_mean(std::move(batch_rrs)));
    }
    out.mrr = sorted_mean(std::move(rrs));
    return out;
}

// Recurring pair pools that rotate every `period` snapshots: the graph is
// stable within a phase and changes abruptly between phases. One event per
// pool pair per snapshot, timestamps equal to the snapshot index.
inline tg::EventStream drifting_recurrence(std::uint64_t seed, tg::NodeId num_nodes = 50,
                                           std::int64_t num_snapshots = 40,
                                           std::int64_t period = 5, std::size_t pool_size = 120) {
    std::mt19937_64 gen(tg::derive_seed(seed, "drift"));
    const std::int64_t phases = (num_snapshots + period - 1) / period;
    std::vector<std::vector<std::pair<tg::NodeId, tg::NodeId>>> pools(
        static_cast<std::size_t>(phases));
    for (auto& pool : pools) {
        std::set<std::pair<tg::NodeId, tg::NodeId>> dedup;
        while (dedup.size() < pool_size) {
            const auto s = static_cast<tg::NodeId>(tg::uniform_below(gen, static_cast<std::uint64_t>(num_nodes)));
            const auto d = static_cast<tg::NodeId>(tg::uniform_below(gen, static_cast<std::uint64_t>(num_nodes)));
            if (s != d) dedup.insert({s, d});
        }
        pool.assign(dedup.begin(), dedup.end());
    }
    std::vector<tg::Event> events;
    events.reserve(static_cast<std::size_t>(num_snapshots) * pool_size);
    for (std::int64_t t = 0; t < num_snapshots; ++t) {
        for (const auto& [s, d] : pools[static_cast<std::size_t>(t / period)]) {
            events.push_back(tg::make_event(s, d, t));
        }
    }
    return tg::validate_stream(std::move(events), num_nodes);
}

}  // namespace tgtest
