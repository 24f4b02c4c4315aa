#include "tg/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"
#include "tg/error.hpp"
#include "tg/rng.hpp"

namespace tg {
namespace {

// Mean computed over a sorted copy so the result is bit-identical under any
// input permutation.
double stable_mean(std::vector<double> values) {
    if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(values.begin(), values.end());
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum / static_cast<double>(values.size());
}

// Draws `take` elements without replacement by partial Fisher-Yates; the
// chosen elements end up in pool[0..take).
void partial_shuffle(std::vector<NodeId>& pool, std::size_t take, std::mt19937_64& rng) {
    for (std::size_t i = 0; i < take; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(uniform_below(rng, pool.size() - i));
        std::swap(pool[i], pool[j]);
    }
}

}  // namespace

NegativeSet generate_negatives(const EventStream& train, const EventStream& test,
                               const NegativeSampleConfig& config) {
    const NodeId num_nodes = std::max(train.num_nodes, test.num_nodes);
    std::int32_t q = config.q;
    if (q == 0) q = std::min<std::int32_t>(1000, num_nodes - 1);
    if (q < 1) throw ParameterError("generate_negatives: q must be >= 1");
    if (q >= num_nodes)
        throw ParameterError("generate_negatives: q=" + std::to_string(q) + " >= num_nodes=" +
                             std::to_string(num_nodes) + " cannot exclude the true destination");
    if (test.events.empty()) throw ParameterError("generate_negatives: empty test stream");

    // Distinct train destinations, per source and globally.
    std::unordered_map<NodeId, std::vector<NodeId>> per_source;
    std::vector<NodeId> global_pool;
    for (const Event& e : train.events) {
        if (config.per_source_history) per_source[e.src].push_back(e.dst);
        else global_pool.push_back(e.dst);
    }
    auto sort_unique = [](std::vector<NodeId>& v) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
    };
    if (config.per_source_history) {
        for (auto& [s, pool] : per_source) sort_unique(pool);
    } else {
        sort_unique(global_pool);
    }

    NegativeSet out;
    out.seed = config.seed;
    out.q = q;
    const std::size_t n = test.events.size();
    out.src.reserve(n);
    out.dst.reserve(n);
    out.t.reserve(n);
    out.historical_counts.reserve(n);
    out.offsets.reserve(n + 1);
    out.offsets.push_back(0);
    out.ids.reserve(n * static_cast<std::size_t>(q));

    const std::int32_t want_hist = q / 2;
    std::vector<NodeId> pool;
    std::unordered_set<std::uint64_t> at_t;
    std::unordered_set<NodeId> chosen;
    std::vector<NodeId> fill;

    std::size_t group_begin = 0;
    while (group_begin < n) {
        const Time t = test.events[group_begin].t_start;
        std::size_t group_end = group_begin;
        at_t.clear();
        while (group_end < n && test.events[group_end].t_start == t) {
            const Event& e = test.events[group_end];
            at_t.insert(pair_key(e.src, e.dst));
            ++group_end;
        }

        for (std::size_t i = group_begin; i < group_end; ++i) {
            const Event& e = test.events[i];
            std::mt19937_64 rng(derive_seed(config.seed, "neg", static_cast<std::uint64_t>(i)));

            pool.clear();
            const std::vector<NodeId>* source_pool = &global_pool;
            if (config.per_source_history) {
                const auto it = per_source.find(e.src);
                source_pool = it == per_source.end() ? nullptr : &it->second;
            }
            if (source_pool != nullptr) {
                for (NodeId d : *source_pool) {
                    if (d != e.dst && !at_t.contains(pair_key(e.src, d))) pool.push_back(d);
                }
            }
            const auto take_hist = std::min<std::size_t>(static_cast<std::size_t>(want_hist), pool.size());
            partial_shuffle(pool, take_hist, rng);

            chosen.clear();
            chosen.insert(e.dst);
            for (std::size_t h = 0; h < take_hist; ++h) {
                out.ids.push_back(pool[h]);
                chosen.insert(pool[h]);
            }

            std::size_t needed = static_cast<std::size_t>(q) - take_hist;
            if (needed > 0) {
                if (num_nodes <= 2 * (q + 1)) {
                    // Dense regime: enumerate the remaining candidates.
                    fill.clear();
                    for (NodeId d = 0; d < num_nodes; ++d) {
                        if (!chosen.contains(d)) fill.push_back(d);
                    }
                    partial_shuffle(fill, needed, rng);
                    for (std::size_t r = 0; r < needed; ++r) out.ids.push_back(fill[r]);
                } else {
                    while (needed > 0) {
                        const auto d = static_cast<NodeId>(uniform_below(rng, static_cast<std::uint64_t>(num_nodes)));
                        if (chosen.contains(d)) continue;
                        chosen.insert(d);
                        out.ids.push_back(d);
                        --needed;
                    }
                }
            }

            out.src.push_back(e.src);
            out.dst.push_back(e.dst);
            out.t.push_back(e.t_start);
            out.historical_counts.push_back(static_cast<std::int32_t>(take_hist));
            out.offsets.push_back(out.ids.size());
        }
        group_begin = group_end;
    }
    return out;
}

void write_negatives(const NegativeSet& negatives, std::ostream& out) {
    for (std::size_t i = 0; i < negatives.size(); ++i) {
        nlohmann::ordered_json line;
        line["pos_index"] = i;
        line["src"] = negatives.src[i];
        line["dst"] = negatives.dst[i];
        line["t"] = negatives.t[i];
        const auto negs = negatives.negatives_of(i);
        line["negatives"] = std::vector<NodeId>(negs.begin(), negs.end());
        out << line.dump() << '\n';
    }
}

void write_negatives_file(const NegativeSet& negatives, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open '" + path + "' for writing");
    write_negatives(negatives, out);
}

NegativeSet read_negatives(std::istream& in) {
    NegativeSet out;
    out.offsets.push_back(0);
    std::string line;
    std::size_t line_no = 0;
    std::size_t expected_index = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
        }
        if (!j.contains("pos_index") || !j.contains("src") || !j.contains("dst") ||
            !j.contains("t") || !j.contains("negatives")) {
            throw ParseError("line " + std::to_string(line_no) +
                             ": expected fields pos_index, src, dst, t, negatives");
        }
        if (j["pos_index"].get<std::size_t>() != expected_index) {
            throw ParseError("line " + std::to_string(line_no) + ": pos_index " +
                             j["pos_index"].dump() + " out of sequence, expected " +
                             std::to_string(expected_index));
        }
        out.src.push_back(j["src"].get<NodeId>());
        out.dst.push_back(j["dst"].get<NodeId>());
        out.t.push_back(j["t"].get<Time>());
        for (const auto& v : j["negatives"]) out.ids.push_back(v.get<NodeId>());
        out.offsets.push_back(out.ids.size());
        out.historical_counts.push_back(0);  // composition is not persisted
        ++expected_index;
    }
    if (out.size() == 0) throw ParseError("no negative entries found");
    std::size_t max_len = 0;
    for (std::size_t i = 0; i < out.size(); ++i)
        max_len = std::max(max_len, out.offsets[i + 1] - out.offsets[i]);
    out.q = static_cast<std::int32_t>(max_len);
    return out;
}

NegativeSet read_negatives_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    return read_negatives(in);
}

TiePolicy tie_policy_from_name(const std::string& name) {
    if (name == "pessimistic") return TiePolicy::pessimistic;
    if (name == "optimistic") return TiePolicy::optimistic;
    if (name == "mean") return TiePolicy::mean;
    throw ParameterError("unknown tie policy '" + name + "'");
}

std::int64_t rank_of(double true_score, std::span<const double> negative_scores, TiePolicy policy) {
    if (std::isnan(true_score)) throw ValidationError("rank_of: true score is NaN");
    std::int64_t greater = 0;
    std::int64_t ties = 0;
    for (double s : negative_scores) {
        if (std::isnan(s)) throw ValidationError("rank_of: negative score is NaN");
        if (s > true_score) ++greater;
        else if (s == true_score) ++ties;
    }
    switch (policy) {
        case TiePolicy::pessimistic: return 1 + greater + ties;
        case TiePolicy::optimistic: return 1 + greater;
        case TiePolicy::mean: return 1 + greater + (ties + 1) / 2;
    }
    throw ParameterError("rank_of: unknown tie policy");
}

RankResult streaming_evaluate(Scorer& scorer, std::span<const Batch> test_batches,
                              const NegativeSet& negatives, TiePolicy policy) {
    RankResult result;
    std::size_t cursor = 0;
    std::optional<std::int64_t> prev_snapshot;
    Time last_t = std::numeric_limits<Time>::min();
    std::vector<double> neg_scores;
    std::vector<double> batch_rrs;

    for (const Batch& batch : test_batches) {
        if (batch.snapshot_index.has_value()) {
            // Snapshot order governs; replicated interval events may carry
            // t_start values older than the previous snapshot.
            if (prev_snapshot.has_value() && *batch.snapshot_index <= *prev_snapshot) {
                throw ProtocolError("snapshot batches out of order: " +
                                    std::to_string(*batch.snapshot_index) + " after " +
                                    std::to_string(*prev_snapshot));
            }
            prev_snapshot = batch.snapshot_index;
        } else if (!batch.events.empty() && batch.events.front().t_start < last_t) {
            throw ProtocolError("batches out of time order: t=" +
                                std::to_string(batch.events.front().t_start) + " after t=" +
                                std::to_string(last_t));
        }

        const std::uint64_t params_before = scorer.param_checksum();
        batch_rrs.clear();
        for (const Event& e : batch.events) {
            if (cursor >= negatives.size()) {
                throw ProtocolError("more test events than negative entries (" +
                                    std::to_string(negatives.size()) + ")");
            }
            if (negatives.src[cursor] != e.src || negatives.dst[cursor] != e.dst ||
                negatives.t[cursor] != e.t_start) {
                throw ProtocolError("negative set misaligned at position " + std::to_string(cursor));
            }
            const double pos = scorer.score(LinkQuery{e.src, e.dst, e.t_start});
            const auto negs = negatives.negatives_of(cursor);
            neg_scores.clear();
            neg_scores.reserve(negs.size());
            for (NodeId nd : negs) neg_scores.push_back(scorer.score(LinkQuery{e.src, nd, e.t_start}));
            const std::int64_t rank = rank_of(pos, neg_scores, policy);
            result.ranks.push_back(rank);
            const double rr = 1.0 / static_cast<double>(rank);
            result.reciprocal_ranks.push_back(rr);
            batch_rrs.push_back(rr);
            ++cursor;
        }
        result.per_batch_mrr.push_back(stable_mean(batch_rrs));
        if (!batch.events.empty()) last_t = batch.events.back().t_start;

        scorer.observe(batch);
        if (scorer.param_checksum() != params_before) {
            throw LeakageError("model parameters changed while evaluating");
        }
    }

    if (cursor != negatives.size()) {
        throw ProtocolError(std::to_string(negatives.size() - cursor) +
                            " negative entries left unmatched by the test batches");
    }
    if (result.reciprocal_ranks.empty()) {
        throw ValidationError("streaming_evaluate: no positives to rank");
    }
    result.mrr = stable_mean(result.reciprocal_ranks);
    return result;
}

RankResult deployed_evaluate(Scorer& scorer, std::span<const Batch> test_batches,
                             const NegativeSet& negatives, TiePolicy policy) {
    const std::uint64_t state_before = scorer.state_checksum();
    const bool was_frozen = scorer.frozen();
    scorer.freeze();
    RankResult result;
    try {
        result = streaming_evaluate(scorer, test_batches, negatives, policy);
    } catch (...) {
        if (!was_frozen) scorer.unfreeze();
        throw;
    }
    if (!was_frozen) scorer.unfreeze();
    if (scorer.state_checksum() != state_before) {
        throw LeakageError("scorer state changed during deployed evaluation");
    }
    return result;
}

}  // namespace tg
