#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "tg/core.hpp"
#include "tg/discretize.hpp"
#include "tg/scorers.hpp"

namespace tg {

// Fixed negative destinations for each positive test edge, flat-packed in
// test order. negatives_of(i) never contains dst[i] and holds distinct ids.
struct NegativeSet {
    std::vector<NodeId> src;
    std::vector<NodeId> dst;
    std::vector<Time> t;
    std::vector<std::int32_t> historical_counts;  // leading ids are historical
    std::vector<std::size_t> offsets;             // size() + 1 entries
    std::vector<NodeId> ids;
    std::uint64_t seed = 0;
    std::int32_t q = 0;

    std::size_t size() const { return src.size(); }
    std::span<const NodeId> negatives_of(std::size_t i) const {
        return {ids.data() + offsets[i], offsets[i + 1] - offsets[i]};
    }
};

struct NegativeSampleConfig {
    std::int32_t q = 0;  // 0 = auto: min(1000, num_nodes - 1)
    std::uint64_t seed = 0;
    // Historical pool scoped per source (default) or drawn from all train
    // destinations regardless of source.
    bool per_source_history = true;
};

// For each positive (s, d, t): up to floor(q/2) destinations sampled
// without replacement from s's train history (excluding pairs occurring at
// timestamp t in test and d itself), the rest uniform over nodes not yet
// chosen. Throws ParameterError when q < 1 or q >= num_nodes.
NegativeSet generate_negatives(const EventStream& train, const EventStream& test,
                               const NegativeSampleConfig& config = {});

// One line per positive: {"pos_index":i,"src":s,"dst":d,"t":t,"negatives":[...]}.
void write_negatives(const NegativeSet& negatives, std::ostream& out);
void write_negatives_file(const NegativeSet& negatives, const std::string& path);
NegativeSet read_negatives(std::istream& in);
NegativeSet read_negatives_file(const std::string& path);

enum class TiePolicy {
    pessimistic,  // 1 + greater + ties
    optimistic,   // 1 + greater
    mean,         // 1 + greater + ties/2, half rounded up
};

TiePolicy tie_policy_from_name(const std::string& name);

// Rank of the true destination among its negatives. Throws ValidationError
// on NaN scores.
std::int64_t rank_of(double true_score, std::span<const double> negative_scores,
                     TiePolicy policy = TiePolicy::pessimistic);

struct RankResult {
    std::vector<std::int64_t> ranks;
    std::vector<double> reciprocal_ranks;
    double mrr = 0.0;
    std::vector<double> per_batch_mrr;  // NaN for batches with no positives
};

// Scores every positive of a batch (and its negatives) with the state as of
// the previous batch, then observes the batch. Model parameters must not
// change (checksummed per batch); batches must arrive in time order and
// aligned with the negative set. Throws ProtocolError / LeakageError.
RankResult streaming_evaluate(Scorer& scorer, std::span<const Batch> test_batches,
                              const NegativeSet& negatives,
                              TiePolicy policy = TiePolicy::pessimistic);

// Same protocol with the scorer frozen: observations are no-ops and the
// full state checksum must match before and after.
RankResult deployed_evaluate(Scorer& scorer, std::span<const Batch> test_batches,
                             const NegativeSet& negatives,
                             TiePolicy policy = TiePolicy::pessimistic);

}  // namespace tg
