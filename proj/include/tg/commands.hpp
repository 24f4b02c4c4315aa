#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "tg/ingest.hpp"
#include "tg/train.hpp"

namespace tg {

// Shared dataset flags. Every subcommand reads one CSV of events.
struct DataOptions {
    std::string path;
    bool has_header = true;
    bool has_t_end = false;
    bool has_weight = false;
};

struct StatsOptions {
    DataOptions data;
    SplitSpec split;
    std::string granularity = "auto";
    std::string out;  // optional JSON path
};

// {nodes, edges, unique_edges, surprise, granularity, snapshots}
nlohmann::ordered_json cmd_stats(const StatsOptions& opts);

struct DiscretizeOptions {
    DataOptions data;
    std::string granularity;     // named width, or "auto" for finest gapless
    std::int64_t count = 0;      // alternative: target snapshot count
    std::string out;             // optional JSONL path; empty = stdout only
};

// Writes one manifest line per snapshot: {index, t_lo, t_hi, num_edges,
// num_nodes}; returns {granularity, width, level, snapshots, gaps}.
nlohmann::ordered_json cmd_discretize(const DiscretizeOptions& opts, std::ostream& manifest);
nlohmann::ordered_json cmd_discretize(const DiscretizeOptions& opts);

struct GenNegativesOptions {
    DataOptions data;
    SplitSpec split;
    std::int32_t q = 0;  // 0 = auto
    std::uint64_t seed = 0;
    bool global_history = false;
    std::string out;  // required JSONL path
};

// Negatives for the test split, history drawn from the train split.
// Returns {positives, q, seed, out}.
nlohmann::ordered_json cmd_gen_negatives(const GenNegativesOptions& opts);

struct TrainOptions {
    DataOptions data;
    SplitSpec split;
    std::string granularity = "auto";
    std::int64_t snapshot_count = 0;  // alternative to granularity
    TrainConfig train;
    std::string out;  // optional report path
};

// Fits the logistic scorer per-snapshot over the train split with early
// stopping on validation MRR. Returns {per_epoch, best_epoch, weights}.
nlohmann::ordered_json cmd_train(const TrainOptions& opts);

struct EvalOptions {
    DataOptions data;
    SplitSpec split;
    std::string model = "edgebank-inf";  // edgebank-inf|edgebank-tw|logistic
    std::string mode = "streaming";      // streaming|deployed
    std::string tie_policy = "pessimistic";
    std::int32_t q = 0;
    std::uint64_t seed = 0;           // negative sampling seed
    std::string negatives_path;       // optional import; skips generation
    std::string weights_path;         // training report JSON, logistic only
    std::string granularity = "auto";  // snapshot pipeline, logistic only
    std::int64_t snapshot_count = 0;
    std::int64_t tw_window = 0;  // 0 = test-split duration
    std::size_t batch_size = 200;
    bool global_history = false;
    std::string out;  // optional results path
};

// Evaluates one model on the test split with state advanced through
// train+val. Returns {model, dataset, mode, seed, mrr, per_batch_mrr,
// runtime_seconds}.
nlohmann::ordered_json cmd_eval(const EvalOptions& opts);

struct RunOptions {
    DataOptions data;
    SplitSpec split;
    std::string model = "edgebank-inf";
    std::string mode = "streaming";
    std::string tie_policy = "pessimistic";
    std::int32_t q = 0;
    std::uint64_t neg_seed = 0;
    std::vector<std::uint64_t> seeds = {0};
    std::string out_dir;  // required
    std::string granularity = "auto";
    std::int64_t snapshot_count = 0;
    std::int64_t tw_window = 0;
    std::size_t batch_size = 200;
    bool global_history = false;
    TrainConfig train;  // logistic only; train.seed is overridden per run
};

// Full pipeline: ingest, split, negatives, train (logistic), evaluate.
// Writes manifest.json, node_map.json, negatives.jsonl, one results JSON
// per seed, and summary.json into out_dir. Returns the summary.
nlohmann::ordered_json cmd_run(const RunOptions& opts);

}  // namespace tg
