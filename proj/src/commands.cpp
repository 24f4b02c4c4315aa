#include "tg/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>

#include "tg/error.hpp"
#include "tg/eval.hpp"
#include "tg/rng.hpp"
#include "tg/scorers.hpp"
#include "tg/types.hpp"

namespace tg {
namespace {

CsvSchema schema_of(const DataOptions& d) {
    return CsvSchema{d.has_header, d.has_t_end, d.has_weight};
}

ParsedDataset load_dataset(const DataOptions& d) {
    if (d.path.empty()) throw ParameterError("--data is required");
    return parse_csv_file(d.path, schema_of(d));
}

void write_json_file(const nlohmann::ordered_json& j, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open '" + path + "' for writing");
    out << j.dump(2) << '\n';
}

void write_node_map(const std::vector<std::int64_t>& node_ids, const std::string& path) {
    nlohmann::ordered_json j;
    j["node_ids"] = node_ids;  // position = dense id, value = raw id
    write_json_file(j, path);
}

struct PartitionChoice {
    Partition partition;
    std::string granularity;
};

PartitionChoice choose_partition(const EventStream& stream, const std::string& granularity,
                                 std::int64_t count) {
    if (count > 0) {
        if (!granularity.empty() && granularity != "auto") {
            throw ParameterError("--granularity and --count are mutually exclusive");
        }
        return {make_partition_count(stream, count), "custom"};
    }
    if (granularity.empty()) {
        throw ParameterError("a granularity name, 'auto', or --count is required");
    }
    if (granularity == "auto") {
        const GranularityChoice choice = finest_gapless_granularity(stream);
        return {make_partition(stream, choice.granularity.width), choice.granularity.name};
    }
    const Granularity g = granularity_from_name(granularity);
    return {make_partition(stream, g.width), g.name};
}

struct SequenceSplit {
    SnapshotSequence train;
    SnapshotSequence val;
    SnapshotSequence test;
};

// Snapshot-count analogue of the event-count chronological split. Training
// needs at least two snapshots, validation and test at least one each.
SequenceSplit split_sequence(const SnapshotSequence& seq, const SplitSpec& spec) {
    spec.validate();
    const auto total = seq.size();
    const auto k = static_cast<double>(total);
    const auto i1 = static_cast<std::size_t>(std::floor(spec.train * k + 1e-9));
    const auto i2 = static_cast<std::size_t>(std::floor((spec.train + spec.val) * k + 1e-9));
    if (i1 < 2 || i2 <= i1 || i2 >= total) {
        throw SplitError("snapshot split (" + std::to_string(i1) + ", " + std::to_string(i2) +
                         ") of " + std::to_string(total) +
                         " snapshots needs >= 2 train, >= 1 val, >= 1 test");
    }
    return {slice_sequence(seq, 0, i1), slice_sequence(seq, i1, i2),
            slice_sequence(seq, i2, total)};
}

// Events of a sequence in snapshot-batch order; only the fields negative
// generation reads are populated.
EventStream sequence_events(const SnapshotSequence& seq) {
    EventStream s;
    s.num_nodes = seq.num_nodes;
    for (const Snapshot& snap : seq.snapshots) {
        s.events.insert(s.events.end(), snap.edges.begin(), snap.edges.end());
    }
    if (!s.events.empty()) {
        s.t_min = s.events.front().t_start;
        s.t_max = s.events.front().t_end;
        for (const Event& e : s.events) {
            s.t_min = std::min(s.t_min, e.t_start);
            s.t_max = std::max(s.t_max, e.t_end);
        }
    }
    return s;
}

// Everything an evaluation needs, for either pipeline. EdgeBank models run
// on event-count splits and fixed-size batches; the logistic scorer runs on
// snapshot-count splits over the induced sequence.
struct Prepared {
    bool snapshot_pipeline = false;
    NegativeSet negatives;
    std::vector<Batch> trainval_batches;
    std::vector<Batch> test_batches;
    SnapshotSequence train_seq;  // logistic only
    SnapshotSequence val_seq;    // logistic only
    Duration tw_window = 1;
    std::string granularity;
};

Prepared prepare_pipeline(const EventStream& stream, const std::string& model,
                          const SplitSpec& split, const std::string& granularity,
                          std::int64_t snapshot_count, std::int32_t q, std::uint64_t seed,
                          const std::string& negatives_path, std::int64_t tw_window,
                          std::size_t batch_size, bool global_history) {
    Prepared out;
    if (model == "logistic") {
        out.snapshot_pipeline = true;
        PartitionChoice choice = choose_partition(stream, granularity, snapshot_count);
        out.granularity = choice.granularity;
        SnapshotSequence seq = induce_snapshots(stream, choice.partition);
        SequenceSplit ss = split_sequence(seq, split);

        const EventStream history = sequence_events(ss.train);
        const EventStream test_positives = sequence_events(ss.test);
        if (test_positives.events.empty()) throw SplitError("test snapshots contain no events");
        if (!negatives_path.empty()) {
            out.negatives = read_negatives_file(negatives_path);
        } else {
            out.negatives = generate_negatives(history, test_positives,
                                               NegativeSampleConfig{q, seed, !global_history});
        }

        out.trainval_batches = snapshot_batches(ss.train);
        const std::vector<Batch> val_batches = snapshot_batches(ss.val);
        out.trainval_batches.insert(out.trainval_batches.end(), val_batches.begin(),
                                    val_batches.end());
        out.test_batches = snapshot_batches(ss.test);
        out.train_seq = std::move(ss.train);
        out.val_seq = std::move(ss.val);
    } else {
        const SplitResult sr = chronological_split(stream, split);
        out.tw_window =
            tw_window > 0 ? tw_window : std::max<Duration>(1, sr.test.t_max - sr.test.t_min);
        if (!negatives_path.empty()) {
            out.negatives = read_negatives_file(negatives_path);
        } else {
            out.negatives = generate_negatives(sr.train, sr.test,
                                               NegativeSampleConfig{q, seed, !global_history});
        }
        out.trainval_batches = event_batches(sr.train, batch_size, true);
        const std::vector<Batch> val_batches = event_batches(sr.val, batch_size, true);
        out.trainval_batches.insert(out.trainval_batches.end(), val_batches.begin(),
                                    val_batches.end());
        out.test_batches = event_batches(sr.test, batch_size, true);
    }
    return out;
}

void require_mode(const std::string& mode) {
    if (mode != "streaming" && mode != "deployed") {
        throw ParameterError("mode must be 'streaming' or 'deployed', got '" + mode + "'");
    }
}

FeatureVector load_weights(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad training report: ") + e.what());
    }
    if (!j.contains("weights") || !j["weights"].is_array() ||
        j["weights"].size() != kLogisticFeatureDim) {
        throw ParseError("training report needs a 'weights' array of " +
                         std::to_string(kLogisticFeatureDim) + " numbers");
    }
    FeatureVector w{};
    for (std::size_t i = 0; i < kLogisticFeatureDim; ++i) w[i] = j["weights"][i].get<double>();
    return w;
}

nlohmann::ordered_json evaluate_once(Scorer& scorer, const Prepared& prep,
                                     const std::string& mode, TiePolicy tie,
                                     const std::string& dataset, std::uint64_t seed) {
    advance_through(scorer, prep.trainval_batches);
    const auto start = std::chrono::steady_clock::now();
    const RankResult r = mode == "deployed"
                             ? deployed_evaluate(scorer, prep.test_batches, prep.negatives, tie)
                             : streaming_evaluate(scorer, prep.test_batches, prep.negatives, tie);
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    nlohmann::ordered_json j;
    j["model"] = scorer.name();
    j["dataset"] = dataset;
    j["mode"] = mode;
    j["seed"] = seed;
    j["mrr"] = r.mrr;
    j["per_batch_mrr"] = r.per_batch_mrr;  // NaN serializes as null
    j["runtime_seconds"] = seconds;
    return j;
}

}  // namespace

nlohmann::ordered_json cmd_stats(const StatsOptions& opts) {
    const ParsedDataset ds = load_dataset(opts.data);
    const DatasetStats s = dataset_stats(ds.stream, opts.split, opts.granularity);
    nlohmann::ordered_json j;
    j["nodes"] = s.num_nodes;
    j["edges"] = s.num_edges;
    j["unique_edges"] = s.num_unique_edges;
    j["surprise"] = s.surprise;
    j["granularity"] = s.granularity;
    j["snapshots"] = s.num_snapshots;
    if (!opts.out.empty()) write_json_file(j, opts.out);
    return j;
}

nlohmann::ordered_json cmd_discretize(const DiscretizeOptions& opts, std::ostream& manifest) {
    const ParsedDataset ds = load_dataset(opts.data);
    const PartitionChoice choice = choose_partition(ds.stream, opts.granularity, opts.count);
    const SnapshotSequence seq = induce_snapshots(ds.stream, choice.partition);
    for (const Snapshot& s : seq.snapshots) {
        nlohmann::ordered_json line;
        line["index"] = s.index;
        line["t_lo"] = s.lo;
        line["t_hi"] = s.hi;
        line["num_edges"] = s.num_edges();
        line["num_nodes"] = s.num_nodes();
        manifest << line.dump() << '\n';
    }
    nlohmann::ordered_json j;
    j["granularity"] = choice.granularity;
    j["width"] = choice.partition.width();
    j["level"] = discretization_level(choice.partition);
    j["snapshots"] = choice.partition.count();
    j["gaps"] = find_time_gaps(seq).size();
    return j;
}

nlohmann::ordered_json cmd_discretize(const DiscretizeOptions& opts) {
    if (opts.out.empty()) return cmd_discretize(opts, std::cout);
    std::ofstream out(opts.out);
    if (!out) throw ParseError("cannot open '" + opts.out + "' for writing");
    return cmd_discretize(opts, out);
}

nlohmann::ordered_json cmd_gen_negatives(const GenNegativesOptions& opts) {
    if (opts.out.empty()) throw ParameterError("--out is required");
    const ParsedDataset ds = load_dataset(opts.data);
    const SplitResult sr = chronological_split(ds.stream, opts.split);
    const NegativeSet negs = generate_negatives(
        sr.train, sr.test, NegativeSampleConfig{opts.q, opts.seed, !opts.global_history});
    write_negatives_file(negs, opts.out);
    write_node_map(ds.node_ids, opts.out + ".nodes.json");

    nlohmann::ordered_json j;
    j["positives"] = negs.size();
    j["q"] = negs.q;
    j["seed"] = negs.seed;
    j["out"] = opts.out;
    return j;
}

nlohmann::ordered_json cmd_train(const TrainOptions& opts) {
    const ParsedDataset ds = load_dataset(opts.data);
    const PartitionChoice choice = choose_partition(ds.stream, opts.granularity, opts.snapshot_count);
    const SnapshotSequence seq = induce_snapshots(ds.stream, choice.partition);
    const SequenceSplit ss = split_sequence(seq, opts.split);

    LogisticScorer scorer;
    const FitReport report = fit(scorer, ss.train, ss.val, opts.train);

    nlohmann::ordered_json j;
    j["per_epoch"] = nlohmann::ordered_json::array();
    for (const EpochRecord& e : report.epochs) {
        nlohmann::ordered_json row;
        row["loss"] = e.loss;
        row["val_mrr"] = e.val_mrr;
        j["per_epoch"].push_back(std::move(row));
    }
    j["best_epoch"] = report.best_epoch;
    j["weights"] = report.best_weights;
    if (!opts.out.empty()) write_json_file(j, opts.out);
    return j;
}

nlohmann::ordered_json cmd_eval(const EvalOptions& opts) {
    require_mode(opts.mode);
    const TiePolicy tie = tie_policy_from_name(opts.tie_policy);
    const ParsedDataset ds = load_dataset(opts.data);
    const Prepared prep = prepare_pipeline(ds.stream, opts.model, opts.split, opts.granularity,
                                           opts.snapshot_count, opts.q, opts.seed,
                                           opts.negatives_path, opts.tw_window, opts.batch_size,
                                           opts.global_history);
    std::unique_ptr<Scorer> scorer;
    if (opts.model == "logistic") {
        if (opts.weights_path.empty()) {
            throw ParameterError("logistic evaluation requires --weights from a training report");
        }
        auto logistic = std::make_unique<LogisticScorer>();
        logistic->set_weights(load_weights(opts.weights_path));
        scorer = std::move(logistic);
    } else {
        scorer = make_scorer(opts.model, prep.tw_window);
    }
    nlohmann::ordered_json j = evaluate_once(*scorer, prep, opts.mode, tie, opts.data.path,
                                             opts.seed);
    if (!opts.out.empty()) write_json_file(j, opts.out);
    return j;
}

nlohmann::ordered_json cmd_run(const RunOptions& opts) {
    if (opts.out_dir.empty()) throw ParameterError("--out-dir is required");
    if (opts.seeds.empty()) throw ParameterError("at least one seed is required");
    require_mode(opts.mode);
    const TiePolicy tie = tie_policy_from_name(opts.tie_policy);

    namespace fs = std::filesystem;
    fs::create_directories(opts.out_dir);
    const fs::path dir(opts.out_dir);

    nlohmann::ordered_json manifest;
    manifest["version"] = kVersion;
    manifest["command"] = "run";
    manifest["data"] = {{"path", opts.data.path},
                        {"has_header", opts.data.has_header},
                        {"has_t_end", opts.data.has_t_end},
                        {"has_weight", opts.data.has_weight}};
    manifest["split"] = {{"train", opts.split.train},
                         {"val", opts.split.val},
                         {"test", opts.split.test}};
    manifest["model"] = opts.model;
    manifest["mode"] = opts.mode;
    manifest["tie_policy"] = opts.tie_policy;
    manifest["q"] = opts.q;
    manifest["neg_seed"] = opts.neg_seed;
    manifest["seeds"] = opts.seeds;
    manifest["granularity"] = opts.granularity;
    manifest["snapshot_count"] = opts.snapshot_count;
    manifest["tw_window"] = opts.tw_window;
    manifest["batch_size"] = opts.batch_size;
    manifest["global_history"] = opts.global_history;
    if (opts.model == "logistic") {
        manifest["train"] = {{"max_epochs", opts.train.max_epochs},
                             {"patience", opts.train.patience},
                             {"tolerance", opts.train.tolerance},
                             {"learning_rate", opts.train.learning_rate},
                             {"mode", train_mode_name(opts.train.mode)},
                             {"train_negatives", opts.train.train_negatives},
                             {"val_q", opts.train.val_q}};
    }
    manifest["status"] = "running";
    write_json_file(manifest, (dir / "manifest.json").string());

    try {
        const ParsedDataset ds = load_dataset(opts.data);
        write_node_map(ds.node_ids, (dir / "node_map.json").string());

        const Prepared prep = prepare_pipeline(ds.stream, opts.model, opts.split,
                                               opts.granularity, opts.snapshot_count, opts.q,
                                               opts.neg_seed, "", opts.tw_window, opts.batch_size,
                                               opts.global_history);
        write_negatives_file(prep.negatives, (dir / "negatives.jsonl").string());
        manifest["q"] = prep.negatives.q;
        if (opts.model == "logistic") manifest["granularity"] = prep.granularity;
        if (opts.model == "edgebank-tw") manifest["tw_window"] = prep.tw_window;

        nlohmann::ordered_json runs = nlohmann::ordered_json::array();
        std::vector<double> mrrs;
        for (const std::uint64_t seed : opts.seeds) {
            std::unique_ptr<Scorer> scorer;
            if (opts.model == "logistic") {
                auto logistic = std::make_unique<LogisticScorer>();
                TrainConfig cfg = opts.train;
                cfg.seed = seed;
                fit(*logistic, prep.train_seq, prep.val_seq, cfg);
                scorer = std::move(logistic);
            } else {
                scorer = make_scorer(opts.model, prep.tw_window);
            }
            nlohmann::ordered_json result = evaluate_once(*scorer, prep, opts.mode, tie,
                                                          opts.data.path, seed);
            write_json_file(result, (dir / ("results_seed" + std::to_string(seed) + ".json")).string());
            mrrs.push_back(result["mrr"].get<double>());
            nlohmann::ordered_json row;
            row["seed"] = seed;
            row["mrr"] = result["mrr"];
            row["runtime_seconds"] = result["runtime_seconds"];
            runs.push_back(std::move(row));
        }

        double mean = 0.0;
        for (double m : mrrs) mean += m;
        mean /= static_cast<double>(mrrs.size());
        double var = 0.0;
        for (double m : mrrs) var += (m - mean) * (m - mean);
        var /= static_cast<double>(mrrs.size());

        nlohmann::ordered_json summary;
        summary["model"] = opts.model;
        summary["dataset"] = opts.data.path;
        summary["mode"] = opts.mode;
        summary["tie_policy"] = opts.tie_policy;
        summary["q"] = prep.negatives.q;
        summary["seeds"] = opts.seeds;
        summary["mrr_mean"] = mean;
        summary["mrr_std"] = std::sqrt(var);
        summary["runs"] = std::move(runs);
        write_json_file(summary, (dir / "summary.json").string());

        manifest["status"] = "complete";
        write_json_file(manifest, (dir / "manifest.json").string());
        return summary;
    } catch (const std::exception& e) {
        manifest["status"] = "incomplete";
        manifest["error"] = e.what();
        write_json_file(manifest, (dir / "manifest.json").string());
        throw;
    }
}

}  // namespace tg
