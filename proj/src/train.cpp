#include "tg/train.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "tg/error.hpp"
#include "tg/rng.hpp"

namespace tg {
namespace {

// log(1 + e^z) without overflow; -log sigma(z) = softplus(-z).
double softplus(double z) {
    if (z > 0.0) return z + std::log1p(std::exp(-z));
    return std::log1p(std::exp(z));
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

NodeId node_universe(const SnapshotSequence& seq) {
    NodeId n = seq.num_nodes;
    if (n == 0) {
        for (const Snapshot& s : seq.snapshots) {
            if (!s.nodes.empty()) n = std::max(n, s.nodes.back() + 1);
        }
    }
    return n;
}

}  // namespace

TrainMode train_mode_from_name(const std::string& name) {
    if (name == "per-snapshot" || name == "per_snapshot") return TrainMode::per_snapshot;
    if (name == "accumulated") return TrainMode::accumulated;
    throw ParameterError("unknown training mode '" + name + "'");
}

std::string train_mode_name(TrainMode mode) {
    return mode == TrainMode::per_snapshot ? "per-snapshot" : "accumulated";
}

void TrainConfig::validate() const {
    if (max_epochs < 1) throw ParameterError("max_epochs must be >= 1");
    if (patience < 0 || patience > max_epochs)
        throw ParameterError("patience must lie in [0, max_epochs]");
    if (!(learning_rate > 0.0)) throw ParameterError("learning_rate must be > 0");
    if (tolerance < 0.0) throw ParameterError("tolerance must be >= 0");
    if (train_negatives < 1) throw ParameterError("train_negatives must be >= 1");
    if (val_q < 0) throw ParameterError("val_q must be >= 0");
}

double train_epoch(LogisticScorer& scorer, const SnapshotSequence& train_seq,
                   const TrainConfig& cfg, int epoch) {
    const std::size_t total = train_seq.size();
    if (total < 2) {
        throw TrainError("training needs at least 2 snapshots, got " + std::to_string(total));
    }
    const NodeId num_nodes = node_universe(train_seq);
    if (num_nodes < 2) {
        throw TrainError("training needs at least 2 nodes to sample negatives");
    }

    scorer.reset_caches();
    const std::vector<Batch> batches = snapshot_batches(train_seq);
    scorer.observe(batches[0]);

    FeatureVector accumulated{};
    double loss_sum = 0.0;
    std::size_t loss_snapshots = 0;
    std::vector<std::vector<double>> neg_features(static_cast<std::size_t>(cfg.train_negatives));

    for (std::size_t t = 1; t < total; ++t) {
        const std::vector<Event>& positives = batches[t].events;
        if (!positives.empty()) {
            // Negative draws depend only on (seed, epoch, snapshot), so both
            // modes consume identical feature sequences at equal weights.
            std::mt19937_64 rng(derive_seed(cfg.seed, "train-neg",
                                            static_cast<std::uint64_t>(epoch) * 1000003ULL +
                                                static_cast<std::uint64_t>(t)));
            const FeatureVector w = scorer.weights();
            FeatureVector grad{};
            double snapshot_loss = 0.0;
            for (const Event& e : positives) {
                const FeatureVector pos = scorer.features(e.src, e.dst);
                for (auto& nf : neg_features) {
                    NodeId d = e.dst;
                    while (d == e.dst) {
                        d = static_cast<NodeId>(uniform_below(rng, static_cast<std::uint64_t>(num_nodes)));
                    }
                    const FeatureVector f = scorer.features(e.src, d);
                    nf.assign(f.begin(), f.end());
                }
                snapshot_loss += softplus(-dot(w, pos));
                for (const auto& nf : neg_features) snapshot_loss += softplus(dot(w, nf));
                const std::vector<double> g = logistic_grad(w, pos, neg_features);
                for (std::size_t i = 0; i < kLogisticFeatureDim; ++i) grad[i] += g[i];
            }
            const double inv = 1.0 / static_cast<double>(positives.size());
            for (double& g : grad) g *= inv;
            snapshot_loss *= inv;
            loss_sum += snapshot_loss;
            ++loss_snapshots;

            if (cfg.mode == TrainMode::per_snapshot) {
                FeatureVector next = scorer.weights();
                for (std::size_t i = 0; i < kLogisticFeatureDim; ++i) {
                    next[i] -= cfg.learning_rate * grad[i];
                }
                scorer.set_weights(next);
            } else {
                for (std::size_t i = 0; i < kLogisticFeatureDim; ++i) accumulated[i] += grad[i];
            }
        }
        scorer.observe(batches[t]);
    }

    if (loss_snapshots == 0) {
        throw TrainError("no training positives beyond the first snapshot");
    }
    if (cfg.mode == TrainMode::accumulated) {
        FeatureVector next = scorer.weights();
        for (std::size_t i = 0; i < kLogisticFeatureDim; ++i) {
            next[i] -= cfg.learning_rate * accumulated[i];
        }
        scorer.set_weights(next);
    }
    return loss_sum / static_cast<double>(loss_snapshots);
}

FitReport fit(LogisticScorer& scorer, const SnapshotSequence& train_seq,
              const SnapshotSequence& val_seq, const TrainConfig& cfg) {
    cfg.validate();
    if (val_seq.size() == 0) throw TrainError("empty validation sequence");

    const NodeId num_nodes = std::max(node_universe(train_seq), node_universe(val_seq));

    // History pool for validation negatives: every train-snapshot edge.
    EventStream history;
    history.num_nodes = num_nodes;
    for (const Snapshot& s : train_seq.snapshots) {
        history.events.insert(history.events.end(), s.edges.begin(), s.edges.end());
    }
    // Validation positives in the exact order the batches replay them.
    EventStream val_stream;
    val_stream.num_nodes = num_nodes;
    for (const Snapshot& s : val_seq.snapshots) {
        val_stream.events.insert(val_stream.events.end(), s.edges.begin(), s.edges.end());
    }
    if (val_stream.events.empty()) throw TrainError("validation sequence has no events");

    NegativeSampleConfig neg_cfg;
    neg_cfg.q = cfg.val_q;
    neg_cfg.seed = derive_seed(cfg.seed, "val-neg");
    const NegativeSet val_negatives = generate_negatives(history, val_stream, neg_cfg);
    const std::vector<Batch> val_batches = snapshot_batches(val_seq);

    FitReport report;
    double best_mrr = -std::numeric_limits<double>::infinity();
    int bad_epochs = 0;
    const int effective_patience = std::max(cfg.patience, 1);

    for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
        const double loss = train_epoch(scorer, train_seq, cfg, epoch);

        // Probe a clone so the training state never advances through
        // validation (state rollback between epochs).
        const std::unique_ptr<Scorer> probe = scorer.clone();
        const RankResult val = streaming_evaluate(*probe, val_batches, val_negatives,
                                                  cfg.val_tie_policy);
        report.epochs.push_back({loss, val.mrr});

        if (val.mrr > best_mrr + cfg.tolerance) {
            best_mrr = val.mrr;
            report.best_epoch = epoch;
            report.best_weights = scorer.weights();
            bad_epochs = 0;
        } else {
            ++bad_epochs;
            if (bad_epochs >= effective_patience) break;
        }
    }

    scorer.set_weights(report.best_weights);
    scorer.reset_caches();
    return report;
}

void advance_through(Scorer& scorer, std::span<const Batch> batches) {
    for (const Batch& b : batches) scorer.observe(b);
}

}  // namespace tg
