#pragma once

#include <string>
#include <vector>

#include "tg/discretize.hpp"
#include "tg/eval.hpp"
#include "tg/scorers.hpp"

namespace tg {

enum class TrainMode {
    per_snapshot,  // gradient step after every snapshot
    accumulated,   // gradients summed, one step per epoch
};

TrainMode train_mode_from_name(const std::string& name);
std::string train_mode_name(TrainMode mode);

struct TrainConfig {
    int max_epochs = 200;
    int patience = 20;
    double tolerance = 1e-5;
    double learning_rate = 0.001;
    TrainMode mode = TrainMode::per_snapshot;
    int train_negatives = 1;  // uniform random destinations per positive
    std::uint64_t seed = 0;
    std::int32_t val_q = 0;  // negatives per validation positive; 0 = auto
    TiePolicy val_tie_policy = TiePolicy::pessimistic;

    void validate() const;
};

// One pass over the train sequence in the configured mode: for each
// snapshot t >= 1, features come from state through snapshot t-1, the
// sampled-negative cross-entropy is evaluated at the weights in effect,
// and the snapshot is then absorbed into the caches. per_snapshot applies
// each gradient immediately; accumulated applies their sum once at the
// end. Returns the mean per-snapshot loss. Caches are reset on entry;
// weights carry over between epochs. Throws TrainError on a sequence with
// fewer than two snapshots or no positives to fit.
double train_epoch(LogisticScorer& scorer, const SnapshotSequence& train_seq,
                   const TrainConfig& cfg, int epoch);

struct EpochRecord {
    double loss = 0.0;
    double val_mrr = 0.0;
};

struct FitReport {
    std::vector<EpochRecord> epochs;
    int best_epoch = 0;
    FeatureVector best_weights{};
};

// Runs train_epoch up to max_epochs times, streaming-evaluating validation
// MRR after each epoch on a throwaway clone (the training state itself is
// never advanced through validation). Stops once the best MRR has not
// improved by more than tolerance for max(patience, 1) consecutive epochs.
// Leaves the scorer holding the best epoch's weights with empty caches.
FitReport fit(LogisticScorer& scorer, const SnapshotSequence& train_seq,
              const SnapshotSequence& val_seq, const TrainConfig& cfg);

// Observes every batch in order; used to bring a scorer's state up to the
// evaluation boundary.
void advance_through(Scorer& scorer, std::span<const Batch> batches);

}  // namespace tg
