#pragma once

#include <array>
#include <memory>
#include <span>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "tg/discretize.hpp"
#include "tg/types.hpp"

namespace tg {

// Contract shared by every edge scorer. Scoring never mutates state;
// observe() ingests a batch after its predictions were recorded
// (predict-then-update). A frozen scorer ignores observe() entirely
// (deployed mode); unfrozen scorers absorb test batches (streaming mode).
class Scorer {
public:
    virtual ~Scorer() = default;

    virtual std::string name() const = 0;
    virtual double score(const LinkQuery& q) const = 0;
    std::vector<double> score_batch(std::span<const LinkQuery> queries) const;

    void observe(const Batch& batch) {
        if (!frozen_) observe_impl(batch);
    }
    void freeze() { frozen_ = true; }
    void unfreeze() { frozen_ = false; }
    bool frozen() const { return frozen_; }

    virtual void reset() = 0;
    virtual std::unique_ptr<Scorer> clone() const = 0;

    // Order-independent digest of all mutable state (memories, caches,
    // weights). Used to verify deployed-mode immutability.
    virtual std::uint64_t state_checksum() const = 0;
    // Digest of trainable parameters only; must stay constant through any
    // evaluation. Non-parametric scorers return a fixed value.
    virtual std::uint64_t param_checksum() const = 0;

protected:
    virtual void observe_impl(const Batch& batch) = 0;

private:
    bool frozen_ = false;
};

// Memorizes every (src, dst) pair ever observed; score is 1 iff the queried
// pair is in memory.
class EdgeBankInf final : public Scorer {
public:
    std::string name() const override { return "edgebank-inf"; }
    double score(const LinkQuery& q) const override;
    void reset() override { memory_.clear(); }
    std::unique_ptr<Scorer> clone() const override { return std::make_unique<EdgeBankInf>(*this); }
    std::uint64_t state_checksum() const override;
    std::uint64_t param_checksum() const override { return 0; }

    std::size_t memory_size() const { return memory_.size(); }

protected:
    void observe_impl(const Batch& batch) override;

private:
    std::unordered_set<std::uint64_t> memory_;
};

// Remembers the last-seen time of each pair; score is 1 iff the pair was
// seen within `window` ticks of the query time.
class EdgeBankTw final : public Scorer {
public:
    explicit EdgeBankTw(Duration window);

    std::string name() const override { return "edgebank-tw"; }
    double score(const LinkQuery& q) const override;
    void reset() override { last_seen_.clear(); }
    std::unique_ptr<Scorer> clone() const override { return std::make_unique<EdgeBankTw>(*this); }
    std::uint64_t state_checksum() const override;
    std::uint64_t param_checksum() const override { return 0; }

    Duration window() const { return window_; }

protected:
    void observe_impl(const Batch& batch) override;

private:
    Duration window_;
    std::unordered_map<std::uint64_t, Time> last_seen_;
};

inline constexpr std::size_t kLogisticFeatureDim = 5;
using FeatureVector = std::array<double, kLogisticFeatureDim>;

// sigma(w . x) with overflow-safe saturation.
double logistic_score(std::span<const double> weights, std::span<const double> features);

// Gradient of the sampled binary cross-entropy for one positive and its
// negatives: (sigma(w.x_pos) - 1) x_pos + sum_neg sigma(w.x_neg) x_neg.
std::vector<double> logistic_grad(std::span<const double> weights,
                                  std::span<const double> pos_features,
                                  std::span<const std::vector<double>> neg_features);

// Gradient-trained snapshot scorer over hand-rolled recurrence features.
// Scoring snapshot t uses caches reflecting snapshots 0..t-1 only, so a
// prediction never sees the structure it predicts.
class LogisticScorer final : public Scorer {
public:
    LogisticScorer() { weights_.fill(0.0); }

    std::string name() const override { return "logistic"; }
    double score(const LinkQuery& q) const override;
    void reset() override;          // weights and caches
    void reset_caches();            // caches only; weights survive epochs
    std::unique_ptr<Scorer> clone() const override {
        return std::make_unique<LogisticScorer>(*this);
    }
    std::uint64_t state_checksum() const override;
    std::uint64_t param_checksum() const override;

    // [bias, log1p(pair count), 1/(1 + snapshots since last seen) or 0,
    //  log1p(common neighbors in previous snapshot),
    //  log1p(deg(src) * deg(dst) in previous snapshot)]
    FeatureVector features(NodeId src, NodeId dst) const;

    const FeatureVector& weights() const { return weights_; }
    void set_weights(const FeatureVector& w) { weights_ = w; }
    std::int64_t snapshots_observed() const { return observed_; }

protected:
    void observe_impl(const Batch& batch) override;

private:
    const std::vector<NodeId>* neighbors_of(NodeId n) const;

    FeatureVector weights_{};
    std::unordered_map<std::uint64_t, std::int64_t> pair_count_;
    std::unordered_map<std::uint64_t, std::int64_t> pair_last_seen_;  // snapshot index
    std::unordered_map<NodeId, std::vector<NodeId>> prev_adjacency_;  // sorted, undirected
    std::int64_t observed_ = 0;  // snapshots absorbed so far
};

// Constructs a scorer by CLI name; edgebank-tw takes the window argument.
std::unique_ptr<Scorer> make_scorer(const std::string& model, Duration tw_window = 0);

}  // namespace tg
