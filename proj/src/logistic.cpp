#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>

#include "tg/rng.hpp"
#include "tg/scorers.hpp"

namespace tg {

namespace {

double sigmoid(double z) {
    if (z >= 0.0) {
        return 1.0 / (1.0 + std::exp(-z));
    }
    const double e = std::exp(z);
    return e / (1.0 + e);
}

double dot(std::span<const double> w, std::span<const double> x) {
    double acc = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) acc += w[i] * x[i];
    return acc;
}

std::uint64_t hash_double(double v) {
    std::uint64_t bits;
    static_assert(sizeof(bits) == sizeof(v));
    std::memcpy(&bits, &v, sizeof(bits));
    return splitmix64(bits);
}

}  // namespace

double logistic_score(std::span<const double> weights, std::span<const double> features) {
    if (weights.size() != features.size()) {
        throw ParameterError("logistic_score: dimension mismatch");
    }
    // Keep probabilities strictly inside (0,1) even at saturation so that
    // ranking against other scores stays well defined.
    const double p = sigmoid(dot(weights, features));
    const double lo = std::numeric_limits<double>::min();
    const double hi = std::nextafter(1.0, 0.0);
    return std::clamp(p, lo, hi);
}

std::vector<double> logistic_grad(std::span<const double> weights,
                                  std::span<const double> pos_features,
                                  std::span<const std::vector<double>> neg_features) {
    if (weights.size() != pos_features.size()) {
        throw ParameterError("logistic_grad: dimension mismatch");
    }
    std::vector<double> grad(weights.size(), 0.0);
    const double p = sigmoid(dot(weights, pos_features));
    for (std::size_t i = 0; i < grad.size(); ++i) {
        grad[i] += (p - 1.0) * pos_features[i];
    }
    for (const auto& xn : neg_features) {
        if (xn.size() != weights.size()) {
            throw ParameterError("logistic_grad: dimension mismatch");
        }
        const double pn = sigmoid(dot(weights, xn));
        for (std::size_t i = 0; i < grad.size(); ++i) {
            grad[i] += pn * xn[i];
        }
    }
    return grad;
}

FeatureVector LogisticScorer::features(NodeId src, NodeId dst) const {
    FeatureVector x{};
    x[0] = 1.0;

    const std::uint64_t key = pair_key(src, dst);
    if (auto it = pair_count_.find(key); it != pair_count_.end()) {
        x[1] = std::log1p(static_cast<double>(it->second));
    }
    if (auto it = pair_last_seen_.find(key); it != pair_last_seen_.end()) {
        // Scoring snapshot `observed_`; a pair from the immediately previous
        // snapshot has zero snapshots in between.
        const std::int64_t since = (observed_ - 1) - it->second;
        x[2] = 1.0 / (1.0 + static_cast<double>(since));
    }

    const std::vector<NodeId>* ns = neighbors_of(src);
    const std::vector<NodeId>* nd = neighbors_of(dst);
    if (ns && nd) {
        std::size_t common = 0;
        auto a = ns->begin();
        auto b = nd->begin();
        while (a != ns->end() && b != nd->end()) {
            if (*a < *b) {
                ++a;
            } else if (*b < *a) {
                ++b;
            } else {
                ++common;
                ++a;
                ++b;
            }
        }
        x[3] = std::log1p(static_cast<double>(common));
    }
    const double deg_s = ns ? static_cast<double>(ns->size()) : 0.0;
    const double deg_d = nd ? static_cast<double>(nd->size()) : 0.0;
    x[4] = std::log1p(deg_s * deg_d);
    return x;
}

double LogisticScorer::score(const LinkQuery& q) const {
    const FeatureVector x = features(q.src, q.dst);
    return logistic_score(std::span<const double>(weights_), std::span<const double>(x));
}

void LogisticScorer::observe_impl(const Batch& batch) {
    for (const Event& e : batch.events) {
        const std::uint64_t key = pair_key(e.src, e.dst);
        pair_count_[key] += 1;
        pair_last_seen_[key] = observed_;
    }
    // The batch just absorbed becomes "the previous snapshot" for the next
    // round of scoring; neighborhoods are undirected and deduplicated.
    prev_adjacency_.clear();
    for (const Event& e : batch.events) {
        prev_adjacency_[e.src].push_back(e.dst);
        prev_adjacency_[e.dst].push_back(e.src);
    }
    for (auto& [node, neigh] : prev_adjacency_) {
        std::sort(neigh.begin(), neigh.end());
        neigh.erase(std::unique(neigh.begin(), neigh.end()), neigh.end());
    }
    ++observed_;
}

const std::vector<NodeId>* LogisticScorer::neighbors_of(NodeId n) const {
    auto it = prev_adjacency_.find(n);
    return it == prev_adjacency_.end() ? nullptr : &it->second;
}

void LogisticScorer::reset() {
    weights_.fill(0.0);
    reset_caches();
}

void LogisticScorer::reset_caches() {
    pair_count_.clear();
    pair_last_seen_.clear();
    prev_adjacency_.clear();
    observed_ = 0;
}

std::uint64_t LogisticScorer::state_checksum() const {
    std::uint64_t acc = param_checksum() + static_cast<std::uint64_t>(observed_);
    for (const auto& [k, v] : pair_count_) {
        acc += splitmix64(k ^ splitmix64(static_cast<std::uint64_t>(v) * 3));
    }
    for (const auto& [k, v] : pair_last_seen_) {
        acc += splitmix64(k ^ splitmix64(static_cast<std::uint64_t>(v) * 7));
    }
    for (const auto& [node, neigh] : prev_adjacency_) {
        std::uint64_t h = splitmix64(static_cast<std::uint64_t>(node));
        for (NodeId n : neigh) h = splitmix64(h ^ static_cast<std::uint64_t>(n));
        acc += h;
    }
    return acc;
}

std::uint64_t LogisticScorer::param_checksum() const {
    std::uint64_t acc = 0;
    for (double w : weights_) acc = splitmix64(acc ^ hash_double(w));
    return acc;
}

}  // namespace tg
