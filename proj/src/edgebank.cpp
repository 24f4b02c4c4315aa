#include "tg/rng.hpp"
#include "tg/scorers.hpp"

namespace tg {

std::vector<double> Scorer::score_batch(std::span<const LinkQuery> queries) const {
    std::vector<double> out;
    out.reserve(queries.size());
    for (const LinkQuery& q : queries) out.push_back(score(q));
    return out;
}

double EdgeBankInf::score(const LinkQuery& q) const {
    return memory_.contains(pair_key(q.src, q.dst)) ? 1.0 : 0.0;
}

void EdgeBankInf::observe_impl(const Batch& batch) {
    for (const Event& e : batch.events) {
        memory_.insert(pair_key(e.src, e.dst));
    }
}

std::uint64_t EdgeBankInf::state_checksum() const {
    std::uint64_t acc = memory_.size();
    for (std::uint64_t k : memory_) acc += splitmix64(k);
    return acc;
}

EdgeBankTw::EdgeBankTw(Duration window) : window_(window) {
    if (window < 0) throw ParameterError("edgebank-tw window must be >= 0");
}

double EdgeBankTw::score(const LinkQuery& q) const {
    auto it = last_seen_.find(pair_key(q.src, q.dst));
    if (it == last_seen_.end()) return 0.0;
    return it->second >= q.t - window_ ? 1.0 : 0.0;
}

void EdgeBankTw::observe_impl(const Batch& batch) {
    for (const Event& e : batch.events) {
        Time& slot = last_seen_[pair_key(e.src, e.dst)];
        slot = std::max(slot, e.t_start);
    }
}

std::uint64_t EdgeBankTw::state_checksum() const {
    std::uint64_t acc = last_seen_.size();
    for (const auto& [k, t] : last_seen_) {
        acc += splitmix64(k ^ splitmix64(static_cast<std::uint64_t>(t)));
    }
    return acc;
}

std::unique_ptr<Scorer> make_scorer(const std::string& model, Duration tw_window) {
    if (model == "edgebank-inf") return std::make_unique<EdgeBankInf>();
    if (model == "edgebank-tw") return std::make_unique<EdgeBankTw>(tw_window);
    if (model == "logistic") return std::make_unique<LogisticScorer>();
    throw ParameterError("unknown model '" + model +
                         "' (expected edgebank-inf|edgebank-tw|logistic)");
}

}  // namespace tg
