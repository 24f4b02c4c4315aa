#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

#include "helpers.hpp"
#include "tg/scorers.hpp"

using namespace tg;

namespace {

Batch batch_of(const std::vector<std::array<std::int64_t, 3>>& rows) {
    Batch b;
    for (const auto& r : rows) {
        b.events.push_back(make_event(static_cast<NodeId>(r[0]), static_cast<NodeId>(r[1]), r[2]));
    }
    return b;
}

double softplus_ref(double z) {
    if (z > 0.0) return z + std::log1p(std::exp(-z));
    return std::log1p(std::exp(z));
}

double dot_ref(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double bce_loss(std::span<const double> w, std::span<const double> xp,
                std::span<const std::vector<double>> negs) {
    double loss = softplus_ref(-dot_ref(w, xp));
    for (const auto& xn : negs) loss += softplus_ref(dot_ref(w, xn));
    return loss;
}

}  // namespace

TEST_CASE("edgebank-inf memorizes pairs forever") {
    EdgeBankInf bank;
    CHECK(bank.name() == "edgebank-inf");
    CHECK(bank.score(LinkQuery{1, 2, 0}) == 0.0);
    CHECK(bank.param_checksum() == 0);

    bank.observe(batch_of({{1, 2, 5}, {3, 4, 6}}));
    CHECK(bank.score(LinkQuery{1, 2, 100}) == 1.0);
    CHECK(bank.score(LinkQuery{2, 1, 100}) == 0.0);  // direction matters
    CHECK(bank.score(LinkQuery{3, 4, 0}) == 1.0);    // time is ignored
    CHECK(bank.memory_size() == 2);

    bank.observe(batch_of({{1, 2, 9}}));
    CHECK(bank.memory_size() == 2);  // duplicates collapse
    CHECK(bank.score(LinkQuery{1, 2, 0}) == 1.0);

    bank.reset();
    CHECK(bank.score(LinkQuery{1, 2, 0}) == 0.0);
    CHECK(bank.memory_size() == 0);
}

TEST_CASE("edgebank scores never decay as memory grows") {
    std::mt19937_64 gen(13);
    const EventStream s = tgtest::random_stream(gen, 10, 60, 100);
    EdgeBankInf bank;
    std::vector<LinkQuery> probes;
    for (NodeId a = 0; a < 10; ++a)
        for (NodeId b = 0; b < 10; ++b) probes.push_back(LinkQuery{a, b, 0});
    std::vector<double> prev(probes.size(), 0.0);
    for (const Batch& b : event_batches(s, 10, false)) {
        bank.observe(b);
        const std::vector<double> now = bank.score_batch(probes);
        for (std::size_t i = 0; i < probes.size(); ++i) CHECK(now[i] >= prev[i]);
        prev = now;
    }
}

TEST_CASE("frozen scorers ignore observations") {
    EdgeBankInf bank;
    bank.freeze();
    CHECK(bank.frozen());
    bank.observe(batch_of({{1, 2, 5}}));
    CHECK(bank.score(LinkQuery{1, 2, 10}) == 0.0);
    CHECK(bank.memory_size() == 0);

    bank.unfreeze();
    bank.observe(batch_of({{1, 2, 5}}));
    CHECK(bank.score(LinkQuery{1, 2, 10}) == 1.0);
}

TEST_CASE("clones are independent of their source") {
    EdgeBankInf bank;
    bank.observe(batch_of({{1, 2, 5}}));
    const std::unique_ptr<Scorer> copy = bank.clone();
    bank.observe(batch_of({{3, 4, 6}}));
    CHECK(copy->score(LinkQuery{1, 2, 0}) == 1.0);
    CHECK(copy->score(LinkQuery{3, 4, 0}) == 0.0);
    CHECK(bank.score(LinkQuery{3, 4, 0}) == 1.0);
}

TEST_CASE("state checksums are insertion-order independent") {
    EdgeBankInf a;
    a.observe(batch_of({{1, 2, 0}, {3, 4, 1}, {5, 6, 2}}));
    EdgeBankInf b;
    b.observe(batch_of({{5, 6, 0}}));
    b.observe(batch_of({{3, 4, 1}, {1, 2, 2}}));
    CHECK(a.state_checksum() == b.state_checksum());

    b.observe(batch_of({{7, 8, 3}}));
    CHECK(a.state_checksum() != b.state_checksum());
}

TEST_CASE("edgebank-tw forgets pairs outside its window") {
    EdgeBankTw bank(10);
    CHECK(bank.name() == "edgebank-tw");
    CHECK(bank.window() == 10);
    bank.observe(batch_of({{1, 2, 5}}));

    CHECK(bank.score(LinkQuery{1, 2, 15}) == 1.0);  // 5 >= 15 - 10
    CHECK(bank.score(LinkQuery{1, 2, 16}) == 0.0);
    CHECK(bank.score(LinkQuery{1, 2, 20}) == 0.0);
    CHECK(bank.score(LinkQuery{1, 2, 5}) == 1.0);
    CHECK(bank.score(LinkQuery{2, 1, 5}) == 0.0);

    SUBCASE("re-observation refreshes the clock") {
        bank.observe(batch_of({{1, 2, 12}}));
        CHECK(bank.score(LinkQuery{1, 2, 20}) == 1.0);
        CHECK(bank.score(LinkQuery{1, 2, 23}) == 0.0);
    }
    SUBCASE("last-seen never moves backwards") {
        bank.observe(batch_of({{1, 2, 12}}));
        bank.observe(batch_of({{1, 2, 6}}));
        CHECK(bank.score(LinkQuery{1, 2, 22}) == 1.0);  // still anchored at 12
    }
    SUBCASE("reset clears the memory") {
        bank.reset();
        CHECK(bank.score(LinkQuery{1, 2, 5}) == 0.0);
    }
}

TEST_CASE("edgebank-tw window validation and translation invariance") {
    CHECK_THROWS_AS(EdgeBankTw(-1), ParameterError);
    CHECK_NOTHROW(EdgeBankTw(0));

    EdgeBankTw base(7);
    EdgeBankTw shifted(7);
    base.observe(batch_of({{1, 2, 5}, {2, 3, 9}}));
    shifted.observe(batch_of({{1, 2, 1005}, {2, 3, 1009}}));
    for (Time t = 9; t <= 25; ++t) {
        CHECK(base.score(LinkQuery{1, 2, t}) == shifted.score(LinkQuery{1, 2, t + 1000}));
        CHECK(base.score(LinkQuery{2, 3, t}) == shifted.score(LinkQuery{2, 3, t + 1000}));
    }
}

TEST_CASE("make_scorer dispatches on the model name") {
    CHECK(make_scorer("edgebank-inf")->name() == "edgebank-inf");
    CHECK(make_scorer("logistic")->name() == "logistic");
    const std::unique_ptr<Scorer> tw = make_scorer("edgebank-tw", 42);
    CHECK(dynamic_cast<EdgeBankTw&>(*tw).window() == 42);
    CHECK_THROWS_AS(make_scorer("gcn"), ParameterError);
}

TEST_CASE("logistic_score is a safe sigmoid of the feature dot product") {
    const std::vector<double> zero(5, 0.0);
    const std::vector<double> x0{1.0, 0.0, 0.0, 0.0, 0.0};
    CHECK(logistic_score(zero, x0) == 0.5);

    std::vector<double> w{std::log(3.0), 0.0, 0.0, 0.0, 0.0};
    CHECK(logistic_score(w, x0) == doctest::Approx(0.75).epsilon(1e-12));

    SUBCASE("saturation stays strictly inside (0, 1)") {
        w[0] = 1000.0;
        const double high = logistic_score(w, x0);
        CHECK(high < 1.0);
        CHECK(high > 0.99);
        w[0] = -1000.0;
        const double low = logistic_score(w, x0);
        CHECK(low > 0.0);
        CHECK(low < 0.01);
    }
    SUBCASE("dimension mismatch") {
        CHECK_THROWS_AS(logistic_score(zero, std::vector<double>{1.0, 2.0}), ParameterError);
    }
}

TEST_CASE("logistic_grad matches hand-worked cases") {
    const std::vector<double> zero(5, 0.0);
    const std::vector<double> e0{1.0, 0.0, 0.0, 0.0, 0.0};

    SUBCASE("positive only at w = 0") {
        const std::vector<double> g = logistic_grad(zero, e0, {});
        CHECK(g[0] == -0.5);  // (sigma(0) - 1) * 1
        for (std::size_t i = 1; i < g.size(); ++i) CHECK(g[i] == 0.0);
    }
    SUBCASE("identical positive and negative cancel at w = 0") {
        const std::vector<std::vector<double>> negs{e0};
        const std::vector<double> g = logistic_grad(zero, e0, negs);
        for (double gi : g) CHECK(gi == 0.0);
    }
    SUBCASE("well-separated saturation vanishes") {
        const std::vector<double> w{0.0, 50.0, 0.0, 0.0, 0.0};
        const std::vector<double> xp{0.0, 1.0, 0.0, 0.0, 0.0};
        const std::vector<std::vector<double>> negs{{0.0, -1.0, 0.0, 0.0, 0.0}};
        const std::vector<double> g = logistic_grad(w, xp, negs);
        double norm = 0.0;
        for (double gi : g) norm += gi * gi;
        CHECK(std::sqrt(norm) < 1e-6);
    }
    SUBCASE("dimension mismatch") {
        CHECK_THROWS_AS(logistic_grad(zero, std::vector<double>{1.0}, {}), ParameterError);
        const std::vector<std::vector<double>> bad{{1.0, 2.0}};
        CHECK_THROWS_AS(logistic_grad(zero, e0, bad), ParameterError);
    }
}

TEST_CASE("logistic_grad agrees with finite differences") {
    std::mt19937_64 gen(19);
    auto draw = [&]() { return static_cast<double>(gen() >> 11) * 0x1.0p-53 * 4.0 - 2.0; };
    const double h = 1e-6;
    for (int it = 0; it < 50; ++it) {
        std::vector<double> w(5), xp(5);
        std::vector<std::vector<double>> negs(2, std::vector<double>(5));
        for (auto& v : w) v = draw();
        for (auto& v : xp) v = draw();
        for (auto& n : negs)
            for (auto& v : n) v = draw();

        const std::vector<double> g = logistic_grad(w, xp, negs);
        for (std::size_t i = 0; i < w.size(); ++i) {
            std::vector<double> wp = w, wm = w;
            wp[i] += h;
            wm[i] -= h;
            const double fd = (bce_loss(wp, xp, negs) - bce_loss(wm, xp, negs)) / (2.0 * h);
            CHECK(g[i] == doctest::Approx(fd).epsilon(1e-5));
        }
    }
}

TEST_CASE("logistic features summarize the observed snapshots") {
    LogisticScorer scorer;

    SUBCASE("cold start is bias only") {
        const FeatureVector x = scorer.features(1, 2);
        CHECK(x[0] == 1.0);
        CHECK(x[1] == 0.0);
        CHECK(x[2] == 0.0);
        CHECK(x[3] == 0.0);
        CHECK(x[4] == 0.0);
        CHECK(scorer.score(LinkQuery{1, 2, 0}) == 0.5);  // zero weights
    }
    SUBCASE("pair count and recency after one snapshot") {
        scorer.observe(batch_of({{1, 2, 0}, {3, 2, 0}}));
        CHECK(scorer.snapshots_observed() == 1);
        const FeatureVector x = scorer.features(1, 2);
        // log1p expectations go through Approx: the compiler folds the constant
        // to the correctly rounded value, which can sit one ulp from libm.
        CHECK(x[1] == doctest::Approx(std::log1p(1.0)).epsilon(1e-15));
        CHECK(x[2] == 1.0);  // seen in the immediately previous snapshot
        CHECK(x[3] == 0.0);  // neighbors {2} and {1,3} share nothing
        CHECK(x[4] == doctest::Approx(std::log1p(2.0)).epsilon(1e-15));  // deg(1)=1, deg(2)=2
    }
    SUBCASE("recency decays per snapshot while count persists") {
        scorer.observe(batch_of({{1, 2, 0}}));
        scorer.observe(batch_of({{4, 5, 1}}));
        const FeatureVector x = scorer.features(1, 2);
        CHECK(x[1] == doctest::Approx(std::log1p(1.0)).epsilon(1e-15));
        CHECK(x[2] == 0.5);  // one full snapshot since last seen
        scorer.observe(batch_of({{4, 5, 2}}));
        CHECK(scorer.features(1, 2)[2] == doctest::Approx(1.0 / 3.0));
    }
    SUBCASE("repetition raises the count and refreshes recency") {
        scorer.observe(batch_of({{1, 2, 0}}));
        scorer.observe(batch_of({{1, 2, 1}}));
        const FeatureVector x = scorer.features(1, 2);
        CHECK(x[1] == doctest::Approx(std::log1p(2.0)).epsilon(1e-15));
        CHECK(x[2] == 1.0);
    }
    SUBCASE("common neighbors come from the previous snapshot only") {
        scorer.observe(batch_of({{1, 5, 0}, {1, 6, 0}, {1, 7, 0}, {2, 5, 0}, {2, 6, 0}, {2, 7, 0}}));
        const FeatureVector x = scorer.features(1, 2);
        CHECK(x[3] == doctest::Approx(std::log1p(3.0)).epsilon(1e-15));  // 5, 6, 7 shared
        CHECK(x[4] == doctest::Approx(std::log1p(9.0)).epsilon(1e-15));  // deg 3 * deg 3
        CHECK(x[1] == 0.0);                   // the pair itself never occurred

        // The next snapshot wipes the adjacency but not the pair memory.
        scorer.observe(batch_of({{8, 9, 1}}));
        const FeatureVector y = scorer.features(1, 2);
        CHECK(y[3] == 0.0);
        CHECK(y[4] == 0.0);
    }
    SUBCASE("neighborhoods are undirected") {
        scorer.observe(batch_of({{5, 1, 0}, {2, 5, 0}}));
        CHECK(scorer.features(1, 2)[3] == doctest::Approx(std::log1p(1.0)).epsilon(1e-15));  // shared neighbor 5
    }
}

TEST_CASE("logistic score equals the explicit feature evaluation") {
    std::mt19937_64 gen(23);
    LogisticScorer scorer;
    scorer.set_weights({0.3, -1.2, 0.8, 0.05, -0.4});
    const EventStream s = tgtest::random_stream(gen, 12, 80, 40);
    for (const Batch& b : event_batches(s, 16, false)) {
        scorer.observe(b);
        for (NodeId a = 0; a < 6; ++a) {
            for (NodeId d = 6; d < 12; ++d) {
                const FeatureVector x = scorer.features(a, d);
                CHECK(scorer.score(LinkQuery{a, d, 0}) ==
                      logistic_score(scorer.weights(), x));
            }
        }
    }
}

TEST_CASE("logistic scorer state management") {
    LogisticScorer scorer;
    scorer.set_weights({0.1, 0.2, 0.3, 0.4, 0.5});
    const std::uint64_t params = scorer.param_checksum();
    scorer.observe(batch_of({{1, 2, 0}}));
    scorer.observe(batch_of({{2, 3, 1}}));

    SUBCASE("param checksum tracks only the weights") {
        CHECK(scorer.param_checksum() == params);
        LogisticScorer other;
        CHECK(other.param_checksum() != params);
        other.set_weights({0.1, 0.2, 0.3, 0.4, 0.5});
        CHECK(other.param_checksum() == params);
    }
    SUBCASE("reset_caches keeps the weights") {
        const std::uint64_t full = scorer.state_checksum();
        scorer.reset_caches();
        CHECK(scorer.snapshots_observed() == 0);
        CHECK(scorer.param_checksum() == params);
        CHECK(scorer.state_checksum() != full);
        CHECK(scorer.features(1, 2) == FeatureVector{1.0, 0.0, 0.0, 0.0, 0.0});
    }
    SUBCASE("reset clears everything") {
        scorer.reset();
        CHECK(scorer.weights() == FeatureVector{0.0, 0.0, 0.0, 0.0, 0.0});
        CHECK(scorer.snapshots_observed() == 0);
    }
    SUBCASE("clone carries caches and weights but diverges after") {
        const std::unique_ptr<Scorer> copy = scorer.clone();
        CHECK(copy->state_checksum() == scorer.state_checksum());
        scorer.observe(batch_of({{5, 6, 2}}));
        CHECK(copy->state_checksum() != scorer.state_checksum());
        CHECK(copy->param_checksum() == scorer.param_checksum());
    }
}
