#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <sstream>

#include "confsd/conformal.hpp"
#include "support.hpp"

using namespace confsd;

namespace {

// Nodes v1..v6 of the figures, with strictly decreasing probabilities.
ProbVector figure_probs() { return ProbVector({0.35, 0.25, 0.15, 0.12, 0.08, 0.05}); }

CalibrationSample cal(std::vector<double> pi, NodeSet y) { return {ProbVector(std::move(pi)), std::move(y)}; }

} // namespace

TEST_CASE("gamma") {
    const auto pi = figure_probs();
    SUBCASE("figure 1: {v1,v2,v4} closes to {v1..v4}") {
        CHECK(gamma(pi, NodeSet{0, 1, 3}) == NodeSet{0, 1, 2, 3});
    }
    SUBCASE("unique maximum maps to itself") { CHECK(gamma(pi, NodeSet{0}) == NodeSet{0}); }
    SUBCASE("whole node set") { CHECK(gamma(pi, NodeSet{0, 1, 2, 3, 4, 5}) == NodeSet{0, 1, 2, 3, 4, 5}); }
    SUBCASE("ties enter together") {
        ProbVector tied({0.5, 0.3, 0.3, 0.1});
        CHECK(gamma(tied, NodeSet{1}) == NodeSet{0, 1, 2});
        CHECK(gamma(tied, NodeSet{2}) == NodeSet{0, 1, 2});
    }
    CHECK_THROWS_AS(gamma(pi, NodeSet{}), ValidationError);
    CHECK_THROWS_AS(gamma(pi, NodeSet{6}), ValidationError);
}

TEST_CASE("scores on a three-node example") {
    ProbVector pi({0.5, 0.3, 0.2});
    const NodeSet u{1};
    // gamma = {v1, v2}
    CHECK(score(ScoreKind::Precision, pi, u) == doctest::Approx(-0.4).epsilon(1e-15));
    CHECK(score(ScoreKind::Recall, pi, u) == doctest::Approx(0.8).epsilon(1e-15));
    CHECK(score(ScoreKind::Min, pi, u) == -0.3);
    CHECK(score(ScoreKind::Recall, pi, NodeSet{0, 1, 2}) == 1.0);
    CHECK(score(ScoreKind::Min, pi, NodeSet{2}) == -0.2);
    for (auto kind : kAllScoreKinds) CHECK_THROWS_AS(score(kind, pi, NodeSet{}), ValidationError);
}

TEST_CASE("s_rec of the full set is 1 for any vector") {
    Rng rng(1);
    for (int rep = 0; rep < 200; ++rep) {
        auto n = static_cast<std::size_t>(rng.between(1, 50));
        auto pi = testing::random_probs(rng, n);
        NodeSet all(n);
        std::iota(all.begin(), all.end(), 0);
        CHECK(score(ScoreKind::Recall, pi, all) == 1.0);
    }
}

TEST_CASE("score kinds parse and print") {
    for (auto kind : kAllScoreKinds) CHECK(parse_score_kind(to_string(kind)) == kind);
    CHECK_THROWS_AS(parse_score_kind("max"), ValidationError);
}

TEST_CASE("nominal levels") {
    CHECK_NOTHROW(NominalLevels(0.1, 0.0));
    CHECK_THROWS_AS(NominalLevels(0.0, 0.1), ValidationError);
    CHECK_THROWS_AS(NominalLevels(1.0, 0.1), ValidationError);
    CHECK_THROWS_AS(NominalLevels(0.1, 1.0), ValidationError);
    CHECK_THROWS_AS(NominalLevels(0.1, -0.1), ValidationError);
}

TEST_CASE("shrink") {
    const auto pi = figure_probs();
    SUBCASE("figure 2: beta = 1/3 keeps {v1, v2}") { CHECK(shrink(pi, NodeSet{0, 1, 3}, 1.0 / 3.0) == NodeSet{0, 1}); }
    SUBCASE("beta = 0 keeps everything") { CHECK(shrink(pi, NodeSet{1, 4, 5}, 0.0) == NodeSet{1, 4, 5}); }
    SUBCASE("a single source survives any beta") {
        for (double beta : {0.0, 0.5, 0.99}) CHECK(shrink(pi, NodeSet{4}, beta) == NodeSet{4});
    }
    SUBCASE("ties go to the smaller id") {
        ProbVector tied({0.2, 0.2, 0.2, 0.9});
        CHECK(shrink(tied, NodeSet{0, 1, 2}, 0.5) == NodeSet{0, 1});
        CHECK(shrink(tied, NodeSet{0, 2, 3}, 0.5) == NodeSet{0, 3});
    }
    SUBCASE("exact boundary counts") {
        // ceil(0.7 * 10) = 7 even though 0.7 * 10 rounds to 7.000000000000001
        NodeSet y(10);
        std::iota(y.begin(), y.end(), 0);
        ProbVector flat(std::vector<double>(12, 0.5));
        CHECK(shrink(flat, y, 0.3).size() == 7);
        CHECK(required_count(10, 0.3) == 7);
        CHECK(required_count(3, 1.0 / 3.0) == 2);
        CHECK(required_count(1, 0.99) == 1);
        CHECK(required_count(5, 0.0) == 5);
    }
    CHECK_THROWS_AS(shrink(pi, NodeSet{}, 0.1), ValidationError);
}

TEST_CASE("finite-sample quantile") {
    std::vector<double> nine{9, 3, 1, 7, 5, 2, 8, 4, 6};
    CHECK(finite_sample_quantile(nine, 0.1) == 9.0);  // k = ceil(0.9 * 10) = 9
    CHECK(finite_sample_quantile(nine, 0.5) == 5.0);  // k = 5
    CHECK(finite_sample_quantile(nine, 0.05) == kInf); // k = 10 > 9
    CHECK(finite_sample_quantile(std::vector<double>{3.5}, 0.5) == 3.5);
    CHECK(finite_sample_quantile(std::vector<double>{1, 2, 3, 4, 5}, 0.01) == kInf);
    // (1 - 0.2) * 5 = 4.000000000000001 must still give rank 4
    CHECK(finite_sample_quantile(std::vector<double>{1, 2, 3, 4}, 0.2) == 4.0);
    CHECK_THROWS_AS(finite_sample_quantile(std::vector<double>{}, 0.1), ValidationError);
}

TEST_CASE("calibrate") {
    SUBCASE("one sample at alpha = 0.5 gives its shrunken score") {
        std::vector<CalibrationSample> one{cal({0.6, 0.1, 0.4, 0.2}, {1, 2})};
        auto model = calibrate(one, ScoreKind::Recall, NominalLevels(0.5, 0.5));
        // nu keeps v3 (0.4); gamma = {v1, v3}
        CHECK(model.q_hat == score(ScoreKind::Recall, one[0].pi, NodeSet{2}));
        CHECK(model.n_cal == 1);
        CHECK(calibrate(one, ScoreKind::Recall, NominalLevels(0.4, 0.5)).q_hat == kInf);
    }
    SUBCASE("beta = 0 scores the raw source sets") {
        Rng rng(3);
        std::vector<CalibrationSample> samples;
        std::vector<double> raw;
        for (int i = 0; i < 30; ++i) {
            auto pi = testing::random_probs(rng, 15);
            auto y = testing::random_subset(rng, 15);
            raw.push_back(score(ScoreKind::Precision, pi, y));
            samples.push_back({pi, y});
        }
        auto model = calibrate(samples, ScoreKind::Precision, NominalLevels(0.2, 0.0));
        CHECK(model.q_hat == finite_sample_quantile(raw, 0.2));
        CHECK(std::find(raw.begin(), raw.end(), model.q_hat) != raw.end());
    }
    SUBCASE("deterministic") {
        Rng rng(4);
        std::vector<CalibrationSample> samples;
        for (int i = 0; i < 100; ++i) samples.push_back({testing::random_probs(rng, 20, 0.0), testing::random_subset(rng, 20)});
        auto a = calibrate(samples, ScoreKind::Min, NominalLevels(0.1, 0.3));
        auto b = calibrate(samples, ScoreKind::Min, NominalLevels(0.1, 0.3));
        CHECK(a.q_hat == b.q_hat);
    }
    CHECK_THROWS_AS(calibrate(std::vector<CalibrationSample>{}, ScoreKind::Min, NominalLevels(0.1, 0.0)), ValidationError);
}

TEST_CASE("predict") {
    const auto pi = figure_probs();
    SUBCASE("infinite threshold returns every node") {
        ConformalModel m;
        m.q_hat = kInf;
        CHECK(predict(m, pi).nodes.size() == 6);
    }
    SUBCASE("threshold on a singleton score cuts right after that node") {
        ConformalModel m;
        m.score = ScoreKind::Min;
        m.q_hat = -0.15;
        CHECK(predict(m, pi).nodes == NodeSet{0, 1, 2});
        m.q_hat = -0.36;
        CHECK(predict(m, pi).nodes.empty());
    }
    SUBCASE("perfect separator recovers exactly Y") {
        // noise-free oracle with |Y| = 2 everywhere
        std::vector<CalibrationSample> samples;
        Rng rng(5);
        for (int i = 0; i < 50; ++i) {
            auto y = rng.choose(10, 2);
            std::vector<double> p(10, 0.0);
            for (auto v : y) p[static_cast<std::size_t>(v)] = 1.0;
            samples.push_back({ProbVector(p), y});
        }
        std::vector<double> test(10, 0.0);
        test[3] = test[8] = 1.0;
        for (auto kind : {ScoreKind::Precision, ScoreKind::Min}) {
            auto model = calibrate(samples, kind, NominalLevels(0.1, 0.0));
            REQUIRE(model.q_hat != kInf);
            CHECK(predict(model, ProbVector(test)).nodes == NodeSet{3, 8});
        }
    }
}

TEST_CASE("prediction sets are closed upward in probability") {
    Rng rng(6);
    for (int rep = 0; rep < 300; ++rep) {
        auto n = static_cast<std::size_t>(rng.between(1, 30));
        auto pi = testing::random_probs(rng, n, 0.5);
        ConformalModel m;
        m.score = kAllScoreKinds[rng.below(3)];
        RankedScores ranked(m.score, pi);
        m.q_hat = ranked.singleton_score(static_cast<NodeId>(rng.below(n)));
        auto c = predict(m, pi).nodes;
        for (NodeId v : c)
            for (NodeId u = 0; u < static_cast<NodeId>(n); ++u)
                if (pi[u] >= pi[v]) CHECK(std::binary_search(c.begin(), c.end(), u));
    }
}

TEST_CASE("conformal risk control") {
    SUBCASE("n = 1 needs alpha >= 1/2 for a finite lambda") {
        std::vector<CalibrationSample> one{cal({0.9, 0.4, 0.1}, {0, 1})};
        CHECK(crc_calibrate(one, NominalLevels(0.49, 0.0)).lambda == kInf);
        auto t = crc_calibrate(one, NominalLevels(0.5, 0.0));
        CHECK(t.prob_cutoff == 0.4);
        CHECK(t.lambda == doctest::Approx(0.6));
        CHECK(crc_predict(t, one[0].pi) == NodeSet{0, 1});
    }
    SUBCASE("infinite lambda predicts every node") {
        CHECK(crc_predict(CrcThreshold{}, ProbVector({0.0, 0.2})) == NodeSet{0, 1});
    }
    SUBCASE("well separated samples give a finite lambda") {
        std::vector<CalibrationSample> samples;
        Rng rng(2);
        for (int i = 0; i < 200; ++i) {
            auto y = rng.choose(20, 3);
            std::vector<double> p(20);
            for (auto& x : p) x = rng.uniform(0.0, 0.3);
            for (auto v : y) p[static_cast<std::size_t>(v)] = rng.uniform(0.7, 1.0);
            samples.push_back({ProbVector(p), y});
        }
        auto t = crc_calibrate(samples, NominalLevels(0.1, 0.0));
        CHECK(t.lambda < 0.31);
        CHECK(t.prob_cutoff >= 0.7);
    }
}

TEST_CASE("cqioc") {
    SUBCASE("single node") {
        ProbVector pi({0.4});
        CHECK(cqioc_bruteforce(pi, -0.5, ScoreKind::Min).empty());
        CHECK(cqioc_bruteforce(pi, -0.4, ScoreKind::Min) == NodeSet{0});
    }
    SUBCASE("minimum over supersets is the singleton gamma score") {
        Rng rng(8);
        for (int rep = 0; rep < 50; ++rep) {
            auto pi = testing::random_probs(rng, 8);
            for (auto kind : kAllScoreKinds) {
                auto mins = cqioc_min_scores(pi, kind);
                for (NodeId v = 0; v < 8; ++v) {
                    auto g = gamma(pi, NodeSet{v});
                    CHECK(mins[static_cast<std::size_t>(v)] == direct_score(kind, pi, g));
                }
            }
        }
    }
    CHECK_THROWS_AS(cqioc_bruteforce(ProbVector(std::vector<double>(17, 0.5)), 0.0, ScoreKind::Min), ValidationError);
}

TEST_CASE("evaluate_set") {
    SUBCASE("exact hit") {
        auto e = evaluate_set(NodeSet{2, 5}, NodeSet{2, 5}, 0.0);
        CHECK(e.precision == 1.0);
        CHECK(e.recall == 1.0);
        CHECK(e.included);
    }
    SUBCASE("full set") {
        NodeSet all(100);
        std::iota(all.begin(), all.end(), 0);
        auto e = evaluate_set(all, NodeSet{1, 2, 3, 4, 5}, 0.0);
        CHECK(e.recall == 1.0);
        CHECK(e.precision == doctest::Approx(0.05));
    }
    SUBCASE("7 of 10 at beta = 0.3 is included") {
        NodeSet y(10);
        std::iota(y.begin(), y.end(), 0);
        auto e = evaluate_set(NodeSet{0, 1, 2, 3, 4, 5, 6, 20}, y, 0.3);
        CHECK(e.hits == 7);
        CHECK(e.included);
        CHECK_FALSE(evaluate_set(NodeSet{0, 1, 2, 3, 4, 5}, y, 0.3).included);
    }
    SUBCASE("empty set") {
        auto e = evaluate_set(NodeSet{}, NodeSet{1}, 0.5);
        CHECK(e.precision == 0.0);
        CHECK(e.recall == 0.0);
        CHECK_FALSE(e.included);
    }
}

TEST_CASE("model files") {
    ConformalModel m;
    m.score = ScoreKind::Precision;
    m.levels = NominalLevels(0.1, 0.3);
    m.q_hat = -0.123456789012345678;
    m.n_cal = 42;
    std::stringstream buf;
    write_model(buf, m, {{"estimator", "heuristic"}}, "confsd test");
    CHECK(buf.str().rfind("# confsd test\n", 0) == 0);
    std::map<std::string, std::string> extra;
    auto back = read_model(buf, &extra);
    CHECK(back.score == m.score);
    CHECK(back.q_hat == m.q_hat);
    CHECK(back.levels.alpha() == 0.1);
    CHECK(back.levels.beta() == 0.3);
    CHECK(back.n_cal == 42);
    CHECK(extra.at("estimator") == "heuristic");

    m.q_hat = kInf;
    std::stringstream inf_buf;
    write_model(inf_buf, m);
    CHECK(inf_buf.str().find("q_hat=inf") != std::string::npos);
    CHECK(read_model(inf_buf).q_hat == kInf);

    std::stringstream bad("score_kind=rec\nalpha=0.1\nbeta=0\nn_cal=3\n");
    CHECK_THROWS_AS(read_model(bad), ValidationError);
    std::stringstream bad2("score_kind=rec\nalpha=2\nbeta=0\nq_hat=1\nn_cal=3\n");
    CHECK_THROWS_AS(read_model(bad2), ValidationError);
}
