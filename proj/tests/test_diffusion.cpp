#include <doctest.h>

#include <algorithm>
#include <set>
#include <vector>

#include "confsd/diffusion.hpp"
#include "confsd/graph.hpp"
#include "support.hpp"

using namespace confsd;

namespace {

Graph star(std::size_t leaves) {
    std::vector<Edge> e;
    for (std::size_t i = 1; i <= leaves; ++i) e.push_back({0, static_cast<NodeId>(i)});
    return Graph::from_edges(leaves + 1, e);
}

Graph path(std::size_t n) {
    std::vector<Edge> e;
    for (std::size_t i = 0; i + 1 < n; ++i) e.push_back({static_cast<NodeId>(i), static_cast<NodeId>(i + 1)});
    return Graph::from_edges(n, e);
}

bool monotone(Status a, Status b) { return static_cast<int>(a) <= static_cast<int>(b); }

} // namespace

TEST_CASE("status characters") {
    CHECK(status_char(Status::S) == 'S');
    CHECK(status_char(Status::R) == 'R');
    CHECK(status_from_char('I') == Status::I);
    CHECK_THROWS_AS(status_from_char('X'), ParseError);
}

TEST_CASE("sir parameters") {
    SirParams p;
    p.sigma_inf = 0.0;
    CHECK_THROWS_AS(p.validate(), ValidationError);
    p.sigma_inf = 1.0;
    p.sigma_rec = 1.0;
    CHECK_THROWS_AS(p.validate(), ValidationError);

    auto q = SirParams::from_r0(10.0, 0.2, 8.0);
    CHECK(q.sigma_inf == doctest::Approx(0.25));
    CHECK(q.r0 == 10.0);
    CHECK_THROWS_AS(SirParams::from_r0(50.0, 0.4, 8.0), ValidationError); // sigma_inf 2.5
    CHECK_THROWS_AS(SirParams::from_r0(5.0, 0.0, 8.0), ValidationError);  // sigma_inf 0
}

TEST_CASE("trajectory starts from exactly the sources") {
    auto g = generate_graph(BarabasiAlbert{50, 2}, 1);
    std::vector<NodeId> src{3, 17, 40};
    auto traj = simulate(g, SirParams{0.3, 0.2, 40, {}}, src, 5);
    for (NodeId v = 0; v < 50; ++v)
        CHECK(traj.at(0, v) == (std::count(src.begin(), src.end(), v) ? Status::I : Status::S));
}

TEST_CASE("simulate rejects bad source sets") {
    auto g = path(5);
    SirParams p;
    CHECK_THROWS_AS(simulate(g, p, std::vector<NodeId>{}, 1), ValidationError);
    CHECK_THROWS_AS(simulate(g, p, std::vector<NodeId>{1, 1}, 1), ValidationError);
    CHECK_THROWS_AS(simulate(g, p, std::vector<NodeId>{5}, 1), ValidationError);
}

TEST_CASE("deterministic path spread with sigma_inf = 1") {
    auto g = path(10);
    auto traj = simulate(g, SirParams{1.0, 0.0, 12, {}}, std::vector<NodeId>{0}, 3);
    for (int t = 0; t <= 12; ++t)
        for (NodeId v = 0; v < 10; ++v) CHECK(traj.at(t, v) == (v <= t ? Status::I : Status::S));
}

TEST_CASE("isolated node is never infected") {
    // node 3 has no neighbours: the empty product gives probability 0
    auto g = Graph::from_edges(4, std::vector<Edge>{{0, 1}, {1, 2}});
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        auto traj = simulate(g, SirParams{1.0, 0.0, 5, {}}, std::vector<NodeId>{0}, seed);
        CHECK(traj.at(5, 3) == Status::S);
    }
}

TEST_CASE("infection law on a star with k infected leaves") {
    // 2e4 runs here; the acceptance binary repeats this at 1e5.
    const std::size_t runs = 20000;
    for (std::size_t k : {1u, 2u, 5u}) {
        for (double sigma : {0.1, 0.25}) {
            auto g = star(k);
            std::vector<NodeId> leaves;
            for (std::size_t i = 1; i <= k; ++i) leaves.push_back(static_cast<NodeId>(i));
            SirParams p{sigma, 0.0, 1, {}};
            SirStepper stepper(g, p);
            Rng rng(derive_seed(17, k * 100 + static_cast<std::size_t>(sigma * 100)));
            std::size_t hits = 0;
            for (std::size_t r = 0; r < runs; ++r) {
                stepper.reset(leaves);
                stepper.step(rng);
                hits += stepper.statuses()[0] == Status::I ? 1 : 0;
            }
            const double expected = 1.0 - std::pow(1.0 - sigma, static_cast<double>(k));
            CHECK_MESSAGE(testing::within_3se(hits, runs, expected), "k=" << k << " sigma=" << sigma);
        }
    }
}

TEST_CASE("recovery law") {
    const std::size_t runs = 20000;
    auto g = star(3);
    SirParams p{0.2, 0.3, 1, {}};
    SirStepper stepper(g, p);
    Rng rng(8);
    std::size_t recovered = 0;
    for (std::size_t r = 0; r < runs; ++r) {
        stepper.reset(std::vector<NodeId>{0});
        stepper.step(rng);
        recovered += stepper.statuses()[0] == Status::R ? 1 : 0;
        // a node infected in this step cannot recover in it
        for (NodeId leaf = 1; leaf <= 3; ++leaf) CHECK(stepper.statuses()[static_cast<std::size_t>(leaf)] != Status::R);
    }
    CHECK(testing::within_3se(recovered, runs, 0.3));
}

TEST_CASE("SI runs never produce R and every run is monotone") {
    auto g = generate_graph(BarabasiAlbert{80, 3}, 2);
    Rng rng(4);
    for (int rep = 0; rep < 300; ++rep) {
        const double rec = rep % 2 ? 0.0 : rng.uniform(0.05, 0.5);
        SirParams p{rng.uniform(0.05, 0.6), rec, 30, {}};
        auto src = rng.choose(80, static_cast<std::int32_t>(rng.between(1, 5)));
        auto traj = simulate(g, p, src, rng.next());
        for (int t = 1; t <= 30; ++t) {
            for (NodeId v = 0; v < 80; ++v) {
                REQUIRE(monotone(traj.at(t - 1, v), traj.at(t, v)));
                if (rec == 0.0) REQUIRE(traj.at(t, v) != Status::R);
                // new infections need an infected neighbour at t-1
                if (traj.at(t - 1, v) == Status::S && traj.at(t, v) == Status::I) {
                    bool had = false;
                    for (NodeId u : g.neighbors(v)) had = had || traj.at(t - 1, u) == Status::I;
                    REQUIRE(had);
                }
            }
        }
    }
}

TEST_CASE("simulate is a pure function of its seed") {
    auto g = generate_graph(ErdosRenyi{60, 0.1}, 3);
    SirParams p{0.3, 0.1, 25, {}};
    auto a = simulate(g, p, std::vector<NodeId>{1, 2}, 77);
    auto b = simulate(g, p, std::vector<NodeId>{1, 2}, 77);
    bool same = true;
    for (int t = 0; t <= 25; ++t)
        same = same && std::equal(a.at(t).begin(), a.at(t).end(), b.at(t).begin());
    CHECK(same);
}

TEST_CASE("observe windows") {
    auto g = path(6);
    auto traj = simulate(g, SirParams{1.0, 0.0, 40, {}}, std::vector<NodeId>{0}, 1);
    SUBCASE("single snapshot equals column t1") {
        auto x = observe(traj, 1, 1);
        CHECK(x.num_snapshots() == 1);
        CHECK(std::equal(x.column(0).begin(), x.column(0).end(), traj.at(1).begin()));
    }
    SUBCASE("16 columns from t1 = 2") {
        auto x = observe(traj, 2);
        CHECK(x.times().front() == 2);
        CHECK(x.times().back() == 17);
    }
    SUBCASE("stride") {
        auto x = observe(traj, 1, 4, 3);
        CHECK(x.times() == std::vector<int>{1, 4, 7, 10});
    }
    CHECK_THROWS_AS(observe(traj, 0), ValidationError);
    CHECK_THROWS_AS(observe(traj, 30), ValidationError);
}

TEST_CASE("observed columns are monotone for 1000 random trajectories") {
    auto g = generate_graph(BarabasiAlbert{40, 2}, 6);
    Rng rng(12);
    for (int rep = 0; rep < 1000; ++rep) {
        SirParams p{rng.uniform(0.05, 0.9), rng.uniform(0.0, 0.6), 40, {}};
        auto traj = simulate(g, p, rng.choose(40, 2), rng.next());
        auto x = observe(traj, static_cast<int>(rng.between(1, 2)), 16, static_cast<int>(rng.between(1, 2)));
        for (std::size_t j = 1; j < x.num_snapshots(); ++j)
            for (NodeId v = 0; v < 40; ++v) REQUIRE(monotone(x.at(v, j - 1), x.at(v, j)));
    }
}

TEST_CASE("snapshot matrix validation") {
    using S = Status;
    CHECK_NOTHROW(SnapshotMatrix(2, {1, 2}, {S::I, S::S, S::R, S::I}));
    CHECK_THROWS_AS(SnapshotMatrix(2, {1, 2}, {S::R, S::S, S::I, S::S}), ValidationError); // R -> I
    CHECK_THROWS_AS(SnapshotMatrix(2, {2, 2}, {S::I, S::S, S::I, S::S}), ValidationError); // times
    CHECK_THROWS_AS(SnapshotMatrix(2, {1, 2}, {S::I, S::S, S::I}), ValidationError);       // shape
    CHECK_THROWS_AS(SnapshotMatrix(2, {}, {}), ValidationError);
}

TEST_CASE("adaptive t1 rule") {
    T1Rule rule;
    CHECK(rule.choose(1, std::nullopt) == 2);
    CHECK(rule.choose(1, 30.0) == 2);
    CHECK(rule.choose(5, 7.0) == 2);
    CHECK(rule.choose(5, 1.0) == 2);
    CHECK(rule.choose(5, 15.0) == 2);
    CHECK(rule.choose(5, 20.0) == 1);
    CHECK(rule.choose(5, std::nullopt) == 1);
    T1Rule fixed{false, 3};
    CHECK(fixed.choose(1, 5.0) == 3);
}

TEST_CASE("sample_dataset") {
    auto g = generate_graph(BarabasiAlbert{100, 3}, 1);
    DatasetSpec spec;
    spec.params.r0 = RealRange{1.0, 15.0};
    spec.source_count = {1, 10};

    SUBCASE("empty request") { CHECK(sample_dataset(g, spec, 0, 1).empty()); }
    SUBCASE("records follow the configured ranges") {
        const double lam = spectral_radius(g);
        auto data = sample_dataset(g, spec, 200, 9);
        REQUIRE(data.size() == 200);
        for (std::size_t i = 0; i < data.size(); ++i) {
            const auto& s = data[i];
            CHECK(s.id == i);
            CHECK((s.sources.size() >= 1 && s.sources.size() <= 10));
            CHECK(std::is_sorted(s.sources.begin(), s.sources.end()));
            CHECK((s.sigma_rec >= 0.1 && s.sigma_rec <= 0.4));
            REQUIRE(s.r0.has_value());
            CHECK((*s.r0 >= 1.0 && *s.r0 <= 15.0));
            CHECK(s.sigma_inf == doctest::Approx(*s.r0 * s.sigma_rec / lam));
            CHECK(s.snapshots.num_snapshots() == 16);
            CHECK(s.snapshots.times().front() == 2); // R0 in [1,15]
            for (NodeId src : s.sources) CHECK(s.snapshots.at(src, 0) != Status::S);
        }
    }
    SUBCASE("identical for any thread count") {
        CHECK(sample_dataset(g, spec, 60, 4, 1) == sample_dataset(g, spec, 60, 4, 3));
    }
    SUBCASE("SI configuration") {
        DatasetSpec si;
        si.params.sigma_rec = {0.0, 0.0};
        si.params.sigma_inf = {0.25, 0.25};
        si.source_count = {1, 1};
        for (const auto& s : sample_dataset(g, si, 50, 2)) {
            CHECK_FALSE(s.r0.has_value());
            for (auto st : s.snapshots.raw()) CHECK(st != Status::R);
        }
    }
    SUBCASE("too many sources") {
        DatasetSpec bad = spec;
        bad.source_count = {1, 101};
        CHECK_THROWS_AS(sample_dataset(g, bad, 5, 1), ValidationError);
    }
}
