#include <doctest.h>

#include <random>

#include "dr/errors.hpp"
#include "dr/pixton.hpp"
#include "oracles.hpp"

using namespace dr;

namespace {

StableGraph loop_graph() {
    StableGraph G;
    G.genus = 1;
    G.vertices = {{0, 0}};
    G.half_edges = {1, 2, 3};
    G.attach = {{1, 0}, {2, 0}, {3, 0}};
    G.involution = {{1, 1}, {2, 3}, {3, 2}};
    G.legs = {1};
    return G;
}

Rat coeff_sum(const TautExpression& e) {
    Rat s(0);
    for (const auto& [key, term] : e.terms()) s += term.coeff.constant_value();
    return s;
}

} // namespace

TEST_CASE("trivial graph and codimension") {
    StableGraph T = trivial_graph(2, 3);
    CHECK(validate(T, 2, 3).ok());
    CHECK(T.num_edges() == 0);

    DecoratedStratum s{loop_graph(), {{1, 2}}, {{0, 1}}};
    CHECK(s.codim() == 1 + 2 + 1);
}

TEST_CASE("taut expressions merge isomorphic strata") {
    StableGraph G = loop_graph();
    std::map<int, int> hmap{{1, 1}, {2, 5}, {3, 4}};
    std::map<int, int> vmap{{0, 3}};
    StableGraph H = relabeled(G, hmap, vmap);

    TautExpression e(1, 1);
    e.add(DecoratedStratum{G, {{2, 1}}, {}}, Rat(1));
    e.add(DecoratedStratum{H, {{5, 1}}, {}}, Rat(2));
    CHECK(e.terms().size() == 1);
    CHECK(coeff_sum(e) == Rat(3));

    e.add(DecoratedStratum{G, {{2, 1}}, {}}, Rat(-3));
    CHECK(e.empty());
}

TEST_CASE("P_r on the edgeless graph") {
    StableGraph T = trivial_graph(1, 2);
    auto A = RamVector::make({1, -1}, 0, 1, 2);
    TautExpression P = P_graph(T, A, 5, 2);
    REQUIRE(P.terms().size() == 1);
    CHECK(P.terms().begin()->second.stratum.codim() == 0);
    CHECK(coeff_sum(P) == Rat(1));
}

TEST_CASE("P_r and P_0 on the loop") {
    StableGraph G = loop_graph();
    auto A = RamVector::make({0}, 0, 1, 1);

    // truncation below the edge count gives zero
    CHECK(P_graph(G, A, 5, 0).empty());

    // codim-1 coefficient: -S(x_2 x_3)/2 = -(r^2-1)/12
    for (long r : {5L, 7L, 11L}) {
        TautExpression P = P_graph(G, A, r, 1);
        REQUIRE(P.terms().size() == 1);
        CHECK(coeff_sum(P) == make_rat(Int(1 - r * r), Int(12)));
    }

    TautExpression P0 = P0_graph(G, A, 1);
    REQUIRE(P0.terms().size() == 1);
    CHECK(coeff_sum(P0) == Rat(1, 12));

    // per-coefficient interpolation of r -> P_r recovers P_0 at r = 0
    std::vector<std::pair<long, Rat>> pts;
    for (long r : {53L, 59L, 61L, 67L}) pts.emplace_back(r, coeff_sum(P_graph(G, A, r, 1)));
    MultiPoly fitted = lagrange_interpolate(pts);
    CHECK(fitted.evaluate({{"r", Rat(0)}}) == Rat(1, 12));
}

TEST_CASE("P_0 window independence") {
    StableGraph G = loop_graph();
    auto A = RamVector::make({0}, 0, 1, 1);
    ConstantTermOptions o1, o2;
    o1.window_start = 11;
    o2.window_start = 37;
    CHECK(P0_graph(G, A, 1, o1) == P0_graph(G, A, 1, o2));
}

TEST_CASE("exponential prefactor") {
    auto A = RamVector::make({3, -3}, 0, 1, 2);
    TautExpression e0 = exp_prefactor(1, 2, A, 0);
    REQUIRE(e0.terms().size() == 1);
    CHECK(coeff_sum(e0) == Rat(1));

    // codim 1 at k = 0: a_1^2/2 psi_1 + a_2^2/2 psi_2, no kappa term
    TautExpression e1 = exp_prefactor(1, 2, A, 1).filtered_codim(1);
    CHECK(e1.terms().size() == 2);
    for (const auto& [key, term] : e1.terms()) {
        CHECK(term.coeff.constant_value() == Rat(9, 2));
        CHECK(term.stratum.kappa1.empty());
    }

    // nonzero twist brings in kappa_1 with coefficient -k^2/2
    auto B = RamVector::make({4, 0}, 2, 1, 2);
    TautExpression f1 = exp_prefactor(1, 2, B, 1).filtered_codim(1);
    bool saw_kappa = false;
    for (const auto& [key, term] : f1.terms())
        if (!term.stratum.kappa1.empty()) {
            saw_kappa = true;
            CHECK(term.coeff.constant_value() == Rat(-2));
        }
    CHECK(saw_kappa);
}

TEST_CASE("pullback multiplication") {
    StableGraph G = loop_graph();
    TautExpression inner(1, 1);
    inner.add(DecoratedStratum{G, {}, {}}, Rat(1));

    // identity decoration
    DecoratedStratum id{trivial_graph(1, 1), {}, {}};
    CHECK(pullback_multiply(G, id, inner) == inner);

    // psi on leg 1 increments the matching leg exponent
    DecoratedStratum psi1{trivial_graph(1, 1), {{1, 1}}, {}};
    TautExpression up = pullback_multiply(G, psi1, inner);
    REQUIRE(up.terms().size() == 1);
    CHECK(up.terms().begin()->second.stratum.psi.at(up.terms().begin()->second.stratum.graph.legs[0]) == 1);

    // kappa_1 on a two-vertex graph spreads over both vertices
    StableGraph B;
    B.genus = 2;
    B.vertices = {{0, 1}, {1, 1}};
    B.half_edges = {1, 2, 3, 4};
    B.attach = {{1, 0}, {2, 1}, {3, 0}, {4, 1}};
    B.involution = {{1, 1}, {2, 2}, {3, 4}, {4, 3}};
    B.legs = {1, 2};
    TautExpression innerB(2, 2);
    innerB.add(DecoratedStratum{B, {}, {}}, Rat(1));
    DecoratedStratum kap{trivial_graph(2, 2), {}, {{0, 1}}};
    TautExpression spread = pullback_multiply(B, kap, innerB);
    CHECK(spread.terms().size() == 2);
    int kappa_total = 0;
    for (const auto& [key, term] : spread.terms())
        for (const auto& [v, e] : term.stratum.kappa1) kappa_total += e;
    CHECK(kappa_total == 2);
}

TEST_CASE("genus zero DR cycles") {
    std::mt19937 rng(711);
    for (int n = 3; n <= 5; ++n) {
        auto A = oracles::zero_sum_vector(n, rng, 5);
        TautExpression d = dr_cycle(0, n, RamVector::make(A, 0, 0, n));
        REQUIRE(d.terms().size() == 1);
        CHECK(coeff_sum(d) == Rat(1));
        CHECK(d.terms().begin()->second.stratum.codim() == 0);
    }
}

TEST_CASE("DR cycle polynomiality and equivariance") {
    auto d1 = dr_cycle(1, 2, RamVector::make({2, -2}, 0, 1, 2));
    auto d2 = dr_cycle(1, 2, RamVector::make({-2, 2}, 0, 1, 2));
    CHECK(permute_legs(d1, {1, 0}) == d2);

    // each stratum coefficient of t -> DR((t, -t)) is a polynomial of degree
    // at most 2g = 2; fit on t = 0, 1, 2 and predict t = 3, 4
    auto at = [](long t) { return dr_cycle(1, 2, RamVector::make({t, -t}, 0, 1, 2)); };
    auto coeff_of = [](const TautExpression& e, const std::string& key) {
        auto it = e.terms().find(key);
        return it == e.terms().end() ? Rat(0) : it->second.coeff.constant_value();
    };
    std::set<std::string> keys;
    std::map<long, TautExpression> samples;
    for (long t = 0; t <= 4; ++t) {
        samples.emplace(t, at(t));
        for (const auto& [key, term] : samples.at(t).terms()) keys.insert(key);
    }
    CHECK(!keys.empty());
    for (const auto& key : keys) {
        MultiPoly fit = lagrange_interpolate({{0, coeff_of(samples.at(0), key)},
                                              {1, coeff_of(samples.at(1), key)},
                                              {2, coeff_of(samples.at(2), key)}},
                                             "t");
        for (long t : {3L, 4L})
            CHECK(fit.evaluate({{"t", Rat(t)}}) == coeff_of(samples.at(t), key));
    }
}

TEST_CASE("dr polynomial chart") {
    auto vars = dr_chart_vars(1, 2);
    CHECK(vars == std::vector<std::string>{"k", "a_2"});

    TautExpression P = dr_polynomial(1, 2, DrMethod::Recursion);
    CHECK(!P.empty());
    // chart evaluation at a lattice point reproduces dr_cycle
    for (auto [k, a2] : std::vector<std::pair<long, long>>{{0, 3}, {1, 1}, {-1, 2}}) {
        long a1 = 2 * k - a2;
        auto at = P.evaluated({{"k", Rat(k)}, {"a_2", Rat(a2)}});
        auto direct = dr_cycle(1, 2, RamVector::make({a1, a2}, k, 1, 2));
        CHECK(at == direct);
    }

    CHECK_THROWS_AS(dr_polynomial(0, 2, DrMethod::Fit), DomainError);
}

TEST_CASE("taut expression JSON shape") {
    auto d = dr_cycle(1, 1, RamVector::make({0}, 0, 1, 1));
    auto j = d.to_json();
    CHECK(j["g"] == 1);
    CHECK(j["n"] == 1);
    REQUIRE(j["terms"].is_array());
    for (const auto& t : j["terms"]) {
        CHECK(t.contains("graph"));
        CHECK(t.contains("psi"));
        CHECK(t.contains("kappa1"));
        CHECK(t.contains("coeff"));
    }
    // terms sorted by canonical encoding: keys of the map, already sorted
    CHECK(j["terms"].size() == d.terms().size());
}
