#include <doctest.h>

#include <algorithm>
#include <set>

#include "dr/errors.hpp"
#include "dr/graphs.hpp"
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

StableGraph banana_graph() {
    StableGraph G;
    G.genus = 1;
    G.vertices = {{0, 0}, {1, 0}};
    G.half_edges = {1, 2, 3, 4, 5, 6};
    G.attach = {{1, 0}, {2, 1}, {3, 0}, {4, 1}, {5, 0}, {6, 1}};
    G.involution = {{1, 1}, {2, 2}, {3, 4}, {4, 3}, {5, 6}, {6, 5}};
    G.legs = {1, 2};
    return G;
}

StableGraph bridge_graph() {
    // two genus-1 vertices joined by one edge, one leg each
    StableGraph G;
    G.genus = 2;
    G.vertices = {{0, 1}, {1, 1}};
    G.half_edges = {1, 2, 3, 4};
    G.attach = {{1, 0}, {2, 1}, {3, 0}, {4, 1}};
    G.involution = {{1, 1}, {2, 2}, {3, 4}, {4, 3}};
    G.legs = {1, 2};
    return G;
}

} // namespace

TEST_CASE("validation accepts and rejects") {
    CHECK(validate(loop_graph(), 1, 1).ok());
    CHECK(validate(banana_graph(), 1, 2).ok());

    // genus condition off by one
    StableGraph bad = loop_graph();
    bad.vertices[0].second = 1;
    auto r = validate(bad, 1, 1);
    CHECK(r.kind == ValidationKind::InvariantViolation);

    // unstable vertex: genus 0, valence 2
    StableGraph uns;
    uns.genus = 1;
    uns.vertices = {{0, 0}, {1, 1}};
    uns.half_edges = {1, 2, 3};
    uns.attach = {{1, 0}, {2, 0}, {3, 1}};
    uns.involution = {{1, 1}, {2, 3}, {3, 2}};
    uns.legs = {1};
    CHECK(validate(uns, 1, 1).kind == ValidationKind::InvariantViolation);

    // involution not matching attach domain
    StableGraph mal = loop_graph();
    mal.involution.erase(3);
    CHECK(validate(mal, 1, 1).kind == ValidationKind::StructuralError);
}

TEST_CASE("enumeration counts") {
    CHECK(enumerate_stable_graphs(0, 3).size() == 1);
    CHECK(enumerate_stable_graphs(0, 4).size() == 4);
    CHECK(enumerate_stable_graphs(1, 2).size() == 5);
}

TEST_CASE("enumeration cross-checked against independent counter") {
    for (auto [g, n] : std::vector<std::pair<int, int>>{
             {0, 3}, {0, 4}, {0, 5}, {1, 1}, {1, 2}, {2, 0}, {2, 1}}) {
        auto graphs = enumerate_stable_graphs(g, n);
        CHECK(graphs.size() == oracles::brute_count_stable_graphs(g, n));
        std::set<std::string> enc;
        for (const auto& G : graphs) {
            CHECK(validate(G, g, n).ok());
            enc.insert(canonical_form(G).encoding);
        }
        CHECK(enc.size() == graphs.size());
    }
}

TEST_CASE("automorphism counts") {
    StableGraph pt;
    pt.genus = 1;
    pt.vertices = {{0, 1}};
    pt.half_edges = {1};
    pt.attach = {{1, 0}};
    pt.involution = {{1, 1}};
    pt.legs = {1};
    CHECK(automorphism_count(pt) == 1);
    CHECK(automorphism_count(loop_graph()) == 2);
    CHECK(automorphism_count(banana_graph()) == 2);

    for (auto [g, n] : std::vector<std::pair<int, int>>{{1, 1}, {1, 2}, {2, 0}, {2, 1}})
        for (const auto& G : enumerate_stable_graphs(g, n))
            if (G.half_edges.size() <= 6)
                CHECK(automorphism_count(G) == oracles::brute_automorphisms(G));
}

TEST_CASE("canonical form is an isomorphism invariant") {
    StableGraph G = banana_graph();
    auto cf = canonical_form(G);
    StableGraph H = relabeled(G, cf.half_edge_relabel, cf.vertex_relabel);
    CHECK(validate(H, 1, 2).ok());
    CHECK(canonical_form(H).encoding == cf.encoding);

    // an arbitrary relabeling does not change the encoding
    std::map<int, int> hmap{{1, 10}, {2, 20}, {3, 33}, {4, 44}, {5, 5}, {6, 66}};
    std::map<int, int> vmap{{0, 7}, {1, 3}};
    CHECK(canonical_form(relabeled(G, hmap, vmap)).encoding == cf.encoding);
    CHECK(!cf.hex().empty());
}

TEST_CASE("graph JSON round trip") {
    for (const auto& G : enumerate_stable_graphs(1, 2)) {
        StableGraph H = StableGraph::from_json(G.to_json());
        CHECK(canonical_form(H).encoding == canonical_form(G).encoding);
        CHECK(H.legs == G.legs);
        CHECK(H.genus == G.genus);
    }
}

TEST_CASE("cut edge") {
    // non-separating: banana stays connected, gains two legs
    auto cut = cut_edge(banana_graph(), {3, 4});
    CHECK(!cut.separating);
    CHECK(cut.components.size() == 1);
    CHECK(cut.graph.n() == 4);
    CHECK(cut.graph.h1() == banana_graph().h1() - 1);
    CHECK(cut.graph.genus == 0); // ambient genus drops by one
    CHECK(validate(cut.graph, 0, 4, false).ok());

    // separating: bridge splits into two genus-1 pieces
    auto sep = cut_edge(bridge_graph(), {3, 4});
    CHECK(sep.separating);
    CHECK(sep.components.size() == 2);
    CHECK(sep.graph.num_components() == 2);
    int gsum = 0;
    for (const auto& C : sep.components) gsum += C.genus;
    CHECK(gsum == 2);
    // legs 1..4 distributed across the two components
    std::set<int> seen;
    for (const auto& pos : sep.component_legs)
        for (int p : pos) seen.insert(p);
    CHECK(seen == std::set<int>{0, 1, 2, 3});

    CHECK(is_separating(bridge_graph(), {3, 4}));
    CHECK(!is_separating(banana_graph(), {3, 4}));
    CHECK(!is_separating(loop_graph(), {2, 3}));
}

TEST_CASE("spanning tree structure") {
    for (auto [g, n] : std::vector<std::pair<int, int>>{{1, 2}, {2, 0}, {2, 1}})
        for (const auto& G : enumerate_stable_graphs(g, n)) {
            auto T = spanning_tree(G);
            CHECK((int)T.vertex_order.size() == G.num_vertices());
            CHECK((int)T.tree_edges.size() == G.num_vertices() - 1);
            CHECK(T.parent_edge.size() == T.vertex_order.size());

            // every tree edge joins vertex_order[i] (i >= 1) to an earlier one,
            // with the first half at the earlier vertex
            std::set<int> placed{T.vertex_order[0]};
            for (size_t i = 1; i < T.vertex_order.size(); ++i) {
                auto [h, hp] = T.tree_edges[T.parent_edge[i]];
                CHECK(placed.count(G.attach.at(h)) == 1);
                CHECK(G.attach.at(hp) == T.vertex_order[i]);
                placed.insert(T.vertex_order[i]);
            }
        }
}
