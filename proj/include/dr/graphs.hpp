#ifndef DR_GRAPHS_HPP
#define DR_GRAPHS_HPP

#include <map>
#include <string>
#include <vector>

#include "dr/rational.hpp"

namespace dr {

// Dual graph of a nodal curve: vertices carry genera, edges are nodes,
// legs are the labeled marked points (fixed points of the involution).
struct StableGraph {
    int genus = 0;                            // ambient g
    std::vector<std::pair<int, int>> vertices; // (id, genus)
    std::vector<int> half_edges;               // ids
    std::map<int, int> attach;                 // half-edge -> vertex
    std::map<int, int> involution;             // half-edge -> half-edge
    std::vector<int> legs;                     // ordered; legs[i] is leg i+1

    int n() const { return (int)legs.size(); }
    int num_vertices() const { return (int)vertices.size(); }
    int num_edges() const;
    int h1() const; // #E - #V + #components
    int num_components() const;
    bool is_leg(int he) const;
    int vertex_genus(int vid) const;
    std::vector<int> halves_at(int vid) const; // sorted by id
    int valence(int vid) const;                // n(v)
    // Edges as (h, h') pairs with h < h', sorted.
    std::vector<std::pair<int, int>> edges() const;

    nlohmann::json to_json() const;
    static StableGraph from_json(const nlohmann::json& j);
};

enum class ValidationKind { Valid, InvariantViolation, StructuralError };

struct ValidationResult {
    ValidationKind kind = ValidationKind::Valid;
    std::string diagnostic; // names the first violated clause
    bool ok() const { return kind == ValidationKind::Valid; }
};

// Checks all stable-graph invariants against the ambient (g, n). Malformed
// attach/involution maps are reported as StructuralError, distinct from
// invariant failures.
ValidationResult validate(const StableGraph& candidate, int g, int n,
                          bool require_connected = true);

// One representative per leg-fixing isomorphism class, canonically labeled,
// sorted by canonical encoding.
std::vector<StableGraph> enumerate_stable_graphs(int g, int n);

// Order of the group of (vertex, half-edge) permutation pairs commuting with
// attach and involution, preserving genus, fixing every leg pointwise.
long automorphism_count(const StableGraph& gamma);

struct CanonicalForm {
    std::string encoding;                 // raw bytes
    std::map<int, int> half_edge_relabel; // old id -> canonical id
    std::map<int, int> vertex_relabel;    // old id -> canonical id
    std::string hex() const;
};

CanonicalForm canonical_form(const StableGraph& gamma);
// Same, with psi exponents on half-edges and kappa_1 exponents on vertices
// carried along (decorations transported by isomorphisms).
CanonicalForm canonical_form_decorated(const StableGraph& gamma,
                                       const std::map<int, int>& psi_exp,
                                       const std::map<int, int>& kappa1_exp);

// Applies a relabeling of half-edge and vertex ids.
StableGraph relabeled(const StableGraph& gamma,
                      const std::map<int, int>& half_edge_relabel,
                      const std::map<int, int>& vertex_relabel);

struct CutResult {
    StableGraph graph;   // Gamma_e: involution made identity on e's halves,
                         // appended as legs n+1 and n+2; may be disconnected
    bool separating = false;
    std::vector<StableGraph> components;        // connected, own ambient genus
    std::vector<std::vector<int>> component_legs; // 0-based positions into
                                                  // graph.legs per component
};

CutResult cut_edge(const StableGraph& gamma, std::pair<int, int> e);
bool is_separating(const StableGraph& gamma, std::pair<int, int> e);

struct SpanningTree {
    std::vector<std::pair<int, int>> tree_edges; // (h, h'), h at earlier vertex
    std::vector<int> vertex_order;               // v_1..v_m, nested subtrees
    // parent_edge[i] is the index into tree_edges linking vertex_order[i]
    // to the earlier part of the tree (i >= 1).
    std::vector<int> parent_edge;
};

SpanningTree spanning_tree(const StableGraph& gamma);

} // namespace dr

#endif
