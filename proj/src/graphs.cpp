#include "dr/graphs.hpp"

#include <algorithm>
#include <array>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>

namespace dr {

namespace {

int map_at(const std::map<int, int>& m, int k, const char* what) {
    auto it = m.find(k);
    if (it == m.end())
        throw DomainError(std::string(what) + ": missing key " + std::to_string(k));
    return it->second;
}

int deco_at(const std::map<int, int>& m, int k) {
    auto it = m.find(k);
    return it == m.end() ? 0 : it->second;
}

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

} // namespace

int StableGraph::num_edges() const {
    int e = 0;
    for (const auto& [h, hp] : involution)
        if (h < hp) ++e;
    return e;
}

bool StableGraph::is_leg(int he) const {
    auto it = involution.find(he);
    return it != involution.end() && it->second == he;
}

int StableGraph::vertex_genus(int vid) const {
    for (const auto& [id, gv] : vertices)
        if (id == vid) return gv;
    throw DomainError("vertex_genus: unknown vertex " + std::to_string(vid));
}

std::vector<int> StableGraph::halves_at(int vid) const {
    std::vector<int> out;
    for (const auto& [h, v] : attach)
        if (v == vid) out.push_back(h);
    return out;
}

int StableGraph::valence(int vid) const { return (int)halves_at(vid).size(); }

std::vector<std::pair<int, int>> StableGraph::edges() const {
    std::vector<std::pair<int, int>> out;
    for (const auto& [h, hp] : involution)
        if (h < hp) out.emplace_back(h, hp);
    return out;
}

int StableGraph::num_components() const {
    int m = num_vertices();
    if (m == 0) return 0;
    std::map<int, int> vidx;
    for (int i = 0; i < m; ++i) vidx.emplace(vertices[i].first, i);
    UnionFind uf(m);
    for (const auto& [h, hp] : edges())
        uf.unite(vidx.at(attach.at(h)), vidx.at(attach.at(hp)));
    std::set<int> roots;
    for (int i = 0; i < m; ++i) roots.insert(uf.find(i));
    return (int)roots.size();
}

int StableGraph::h1() const { return num_edges() - num_vertices() + num_components(); }

ValidationResult validate(const StableGraph& c, int g, int n, bool require_connected) {
    auto structural = [](const std::string& d) {
        return ValidationResult{ValidationKind::StructuralError, d};
    };
    auto invariant = [](const std::string& d) {
        return ValidationResult{ValidationKind::InvariantViolation, d};
    };

    std::set<int> vset, hset;
    for (const auto& [id, gv] : c.vertices)
        if (!vset.insert(id).second) return structural("duplicate vertex id");
    for (int h : c.half_edges)
        if (!hset.insert(h).second) return structural("duplicate half-edge id");
    if (c.vertices.empty()) return structural("no vertices");
    for (int h : c.half_edges) {
        auto ai = c.attach.find(h);
        if (ai == c.attach.end()) return structural("attach not total");
        if (!vset.count(ai->second)) return structural("attach maps to unknown vertex");
        auto ii = c.involution.find(h);
        if (ii == c.involution.end()) return structural("involution not total");
        if (!hset.count(ii->second)) return structural("involution maps outside half-edge set");
    }
    if (c.attach.size() != hset.size() || c.involution.size() != hset.size())
        return structural("attach/involution defined on extra keys");
    for (int h : c.half_edges)
        if (c.involution.at(c.involution.at(h)) != h)
            return invariant("involution is not self-inverse");

    std::set<int> fixed;
    for (int h : c.half_edges)
        if (c.involution.at(h) == h) fixed.insert(h);
    std::set<int> legset(c.legs.begin(), c.legs.end());
    if (legset.size() != c.legs.size()) return invariant("legs list has duplicates");
    if (fixed != legset)
        return invariant("involution fixed points do not equal the legs list");
    if ((int)c.legs.size() != n)
        return invariant("leg count differs from n");

    for (const auto& [id, gv] : c.vertices)
        if (gv < 0) return invariant("negative vertex genus");

    for (const auto& [id, gv] : c.vertices)
        if (2 * gv - 2 + c.valence(id) <= 0)
            return invariant("stability fails at vertex " + std::to_string(id) +
                             " (2g(v)-2+n(v) <= 0)");

    if (require_connected && c.num_components() != 1)
        return invariant("graph is not connected");

    int genus_sum = 0;
    for (const auto& [id, gv] : c.vertices) genus_sum += gv;
    if (genus_sum + c.h1() != g)
        return invariant("genus condition fails: sum g(v) + h1 != g");

    return {};
}

// ---------------------------------------------------------------------------
// canonical form

namespace {

struct CanonicalContext {
    const StableGraph& g;
    const std::map<int, int>& psi;
    const std::map<int, int>& kappa;
    std::vector<int> vids;
    std::map<int, int> vidx;
    std::vector<std::vector<int>> leg_positions; // per vertex index, increasing
    std::vector<std::pair<int, int>> edge_list;  // (h, h'), h < h'

    explicit CanonicalContext(const StableGraph& gr, const std::map<int, int>& p,
                              const std::map<int, int>& k)
        : g(gr), psi(p), kappa(k) {
        for (const auto& [id, gv] : g.vertices) {
            vidx.emplace(id, (int)vids.size());
            vids.push_back(id);
        }
        leg_positions.resize(vids.size());
        for (int i = 0; i < g.n(); ++i)
            leg_positions[vidx.at(g.attach.at(g.legs[i]))].push_back(i);
        edge_list = g.edges();
    }

    // cidx: original vertex index -> canonical index
    std::vector<int> encode(const std::vector<int>& cidx) const {
        std::vector<int> enc{g.genus, (int)vids.size(), g.n(), (int)edge_list.size()};
        std::vector<int> inv(vids.size());
        for (size_t i = 0; i < vids.size(); ++i) inv[cidx[i]] = (int)i;
        for (size_t c = 0; c < vids.size(); ++c) {
            int i = inv[c];
            enc.push_back(g.vertex_genus(vids[i]));
            enc.push_back(deco_at(kappa, vids[i]));
            enc.push_back((int)leg_positions[i].size());
            for (int pos : leg_positions[i]) enc.push_back(pos);
        }
        for (int i = 0; i < g.n(); ++i) {
            enc.push_back(cidx[vidx.at(g.attach.at(g.legs[i]))]);
            enc.push_back(deco_at(psi, g.legs[i]));
        }
        std::vector<std::array<int, 4>> ds;
        for (const auto& [h, hp] : edge_list) ds.push_back(descriptor(cidx, h, hp));
        std::sort(ds.begin(), ds.end());
        for (const auto& d : ds) enc.insert(enc.end(), d.begin(), d.end());
        return enc;
    }

    std::array<int, 4> descriptor(const std::vector<int>& cidx, int h, int hp) const {
        int cu = cidx[vidx.at(g.attach.at(h))];
        int cv = cidx[vidx.at(g.attach.at(hp))];
        std::array<int, 4> a{cu, cv, deco_at(psi, h), deco_at(psi, hp)};
        std::array<int, 4> b{cv, cu, deco_at(psi, hp), deco_at(psi, h)};
        return std::min(a, b);
    }
};

std::string ints_to_bytes(const std::vector<int>& v) {
    std::string s;
    s.reserve(v.size() * 2);
    for (int x : v) {
        // small nonnegative values; two bytes each keeps encodings compact
        s.push_back((char)((x >> 8) & 0xff));
        s.push_back((char)(x & 0xff));
    }
    return s;
}

CanonicalForm canonical_impl(const StableGraph& g, const std::map<int, int>& psi,
                             const std::map<int, int>& kappa) {
    CanonicalContext ctx(g, psi, kappa);
    size_t m = ctx.vids.size();
    std::vector<int> perm(m); // canonical position -> original index
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<int> best_enc, best_cidx;
    bool first = true;
    do {
        std::vector<int> cidx(m);
        for (size_t c = 0; c < m; ++c) cidx[perm[c]] = (int)c;
        auto enc = ctx.encode(cidx);
        if (first || enc < best_enc) {
            best_enc = std::move(enc);
            best_cidx = std::move(cidx);
            first = false;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));

    CanonicalForm cf;
    cf.encoding = ints_to_bytes(best_enc);
    for (size_t i = 0; i < m; ++i) cf.vertex_relabel[ctx.vids[i]] = best_cidx[i];

    // legs keep their positions as ids 0..n-1; edge halves get ids following
    // the sorted descriptor order, first the half on the descriptor's leading
    // side. Ties between identical descriptors fall back to original ids.
    for (int i = 0; i < g.n(); ++i) cf.half_edge_relabel[g.legs[i]] = i;
    struct EdgeRec {
        std::array<int, 4> desc;
        int first_half, second_half;
    };
    std::vector<EdgeRec> recs;
    for (const auto& [h, hp] : ctx.edge_list) {
        int cu = best_cidx[ctx.vidx.at(g.attach.at(h))];
        int cv = best_cidx[ctx.vidx.at(g.attach.at(hp))];
        std::array<int, 4> a{cu, cv, deco_at(psi, h), deco_at(psi, hp)};
        std::array<int, 4> b{cv, cu, deco_at(psi, hp), deco_at(psi, h)};
        if (b < a)
            recs.push_back({b, hp, h});
        else
            recs.push_back({a, h, hp});
    }
    std::sort(recs.begin(), recs.end(), [](const EdgeRec& x, const EdgeRec& y) {
        if (x.desc != y.desc) return x.desc < y.desc;
        return std::min(x.first_half, x.second_half) < std::min(y.first_half, y.second_half);
    });
    int next = g.n();
    for (const auto& r : recs) {
        cf.half_edge_relabel[r.first_half] = next++;
        cf.half_edge_relabel[r.second_half] = next++;
    }
    return cf;
}

} // namespace

std::string CanonicalForm::hex() const {
    static const char* digits = "0123456789abcdef";
    std::string out;
    out.reserve(encoding.size() * 2);
    for (unsigned char c : encoding) {
        out.push_back(digits[c >> 4]);
        out.push_back(digits[c & 0xf]);
    }
    return out;
}

CanonicalForm canonical_form(const StableGraph& gamma) {
    return canonical_impl(gamma, {}, {});
}

CanonicalForm canonical_form_decorated(const StableGraph& gamma,
                                       const std::map<int, int>& psi_exp,
                                       const std::map<int, int>& kappa1_exp) {
    return canonical_impl(gamma, psi_exp, kappa1_exp);
}

StableGraph relabeled(const StableGraph& gamma,
                      const std::map<int, int>& half_edge_relabel,
                      const std::map<int, int>& vertex_relabel) {
    auto hmap = [&](int h) { return map_at(half_edge_relabel, h, "relabeled/half-edge"); };
    auto vmap = [&](int v) { return map_at(vertex_relabel, v, "relabeled/vertex"); };
    StableGraph out;
    out.genus = gamma.genus;
    for (const auto& [id, gv] : gamma.vertices) out.vertices.emplace_back(vmap(id), gv);
    std::sort(out.vertices.begin(), out.vertices.end());
    for (int h : gamma.half_edges) out.half_edges.push_back(hmap(h));
    std::sort(out.half_edges.begin(), out.half_edges.end());
    for (const auto& [h, v] : gamma.attach) out.attach[hmap(h)] = vmap(v);
    for (const auto& [h, hp] : gamma.involution) out.involution[hmap(h)] = hmap(hp);
    for (int l : gamma.legs) out.legs.push_back(hmap(l));
    return out;
}

long automorphism_count(const StableGraph& gamma) {
    int m = gamma.num_vertices();
    std::map<int, int> vidx;
    std::vector<int> vids, genus(m);
    for (const auto& [id, gv] : gamma.vertices) {
        vidx.emplace(id, (int)vids.size());
        genus[vids.size()] = gv;
        vids.push_back(id);
    }
    std::vector<char> carries_leg(m, 0);
    for (int l : gamma.legs) carries_leg[vidx.at(gamma.attach.at(l))] = 1;

    // parallel-edge classes keyed by sorted endpoint pair
    std::map<std::pair<int, int>, int> classes;
    int loops = 0;
    for (const auto& [h, hp] : gamma.edges()) {
        int u = vidx.at(gamma.attach.at(h)), v = vidx.at(gamma.attach.at(hp));
        classes[{std::min(u, v), std::max(u, v)}]++;
        if (u == v) ++loops;
    }

    std::vector<int> sigma(m);
    std::iota(sigma.begin(), sigma.end(), 0);
    long total = 0;
    do {
        bool ok = true;
        for (int i = 0; i < m && ok; ++i) {
            if (genus[sigma[i]] != genus[i]) ok = false;
            if (carries_leg[i] && sigma[i] != i) ok = false;
        }
        for (const auto& [pr, cnt] : classes) {
            if (!ok) break;
            std::pair<int, int> img{sigma[pr.first], sigma[pr.second]};
            if (img.first > img.second) std::swap(img.first, img.second);
            auto it = classes.find(img);
            if (it == classes.end() || it->second != cnt) ok = false;
        }
        if (!ok) continue;
        long ways = 1;
        for (const auto& [pr, cnt] : classes)
            for (int t = 2; t <= cnt; ++t) ways *= t;
        for (int t = 0; t < loops; ++t) ways *= 2;
        total += ways;
    } while (std::next_permutation(sigma.begin(), sigma.end()));
    return total;
}

// ---------------------------------------------------------------------------
// edge surgery

CutResult cut_edge(const StableGraph& gamma, std::pair<int, int> e) {
    auto it = gamma.involution.find(e.first);
    if (it == gamma.involution.end() || it->second != e.second || e.first == e.second)
        throw DomainError("cut_edge: not an edge of the graph");

    CutResult out;
    out.graph = gamma;
    out.graph.involution[e.first] = e.first;
    out.graph.involution[e.second] = e.second;
    out.graph.legs.push_back(e.first);  // leg n+1
    out.graph.legs.push_back(e.second); // leg n+2

    int comps = out.graph.num_components();
    out.separating = comps == 2;
    if (!out.separating) out.graph.genus = gamma.genus - 1;

    // connected components, each with its own ambient genus
    std::map<int, int> vidx;
    std::vector<int> vids;
    for (const auto& [id, gv] : out.graph.vertices) {
        vidx.emplace(id, (int)vids.size());
        vids.push_back(id);
    }
    UnionFind uf((int)vids.size());
    for (const auto& [h, hp] : out.graph.edges())
        uf.unite(vidx.at(out.graph.attach.at(h)), vidx.at(out.graph.attach.at(hp)));
    std::vector<int> roots;
    std::map<int, int> root_to_comp;
    for (size_t i = 0; i < vids.size(); ++i) {
        int r = uf.find((int)i);
        if (!root_to_comp.count(r)) {
            root_to_comp[r] = (int)roots.size();
            roots.push_back(r);
        }
    }
    out.components.resize(roots.size());
    out.component_legs.resize(roots.size());
    for (size_t ci = 0; ci < roots.size(); ++ci) out.components[ci].genus = 0;
    for (const auto& [id, gv] : out.graph.vertices)
        out.components[root_to_comp.at(uf.find(vidx.at(id)))].vertices.emplace_back(id, gv);
    for (int h : out.graph.half_edges) {
        int ci = root_to_comp.at(uf.find(vidx.at(out.graph.attach.at(h))));
        out.components[ci].half_edges.push_back(h);
        out.components[ci].attach[h] = out.graph.attach.at(h);
        out.components[ci].involution[h] = out.graph.involution.at(h);
    }
    for (int i = 0; i < (int)out.graph.legs.size(); ++i) {
        int l = out.graph.legs[i];
        int ci = root_to_comp.at(uf.find(vidx.at(out.graph.attach.at(l))));
        out.components[ci].legs.push_back(l);
        out.component_legs[ci].push_back(i);
    }
    for (auto& comp : out.components) {
        int gsum = 0;
        for (const auto& [id, gv] : comp.vertices) gsum += gv;
        comp.genus = gsum + comp.h1();
    }
    return out;
}

bool is_separating(const StableGraph& gamma, std::pair<int, int> e) {
    return cut_edge(gamma, e).separating;
}

SpanningTree spanning_tree(const StableGraph& gamma) {
    if (gamma.num_components() != 1)
        throw DomainError("spanning_tree: graph is not connected");
    std::map<int, int> vidx;
    std::vector<int> vids;
    for (const auto& [id, gv] : gamma.vertices) {
        vidx.emplace(id, (int)vids.size());
        vids.push_back(id);
    }
    int root = gamma.legs.empty() ? vids.front()
                                  : gamma.attach.at(gamma.legs.front());
    SpanningTree st;
    std::vector<char> visited(vids.size(), 0);
    visited[vidx.at(root)] = 1;
    st.vertex_order.push_back(root);
    auto edge_list = gamma.edges();
    size_t head = 0;
    while (head < st.vertex_order.size()) {
        int v = st.vertex_order[head++];
        for (const auto& [h, hp] : edge_list) {
            int u = gamma.attach.at(h), w = gamma.attach.at(hp);
            int other, mine;
            if (u == v && !visited[vidx.at(w)]) {
                mine = h; other = hp;
            } else if (w == v && !visited[vidx.at(u)]) {
                mine = hp; other = h;
            } else {
                continue;
            }
            int nv = gamma.attach.at(other);
            visited[vidx.at(nv)] = 1;
            st.tree_edges.emplace_back(mine, other);
            st.parent_edge.push_back((int)st.tree_edges.size() - 1);
            st.vertex_order.push_back(nv);
        }
    }
    // parent_edge[i] corresponds to vertex_order[i+1]; shift to spec layout
    std::vector<int> pe(st.vertex_order.size(), -1);
    for (size_t i = 1; i < st.vertex_order.size(); ++i) pe[i] = (int)(i - 1);
    st.parent_edge = std::move(pe);
    return st;
}

// ---------------------------------------------------------------------------
// enumeration

namespace {

// All ways to write total as an ordered sum over slots.size() nonnegative
// parts; calls f per composition.
void compositions(int total, int slots, std::vector<int>& cur,
                  const std::function<void(const std::vector<int>&)>& f) {
    if (slots == 1) {
        cur.push_back(total);
        f(cur);
        cur.pop_back();
        return;
    }
    for (int x = 0; x <= total; ++x) {
        cur.push_back(x);
        compositions(total - x, slots - 1, cur, f);
        cur.pop_back();
    }
}

} // namespace

std::vector<StableGraph> enumerate_stable_graphs(int g, int n) {
    if (g < 0 || n < 0 || 2 * g - 2 + n <= 0)
        throw DomainError("enumerate_stable_graphs: unstable (g, n)");

    std::map<std::string, StableGraph> found;
    int max_m = 2 * g - 2 + n;

    for (int m = 1; m <= max_m; ++m) {
        // vertex genus assignments
        std::vector<int> gv(m, 0);
        std::function<void(int, int)> gen_genus = [&](int idx, int remaining) {
            if (idx == m) {
                int E = g - (std::accumulate(gv.begin(), gv.end(), 0)) + m - 1;
                if (E < 0) return;
                // leg assignments
                std::vector<int> la(n, 0);
                std::function<void(int)> gen_legs = [&](int li) {
                    if (li == n) {
                        // edge slot list: unordered vertex pairs (i <= j)
                        std::vector<std::pair<int, int>> slots;
                        for (int i = 0; i < m; ++i)
                            for (int j = i; j < m; ++j) slots.emplace_back(i, j);
                        std::vector<int> cur;
                        compositions(E, (int)slots.size(), cur, [&](const std::vector<int>& mult) {
                            // connectivity over non-loop edges
                            UnionFind uf(m);
                            for (size_t s = 0; s < slots.size(); ++s)
                                if (mult[s] > 0) uf.unite(slots[s].first, slots[s].second);
                            int root = uf.find(0);
                            for (int i = 1; i < m; ++i)
                                if (uf.find(i) != root) return;
                            // stability
                            std::vector<int> val(m, 0);
                            for (int l = 0; l < n; ++l) val[la[l]]++;
                            for (size_t s = 0; s < slots.size(); ++s) {
                                if (slots[s].first == slots[s].second)
                                    val[slots[s].first] += 2 * mult[s];
                                else {
                                    val[slots[s].first] += mult[s];
                                    val[slots[s].second] += mult[s];
                                }
                            }
                            for (int i = 0; i < m; ++i)
                                if (2 * gv[i] - 2 + val[i] <= 0) return;
                            // build graph
                            StableGraph cand;
                            cand.genus = g;
                            for (int i = 0; i < m; ++i) cand.vertices.emplace_back(i, gv[i]);
                            int next_he = 0;
                            for (int l = 0; l < n; ++l) {
                                int h = next_he++;
                                cand.half_edges.push_back(h);
                                cand.attach[h] = la[l];
                                cand.involution[h] = h;
                                cand.legs.push_back(h);
                            }
                            for (size_t s = 0; s < slots.size(); ++s)
                                for (int t = 0; t < mult[s]; ++t) {
                                    int h1 = next_he++, h2 = next_he++;
                                    cand.half_edges.push_back(h1);
                                    cand.half_edges.push_back(h2);
                                    cand.attach[h1] = slots[s].first;
                                    cand.attach[h2] = slots[s].second;
                                    cand.involution[h1] = h2;
                                    cand.involution[h2] = h1;
                                }
                            auto cf = canonical_form(cand);
                            if (!found.count(cf.encoding))
                                found.emplace(cf.encoding,
                                              relabeled(cand, cf.half_edge_relabel,
                                                        cf.vertex_relabel));
                        });
                        return;
                    }
                    for (int v = 0; v < m; ++v) {
                        la[li] = v;
                        gen_legs(li + 1);
                    }
                };
                gen_legs(0);
                return;
            }
            for (int x = 0; x <= remaining; ++x) {
                gv[idx] = x;
                gen_genus(idx + 1, remaining - x);
            }
        };
        gen_genus(0, g);
    }

    std::vector<StableGraph> out;
    for (auto& [enc, gr] : found) out.push_back(std::move(gr));
    return out;
}

// ---------------------------------------------------------------------------
// JSON

nlohmann::json StableGraph::to_json() const {
    nlohmann::json j;
    j["genus"] = genus;
    j["vertices"] = nlohmann::json::array();
    for (const auto& [id, gv] : vertices)
        j["vertices"].push_back({{"id", id}, {"genus", gv}});
    j["half_edges"] = half_edges;
    j["attach"] = nlohmann::json::object();
    for (const auto& [h, v] : attach) j["attach"][std::to_string(h)] = v;
    j["involution"] = nlohmann::json::object();
    for (const auto& [h, hp] : involution) j["involution"][std::to_string(h)] = hp;
    j["legs"] = legs;
    return j;
}

StableGraph StableGraph::from_json(const nlohmann::json& j) {
    StableGraph g;
    g.genus = j.at("genus").get<int>();
    for (const auto& v : j.at("vertices"))
        g.vertices.emplace_back(v.at("id").get<int>(), v.at("genus").get<int>());
    g.half_edges = j.at("half_edges").get<std::vector<int>>();
    for (const auto& [k, v] : j.at("attach").items())
        g.attach[std::stoi(k)] = v.get<int>();
    for (const auto& [k, v] : j.at("involution").items())
        g.involution[std::stoi(k)] = v.get<int>();
    g.legs = j.at("legs").get<std::vector<int>>();
    return g;
}

} // namespace dr
