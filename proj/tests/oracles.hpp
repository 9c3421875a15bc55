// Independent reference implementations used only by tests. Deliberately
// naive: enumerate everything, filter, compare.
#ifndef DR_TESTS_ORACLES_HPP
#define DR_TESTS_ORACLES_HPP

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <vector>

#include "dr/graphs.hpp"
#include "dr/weightsum.hpp"

namespace oracles {

// --- brute-force weighting sum ----------------------------------------------

// Enumerates all maps (non-leg half-edges) -> {0..r-1}, filters by the three
// weighting conditions, sums Q, normalizes by r^{h1}.
inline dr::Rat brute_sum(const dr::StableGraph& G, const dr::RamVector& A, long r,
                         const dr::MultiPoly& Q) {
    std::vector<int> nl;
    for (int h : G.half_edges)
        if (!G.is_leg(h)) nl.push_back(h);
    std::map<int, long> val;
    for (int i = 0; i < G.n(); ++i)
        val[G.legs[i]] = ((A.entries[i] % r) + r) % r;

    auto edges = G.edges();
    dr::Rat sum(0);
    std::vector<long> v(nl.size(), 0);
    for (;;) {
        for (size_t i = 0; i < nl.size(); ++i) val[nl[i]] = v[i];
        bool ok = true;
        for (const auto& [h, hp] : edges)
            if ((val[h] + val[hp]) % r != 0) { ok = false; break; }
        if (ok) {
            for (const auto& [vid, gv] : G.vertices) {
                long target =
                    ((A.twist * (2L * gv - 2 + G.valence(vid))) % r + r) % r;
                long s = 0;
                for (int h : G.halves_at(vid)) s += val[h];
                if (s % r != target) { ok = false; break; }
            }
        }
        if (ok) {
            std::map<std::string, dr::Rat> pt;
            for (int h : nl) pt[dr::xvar(h)] = dr::Rat(val[h]);
            sum += Q.is_zero() ? dr::Rat(0) : Q.evaluate(pt);
        }
        size_t p = 0;
        while (p < v.size() && ++v[p] == r) v[p++] = 0;
        if (p == v.size()) break;
    }
    dr::Rat norm(1);
    for (int i = 0; i < G.h1(); ++i) norm /= dr::Rat(r);
    return sum * norm;
}

// --- brute-force stable-graph class counter ----------------------------------

// A decoration-free stable graph is determined up to leg-fixing isomorphism
// by: vertex genera, the vertex of each leg, and the edge multiset over
// unordered vertex pairs (loops allowed). Enumerate all of those, filter, and
// quotient by vertex permutations.
struct PlainGraph {
    std::vector<int> genus;                        // per vertex 0..m-1
    std::vector<int> leg_at;                       // per leg, vertex index
    std::map<std::pair<int, int>, int> edges;      // (u<=v) -> multiplicity
};

inline PlainGraph permuted(const PlainGraph& G, const std::vector<int>& perm) {
    PlainGraph out;
    out.genus.resize(G.genus.size());
    for (size_t v = 0; v < G.genus.size(); ++v) out.genus[perm[v]] = G.genus[v];
    for (int v : G.leg_at) out.leg_at.push_back(perm[v]);
    for (const auto& [e, m] : G.edges) {
        int u = perm[e.first], v = perm[e.second];
        out.edges[{std::min(u, v), std::max(u, v)}] += m;
    }
    return out;
}

inline bool operator<(const PlainGraph& a, const PlainGraph& b) {
    if (a.genus != b.genus) return a.genus < b.genus;
    if (a.leg_at != b.leg_at) return a.leg_at < b.leg_at;
    return a.edges < b.edges;
}

inline PlainGraph plain_canonical(const PlainGraph& G) {
    int m = (int)G.genus.size();
    std::vector<int> perm(m);
    std::iota(perm.begin(), perm.end(), 0);
    PlainGraph best = permuted(G, perm);
    while (std::next_permutation(perm.begin(), perm.end())) {
        PlainGraph cand = permuted(G, perm);
        if (cand < best) best = cand;
    }
    return best;
}

inline bool plain_connected(const PlainGraph& G) {
    int m = (int)G.genus.size();
    std::vector<bool> seen(m, false);
    std::vector<int> stack{0};
    seen[0] = true;
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        for (const auto& [e, mult] : G.edges) {
            int o = -1;
            if (e.first == v) o = e.second;
            else if (e.second == v) o = e.first;
            if (o >= 0 && !seen[o]) {
                seen[o] = true;
                stack.push_back(o);
            }
        }
    }
    return std::all_of(seen.begin(), seen.end(), [](bool b) { return b; });
}

inline long brute_count_stable_graphs(int g, int n) {
    std::set<PlainGraph> classes;
    int max_m = 2 * g - 2 + n;
    for (int m = 1; m <= std::max(1, max_m); ++m) {
        // genus vectors with sum <= g
        std::vector<int> gv(m, 0);
        for (;;) {
            int gsum = std::accumulate(gv.begin(), gv.end(), 0);
            int E = g - gsum + m - 1; // from the genus condition
            if (gsum <= g && E >= 0) {
                // leg placements
                std::vector<int> legs(n, 0);
                for (;;) {
                    // edge multisets of size E over vertex pairs
                    std::vector<std::pair<int, int>> slots;
                    for (int u = 0; u < m; ++u)
                        for (int v = u; v < m; ++v) slots.emplace_back(u, v);
                    std::vector<int> mult(slots.size(), 0);
                    std::function<void(size_t, int)> go = [&](size_t i, int rem) {
                        if (i == slots.size()) {
                            if (rem != 0) return;
                            PlainGraph G;
                            G.genus = gv;
                            G.leg_at = legs;
                            for (size_t s = 0; s < slots.size(); ++s)
                                if (mult[s]) G.edges[slots[s]] = mult[s];
                            // stability
                            std::vector<int> deg(m, 0);
                            for (int l : legs) deg[l]++;
                            for (const auto& [e, mm] : G.edges) {
                                deg[e.first] += mm;
                                deg[e.second] += mm;
                            }
                            for (int v = 0; v < m; ++v)
                                if (2 * gv[v] - 2 + deg[v] <= 0) return;
                            if (!plain_connected(G)) return;
                            classes.insert(plain_canonical(G));
                            return;
                        }
                        for (int c = 0; c <= rem; ++c) {
                            mult[i] = c;
                            go(i + 1, rem - c);
                        }
                        mult[i] = 0;
                    };
                    go(0, E);
                    // next leg placement
                    size_t p = 0;
                    while (p < legs.size() && ++legs[p] == m) legs[p++] = 0;
                    if (p == legs.size()) break;
                    if (legs.empty()) break;
                }
            }
            // next genus vector
            size_t p = 0;
            while (p < gv.size() && ++gv[p] > g) gv[p++] = 0;
            if (p == gv.size()) break;
        }
    }
    return (long)classes.size();
}

// --- exhaustive automorphism counter ------------------------------------------

// Counts pairs (vertex permutation, half-edge permutation) that preserve
// genus, commute with attach and involution, and fix legs pointwise.
inline long brute_automorphisms(const dr::StableGraph& G) {
    std::vector<int> vids;
    for (const auto& [vid, gv] : G.vertices) vids.push_back(vid);
    std::vector<int> hes = G.half_edges;
    std::sort(hes.begin(), hes.end());

    std::vector<int> vperm(vids.size());
    std::iota(vperm.begin(), vperm.end(), 0);
    long count = 0;
    do {
        bool vok = true;
        for (size_t i = 0; i < vids.size(); ++i)
            if (G.vertex_genus(vids[i]) != G.vertex_genus(vids[vperm[i]])) vok = false;
        if (!vok) continue;
        std::map<int, int> vmap;
        for (size_t i = 0; i < vids.size(); ++i) vmap[vids[i]] = vids[vperm[i]];

        std::vector<int> hperm(hes.size());
        std::iota(hperm.begin(), hperm.end(), 0);
        do {
            std::map<int, int> hmap;
            for (size_t i = 0; i < hes.size(); ++i) hmap[hes[i]] = hes[hperm[i]];
            bool ok = true;
            for (int l : G.legs)
                if (hmap[l] != l) { ok = false; break; }
            if (ok)
                for (int h : hes) {
                    if (G.attach.at(hmap[h]) != vmap[G.attach.at(h)] ||
                        hmap[G.involution.at(h)] != G.involution.at(hmap[h])) {
                        ok = false;
                        break;
                    }
                }
            if (ok) ++count;
        } while (std::next_permutation(hperm.begin(), hperm.end()));
    } while (std::next_permutation(vperm.begin(), vperm.end()));
    return count;
}

// --- deterministic random fixtures ------------------------------------------

// n entries summing to zero, each bounded by amp in absolute value except
// possibly the balancing last entry.
inline std::vector<long> zero_sum_vector(int n, std::mt19937& rng, long amp) {
    std::vector<long> a(n, 0);
    long s = 0;
    for (int i = 0; i + 1 < n; ++i) {
        a[i] = (long)(rng() % (2 * amp + 1)) - amp;
        s += a[i];
    }
    a[n - 1] = -s;
    return a;
}

// Monomial in the non-leg half-edge variables, total degree <= max_deg.
inline dr::MultiPoly random_monomial(const dr::StableGraph& G, std::mt19937& rng,
                                     int max_deg) {
    std::vector<int> nl;
    for (int h : G.half_edges)
        if (!G.is_leg(h)) nl.push_back(h);
    dr::MultiPoly m(dr::Rat(1));
    if (nl.empty()) return m;
    int deg = (int)(rng() % (max_deg + 1));
    for (int d = 0; d < deg; ++d)
        m = m * dr::MultiPoly::var(dr::xvar(nl[rng() % nl.size()]));
    return m;
}

} // namespace oracles

#endif
