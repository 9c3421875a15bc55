#include "dr/weightsum.hpp"

#include <algorithm>
#include <cassert>
#include <mutex>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>

#include "dr/parallel.hpp"

namespace dr {

std::string xvar(int half_edge) { return "x_" + std::to_string(half_edge); }

int xvar_id(const std::string& var) {
    if (var.size() < 3 || var.compare(0, 2, "x_") != 0)
        throw DomainError("not a half-edge variable: " + var);
    return std::stoi(var.substr(2));
}

namespace {

long lmod(long v, long r) {
    long m = v % r;
    return m < 0 ? m + r : m;
}

// monomial as a half-edge -> exponent map, plus helpers

using Mono = std::map<int, int>;

MultiPoly mono_poly(const Mono& mono) {
    MultiPoly p{Rat(1)};
    for (const auto& [he, e] : mono)
        if (e > 0) p = p * MultiPoly::var(xvar(he), e);
    return p;
}

std::string mono_key(const Mono& mono) {
    std::ostringstream os;
    for (const auto& [he, e] : mono)
        if (e > 0) os << he << "^" << e << ",";
    return os.str();
}

// Splits a polynomial Q into (coefficient, half-edge monomial) pairs.
std::vector<std::pair<Rat, Mono>> monomials_of(const MultiPoly& Q) {
    std::vector<std::pair<Rat, Mono>> out;
    std::vector<int> he_of_var(Q.vars().size());
    for (size_t i = 0; i < Q.vars().size(); ++i) he_of_var[i] = xvar_id(Q.vars()[i]);
    for (const auto& [e, c] : Q.terms()) {
        Mono m;
        for (size_t i = 0; i < e.size(); ++i)
            if (e[i] > 0) m[he_of_var[i]] = e[i];
        out.emplace_back(c, m);
    }
    return out;
}

Mono transport_mono(const Mono& mono, const std::map<int, int>& relabel) {
    Mono out;
    for (const auto& [he, e] : mono) out[relabel.at(he)] = e;
    return out;
}

} // namespace

RamVector RamVector::make(std::vector<long> entries, long twist, int g, int n) {
    RamVector A;
    A.entries = std::move(entries);
    A.twist = twist;
    A.g = g;
    A.n = n;
    A.check();
    return A;
}

void RamVector::check() const {
    if ((int)entries.size() != n)
        throw DomainError("ramification vector length differs from n");
    long sum = std::accumulate(entries.begin(), entries.end(), 0L);
    if (sum != twist * (2L * g - 2 + n))
        throw DomainError("ramification vector sum is not k(2g-2+n)");
}

nlohmann::json SumResult::to_json() const {
    nlohmann::json j;
    j["value"] = rat_to_json(value);
    if (!metadata.is_null()) j["certificate"] = metadata;
    return j;
}

// ---------------------------------------------------------------------------
// weighting enumeration: legs forced, one free value per non-tree edge, tree
// edges solved from the vertex conditions leaf-to-root.

namespace {

struct WeightingSolver {
    const StableGraph& g;
    long r;
    std::vector<int> hes;
    std::map<int, int> hidx;
    std::vector<long> base_values; // legs pre-filled, others 0
    std::vector<std::pair<int, int>> free_edges; // (h, h') index pairs
    struct Step {
        int child_idx;    // unknown half (at the child vertex)
        int partner_idx;  // opposite half (at the parent)
        long target;      // k(2g(v)-2+n(v)) mod r
        std::vector<int> known; // the other half indices at the child vertex
    };
    std::vector<Step> steps;
    int h1;

    WeightingSolver(const StableGraph& gamma, const RamVector& A, long r_)
        : g(gamma), r(r_) {
        if (r < 1) throw DomainError("modulus r must be positive");
        A.check();
        if (A.n != g.n()) throw DomainError("ramification vector length differs from graph legs");
        for (int h : g.half_edges) {
            hidx.emplace(h, (int)hes.size());
            hes.push_back(h);
        }
        base_values.assign(hes.size(), 0);
        for (int i = 0; i < g.n(); ++i)
            base_values[hidx.at(g.legs[i])] = lmod(A.entries[i], r);

        auto st = spanning_tree(g);
        std::set<std::pair<int, int>> tree_set(st.tree_edges.begin(), st.tree_edges.end());
        for (const auto& [h, hp] : g.edges())
            if (!tree_set.count({h, hp}) && !tree_set.count({hp, h}))
                free_edges.emplace_back(hidx.at(h), hidx.at(hp));
        h1 = (int)free_edges.size();

        // solve tree edges child-to-root
        for (size_t p = st.vertex_order.size(); p-- > 1;) {
            int v = st.vertex_order[p];
            auto [h_par, h_child] = st.tree_edges[p - 1];
            Step s;
            s.child_idx = hidx.at(h_child);
            s.partner_idx = hidx.at(h_par);
            s.target = lmod(A.twist * (2L * g.vertex_genus(v) - 2 + g.valence(v)), r);
            for (int h : g.halves_at(v))
                if (h != h_child) s.known.push_back(hidx.at(h));
            steps.push_back(std::move(s));
        }
    }

    long count() const {
        long c = 1;
        for (int i = 0; i < h1; ++i) c *= r;
        return c;
    }

    // Fills `values` for the free tuple with the given flat index.
    void solve(long tuple_index, std::vector<long>& values) const {
        values = base_values;
        for (const auto& [hi, hpi] : free_edges) {
            long w = tuple_index % r;
            tuple_index /= r;
            values[hi] = w;
            values[hpi] = lmod(-w, r);
        }
        for (const auto& s : steps) {
            long acc = 0;
            for (int idx : s.known) acc += values[idx];
            values[s.child_idx] = lmod(s.target - acc, r);
            values[s.partner_idx] = lmod(-values[s.child_idx], r);
        }
    }
};

// Q compiled against a solver's half-edge indexing.
struct CompiledPoly {
    struct Term {
        Rat coeff;
        std::vector<std::pair<int, int>> factors; // (half index, exponent)
    };
    std::vector<Term> terms;

    CompiledPoly(const MultiPoly& Q, const StableGraph& g,
                 const std::map<int, int>& hidx) {
        std::vector<int> idx_of_var(Q.vars().size());
        for (size_t i = 0; i < Q.vars().size(); ++i) {
            int he = xvar_id(Q.vars()[i]);
            auto it = hidx.find(he);
            if (it == hidx.end())
                throw DomainError("Q variable " + Q.vars()[i] + " is not a half-edge of the graph");
            if (g.is_leg(he))
                throw DomainError("Q variable " + Q.vars()[i] + " is a leg");
            idx_of_var[i] = it->second;
        }
        for (const auto& [e, c] : Q.terms()) {
            Term t;
            t.coeff = c;
            for (size_t i = 0; i < e.size(); ++i)
                if (e[i] > 0) t.factors.emplace_back(idx_of_var[i], e[i]);
            terms.push_back(std::move(t));
        }
    }

    Rat eval(const std::vector<long>& values) const {
        Rat acc(0);
        Int prod;
        for (const auto& t : terms) {
            prod = 1;
            for (const auto& [idx, e] : t.factors) {
                Int pw;
                mpz_ui_pow_ui(pw.get_mpz_t(), (unsigned long)values[idx], (unsigned long)e);
                prod *= pw;
            }
            acc += t.coeff * Rat(prod);
        }
        return acc;
    }
};

} // namespace

void enumerate_weightings(const StableGraph& gamma, const RamVector& A, long r,
                          const std::function<void(const Weighting&)>& f) {
    WeightingSolver solver(gamma, A, r);
    std::vector<long> values;
    long total = solver.count();
    for (long t = 0; t < total; ++t) {
        solver.solve(t, values);
        Weighting w;
        w.modulus = r;
        for (size_t i = 0; i < solver.hes.size(); ++i)
            w.values[solver.hes[i]] = values[i];
        f(w);
    }
}

Rat sum_S(const StableGraph& gamma, const RamVector& A, long r, const MultiPoly& Q) {
    WeightingSolver solver(gamma, A, r);
    CompiledPoly q(Q, gamma, solver.hidx);
    long total = solver.count();
    Rat sum(0);
    if (solver.h1 == 0) {
        std::vector<long> values;
        solver.solve(0, values);
        sum = q.eval(values);
    } else {
        // chunk by the first free value: the partition is independent of the
        // thread count and chunks are folded in order
        long per_chunk = total / r;
        sum = parallel_reduce<Rat>(
            (int)r,
            [&](int chunk) {
                std::vector<long> values;
                Rat acc(0);
                for (long t = 0; t < per_chunk; ++t) {
                    solver.solve(chunk + t * r, values);
                    acc += q.eval(values);
                }
                return acc;
            },
            [](Rat& a, Rat&& b) { a += b; }, Rat(0));
    }
    Rat norm(1);
    for (int i = 0; i < solver.h1; ++i) norm *= Rat(1, r);
    return sum * norm;
}

SumResult sum_S_result(const StableGraph& gamma, const RamVector& A, long r,
                       const MultiPoly& Q) {
    SumResult res;
    res.value = sum_S(gamma, A, r, Q);
    res.metadata = {{"graph", canonical_form(gamma).hex()},
                    {"A", A.entries},
                    {"k", A.twist},
                    {"r", r},
                    {"Q", Q.to_string()}};
    return res;
}

// ---------------------------------------------------------------------------
// constant term

namespace {

std::mutex ct_mutex;
std::unordered_map<std::string, ConstantTermResult> ct_cache;

std::mutex build_mutex;
std::unordered_map<std::string, MultiPoly> build_cache;

long default_window_start(const StableGraph& g, const RamVector& A, const MultiPoly& Q) {
    long base = 0;
    for (long a : A.entries) base = std::max(base, std::labs(a));
    for (const auto& [id, gv] : g.vertices)
        base = std::max(base, std::labs(A.twist * (2L * gv - 2 + g.valence(id))));
    long degq = std::max(Q.total_degree(), 0);
    return 2 * (base + degq) + 3;
}

} // namespace

void clear_sum_caches() {
    std::scoped_lock lk(ct_mutex, build_mutex);
    ct_cache.clear();
    build_cache.clear();
}

ConstantTermResult constant_term_S(const StableGraph& gamma, const RamVector& A,
                                   const MultiPoly& Q, const ConstantTermOptions& opts) {
    bool cacheable = !opts.window_start && !opts.degree_hint &&
                     opts.validation_count == 5 && opts.coprimality_modulus == 0;
    std::string key;
    if (cacheable) {
        auto cf = canonical_form(gamma);
        std::map<std::string, std::string> renames;
        for (const auto& v : Q.vars())
            renames[v] = xvar(cf.half_edge_relabel.at(xvar_id(v)));
        std::ostringstream os;
        os << cf.hex() << "|";
        for (long a : A.entries) os << a << ",";
        os << "|" << A.twist << "|" << Q.renamed(renames).to_string();
        key = os.str();
        std::scoped_lock lk(ct_mutex);
        auto it = ct_cache.find(key);
        if (it != ct_cache.end()) return it->second;
    }

    long start = opts.window_start ? *opts.window_start
                                   : default_window_start(gamma, A, Q);
    int hint = opts.degree_hint ? *opts.degree_hint : std::max(Q.total_degree(), 0);
    auto fit = stable_interpolation(
        [&](long r) { return sum_S(gamma, A, r, Q); }, hint, opts.validation_count,
        start, opts.coprimality_modulus, "r");

    ConstantTermResult res;
    res.value = fit.poly.evaluate({{"r", Rat(0)}});
    res.r_polynomial = std::move(fit.poly);
    res.certificate = std::move(fit.certificate);
    if (cacheable) {
        std::scoped_lock lk(ct_mutex);
        ct_cache.emplace(key, res);
    }
    return res;
}

Congruence check_congruence(const StableGraph& gamma, const RamVector& A,
                            const MultiPoly& Q, long prime_r) {
    auto ct = constant_term_S(gamma, A, Q);
    if (prime_r <= ct.certificate.window_start)
        throw DomainError("check_congruence: r must exceed the interpolation window start");
    Rat vr = sum_S(gamma, A, prime_r, Q);
    if (rat_den(vr) % prime_r == 0 || rat_den(ct.value) % prime_r == 0)
        return Congruence::Inconclusive;
    Rat diff = vr - ct.value;
    if (rat_den(diff) % prime_r == 0) return Congruence::Inconclusive;
    return rat_num(diff) % prime_r == 0 ? Congruence::Holds : Congruence::Fails;
}

// ---------------------------------------------------------------------------
// separating-edge factorization

namespace {

// The component's ramification vector: original entries for original legs,
// minus the component's own leg sum for the cut leg.
RamVector component_ram(const StableGraph& comp, const std::vector<int>& leg_positions,
                        const RamVector& A, long minus_s) {
    std::vector<long> entries;
    for (int pos : leg_positions)
        entries.push_back(pos < A.n ? A.entries[pos] : minus_s);
    return RamVector::make(std::move(entries), 0, comp.genus, comp.n());
}

Mono restrict_mono(const Mono& mono, const StableGraph& comp) {
    std::set<int> hset(comp.half_edges.begin(), comp.half_edges.end());
    Mono out;
    for (const auto& [he, e] : mono)
        if (hset.count(he)) out[he] = e;
    return out;
}

} // namespace

Rat factor_separating(const StableGraph& gamma, std::pair<int, int> e,
                      const RamVector& A, const MultiPoly& Q) {
    A.check();
    if (A.twist != 0)
        throw DomainError("factor_separating: k != 0, apply reduce_to_k0 first");
    auto cut = cut_edge(gamma, e);
    if (!cut.separating) throw DomainError("factor_separating: edge is not separating");

    int n = gamma.n();
    int i1 = -1;
    for (size_t ci = 0; ci < cut.components.size(); ++ci)
        if (std::count(cut.components[ci].half_edges.begin(),
                       cut.components[ci].half_edges.end(), e.first))
            i1 = (int)ci;
    int i2 = 1 - i1;

    long s1 = 0, s2 = 0;
    for (int pos : cut.component_legs[i1])
        if (pos < n) s1 += A.entries[pos];
    for (int pos : cut.component_legs[i2])
        if (pos < n) s2 += A.entries[pos];

    RamVector A1 = component_ram(cut.components[i1], cut.component_legs[i1], A, -s1);
    RamVector A2 = component_ram(cut.components[i2], cut.component_legs[i2], A, -s2);

    Rat acc(0);
    for (const auto& [coeff, mono] : monomials_of(Q)) {
        int c1 = mono.count(e.first) ? mono.at(e.first) : 0;
        int c2 = mono.count(e.second) ? mono.at(e.second) : 0;
        Mono mono0 = mono;
        mono0.erase(e.first);
        mono0.erase(e.second);
        Rat f1 = constant_term_S(cut.components[i1], A1, mono_poly(restrict_mono(mono0, cut.components[i1]))).value;
        Rat f2 = constant_term_S(cut.components[i2], A2, mono_poly(restrict_mono(mono0, cut.components[i2]))).value;
        acc += coeff * f1 * rat_pow(Rat(-s1), (unsigned long)c1) *
               rat_pow(Rat(-s2), (unsigned long)c2) * f2;
    }
    return acc;
}

// ---------------------------------------------------------------------------
// non-separating shift recursion and the polynomial construction

namespace {

// p(x0,x1,x2,x3) = (x0+x1-x3)^c1 (x2-x0-x1+x3)^c2, with the standard
// split p = p0(x0,x1,x2) + x3 * p1(x0,x1,x2,x3).
struct PDecomp {
    MultiPoly p0, p1;
};

MultiPoly divide_by_var(const MultiPoly& p, const std::string& var) {
    MultiPoly out = MultiPoly::zero(p.vars());
    int idx = p.var_index(var);
    if (idx < 0) {
        if (p.is_zero()) return out;
        throw DomainError("divide_by_var: not divisible");
    }
    for (const auto& [e, c] : p.terms()) {
        if (e[idx] < 1) throw DomainError("divide_by_var: not divisible");
        Exponents ne = e;
        ne[idx] -= 1;
        out.add_term(ne, c);
    }
    return out;
}

PDecomp p_decomposition(int c1, int c2) {
    MultiPoly x0 = MultiPoly::var("x0"), x1 = MultiPoly::var("x1"),
              x2 = MultiPoly::var("x2"), x3 = MultiPoly::var("x3");
    MultiPoly p = (x0 + x1 - x3).pow((unsigned)c1) * (x2 - x0 - x1 + x3).pow((unsigned)c2);
    PDecomp d;
    d.p0 = p.substitute_or_keep({{"x3", MultiPoly(Rat(0))}});
    d.p1 = divide_by_var(p - d.p0, "x3");
    return d;
}

MultiPoly build_mono(const StableGraph& G, const Mono& mono);

// delegates used by both the numeric shift recursion and the symbolic
// spanning-tree extension:
//  - base_ct(mono'):  S_{A,0}(mono') at the base point, as a polynomial in
//    the caller's base variables (a constant for the numeric path)
//  - qj: S^{Gamma_e}_{(A,-j,j),0}(Q_0) as a polynomial in "j" and the base
//    variables
// Returns the constant-term decomposition ct(S1) + ct(S2) - ct(S3) as a
// polynomial in the shift variable "sh" and the base variables.
MultiPoly shift_decomposition(
    int c1, int c2, int h1_he, const Mono& mono0,
    const std::function<MultiPoly(const Mono&)>& base_ct, const MultiPoly& qj) {
    PDecomp pd = p_decomposition(c1, c2);

    MultiPoly acc;
    // ct(S1): r-free part of p0 applied through sums on Gamma itself
    int ix0 = pd.p0.var_index("x0"), ix1 = pd.p0.var_index("x1"),
        ix2 = pd.p0.var_index("x2");
    for (const auto& [e, c] : pd.p0.terms()) {
        if (ix2 >= 0 && e[ix2] > 0) continue; // carries a factor of r
        int t = ix0 >= 0 ? e[ix0] : 0;
        int i = ix1 >= 0 ? e[ix1] : 0;
        Mono m = mono0;
        if (t > 0) m[h1_he] += t;
        acc = acc + base_ct(m) * MultiPoly::var("sh", i) * c;
    }
    // ct(S2): sum_{j=1}^{sh} p1(-j, sh, 0, 0) q(A, j), in closed form
    MultiPoly mj = -MultiPoly::var("j");
    MultiPoly u0 = pd.p1.substitute_or_keep({{"x0", mj},
                                             {"x1", MultiPoly::var("sh")},
                                             {"x2", MultiPoly(Rat(0))},
                                             {"x3", MultiPoly(Rat(0))}});
    acc = acc + sum_range_closed_form(u0 * qj, "j", "sh");
    // ct(S3): boundary correction, only when c1 = 0 < c2; its r-power kills
    // the constant term unless c2 = 1
    if (c1 == 0 && c2 == 1)
        acc = acc - qj.substitute_or_keep({{"j", MultiPoly::var("sh")}});
    return acc;
}

std::string leg_var(int position /*0-based*/) {
    return "a_" + std::to_string(position + 1);
}

// --- the symbolic construction (proof of the polynomiality theorem) --------

struct TreeContext {
    const StableGraph& G;
    SpanningTree st;
    std::map<int, int> designated_leg; // vertex id -> leg position (0-based)
    std::string enc_hex;
};

std::string svar(int vid) { return "s_" + std::to_string(vid); }

MultiPoly poly_on_subtree(const TreeContext& ctx, int level, const Mono& mono);

// S^{Gamma_e}_{(base, -j, j), 0}(mono0) as a polynomial in "j" and the base
// s-variables of the first `level` tree vertices (designated legs of later
// vertices and non-designated legs are zero at the base point; the dependent
// first vertex carries minus the sum of the free coordinates).
MultiPoly q_of_level(const TreeContext& ctx, int level, const Mono& mono0,
                     std::pair<int, int> e) {
    auto cut = cut_edge(ctx.G, e);
    MultiPoly qfull = build_mono(cut.graph, mono0);
    int n = ctx.G.n();

    MultiPoly minus_free_sum;
    for (int t = 1; t < level; ++t)
        minus_free_sum = minus_free_sum - MultiPoly::var(svar(ctx.st.vertex_order[t]));

    std::map<std::string, MultiPoly> sub;
    for (int pos = 0; pos < n; ++pos) sub[leg_var(pos)] = MultiPoly(Rat(0));
    for (int t = 0; t < level; ++t) {
        int vid = ctx.st.vertex_order[t];
        int pos = ctx.designated_leg.at(vid);
        sub[leg_var(pos)] = t == 0 ? minus_free_sum : MultiPoly::var(svar(vid));
    }
    sub[leg_var(n)] = -MultiPoly::var("j");
    sub[leg_var(n + 1)] = MultiPoly::var("j");
    return qfull.substitute_or_keep(sub);
}

MultiPoly poly_on_subtree(const TreeContext& ctx, int level, const Mono& mono) {
    std::string key = ctx.enc_hex + "|P" + std::to_string(level) + "|" + mono_key(mono);
    {
        std::scoped_lock lk(build_mutex);
        auto it = build_cache.find(key);
        if (it != build_cache.end()) return it->second;
    }
    MultiPoly result;
    if (level == 1) {
        RamVector zeros = RamVector::make(std::vector<long>(ctx.G.n(), 0), 0,
                                          ctx.G.genus, ctx.G.n());
        result = MultiPoly(constant_term_S(ctx.G, zeros, mono_poly(mono)).value);
    } else {
        int v_new = ctx.st.vertex_order[level - 1];
        int v_par = ctx.G.attach.at(ctx.st.tree_edges[level - 2].first);
        auto [h_par, h_new] = ctx.st.tree_edges[level - 2];
        // orientation: the shifted amount leaves the parent's designated leg
        // and lands on the new vertex's, i.e. h1 = parent side, h2 = new side
        int c1 = mono.count(h_par) ? mono.at(h_par) : 0;
        int c2 = mono.count(h_new) ? mono.at(h_new) : 0;
        Mono mono0 = mono;
        mono0.erase(h_par);
        mono0.erase(h_new);

        MultiPoly qj = q_of_level(ctx, level - 1, mono0, {h_par, h_new});
        MultiPoly psi = shift_decomposition(
            c1, c2, h_par, mono0,
            [&](const Mono& m) { return poly_on_subtree(ctx, level - 1, m); }, qj);

        // reparametrize from (base in P_{level-1}, shift) to P_level
        // coordinates: sh = s_new, base parent coordinate = s_par + s_new
        std::map<std::string, MultiPoly> sub;
        sub["sh"] = MultiPoly::var(svar(v_new));
        if (v_par != ctx.st.vertex_order[0])
            sub[svar(v_par)] = MultiPoly::var(svar(v_par)) + MultiPoly::var(svar(v_new));
        result = psi.substitute_or_keep(sub);
    }
    {
        std::scoped_lock lk(build_mutex);
        build_cache.emplace(key, result);
    }
    return result;
}

MultiPoly build_mono_impl(const StableGraph& G, const Mono& mono,
                          const std::string& enc_hex) {
    auto edges = G.edges();
    if (edges.empty()) {
        if (!mono.empty())
            throw DomainError("build_S_polynomial: Q variable on an edgeless graph");
        return MultiPoly(Rat(1));
    }

    // separating edge: factor through the two components
    for (const auto& e : edges) {
        auto cut = cut_edge(G, e);
        if (!cut.separating) continue;
        int n = G.n();
        int i1 = std::count(cut.components[0].half_edges.begin(),
                            cut.components[0].half_edges.end(), e.first)
                     ? 0 : 1;
        int i2 = 1 - i1;
        int c1 = mono.count(e.first) ? mono.at(e.first) : 0;
        int c2 = mono.count(e.second) ? mono.at(e.second) : 0;
        Mono mono0 = mono;
        mono0.erase(e.first);
        mono0.erase(e.second);

        MultiPoly s[2];
        for (int ci : {i1, i2})
            for (int pos : cut.component_legs[ci])
                if (pos < n) s[ci] = s[ci] + MultiPoly::var(leg_var(pos));

        MultiPoly factors[2];
        for (int ci : {i1, i2}) {
            const auto& comp = cut.components[ci];
            MultiPoly sub = build_mono(comp, restrict_mono(mono0, comp));
            // component leg variables back to the parent graph's: original
            // legs keep their positions, the cut leg carries minus the
            // component's leg sum
            std::map<std::string, MultiPoly> m;
            const auto& positions = cut.component_legs[ci];
            for (size_t idx = 0; idx < positions.size(); ++idx) {
                int pos = positions[idx];
                m[leg_var((int)idx)] = pos < n ? MultiPoly::var(leg_var(pos)) : -s[ci];
            }
            factors[ci] = sub.substitute_or_keep(m);
        }
        return factors[i1] * (-s[i1]).pow((unsigned)c1) * (-s[i2]).pow((unsigned)c2) *
               factors[i2];
    }

    // no separating edge: ensure one designated leg per vertex
    for (const auto& [vid, gv] : G.vertices) {
        bool has_leg = false;
        for (int l : G.legs) has_leg |= G.attach.at(l) == vid;
        if (has_leg) continue;
        // augment every legless vertex with a zero-valued leg (valid at k=0)
        StableGraph aug = G;
        int next_he = 1 + *std::max_element(aug.half_edges.begin(), aug.half_edges.end());
        int n0 = G.n();
        for (const auto& [v2, g2] : G.vertices) {
            bool has = false;
            for (int l : G.legs) has |= G.attach.at(l) == v2;
            if (has) continue;
            int h = next_he++;
            aug.half_edges.push_back(h);
            aug.attach[h] = v2;
            aug.involution[h] = h;
            aug.legs.push_back(h);
        }
        MultiPoly p = build_mono(aug, mono);
        std::map<std::string, MultiPoly> zeros;
        for (int pos = n0; pos < aug.n(); ++pos)
            zeros[leg_var(pos)] = MultiPoly(Rat(0));
        return p.substitute_or_keep(zeros);
    }

    TreeContext ctx{G, spanning_tree(G), {}, enc_hex};
    for (const auto& [vid, gv] : G.vertices)
        for (int pos = 0; pos < G.n(); ++pos)
            if (G.attach.at(G.legs[pos]) == vid) {
                ctx.designated_leg.emplace(vid, pos);
                break;
            }

    int m = G.num_vertices();
    MultiPoly F = poly_on_subtree(ctx, m, mono);

    // back to leg variables: the free coordinate of each non-root vertex is
    // its total leg sum
    std::map<std::string, MultiPoly> sub;
    for (int t = 1; t < m; ++t) {
        int vid = ctx.st.vertex_order[t];
        MultiPoly sum;
        for (int pos = 0; pos < G.n(); ++pos)
            if (G.attach.at(G.legs[pos]) == vid)
                sum = sum + MultiPoly::var(leg_var(pos));
        sub[svar(vid)] = sum;
    }
    return F.substitute_or_keep(sub);
}

MultiPoly build_mono(const StableGraph& G, const Mono& mono) {
    auto cf = canonical_form(G);
    StableGraph Gc = relabeled(G, cf.half_edge_relabel, cf.vertex_relabel);
    Mono mono_c = transport_mono(mono, cf.half_edge_relabel);
    std::string enc_hex = cf.hex();
    std::string key = enc_hex + "|B|" + mono_key(mono_c);
    {
        std::scoped_lock lk(build_mutex);
        auto it = build_cache.find(key);
        if (it != build_cache.end()) return it->second;
    }
    MultiPoly res = build_mono_impl(Gc, mono_c, enc_hex);
    {
        std::scoped_lock lk(build_mutex);
        build_cache.emplace(key, res);
    }
    return res;
}

} // namespace

ShiftRecursionResult shift_recursion(const StableGraph& gamma, std::pair<int, int> e,
                                     const RamVector& A, long shift,
                                     const MultiPoly& Q) {
    A.check();
    if (A.twist != 0)
        throw DomainError("shift_recursion: k != 0, apply reduce_to_k0 first");
    auto invit = gamma.involution.find(e.first);
    if (invit == gamma.involution.end() || invit->second != e.second || e.first == e.second)
        throw DomainError("shift_recursion: not an edge");
    if (is_separating(gamma, e))
        throw DomainError("shift_recursion: edge is separating");

    int v1 = gamma.attach.at(e.first), v2 = gamma.attach.at(e.second);
    StableGraph aug = gamma;
    std::vector<long> base_entries = A.entries;
    int leg1 = -1, leg2 = -1;
    for (int pos = 0; pos < aug.n(); ++pos) {
        int v = aug.attach.at(aug.legs[pos]);
        if (v == v1 && leg1 < 0) leg1 = pos;
        else if (v == v2 && leg2 < 0 && pos != leg1) leg2 = pos;
    }
    // a missing designated leg is added with value zero (harmless at k = 0)
    auto add_leg = [&](int vid) {
        int h = 1 + *std::max_element(aug.half_edges.begin(), aug.half_edges.end());
        aug.half_edges.push_back(h);
        aug.attach[h] = vid;
        aug.involution[h] = h;
        aug.legs.push_back(h);
        base_entries.push_back(0);
        return aug.n() - 1;
    };
    if (leg1 < 0) leg1 = add_leg(v1);
    if (leg2 < 0) leg2 = add_leg(v2);
    RamVector base = RamVector::make(base_entries, 0, gamma.genus, aug.n());

    MultiPoly psi;
    for (const auto& [coeff, mono] : monomials_of(Q)) {
        int c1 = mono.count(e.first) ? mono.at(e.first) : 0;
        int c2 = mono.count(e.second) ? mono.at(e.second) : 0;
        Mono mono0 = mono;
        mono0.erase(e.first);
        mono0.erase(e.second);

        // q(A, j) at the fixed base point
        auto cut = cut_edge(aug, e);
        MultiPoly qfull = build_mono(cut.graph, mono0);
        std::map<std::string, MultiPoly> sub;
        for (int pos = 0; pos < aug.n(); ++pos)
            sub[leg_var(pos)] = MultiPoly(Rat(base.entries[pos]));
        sub[leg_var(aug.n())] = -MultiPoly::var("j");
        sub[leg_var(aug.n() + 1)] = MultiPoly::var("j");
        MultiPoly qj = qfull.substitute_or_keep(sub);

        MultiPoly part = shift_decomposition(
            c1, c2, e.first, mono0,
            [&](const Mono& m) {
                return MultiPoly(constant_term_S(aug, base, mono_poly(m)).value);
            },
            qj);
        psi = psi + part * coeff;
    }

    ShiftRecursionResult res;
    res.psi = psi;
    res.graph = aug;
    res.base = base;
    res.leg1_pos = leg1;
    res.leg2_pos = leg2;
    res.value = psi.is_zero() ? Rat(0) : psi.evaluate({{"sh", Rat(shift)}});
    return res;
}

MultiPoly build_S_polynomial(const StableGraph& gamma, const MultiPoly& Q) {
    MultiPoly acc;
    for (const auto& [coeff, mono] : monomials_of(Q))
        acc = acc + build_mono(gamma, mono) * coeff;
    return acc;
}

ReduceToK0Result reduce_to_k0(const StableGraph& gamma, const RamVector& A) {
    A.check();
    ReduceToK0Result out;
    out.graph = gamma;
    std::vector<long> entries = A.entries;
    int next_he = gamma.half_edges.empty()
                      ? 0
                      : 1 + *std::max_element(gamma.half_edges.begin(),
                                              gamma.half_edges.end());
    for (const auto& [vid, gv] : gamma.vertices) {
        int h = next_he++;
        out.graph.half_edges.push_back(h);
        out.graph.attach[h] = vid;
        out.graph.involution[h] = h;
        out.added_legs.push_back((int)out.graph.legs.size());
        out.graph.legs.push_back(h);
        entries.push_back(-A.twist * (2L * gv - 2 + gamma.valence(vid)));
    }
    out.A = RamVector::make(std::move(entries), 0, gamma.genus, out.graph.n());
    return out;
}

} // namespace dr
