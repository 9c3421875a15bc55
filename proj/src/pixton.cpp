#include "dr/pixton.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>

#include "dr/interpolate.hpp"

namespace dr {

int DecoratedStratum::codim() const {
    int c = graph.num_edges();
    for (const auto& [he, e] : psi) c += e;
    for (const auto& [v, e] : kappa1) c += e;
    return c;
}

namespace {

std::map<int, int> pruned(const std::map<int, int>& m) {
    std::map<int, int> out;
    for (const auto& [k, v] : m)
        if (v != 0) out[k] = v;
    return out;
}

std::string leg_var(int position /*0-based*/) {
    return "a_" + std::to_string(position + 1);
}

} // namespace

void TautExpression::add(const DecoratedStratum& s, const MultiPoly& coeff) {
    if (coeff.is_zero()) return;
    std::map<int, int> psi = pruned(s.psi), kappa = pruned(s.kappa1);
    auto cf = canonical_form_decorated(s.graph, psi, kappa);
    DecoratedStratum canon;
    canon.graph = relabeled(s.graph, cf.half_edge_relabel, cf.vertex_relabel);
    for (const auto& [he, e] : psi) canon.psi[cf.half_edge_relabel.at(he)] = e;
    for (const auto& [v, e] : kappa) canon.kappa1[cf.vertex_relabel.at(v)] = e;
    std::string key = cf.hex();
    auto it = terms_.find(key);
    if (it == terms_.end()) {
        terms_.emplace(key, TautTerm{std::move(canon), coeff.compacted()});
    } else {
        it->second.coeff = (it->second.coeff + coeff).compacted();
        if (it->second.coeff.is_zero()) terms_.erase(it);
    }
}

void TautExpression::add(const DecoratedStratum& s, const Rat& coeff) {
    add(s, MultiPoly(coeff));
}

TautExpression TautExpression::filtered_codim(int codim) const {
    TautExpression out(g_, n_);
    for (const auto& [key, term] : terms_)
        if (term.stratum.codim() == codim) out.terms_.emplace(key, term);
    return out;
}

TautExpression TautExpression::evaluated(const std::map<std::string, Rat>& point) const {
    TautExpression out(g_, n_);
    for (const auto& [key, term] : terms_) {
        Rat v = term.coeff.evaluate(point);
        if (v == 0) continue;
        out.terms_.emplace(key, TautTerm{term.stratum, MultiPoly(v)});
    }
    return out;
}

bool TautExpression::operator==(const TautExpression& o) const {
    if (g_ != o.g_ || n_ != o.n_ || terms_.size() != o.terms_.size()) return false;
    auto a = terms_.begin();
    auto b = o.terms_.begin();
    for (; a != terms_.end(); ++a, ++b)
        if (a->first != b->first || a->second.coeff != b->second.coeff) return false;
    return true;
}

nlohmann::json TautExpression::to_json() const {
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& [key, term] : terms_) {
        nlohmann::json t;
        t["graph"] = term.stratum.graph.to_json();
        t["psi"] = nlohmann::json::object();
        for (const auto& [he, e] : term.stratum.psi)
            t["psi"][std::to_string(he)] = e;
        t["kappa1"] = nlohmann::json::object();
        for (const auto& [v, e] : term.stratum.kappa1)
            t["kappa1"][std::to_string(v)] = e;
        t["coeff"] = term.coeff.is_constant() ? rat_to_json(term.coeff.constant_value())
                                              : term.coeff.to_json();
        terms.push_back(std::move(t));
    }
    return {{"g", g_}, {"n", n_}, {"terms", std::move(terms)}};
}

StableGraph trivial_graph(int g, int n) {
    StableGraph G;
    G.genus = g;
    G.vertices = {{0, g}};
    for (int i = 1; i <= n; ++i) {
        G.half_edges.push_back(i);
        G.attach[i] = 0;
        G.involution[i] = i;
        G.legs.push_back(i);
    }
    return G;
}

// ---------------------------------------------------------------------------
// P_r / P_0 assembly

namespace {

void for_each_bounded_vector(int len, int budget, std::vector<int>& cur, int pos,
                             const std::function<void(const std::vector<int>&)>& f) {
    if (pos == len) {
        f(cur);
        return;
    }
    for (int v = 0; v <= budget; ++v) {
        cur[pos] = v;
        for_each_bounded_vector(len, budget - v, cur, pos + 1, f);
    }
    cur[pos] = 0;
}

// Shared shape of P_r and P_0: every edge contributes a factor whose t^m
// coefficient is -c^{m+1}/(m+1)! with c = x_h x_{h'} / 2 summed through S,
// and (psi_h + psi_{h'})^m is re-expanded binomially.
TautExpression assemble_P(const StableGraph& gamma, int max_codim,
                          const std::function<MultiPoly(const MultiPoly&)>& S_of) {
    TautExpression out(gamma.genus, gamma.n());
    auto edges = gamma.edges();
    int ne = (int)edges.size();
    if (ne > max_codim) return out;

    std::vector<int> m(ne, 0);
    for_each_bounded_vector(ne, max_codim - ne, m, 0, [&](const std::vector<int>& mv) {
        MultiPoly Q{Rat(1)};
        Rat cfac(1);
        for (int e = 0; e < ne; ++e) {
            Q = Q * MultiPoly::var(xvar(edges[e].first), mv[e] + 1) *
                MultiPoly::var(xvar(edges[e].second), mv[e] + 1);
            cfac *= Rat(-1) / Rat(int_pow(Int(2), mv[e] + 1) * factorial(mv[e] + 1));
        }
        MultiPoly val = S_of(Q);
        if (val.is_zero()) return;

        std::map<int, int> psi;
        std::function<void(int, Rat)> split = [&](int e, Rat bin) {
            if (e == ne) {
                out.add(DecoratedStratum{gamma, psi, {}}, val * (cfac * bin));
                return;
            }
            for (int i = 0; i <= mv[e]; ++i) {
                psi[edges[e].first] = i;
                psi[edges[e].second] = mv[e] - i;
                split(e + 1, bin * Rat(binomial(mv[e], i)));
            }
            psi.erase(edges[e].first);
            psi.erase(edges[e].second);
        };
        split(0, Rat(1));
    });
    return out;
}

} // namespace

TautExpression P_graph(const StableGraph& gamma, const RamVector& A, long r,
                       int max_codim) {
    return assemble_P(gamma, max_codim, [&](const MultiPoly& Q) {
        return MultiPoly(sum_S(gamma, A, r, Q));
    });
}

TautExpression P0_graph(const StableGraph& gamma, const RamVector& A, int max_codim,
                        const ConstantTermOptions& opts) {
    return assemble_P(gamma, max_codim, [&](const MultiPoly& Q) {
        return MultiPoly(constant_term_S(gamma, A, Q, opts).value);
    });
}

// ---------------------------------------------------------------------------
// prefactor and pullback

namespace {

// exp(-(K kappa_1 - sum_i X_i psi_i)/2) truncated; K and X_i are the squares
// k^2 and a_i^2 as rationals or chart polynomials.
TautExpression prefactor_from(int g, int n, const MultiPoly& K,
                              const std::vector<MultiPoly>& X, int max_codim) {
    StableGraph triv = trivial_graph(g, n);
    TautExpression out(g, n);
    std::vector<int> q(n + 1, 0); // q[0] is the kappa_1 power
    for_each_bounded_vector(n + 1, max_codim, q, 0, [&](const std::vector<int>& qv) {
        MultiPoly coeff{Rat(1)};
        Rat denom(1);
        for (int i = 0; i <= n; ++i) {
            denom *= Rat(factorial(qv[i]) * int_pow(Int(2), qv[i]));
            const MultiPoly& base = i == 0 ? K : X[i - 1];
            coeff = coeff * base.pow((unsigned)qv[i]);
        }
        if (qv[0] % 2) coeff = -coeff;
        coeff = coeff * (Rat(1) / denom);
        DecoratedStratum s;
        s.graph = triv;
        if (qv[0]) s.kappa1[0] = qv[0];
        for (int i = 1; i <= n; ++i)
            if (qv[i]) s.psi[triv.legs[i - 1]] = qv[i];
        out.add(s, coeff);
    });
    return out;
}

} // namespace

TautExpression exp_prefactor(int g, int n, const RamVector& A, int max_codim) {
    A.check();
    if (max_codim < 0) throw DomainError("exp_prefactor: negative codimension bound");
    MultiPoly K{Rat(Int(A.twist) * Int(A.twist))};
    std::vector<MultiPoly> X;
    for (long a : A.entries) X.emplace_back(Rat(Int(a) * Int(a)));
    return prefactor_from(g, n, K, X, max_codim);
}

TautExpression pullback_multiply(const StableGraph& gamma,
                                 const DecoratedStratum& ambient_term,
                                 const TautExpression& inner) {
    const StableGraph& amb = ambient_term.graph;
    // leg psi powers by marking position
    std::vector<int> leg_psi(gamma.n(), 0);
    for (const auto& [he, e] : ambient_term.psi) {
        auto it = std::find(amb.legs.begin(), amb.legs.end(), he);
        if (it == amb.legs.end())
            throw DomainError("pullback_multiply: ambient psi is not on a leg");
        int pos = (int)(it - amb.legs.begin());
        if (pos >= gamma.n())
            throw DomainError("pullback_multiply: leg missing on the target graph");
        leg_psi[pos] = e;
    }
    int p = 0;
    for (const auto& [v, e] : ambient_term.kappa1) p += e;

    TautExpression out(inner.g(), inner.n());
    std::vector<int> vids;
    for (const auto& [vid, gv] : gamma.vertices) vids.push_back(vid);

    for (const auto& [key, term] : inner.terms()) {
        DecoratedStratum base = term.stratum;
        for (int pos = 0; pos < gamma.n(); ++pos)
            if (leg_psi[pos]) base.psi[base.graph.legs[pos]] += leg_psi[pos];
        // kappa_1^p spreads over the vertices multinomially
        std::vector<int> pv(vids.size(), 0);
        std::function<void(size_t, int, Rat)> spread = [&](size_t i, int rem, Rat mult) {
            if (i + 1 == vids.size()) {
                DecoratedStratum s = base;
                pv[i] = rem;
                for (size_t j = 0; j < vids.size(); ++j)
                    if (pv[j]) s.kappa1[vids[j]] += pv[j];
                out.add(s, term.coeff * mult);
                return;
            }
            for (int c = 0; c <= rem; ++c) {
                pv[i] = c;
                spread(i + 1, rem - c, mult * Rat(binomial(rem, c)));
            }
            pv[i] = 0;
        };
        if (vids.empty())
            throw DomainError("pullback_multiply: graph has no vertices");
        spread(0, p, Rat(1));
    }
    return out;
}

// ---------------------------------------------------------------------------
// DR_g(A) and the polynomial family

namespace {

// Assembles the codim-g bracket from a prefactor expression and a per-graph
// P_0 builder.
TautExpression assemble_dr(
    int g, int n, const TautExpression& prefactor,
    const std::function<TautExpression(const StableGraph&)>& P0_of) {
    TautExpression out(g, n);
    for (const StableGraph& gamma : enumerate_stable_graphs(g, n)) {
        if (gamma.num_edges() > g) continue;
        TautExpression P0 = P0_of(gamma);
        if (P0.empty()) continue;
        Rat inv_aut = Rat(1) / Rat(automorphism_count(gamma));
        for (const auto& [akey, aterm] : prefactor.terms()) {
            int ca = aterm.stratum.codim();
            if (ca > g) continue;
            TautExpression sliced = P0.filtered_codim(g - ca);
            if (sliced.empty()) continue;
            TautExpression pulled = pullback_multiply(gamma, aterm.stratum, sliced);
            for (const auto& [key, term] : pulled.terms())
                out.add(term.stratum, term.coeff * aterm.coeff * inv_aut);
        }
    }
    return out;
}

} // namespace

TautExpression dr_cycle(int g, int n, const RamVector& A) {
    A.check();
    if (A.g != g || A.n != n) throw DomainError("dr_cycle: (g, n) mismatch");
    TautExpression prefactor = exp_prefactor(g, n, A, g);
    return assemble_dr(g, n, prefactor,
                       [&](const StableGraph& gamma) { return P0_graph(gamma, A, g); });
}

std::vector<std::string> dr_chart_vars(int g, int n) {
    std::vector<std::string> vars{"k"};
    for (int i = 2; i <= n; ++i) vars.push_back(leg_var(i - 1));
    return vars;
}

namespace {

// a_1 = (2g-2+n) k - sum_{i>=2} a_i; a_i for i >= 2 are chart variables.
MultiPoly chart_leg(int g, int n, int pos /*0-based*/) {
    if (pos > 0) return MultiPoly::var(leg_var(pos));
    MultiPoly a1 = MultiPoly::var("k") * Rat(2 * g - 2 + n);
    for (int i = 2; i <= n; ++i) a1 = a1 - MultiPoly::var(leg_var(i - 1));
    return a1;
}

// S^Gamma_{A,0}(Q) as a chart polynomial: eliminate the twist with one extra
// zero-sum leg per vertex, build the leg polynomial, then substitute the
// chart forms.
MultiPoly symbolic_S(const StableGraph& gamma, const MultiPoly& Q, int g, int n) {
    RamVector zeros = RamVector::make(std::vector<long>(gamma.n(), 0), 0,
                                      gamma.genus, gamma.n());
    ReduceToK0Result red = reduce_to_k0(gamma, zeros);
    MultiPoly P = build_S_polynomial(red.graph, Q);

    std::map<std::string, MultiPoly> sub;
    for (int pos = 0; pos < gamma.n(); ++pos)
        sub[leg_var(pos)] = chart_leg(g, n, pos);
    for (size_t i = 0; i < gamma.vertices.size(); ++i) {
        auto [vid, gv] = gamma.vertices[i];
        long c = -(2L * gv - 2 + gamma.valence(vid));
        sub[leg_var(red.added_legs[i])] = MultiPoly::var("k") * Rat(c);
    }
    return P.substitute_or_keep(sub);
}

TautExpression dr_polynomial_recursion(int g, int n) {
    MultiPoly K = MultiPoly::var("k", 2);
    std::vector<MultiPoly> X;
    for (int pos = 0; pos < n; ++pos) {
        MultiPoly a = chart_leg(g, n, pos);
        X.push_back(a * a);
    }
    TautExpression prefactor = prefactor_from(g, n, K, X, g);
    return assemble_dr(g, n, prefactor, [&](const StableGraph& gamma) {
        return assemble_P(gamma, g, [&](const MultiPoly& Q) {
            return symbolic_S(gamma, Q, g, n);
        });
    });
}

TautExpression dr_polynomial_fit(int g, int n) {
    std::vector<std::string> chart = dr_chart_vars(g, n);
    int d = 2 * g - 2 + n;

    std::map<std::vector<long>, TautExpression> cycles;
    auto at = [&](const std::vector<long>& pt) -> const TautExpression& {
        auto it = cycles.find(pt);
        if (it != cycles.end()) return it->second;
        long k = pt[0];
        std::vector<long> entries(n, 0);
        long rest = 0;
        for (int i = 1; i < n; ++i) {
            entries[i] = pt[i];
            rest += pt[i];
        }
        entries[0] = (long)d * k - rest;
        RamVector A = RamVector::make(std::move(entries), k, g, n);
        return cycles.emplace(pt, dr_cycle(g, n, A)).first->second;
    };

    // seed points so the initial stratum key set is non-trivial
    for (long k : {0L, 1L, 2L}) {
        std::vector<long> pt(chart.size(), 0);
        pt[0] = k;
        for (size_t i = 1; i < pt.size(); ++i) pt[i] = (long)i;
        at(pt);
    }

    TautExpression out(g, n);
    std::set<std::string> done;
    for (;;) {
        // keys may keep appearing while the fits sample new lattice points
        std::map<std::string, DecoratedStratum> todo;
        for (const auto& [pt, expr] : cycles)
            for (const auto& [key, term] : expr.terms())
                if (!done.count(key)) todo.emplace(key, term.stratum);
        if (todo.empty()) break;

        for (const auto& [key, stratum] : todo) {
            auto sampler = [&](const std::vector<long>& pt) {
                const TautExpression& e = at(pt);
                auto it = e.terms().find(key);
                return it == e.terms().end() ? Rat(0)
                                             : it->second.coeff.constant_value();
            };
            int bound = 2 * g;
            for (;;) {
                try {
                    auto fit = fit_poly_on_lattice(sampler, chart, bound, 5);
                    if (!fit.poly.is_zero()) out.add(stratum, fit.poly);
                    break;
                } catch (const CertificationError&) {
                    if (++bound > 2 * g + 3)
                        throw CertificationError(
                            "dr_polynomial: stratum coefficient not polynomial up to degree " +
                            std::to_string(bound - 1));
                }
            }
            done.insert(key);
        }
    }
    return out;
}

} // namespace

TautExpression dr_polynomial(int g, int n, DrMethod method) {
    if (2 * g - 2 + n <= 0) throw DomainError("dr_polynomial: unstable (g, n)");
    return method == DrMethod::Fit ? dr_polynomial_fit(g, n)
                                   : dr_polynomial_recursion(g, n);
}

TautExpression permute_legs(const TautExpression& expr, const std::vector<int>& perm) {
    if ((int)perm.size() != expr.n())
        throw DomainError("permute_legs: permutation length differs from n");
    TautExpression out(expr.g(), expr.n());
    for (const auto& [key, term] : expr.terms()) {
        DecoratedStratum s = term.stratum;
        for (int i = 0; i < expr.n(); ++i)
            s.graph.legs[i] = term.stratum.graph.legs[perm[i]];
        out.add(s, term.coeff);
    }
    return out;
}

} // namespace dr
