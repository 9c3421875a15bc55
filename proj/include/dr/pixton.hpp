#ifndef DR_PIXTON_HPP
#define DR_PIXTON_HPP

#include "dr/graphs.hpp"
#include "dr/multipoly.hpp"
#include "dr/weightsum.hpp"

namespace dr {

// A stable graph with psi powers on half-edges (legs included) and kappa_1
// powers on vertices. Codimension counts edges plus all decoration exponents.
struct DecoratedStratum {
    StableGraph graph;
    std::map<int, int> psi;    // half-edge -> exponent
    std::map<int, int> kappa1; // vertex -> exponent
    int codim() const;
};

struct TautTerm {
    DecoratedStratum stratum;
    MultiPoly coeff;
};

// Formal linear combination of decorated strata on \bar M_{g,n}. Terms are
// keyed by the decorated canonical form, so isomorphic strata merge and the
// ordering is deterministic. Coefficients are exact rationals (constant
// polynomials) or polynomials in the chart variables.
class TautExpression {
public:
    TautExpression() = default;
    TautExpression(int g, int n) : g_(g), n_(n) {}

    int g() const { return g_; }
    int n() const { return n_; }
    const std::map<std::string, TautTerm>& terms() const { return terms_; }
    bool empty() const { return terms_.empty(); }

    // Canonicalizes the stratum, merges isomorphic terms, drops zeros.
    void add(const DecoratedStratum& s, const MultiPoly& coeff);
    void add(const DecoratedStratum& s, const Rat& coeff);

    TautExpression filtered_codim(int codim) const;
    // Plugs chart values into every coefficient; zero terms vanish.
    TautExpression evaluated(const std::map<std::string, Rat>& point) const;

    bool operator==(const TautExpression& o) const;
    bool operator!=(const TautExpression& o) const { return !(*this == o); }

    nlohmann::json to_json() const;

private:
    int g_ = 0, n_ = 0;
    std::map<std::string, TautTerm> terms_;
};

// One vertex of genus g carrying legs 1..n (half-edge ids 1..n).
StableGraph trivial_graph(int g, int n);

// P_r^Gamma up to total codimension max_codim; coefficients are exact
// rationals built from sum_S values. max_codim < #E gives the zero
// expression.
TautExpression P_graph(const StableGraph& gamma, const RamVector& A, long r,
                       int max_codim);

// Same with every sum replaced by its certified constant term.
TautExpression P0_graph(const StableGraph& gamma, const RamVector& A, int max_codim,
                        const ConstantTermOptions& opts = {});

// Truncated expansion of exp(-(k^2 kappa_1 - sum_i a_i^2 psi_i)/2) on the
// trivial graph.
TautExpression exp_prefactor(int g, int n, const RamVector& A, int max_codim);

// Multiplies an ambient decoration (kappa_1 and leg psi powers on the
// trivial graph) into an expression supported on gamma: leg psi pulls back to
// the matching leg, kappa_1 to the sum of per-vertex kappa_1.
TautExpression pullback_multiply(const StableGraph& gamma,
                                 const DecoratedStratum& ambient_term,
                                 const TautExpression& inner);

// DR_g(A): the codimension-g part of the prefactor times the sum over stable
// graphs of P_0^Gamma / |Aut Gamma|.
TautExpression dr_cycle(int g, int n, const RamVector& A);

enum class DrMethod { Fit, Recursion };

// Chart coordinates for the DR family on the lattice {(2g-2+n) | sum a_i}:
// "k" and "a_2".."a_n", with a_1 = (2g-2+n)k - sum_{i>=2} a_i.
std::vector<std::string> dr_chart_vars(int g, int n);

// The strata-indexed family of DR coefficients as polynomials in the chart
// variables, via holdout-certified lattice fits or the symbolic recursion.
// The two methods return identical expressions.
TautExpression dr_polynomial(int g, int n, DrMethod method);

// New leg position i carries the old leg at position perm[i].
TautExpression permute_legs(const TautExpression& expr, const std::vector<int>& perm);

} // namespace dr

#endif
