#ifndef DR_WEIGHTSUM_HPP
#define DR_WEIGHTSUM_HPP

#include <functional>
#include <optional>

#include "dr/graphs.hpp"
#include "dr/interpolate.hpp"
#include "dr/multipoly.hpp"

namespace dr {

// Variable name used for the half-edge weight x_h in polynomials Q.
std::string xvar(int half_edge);
// Inverse of xvar; throws on other names.
int xvar_id(const std::string& var);

// Ramification vector A with twist k; entries sum to k(2g-2+n) exactly.
struct RamVector {
    std::vector<long> entries;
    long twist = 0; // k
    int g = 0, n = 0;

    static RamVector make(std::vector<long> entries, long twist, int g, int n);
    void check() const; // throws DomainError on a broken sum condition
};

// Assignment H -> {0..r-1} satisfying the three conditions mod r.
struct Weighting {
    std::map<int, long> values;
    long modulus = 1;
};

struct SumResult {
    Rat value;
    nlohmann::json metadata;
    nlohmann::json to_json() const;
};

// Streams every weighting for A mod r exactly once (leg values forced, one
// free value per non-tree edge, tree edges solved from vertex conditions).
void enumerate_weightings(const StableGraph& gamma, const RamVector& A, long r,
                          const std::function<void(const Weighting&)>& f);

// S^Gamma_{A,r}(Q) = r^{-h1} sum_w Q(w), exact. Q's variables must be
// non-leg half-edges of gamma.
Rat sum_S(const StableGraph& gamma, const RamVector& A, long r, const MultiPoly& Q);
SumResult sum_S_result(const StableGraph& gamma, const RamVector& A, long r,
                       const MultiPoly& Q);

struct ConstantTermOptions {
    std::optional<long> window_start;   // default 2(max|A| + deg Q) + 3
    std::optional<int> degree_hint;     // default deg Q
    int validation_count = 5;
    long coprimality_modulus = 0;
};

struct ConstantTermResult {
    Rat value;
    MultiPoly r_polynomial; // the certified eventual polynomial in r
    InterpolationCertificate certificate;
};

// S^Gamma_{A,0}(Q): constant term of the eventual polynomial in r, via
// windowed interpolation with holdout validation. Memoized.
ConstantTermResult constant_term_S(const StableGraph& gamma, const RamVector& A,
                                   const MultiPoly& Q,
                                   const ConstantTermOptions& opts = {});

void clear_sum_caches(); // test hook

enum class Congruence { Holds, Fails, Inconclusive };

// Whether S_{A,0} == S_{A,r} mod r (r-adic valuation of the difference >= 1).
// Inconclusive when r divides a denominator.
Congruence check_congruence(const StableGraph& gamma, const RamVector& A,
                            const MultiPoly& Q, long prime_r);

// Separating-edge factorization of the constant-term sum (k = 0 only).
Rat factor_separating(const StableGraph& gamma, std::pair<int, int> e,
                      const RamVector& A, const MultiPoly& Q);

struct ShiftRecursionResult {
    Rat value;          // S^Gamma_{A_a,0}(Q)
    MultiPoly psi;      // the shift polynomial, univariate in "sh"
    StableGraph graph;  // gamma, augmented with zero legs where needed
    RamVector base;     // A extended by zeros for the added legs
    int leg1_pos = -1;  // designated leg positions (0-based) in `graph`
    int leg2_pos = -1;
};

// Non-separating shift recursion: S^Gamma_{A_a,0}(Q) where A_a subtracts the
// shift from the designated leg at attach(e.first) and adds it at
// attach(e.second). Endpoint vertices without a usable leg get a fresh
// zero-valued one (sums are unchanged at k = 0). k = 0 only.
ShiftRecursionResult shift_recursion(const StableGraph& gamma, std::pair<int, int> e,
                                     const RamVector& A, long shift,
                                     const MultiPoly& Q);

// Representative polynomial in the leg variables "a_1".."a_n" that equals
// A -> S^Gamma_{A,0}(Q) on the lattice {sum a_i = 0}, built by the
// separating-edge factorization and the spanning-tree shift recursion.
MultiPoly build_S_polynomial(const StableGraph& gamma, const MultiPoly& Q);

struct ReduceToK0Result {
    StableGraph graph;            // one extra leg per vertex, appended
    RamVector A;                  // twist 0
    std::vector<int> added_legs;  // new leg positions (0-based), per vertex
};

// Twist elimination: sums over the augmented graph agree with the original
// for every r.
ReduceToK0Result reduce_to_k0(const StableGraph& gamma, const RamVector& A);

} // namespace dr

#endif
