#ifndef DR_INTERPOLATE_HPP
#define DR_INTERPOLATE_HPP

#include <functional>
#include <optional>
#include <vector>

#include "dr/multipoly.hpp"

namespace dr {

// Witness for a claimed eventually-polynomial value: the node window the
// interpolant was built on and the extra nodes it predicted exactly.
struct InterpolationCertificate {
    long window_start = 0;
    int degree = 0;
    std::vector<long> nodes;
    std::vector<long> validation_nodes;
    nlohmann::json to_json() const;
};

struct StableInterpolationResult {
    MultiPoly poly; // univariate
    InterpolationCertificate certificate;
};

// Thrown when no interpolation window stabilizes within the configured
// bounds; carries the best candidate seen.
class NotYetPolynomial : public CertificationError {
public:
    NotYetPolynomial(const std::string& what, MultiPoly best)
        : CertificationError(what), best_candidate(std::move(best)) {}
    MultiPoly best_candidate;
};

// Unique polynomial of degree < #points through the given points, exact.
// Nodes must be pairwise distinct.
MultiPoly lagrange_interpolate(const std::vector<std::pair<long, Rat>>& points,
                               const std::string& var = "r");

struct StableInterpolationOptions {
    int max_degree = 32;
    long max_start = 1 << 14;
};

// Finds d <= degree_hint and a window of d+1 admissible nodes (> start,
// coprime to coprimality_modulus when nonzero) whose interpolant exactly
// predicts validation_count further admissible nodes. Escalates the degree
// and the window start on failure, up to the configured bounds.
StableInterpolationResult stable_interpolation(
    const std::function<Rat(long)>& sampler, int degree_hint,
    int validation_count, long start, long coprimality_modulus = 0,
    const std::string& var = "r",
    const StableInterpolationOptions& opts = {});

struct LatticeFitCertificate {
    std::vector<std::vector<long>> design;
    std::vector<std::vector<long>> holdout;
    int degree_bound = 0;
    nlohmann::json to_json() const;
};

struct LatticeFitResult {
    MultiPoly poly; // in the given lattice coordinate variables
    LatticeFitCertificate certificate;
};

// Exact multivariate interpolation of the sampler on a principal-lattice
// design of total degree <= degree_bound, validated on holdout_count extra
// points. Throws CertificationError("not polynomial at this degree") on
// holdout mismatch.
LatticeFitResult fit_poly_on_lattice(
    const std::function<Rat(const std::vector<long>&)>& sampler,
    const std::vector<std::string>& coord_vars, int degree_bound,
    int holdout_count, long scale = 1);

// The unique polynomial F with F(a) = sum_{j=1}^{a} P(j) for all a >= 0
// (discrete antidifferentiation; F(0) = 0). Other variables of P, including
// result_var itself, are treated as parameters.
MultiPoly sum_range_closed_form(const MultiPoly& P, const std::string& sum_var,
                                const std::string& result_var);

// sum_{j=1}^{a} j^d as a polynomial of degree d+1 in result_var.
MultiPoly faulhaber(int d, const std::string& result_var = "a");

// Exact solve of A x = b by rational Gaussian elimination.
// Returns nullopt when A is singular.
std::optional<std::vector<Rat>> solve_linear_system(
    std::vector<std::vector<Rat>> A, std::vector<Rat> b);

} // namespace dr

#endif
