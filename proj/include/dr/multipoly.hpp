#ifndef DR_MULTIPOLY_HPP
#define DR_MULTIPOLY_HPP

#include <map>
#include <string>
#include <vector>

#include "dr/rational.hpp"

namespace dr {

using Exponents = std::vector<int>;

// Graded lexicographic, descending: higher total degree first, then
// lexicographically larger exponent vector first.
struct GradedLexDesc {
    bool operator()(const Exponents& a, const Exponents& b) const;
};

// Sparse multivariate polynomial over exact rationals. Variables are kept
// sorted by name; exponent vectors always match the variable arity and zero
// coefficients are never stored.
class MultiPoly {
public:
    using TermMap = std::map<Exponents, Rat, GradedLexDesc>;

    MultiPoly() = default; // zero, no variables
    explicit MultiPoly(const Rat& c);
    explicit MultiPoly(long c) : MultiPoly(Rat(c)) {}

    static MultiPoly zero(std::vector<std::string> vars);
    static MultiPoly constant(const Rat& c) { return MultiPoly(c); }
    static MultiPoly var(const std::string& name, int exp = 1);

    const std::vector<std::string>& vars() const { return vars_; }
    const TermMap& terms() const { return terms_; }

    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const;
    Rat constant_value() const; // the coefficient of the empty monomial
    int total_degree() const;   // -1 for the zero polynomial
    int degree_in(const std::string& var) const;
    int var_index(const std::string& var) const; // -1 if absent

    void add_term(const Exponents& e, const Rat& c);
    Rat coefficient(const Exponents& e) const;

    // Returns the same polynomial over the given superset of variables.
    MultiPoly aligned_to(const std::vector<std::string>& vars) const;
    MultiPoly renamed(const std::map<std::string, std::string>& renames) const;
    // Drops variables that no term uses.
    MultiPoly compacted() const;

    MultiPoly operator-() const;
    MultiPoly operator+(const MultiPoly& o) const;
    MultiPoly operator-(const MultiPoly& o) const;
    MultiPoly operator*(const MultiPoly& o) const;
    MultiPoly operator*(const Rat& c) const;
    MultiPoly pow(unsigned e) const;
    bool operator==(const MultiPoly& o) const;
    bool operator!=(const MultiPoly& o) const { return !(*this == o); }

    // Exact evaluation; every variable must be assigned.
    Rat evaluate(const std::map<std::string, Rat>& point) const;
    // Every variable must be mapped; the result lives over the union of the
    // images' variable sets.
    MultiPoly substitute(const std::map<std::string, MultiPoly>& images) const;
    // Unmapped variables stay as themselves.
    MultiPoly substitute_or_keep(const std::map<std::string, MultiPoly>& images) const;

    // Decomposes as sum_d var^d * coeff[d], coefficients over the same
    // variable set (with var's exponent zeroed).
    std::map<int, MultiPoly> coeffs_in(const std::string& var) const;

    std::string to_string() const;
    nlohmann::json to_json() const;
    static MultiPoly from_json(const nlohmann::json& j);

private:
    std::vector<std::string> vars_; // sorted, unique
    TermMap terms_;
};

inline MultiPoly operator*(const Rat& c, const MultiPoly& p) { return p * c; }

} // namespace dr

#endif
