#ifndef DR_SERIES_HPP
#define DR_SERIES_HPP

#include <vector>

#include "dr/rational.hpp"

namespace dr {

// Truncated power series in one formal variable t, exact coefficients.
struct PSeries {
    int order = 0;                // powers 0..order are tracked
    std::vector<Rat> coeffs;      // length <= order + 1

    PSeries() = default;
    explicit PSeries(int order_) : order(order_), coeffs(order_ + 1, Rat(0)) {}

    Rat coeff(int m) const { return m < (int)coeffs.size() ? coeffs[m] : Rat(0); }

    PSeries operator*(const PSeries& o) const {
        PSeries out(std::min(order, o.order));
        for (int i = 0; i <= out.order; ++i)
            for (int j = 0; i + j <= out.order && j < (int)o.coeffs.size(); ++j)
                if (i < (int)coeffs.size()) out.coeffs[i + j] += coeffs[i] * o.coeffs[j];
        return out;
    }

    PSeries operator+(const PSeries& o) const {
        PSeries out(std::min(order, o.order));
        for (int i = 0; i <= out.order; ++i) out.coeffs[i] = coeff(i) + o.coeff(i);
        return out;
    }
};

// exp(s) for a series s with zero constant term, truncated.
inline PSeries series_exp(const PSeries& s) {
    if (s.coeff(0) != 0) throw DomainError("series_exp: nonzero constant term");
    PSeries out(s.order);
    out.coeffs[0] = Rat(1);
    PSeries pw(s.order);
    pw.coeffs[0] = Rat(1);
    for (int k = 1; k <= s.order; ++k) {
        pw = pw * s;
        Rat inv_fact(1);
        inv_fact /= Rat(factorial((unsigned long)k));
        for (int i = 0; i <= s.order; ++i) out.coeffs[i] += pw.coeff(i) * inv_fact;
    }
    return out;
}

// (1 - exp(c*t)) / t truncated at t^order: coefficient of t^m is
// -c^(m+1)/(m+1)!. The division is exact since the numerator vanishes at 0.
inline PSeries edge_factor_series(const Rat& c, int order) {
    PSeries out(order);
    for (int m = 0; m <= order; ++m)
        out.coeffs[m] = -rat_pow(c, (unsigned long)(m + 1)) /
                        Rat(factorial((unsigned long)(m + 1)));
    return out;
}

// Binomial re-expansion of t^m with t = u + v: pairs ((i, m-i), C(m,i)).
inline std::vector<std::pair<std::pair<int, int>, Int>> binomial_expand(int m) {
    std::vector<std::pair<std::pair<int, int>, Int>> out;
    for (int i = 0; i <= m; ++i)
        out.push_back({{i, m - i}, binomial((unsigned long)m, (unsigned long)i)});
    return out;
}

} // namespace dr

#endif
