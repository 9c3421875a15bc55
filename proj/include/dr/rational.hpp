#ifndef DR_RATIONAL_HPP
#define DR_RATIONAL_HPP

#include <gmpxx.h>
#include <json.hpp>
#include <string>

#include "dr/errors.hpp"

namespace dr {

// Exact rational with arbitrary-precision numerator/denominator, always
// reduced, denominator > 0. GMP's mpq_class already maintains both after
// canonicalization, so we use it directly.
using Int = mpz_class;
using Rat = mpq_class;

inline Rat make_rat(const Int& num, const Int& den) {
    if (den == 0) throw DomainError("rational with zero denominator");
    Rat q(num, den);
    q.canonicalize();
    return q;
}

inline Int rat_num(const Rat& q) { return q.get_num(); }
inline Int rat_den(const Rat& q) { return q.get_den(); }

inline Rat rat_pow(const Rat& base, unsigned long e) {
    Rat r;
    mpz_pow_ui(r.get_num_mpz_t(), base.get_num_mpz_t(), e);
    mpz_pow_ui(r.get_den_mpz_t(), base.get_den_mpz_t(), e);
    return r;
}

inline Int int_pow(const Int& base, unsigned long e) {
    Int r;
    mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
    return r;
}

inline Int factorial(unsigned long n) {
    Int r;
    mpz_fac_ui(r.get_mpz_t(), n);
    return r;
}

inline Int binomial(unsigned long n, unsigned long k) {
    Int r;
    mpz_bin_uiui(r.get_mpz_t(), n, k);
    return r;
}

// JSON codec for rationals: decimal strings so that arbitrary precision
// survives the round trip.
inline nlohmann::json rat_to_json(const Rat& q) {
    return {{"num", rat_num(q).get_str()}, {"den", rat_den(q).get_str()}};
}

inline Rat rat_from_json(const nlohmann::json& j) {
    if (!j.contains("num") || !j.contains("den"))
        throw DomainError("rational JSON needs \"num\" and \"den\"");
    return make_rat(Int(j.at("num").get<std::string>()),
                    Int(j.at("den").get<std::string>()));
}

} // namespace dr

#endif
