#ifndef DR_QEXPR_HPP
#define DR_QEXPR_HPP

#include <string>

#include "dr/multipoly.hpp"

namespace dr {

// Parses polynomial expressions like "x_1^2*x_2 + 3*(x_3 - 1)". Variables
// are names of the form x_<integer>; coefficients are integers. Supported:
// + - * ^ and parentheses. Throws DomainError on malformed input.
MultiPoly parse_poly(const std::string& text);

} // namespace dr

#endif
