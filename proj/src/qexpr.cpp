#include "dr/qexpr.hpp"

#include <cctype>

#include "dr/errors.hpp"

namespace dr {

namespace {

struct Parser {
    const std::string& s;
    size_t pos = 0;

    explicit Parser(const std::string& text) : s(text) {}

    void skip_ws() {
        while (pos < s.size() && std::isspace((unsigned char)s[pos])) ++pos;
    }

    bool eat(char c) {
        skip_ws();
        if (pos < s.size() && s[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }

    [[noreturn]] void fail(const std::string& what) {
        throw DomainError("parse error at position " + std::to_string(pos) + ": " + what);
    }

    // expr := term (('+' | '-') term)*
    MultiPoly expr() {
        MultiPoly acc = term();
        for (;;) {
            if (eat('+')) acc = acc + term();
            else if (eat('-')) acc = acc - term();
            else return acc;
        }
    }

    // term := factor ('*' factor)*  (juxtaposition is not allowed)
    MultiPoly term() {
        MultiPoly acc = factor();
        while (eat('*')) acc = acc * factor();
        return acc;
    }

    // factor := ('-' | '+')* atom ('^' integer)?
    MultiPoly factor() {
        skip_ws();
        bool neg = false;
        while (true) {
            if (eat('-')) neg = !neg;
            else if (eat('+')) continue;
            else break;
        }
        MultiPoly a = atom();
        if (eat('^')) {
            long e = integer();
            if (e < 0) fail("negative exponent");
            a = a.pow((unsigned)e);
        }
        return neg ? -a : a;
    }

    MultiPoly atom() {
        skip_ws();
        if (pos >= s.size()) fail("unexpected end of input");
        char c = s[pos];
        if (c == '(') {
            ++pos;
            MultiPoly inner = expr();
            if (!eat(')')) fail("expected ')'");
            return inner;
        }
        if (std::isdigit((unsigned char)c)) return MultiPoly(Rat(integer()));
        if (c == 'x') {
            size_t start = pos;
            ++pos;
            if (pos >= s.size() || s[pos] != '_') fail("expected '_' after 'x'");
            ++pos;
            if (pos >= s.size() || !std::isdigit((unsigned char)s[pos]))
                fail("expected half-edge id");
            while (pos < s.size() && std::isdigit((unsigned char)s[pos])) ++pos;
            return MultiPoly::var(s.substr(start, pos - start));
        }
        fail("expected number, variable, or '('");
    }

    long integer() {
        skip_ws();
        bool neg = eat('-');
        skip_ws();
        if (pos >= s.size() || !std::isdigit((unsigned char)s[pos]))
            fail("expected integer");
        long v = 0;
        while (pos < s.size() && std::isdigit((unsigned char)s[pos]))
            v = v * 10 + (s[pos++] - '0');
        return neg ? -v : v;
    }
};

} // namespace

MultiPoly parse_poly(const std::string& text) {
    Parser p(text);
    MultiPoly result = p.expr();
    p.skip_ws();
    if (p.pos != text.size()) p.fail("trailing input");
    return result;
}

} // namespace dr
