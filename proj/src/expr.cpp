#include "fnlab/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace fnlab {

namespace {

using Fn = std::function<double(Vec2)>;

struct Parser {
    const std::string& s;
    size_t pos = 0;

    [[noreturn]] void fail(const std::string& msg) const {
        throw std::invalid_argument("expression error at position " + std::to_string(pos) + ": " +
                                    msg + " in '" + s + "'");
    }

    void skip_ws() {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }

    bool eat(char c) {
        skip_ws();
        if (pos < s.size() && s[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }

    char peek() {
        skip_ws();
        return pos < s.size() ? s[pos] : '\0';
    }

    Fn expr() {
        Fn left = term();
        for (;;) {
            if (eat('+')) {
                Fn right = term();
                left = [left, right](Vec2 p) { return left(p) + right(p); };
            } else if (eat('-')) {
                Fn right = term();
                left = [left, right](Vec2 p) { return left(p) - right(p); };
            } else {
                return left;
            }
        }
    }

    Fn term() {
        Fn left = factor();
        for (;;) {
            if (eat('*')) {
                Fn right = factor();
                left = [left, right](Vec2 p) { return left(p) * right(p); };
            } else if (eat('/')) {
                Fn right = factor();
                left = [left, right](Vec2 p) { return left(p) / right(p); };
            } else {
                return left;
            }
        }
    }

    Fn factor() { return unary(); }

    // '^' binds tighter than unary minus: -x^2 == -(x^2); exponents may be signed
    Fn unary() {
        if (eat('-')) {
            Fn inner = unary();
            return [inner](Vec2 p) { return -inner(p); };
        }
        return power();
    }

    Fn power() {
        Fn base = primary();
        if (eat('^')) {
            Fn ex = unary();  // right associative
            return [base, ex](Vec2 p) { return std::pow(base(p), ex(p)); };
        }
        return base;
    }

    std::string ident() {
        skip_ws();
        size_t start = pos;
        while (pos < s.size() && (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_'))
            ++pos;
        return s.substr(start, pos - start);
    }

    Fn primary() {
        skip_ws();
        if (pos >= s.size()) fail("unexpected end of input");
        char c = s[pos];
        if (c == '(') {
            ++pos;
            Fn inner = expr();
            if (!eat(')')) fail("expected ')'");
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            char* end = nullptr;
            double v = std::strtod(s.c_str() + pos, &end);
            if (end == s.c_str() + pos) fail("bad number");
            pos = end - s.c_str();
            return [v](Vec2) { return v; };
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            std::string name = ident();
            if (name == "x") return [](Vec2 p) { return p.x; };
            if (name == "y") return [](Vec2 p) { return p.y; };
            if (name == "pi") return [](Vec2) { return M_PI; };
            if (name == "norm") {
                if (!eat('(')) fail("norm expects '(x)'");
                std::string arg = ident();
                if (arg != "x" || !eat(')')) fail("norm takes the point variable: norm(x)");
                return [](Vec2 p) { return std::hypot(p.x, p.y); };
            }
            if (name == "abs" || name == "sqrt") {
                if (!eat('(')) fail(name + " expects '('");
                Fn a = expr();
                if (!eat(')')) fail("expected ')'");
                if (name == "abs") return [a](Vec2 p) { return std::abs(a(p)); };
                return [a](Vec2 p) { return std::sqrt(a(p)); };
            }
            if (name == "min" || name == "max") {
                if (!eat('(')) fail(name + " expects '('");
                Fn a = expr();
                if (!eat(',')) fail("expected ','");
                Fn b = expr();
                if (!eat(')')) fail("expected ')'");
                if (name == "min") return [a, b](Vec2 p) { return std::min(a(p), b(p)); };
                return [a, b](Vec2 p) { return std::max(a(p), b(p)); };
            }
            fail("unknown identifier '" + name + "'");
        }
        fail("unexpected character");
    }
};

} // namespace

Expr Expr::parse(const std::string& src) {
    Parser p{src};
    Expr e;
    e.fn_ = p.expr();
    p.skip_ws();
    if (p.pos != src.size()) p.fail("trailing input");
    e.src_ = src;
    // probe a few points so config errors surface at parse time
    for (Vec2 probe : {Vec2{0.3, -0.2}, Vec2{1.0, 1.0}}) (void)e.fn_(probe);
    return e;
}

} // namespace fnlab
