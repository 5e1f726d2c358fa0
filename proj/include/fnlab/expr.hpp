#pragma once

#include <functional>
#include <memory>
#include <string>

#include "fnlab/vec2.hpp"

namespace fnlab {

/// Tiny arithmetic expressions over the evaluation point: variables x, y;
/// operators + - * / ^ and unary minus; functions abs, sqrt, min, max and
/// norm(x) (the Euclidean norm of the point). Parsed by recursive descent.
class Expr {
public:
    /// Throws std::invalid_argument with a character position on parse errors.
    static Expr parse(const std::string& src);

    double operator()(Vec2 p) const { return fn_(p); }
    const std::string& source() const { return src_; }
    std::function<double(Vec2)> fn() const { return fn_; }

private:
    std::function<double(Vec2)> fn_;
    std::string src_;
};

} // namespace fnlab
