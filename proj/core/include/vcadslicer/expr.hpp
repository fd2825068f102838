#pragma once

#include <memory>
#include <string>

#include "vcadslicer/geom.hpp"

namespace vcad {

// Expression over the evaluation point: variables x, y, z plus the derived
// cylindrical coordinates rho = sqrt(x^2+y^2) and phi = atan2(y, x).
class Expr;
using ExprPtr = std::shared_ptr<const Expr>;

enum class ExprOp {
    constant,
    var_x,
    var_y,
    var_z,
    var_rho,
    var_phi,
    add,
    sub,
    mul,
    div,
    pow,
    neg,
    call1,
    call2,
};

enum class ExprFn { sin, cos, tan, abs, sqrt, exp, floor, ceil, min, max, atan2 };

class Expr {
public:
    ExprOp op = ExprOp::constant;
    double value = 0.0;   // constant
    ExprFn fn = ExprFn::sin;
    ExprPtr lhs, rhs;

    static ExprPtr number(double v);
    static ExprPtr variable(ExprOp var);
    static ExprPtr binary(ExprOp op, ExprPtr l, ExprPtr r);
    static ExprPtr negate(ExprPtr e);
    static ExprPtr call(ExprFn fn, ExprPtr a, ExprPtr b = nullptr);
};

struct SourcePos {
    int line = 1;
    int column = 1;
};

// Throws SyntaxError / UnknownIdentifier with line:column context.
ExprPtr parse_expression(const std::string& text);

double eval_expression(const Expr& e, const Vec3& p);
inline double eval_expression(const ExprPtr& e, const Vec3& p) { return eval_expression(*e, p); }

// Minimal-parentheses form; parse(print(e)) reproduces the tree.
std::string expression_to_string(const Expr& e);
inline std::string expression_to_string(const ExprPtr& e) { return expression_to_string(*e); }

bool expressions_equal(const Expr& a, const Expr& b);

} // namespace vcad
