#include "vcadslicer/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>

#include "vcadslicer/errors.hpp"

namespace vcad {

ExprPtr Expr::number(double v) {
    auto e = std::make_shared<Expr>();
    e->op = ExprOp::constant;
    e->value = v;
    return e;
}

ExprPtr Expr::variable(ExprOp var) {
    auto e = std::make_shared<Expr>();
    e->op = var;
    return e;
}

ExprPtr Expr::binary(ExprOp op, ExprPtr l, ExprPtr r) {
    auto e = std::make_shared<Expr>();
    e->op = op;
    e->lhs = std::move(l);
    e->rhs = std::move(r);
    return e;
}

ExprPtr Expr::negate(ExprPtr inner) {
    auto e = std::make_shared<Expr>();
    e->op = ExprOp::neg;
    e->lhs = std::move(inner);
    return e;
}

ExprPtr Expr::call(ExprFn fn, ExprPtr a, ExprPtr b) {
    auto e = std::make_shared<Expr>();
    e->op = b ? ExprOp::call2 : ExprOp::call1;
    e->fn = fn;
    e->lhs = std::move(a);
    e->rhs = std::move(b);
    return e;
}

namespace {

struct FnInfo {
    ExprFn fn;
    int arity;
};

const std::map<std::string, FnInfo>& function_table() {
    static const std::map<std::string, FnInfo> table = {
        {"sin", {ExprFn::sin, 1}},     {"cos", {ExprFn::cos, 1}},
        {"tan", {ExprFn::tan, 1}},     {"abs", {ExprFn::abs, 1}},
        {"sqrt", {ExprFn::sqrt, 1}},   {"exp", {ExprFn::exp, 1}},
        {"floor", {ExprFn::floor, 1}}, {"ceil", {ExprFn::ceil, 1}},
        {"min", {ExprFn::min, 2}},     {"max", {ExprFn::max, 2}},
        {"atan2", {ExprFn::atan2, 2}},
    };
    return table;
}

const char* fn_name(ExprFn fn) {
    switch (fn) {
    case ExprFn::sin: return "sin";
    case ExprFn::cos: return "cos";
    case ExprFn::tan: return "tan";
    case ExprFn::abs: return "abs";
    case ExprFn::sqrt: return "sqrt";
    case ExprFn::exp: return "exp";
    case ExprFn::floor: return "floor";
    case ExprFn::ceil: return "ceil";
    case ExprFn::min: return "min";
    case ExprFn::max: return "max";
    case ExprFn::atan2: return "atan2";
    }
    return "?";
}

class ExprParser {
public:
    explicit ExprParser(const std::string& text) : m_text(text) {}

    ExprPtr parse() {
        ExprPtr e = parse_add();
        skip_ws();
        if (m_pos < m_text.size())
            fail("unexpected trailing input");
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& what) {
        throw Error(errc::syntax, "expression error at " + std::to_string(m_line) + ":" +
                                      std::to_string(column()) + ": " + what);
    }

    int column() const {
        int col = 1;
        for (size_t i = m_line_start; i < m_pos && i < m_text.size(); ++i)
            ++col;
        return col;
    }

    void skip_ws() {
        while (m_pos < m_text.size()) {
            char c = m_text[m_pos];
            if (c == '\n') {
                ++m_line;
                m_line_start = m_pos + 1;
                ++m_pos;
            } else if (std::isspace((unsigned char)c)) {
                ++m_pos;
            } else {
                break;
            }
        }
    }

    bool accept(char c) {
        skip_ws();
        if (m_pos < m_text.size() && m_text[m_pos] == c) {
            ++m_pos;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c))
            fail(std::string("expected '") + c + "'");
    }

    char peek() {
        skip_ws();
        return m_pos < m_text.size() ? m_text[m_pos] : '\0';
    }

    ExprPtr parse_add() {
        ExprPtr lhs = parse_mul();
        for (;;) {
            if (accept('+'))
                lhs = Expr::binary(ExprOp::add, lhs, parse_mul());
            else if (accept('-'))
                lhs = Expr::binary(ExprOp::sub, lhs, parse_mul());
            else
                return lhs;
        }
    }

    ExprPtr parse_mul() {
        ExprPtr lhs = parse_unary();
        for (;;) {
            if (accept('*'))
                lhs = Expr::binary(ExprOp::mul, lhs, parse_unary());
            else if (accept('/'))
                lhs = Expr::binary(ExprOp::div, lhs, parse_unary());
            else
                return lhs;
        }
    }

    ExprPtr parse_unary() {
        if (accept('-'))
            return Expr::negate(parse_unary());
        return parse_pow();
    }

    ExprPtr parse_pow() {
        ExprPtr lhs = parse_atom();
        while (accept('^')) {
            // The exponent may itself carry a sign, e.g. 2^-3.
            ExprPtr rhs = accept('-') ? Expr::negate(parse_pow_operand()) : parse_atom();
            lhs = Expr::binary(ExprOp::pow, lhs, rhs);
        }
        return lhs;
    }

    ExprPtr parse_pow_operand() {
        if (accept('-'))
            return Expr::negate(parse_pow_operand());
        return parse_atom();
    }

    ExprPtr parse_atom() {
        char c = peek();
        if (c == '(') {
            expect('(');
            ExprPtr e = parse_add();
            expect(')');
            return e;
        }
        if (std::isdigit((unsigned char)c) || c == '.')
            return parse_number();
        if (std::isalpha((unsigned char)c) || c == '_')
            return parse_identifier();
        fail("expected number, identifier or '('");
    }

    ExprPtr parse_number() {
        skip_ws();
        size_t start = m_pos;
        while (m_pos < m_text.size() &&
               (std::isdigit((unsigned char)m_text[m_pos]) || m_text[m_pos] == '.'))
            ++m_pos;
        if (m_pos < m_text.size() && (m_text[m_pos] == 'e' || m_text[m_pos] == 'E')) {
            size_t exp_pos = m_pos + 1;
            if (exp_pos < m_text.size() && (m_text[exp_pos] == '+' || m_text[exp_pos] == '-'))
                ++exp_pos;
            if (exp_pos < m_text.size() && std::isdigit((unsigned char)m_text[exp_pos])) {
                m_pos = exp_pos;
                while (m_pos < m_text.size() && std::isdigit((unsigned char)m_text[m_pos]))
                    ++m_pos;
            }
        }
        double value = 0.0;
        auto [ptr, ec] = std::from_chars(m_text.data() + start, m_text.data() + m_pos, value);
        if (ec != std::errc() || ptr != m_text.data() + m_pos)
            fail("malformed number");
        return Expr::number(value);
    }

    ExprPtr parse_identifier() {
        skip_ws();
        size_t start = m_pos;
        while (m_pos < m_text.size() &&
               (std::isalnum((unsigned char)m_text[m_pos]) || m_text[m_pos] == '_'))
            ++m_pos;
        std::string name = m_text.substr(start, m_pos - start);
        if (name == "x") return Expr::variable(ExprOp::var_x);
        if (name == "y") return Expr::variable(ExprOp::var_y);
        if (name == "z") return Expr::variable(ExprOp::var_z);
        if (name == "rho") return Expr::variable(ExprOp::var_rho);
        if (name == "phi") return Expr::variable(ExprOp::var_phi);
        if (name == "pi") return Expr::number(M_PI);

        auto it = function_table().find(name);
        if (it == function_table().end())
            throw Error(errc::unknown_identifier,
                        "unknown identifier '" + name + "' at " + std::to_string(m_line) + ":" +
                            std::to_string(column()));
        expect('(');
        ExprPtr a = parse_add();
        ExprPtr b;
        if (it->second.arity == 2) {
            expect(',');
            b = parse_add();
        }
        expect(')');
        return Expr::call(it->second.fn, a, b);
    }

    const std::string& m_text;
    size_t m_pos = 0;
    int m_line = 1;
    size_t m_line_start = 0;
};

} // namespace

ExprPtr parse_expression(const std::string& text) {
    return ExprParser(text).parse();
}

double eval_expression(const Expr& e, const Vec3& p) {
    switch (e.op) {
    case ExprOp::constant: return e.value;
    case ExprOp::var_x: return p.x;
    case ExprOp::var_y: return p.y;
    case ExprOp::var_z: return p.z;
    case ExprOp::var_rho: return std::sqrt(p.x * p.x + p.y * p.y);
    case ExprOp::var_phi: return std::atan2(p.y, p.x);
    case ExprOp::add: return eval_expression(*e.lhs, p) + eval_expression(*e.rhs, p);
    case ExprOp::sub: return eval_expression(*e.lhs, p) - eval_expression(*e.rhs, p);
    case ExprOp::mul: return eval_expression(*e.lhs, p) * eval_expression(*e.rhs, p);
    case ExprOp::div: return eval_expression(*e.lhs, p) / eval_expression(*e.rhs, p);
    case ExprOp::pow: return std::pow(eval_expression(*e.lhs, p), eval_expression(*e.rhs, p));
    case ExprOp::neg: return -eval_expression(*e.lhs, p);
    case ExprOp::call1: {
        double a = eval_expression(*e.lhs, p);
        switch (e.fn) {
        case ExprFn::sin: return std::sin(a);
        case ExprFn::cos: return std::cos(a);
        case ExprFn::tan: return std::tan(a);
        case ExprFn::abs: return std::abs(a);
        case ExprFn::sqrt: return std::sqrt(a);
        case ExprFn::exp: return std::exp(a);
        case ExprFn::floor: return std::floor(a);
        case ExprFn::ceil: return std::ceil(a);
        default: break;
        }
        return 0.0;
    }
    case ExprOp::call2: {
        double a = eval_expression(*e.lhs, p);
        double b = eval_expression(*e.rhs, p);
        switch (e.fn) {
        case ExprFn::min: return std::min(a, b);
        case ExprFn::max: return std::max(a, b);
        case ExprFn::atan2: return std::atan2(a, b);
        default: break;
        }
        return 0.0;
    }
    }
    return 0.0;
}

namespace {

int precedence(ExprOp op) {
    switch (op) {
    case ExprOp::add:
    case ExprOp::sub: return 1;
    case ExprOp::mul:
    case ExprOp::div: return 2;
    case ExprOp::neg: return 3;
    case ExprOp::pow: return 4;
    default: return 5;
    }
}

void print_expr(const Expr& e, std::string& out, int parent_prec, bool right_operand) {
    int prec = precedence(e.op);
    bool parens = prec < parent_prec || (prec == parent_prec && right_operand);
    if (parens)
        out += '(';
    switch (e.op) {
    case ExprOp::constant: {
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.17g", e.value);
        out += buf;
        break;
    }
    case ExprOp::var_x: out += 'x'; break;
    case ExprOp::var_y: out += 'y'; break;
    case ExprOp::var_z: out += 'z'; break;
    case ExprOp::var_rho: out += "rho"; break;
    case ExprOp::var_phi: out += "phi"; break;
    case ExprOp::add:
        print_expr(*e.lhs, out, 1, false);
        out += '+';
        print_expr(*e.rhs, out, 1, true);
        break;
    case ExprOp::sub:
        print_expr(*e.lhs, out, 1, false);
        out += '-';
        print_expr(*e.rhs, out, 1, true);
        break;
    case ExprOp::mul:
        print_expr(*e.lhs, out, 2, false);
        out += '*';
        print_expr(*e.rhs, out, 2, true);
        break;
    case ExprOp::div:
        print_expr(*e.lhs, out, 2, false);
        out += '/';
        print_expr(*e.rhs, out, 2, true);
        break;
    case ExprOp::neg:
        out += '-';
        print_expr(*e.lhs, out, 3, true);
        break;
    case ExprOp::pow:
        print_expr(*e.lhs, out, 4, false);
        out += '^';
        print_expr(*e.rhs, out, 4, true);
        break;
    case ExprOp::call1:
        out += fn_name(e.fn);
        out += '(';
        print_expr(*e.lhs, out, 0, false);
        out += ')';
        break;
    case ExprOp::call2:
        out += fn_name(e.fn);
        out += '(';
        print_expr(*e.lhs, out, 0, false);
        out += ',';
        print_expr(*e.rhs, out, 0, false);
        out += ')';
        break;
    }
    if (parens)
        out += ')';
}

} // namespace

std::string expression_to_string(const Expr& e) {
    std::string out;
    print_expr(e, out, 0, false);
    return out;
}

bool expressions_equal(const Expr& a, const Expr& b) {
    if (a.op != b.op)
        return false;
    switch (a.op) {
    case ExprOp::constant: return a.value == b.value;
    case ExprOp::var_x:
    case ExprOp::var_y:
    case ExprOp::var_z:
    case ExprOp::var_rho:
    case ExprOp::var_phi: return true;
    case ExprOp::call1: return a.fn == b.fn && expressions_equal(*a.lhs, *b.lhs);
    case ExprOp::call2:
        return a.fn == b.fn && expressions_equal(*a.lhs, *b.lhs) &&
               expressions_equal(*a.rhs, *b.rhs);
    case ExprOp::neg: return expressions_equal(*a.lhs, *b.lhs);
    default:
        return expressions_equal(*a.lhs, *b.lhs) && expressions_equal(*a.rhs, *b.rhs);
    }
}

} // namespace vcad
