#include <doctest.h>

#include <cmath>

#include "vcadslicer/errors.hpp"
#include "vcadslicer/expr.hpp"

using namespace vcad;

namespace {
double ev(const std::string& src, Vec3 p = {0, 0, 0}) {
    return eval_expression(parse_expression(src), p);
}
} // namespace

TEST_CASE("literals and constants") {
    CHECK(ev("42") == 42.0);
    CHECK(ev("0.5") == 0.5);
    CHECK(ev("1e-3") == doctest::Approx(0.001));
    CHECK(ev("pi") == doctest::Approx(3.141592653589793).epsilon(1e-15));
}

TEST_CASE("precedence and associativity") {
    CHECK(ev("2+3*4") == 14.0);
    CHECK(ev("(2+3)*4") == 20.0);
    CHECK(ev("2-3-4") == -5.0);   // left associative
    CHECK(ev("12/2/3") == 2.0);
    CHECK(ev("2^3^2") == 64.0);   // left associative per the grammar
    CHECK(ev("-2^2") == -4.0);    // ^ binds tighter than unary minus
    CHECK(ev("2^-2") == 0.25);
    CHECK(ev("2*-3") == -6.0);
    CHECK(ev("--5") == 5.0);
}

TEST_CASE("variables and derived coordinates") {
    Vec3 p{3, 4, 7};
    CHECK(ev("x", p) == 3.0);
    CHECK(ev("y", p) == 4.0);
    CHECK(ev("z", p) == 7.0);
    CHECK(ev("rho", p) == doctest::Approx(5.0));        // sqrt(3^2+4^2)
    CHECK(ev("phi", p) == doctest::Approx(std::atan2(4.0, 3.0)));
    CHECK(ev("abs(phi)/pi", {-1, 0, 0}) == doctest::Approx(1.0)); // atan2(0,-1)=pi
}

TEST_CASE("functions") {
    CHECK(ev("sin(0)") == 0.0);
    CHECK(ev("cos(0)") == 1.0);
    CHECK(ev("tan(0)") == 0.0);
    CHECK(ev("sqrt(16)") == 4.0);
    CHECK(ev("abs(0-3)") == 3.0);
    CHECK(ev("min(2,3)") == 2.0);
    CHECK(ev("max(2,3)") == 3.0);
    CHECK(ev("atan2(1,1)") == doctest::Approx(M_PI / 4));
    CHECK(ev("exp(0)") == 1.0);
    CHECK(ev("floor(2.7)") == 2.0);
    CHECK(ev("ceil(2.2)") == 3.0);
}

TEST_CASE("gradient field expressions evaluate") {
    // two-axis gradient: (1 + sin(.02x+.03y) cos(.03x-.02y)) / 2
    std::string src = "(1+sin(0.02*x+0.03*y)*cos(0.03*x-0.02*y))/2";
    CHECK(ev(src, {0, 0, 0}) == doctest::Approx(0.5));
    double x = 10, y = -5;
    double expect = (1 + std::sin(0.02 * x + 0.03 * y) * std::cos(0.03 * x - 0.02 * y)) / 2;
    CHECK(ev(src, {x, y, 0}) == doctest::Approx(expect).epsilon(1e-15));

    // radial: (rho - 15) / 35
    CHECK(ev("(rho-15)/35", {50, 0, 0}) == doctest::Approx(1.0));
    CHECK(ev("(rho-15)/35", {15, 0, 0}) == doctest::Approx(0.0));
}

TEST_CASE("errors carry position info") {
    CHECK_THROWS_AS(parse_expression("2+"), Error);
    CHECK_THROWS_AS(parse_expression("(1+2"), Error);
    CHECK_THROWS_AS(parse_expression("sin()"), Error);
    CHECK_THROWS_AS(parse_expression("min(1)"), Error);
    CHECK_THROWS_AS(parse_expression("2+3 4"), Error);
    try {
        parse_expression("bogus(1)");
        FAIL("expected UnknownIdentifier");
    } catch (const Error& e) {
        CHECK(e.kind() == errc::unknown_identifier);
        CHECK(std::string(e.what()).find("bogus") != std::string::npos);
    }
}

TEST_CASE("print/parse round trip preserves the tree") {
    const char* cases[] = {
        "1+2*3-4/5",
        "-(x+y)*z",
        "2^-3^2",
        "-x^2+(-x)^2",
        "(1+sin(0.02*x+0.03*y)*cos(0.03*x-0.02*y))/2",
        "min(max(x,y),atan2(y,x))/pi",
        "abs(phi)/pi",
        "1-(rho-15)/35",
        "floor(x)-ceil(y)+exp(z)",
    };
    for (const char* src : cases) {
        CAPTURE(src);
        ExprPtr first = parse_expression(src);
        std::string printed = expression_to_string(first);
        CAPTURE(printed);
        ExprPtr second = parse_expression(printed);
        CHECK(expressions_equal(*first, *second));
        // and evaluation agrees at a few points
        for (Vec3 p : {Vec3{0.3, -1.2, 4.0}, Vec3{-2, 5, 0.1}}) {
            double a = eval_expression(first, p);
            double b = eval_expression(second, p);
            if (std::isfinite(a))
                CHECK(a == b);
        }
    }
}
