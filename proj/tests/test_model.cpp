#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <vector>

#include "doctest.h"
#include "hamspec/solution.hpp"

using namespace hamspec;

namespace {

SystemCoefficients sample_second_order() {
    SecondOrderParams sp;
    sp.p = [](long t) { return 1.0 + 0.1 * static_cast<double>(t % 3); };
    sp.q = [](long t) { return 0.5 - 0.2 * static_cast<double>(t % 2); };
    sp.w = [](long t) { return std::pow(2.0, -static_cast<double>(t)); };
    sp.a = 2;
    return second_order_system(std::move(sp));
}

}  // namespace

TEST_CASE("second-order reduction matches the scalar recurrence") {
    const SystemCoefficients sys = sample_second_order();
    auto p = [](long t) { return 1.0 + 0.1 * static_cast<double>(t % 3); };
    auto q = [](long t) { return 0.5 - 0.2 * static_cast<double>(t % 2); };
    auto w = [](long t) { return std::pow(2.0, -static_cast<double>(t)); };
    const cplx lambda{0.3, -0.7};
    const long a = 2, t_hi = 30;

    // scalar oracle: -Delta(p(t) Delta z(t-1)) + q(t) z(t) = lambda w(t) z(t)
    std::vector<cplx> z(static_cast<std::size_t>(t_hi - a + 3));
    auto zat = [&](long t) -> cplx& { return z[static_cast<std::size_t>(t - (a - 1))]; };
    zat(a - 1) = cplx{0.4, 0.1};
    zat(a) = cplx{-1.2, 0.9};
    for (long t = a; t + 1 <= t_hi + 1; ++t)
        zat(t + 1) = zat(t) + (p(t) * (zat(t) - zat(t - 1)) +
                               (q(t) - lambda * w(t)) * zat(t)) / p(t + 1);

    CMat y0(2, 1);
    y0(0, 0) = zat(a - 1);
    y0(1, 0) = p(a) * (zat(a) - zat(a - 1));
    const HamSequence y = solve_ivp(sys, lambda, y0, t_hi + 1);
    for (long t = a; t <= t_hi + 1; ++t) {
        const double scale = 1.0 + std::abs(zat(t)) + std::abs(zat(t - 1));
        CHECK(std::abs(y.at(t)(0, 0) - zat(t - 1)) < 1e-12 * scale);
        CHECK(std::abs(y.at(t)(1, 0) - p(t) * (zat(t) - zat(t - 1))) < 1e-12 * scale);
    }
}

TEST_CASE("p_matrix is Hermitian for Hermitian blocks") {
    const SystemCoefficients sys = sample_second_order();
    for (long t : {2L, 5L, 9L}) {
        const CMat p = p_matrix(sys, t);
        CHECK(fro_norm(p - p.adjoint()) < 1e-14);
    }
}

TEST_CASE("solutions satisfy L(y) = lambda W R(y)") {
    const SystemCoefficients sys = sample_second_order();
    const cplx lambda{-0.4, 0.25};
    CMat y0(2, 1);
    y0(0, 0) = cplx{1.0, 0.0};
    y0(1, 0) = cplx{0.3, -0.2};
    const HamSequence y = solve_ivp(sys, lambda, y0, 25);
    for (long t = sys.a(); t < 25; ++t) {
        const CMat res = apply_L(sys, y, t) - lambda * (sys.weight(t) * apply_R(y, t));
        CHECK(fro_norm(res) < 1e-13 * (1.0 + fro_norm(y.at(t + 1))));
    }
}

TEST_CASE("validate flags broken assumptions") {
    auto broken_a = [](long) {
        CoeffBlocks b{CMat(1, 1), CMat(1, 1), CMat(1, 1), CMat(1, 1), CMat(1, 1)};
        b.A(0, 0) = 1.0;  // I - A singular
        return b;
    };
    ValidationReport rep = validate(SystemCoefficients(1, 0, broken_a), 0, 3);
    CHECK(!rep.ok);
    CHECK(rep.issues.front().assumption.find("A1") != std::string::npos);

    auto broken_w = [](long) {
        CoeffBlocks b{CMat(1, 1), CMat(1, 1), CMat(1, 1), CMat(1, 1), CMat(1, 1)};
        b.W1(0, 0) = -1.0;
        return b;
    };
    rep = validate(SystemCoefficients(1, 0, broken_w), 0, 3);
    CHECK(!rep.ok);
    CHECK(rep.issues.front().assumption.find("semi-definite") != std::string::npos);

    auto broken_b = [](long) {
        CoeffBlocks b{CMat(2, 2), CMat(2, 2), CMat(2, 2), CMat(2, 2), CMat(2, 2)};
        b.B(0, 1) = cplx{0.0, 1.0};  // not Hermitian
        return b;
    };
    rep = validate(SystemCoefficients(2, 0, broken_b), 0, 1);
    CHECK(!rep.ok);

    CHECK(validate(example_lcc(), 0, 40).ok);
    CHECK(validate(example_lpc(), 0, 40).ok);
    CHECK(validate(example_mid(), 0, 40).ok);
}

TEST_CASE("direct_sum stacks blocks diagonally") {
    const SystemCoefficients sys = example_mid();
    CHECK(sys.n() == 2);
    const CoeffBlocks b = sys.at(3);
    CHECK(std::abs(b.W1(0, 0).real() - std::pow(2.0, -3.0)) < 1e-15);
    CHECK(std::abs(b.W1(1, 1).real() - 1.0) < 1e-15);
    CHECK(std::abs(b.W1(0, 1)) == 0.0);
    CHECK(std::abs(b.B(0, 0).real() - 1.0) < 1e-15);
    CHECK(sys.tail().kind == TailTag::Kind::Geometric);
}

TEST_CASE("table_with_tail JSON round trip") {
    const std::string doc = R"({
      "n": 1, "a": 0,
      "rows": [
        {"t": 0, "A": [[[0,0]]], "B": [[[1,0]]], "C": [[[0.5,0]]],
         "W1": [[[1,0]]], "W2": [[[0,0]]]},
        {"t": 1, "A": [[[0,0]]], "B": [[[1,0]]], "C": [[[0,0]]],
         "W1": [[[2,0]]], "W2": [[[0,0]]]}
      ],
      "tail": {"kind": "geometric", "ratio": 0.5,
               "B": [[[1,0]]], "W1": [[[1,0]]]}
    })";
    const SystemCoefficients sys = table_with_tail_from_json(doc);
    CHECK(sys.n() == 1);
    CHECK(sys.a() == 0);
    CHECK(std::abs(sys.at(0).C(0, 0).real() - 0.5) < 1e-15);
    CHECK(std::abs(sys.at(1).W1(0, 0).real() - 2.0) < 1e-15);
    CHECK(std::abs(sys.at(2).W1(0, 0).real() - 1.0) < 1e-15);
    CHECK(std::abs(sys.at(4).W1(0, 0).real() - 0.25) < 1e-15);
    CHECK(std::abs(sys.at(4).B(0, 0).real() - 1.0) < 1e-15);
    CHECK(sys.tail().kind == TailTag::Kind::Geometric);
    CHECK(sys.tail().weight_ratio == 0.5);

    CHECK_THROWS_AS(table_with_tail_from_json(R"({"n":1,"a":0,"rows":[],"tail":{"kind":"constant"}})"),
                    ContractViolation);
    CHECK_THROWS_AS(table_with_tail_from_json(R"({"n":1,"a":0,
        "rows":[{"t":0,"A":[[0]],"B":[[[1,0]]],"C":[[[0,0]]],"W1":[[[1,0]]],"W2":[[[0,0]]]}],
        "tail":{"kind":"constant"}})"),
                    ContractViolation);
}

TEST_CASE("shifted_system moves the spectral parameter into the blocks") {
    const SystemCoefficients base = example_lcc();
    const double s = 1.5;
    const SystemCoefficients sh = shifted_system(base, s);
    for (long t : {0L, 4L}) {
        const CoeffBlocks b0 = base.at(t), b1 = sh.at(t);
        CHECK(fro_norm(b1.C - (b0.C - s * b0.W1)) < 1e-15);
        CHECK(fro_norm(b1.B - (b0.B + s * b0.W2)) < 1e-15);
        CHECK(fro_norm(b1.W1 - b0.W1) == 0.0);
    }
    // solving the shifted system at lambda equals the base system at lambda + s
    CMat y0(2, 1);
    y0(0, 0) = 1.0;
    y0(1, 0) = 0.5;
    const cplx lambda{0.2, 0.1};
    const HamSequence ya = solve_ivp(base, lambda + s, y0, 20);
    const HamSequence yb = solve_ivp(sh, lambda, y0, 20);
    for (long t = 0; t <= 20; ++t) CHECK(fro_norm(ya.at(t) - yb.at(t)) < 1e-10);
}
