#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "hamspec/extension.hpp"
#include "hamspec/solution.hpp"

using namespace hamspec;

namespace {

// rank (P, Q) = 2n and P J P* = Q J Q* make the truncated problem self-adjoint
void check_regular_bc(const RegularBC& bc, std::size_t n) {
    CHECK(rank_of(hcat(bc.P, bc.Q)) == 2 * n);
    const CMat j = canonical_J(n);
    const double scale =
        1.0 + fro_norm(bc.P) * fro_norm(bc.P) + fro_norm(bc.Q) * fro_norm(bc.Q);
    CHECK(fro_norm(bc.P * j * bc.P.adjoint() - bc.Q * j * bc.Q.adjoint()) <
          1e-10 * scale);
}

}  // namespace

TEST_CASE("limit-circle coupled extension induces self-adjoint regular problems") {
    const SystemCoefficients sys = example_lcc();
    const SseDescriptor sse = natural_sse(sys, LimitType::LimitCircle);
    validate_sse(sys, sse, 2);
    for (long b : {6L, 12L, 30L}) check_regular_bc(induce_regular(sys, sse, b), 1);
}

TEST_CASE("limit-point Dirichlet-type extension induces self-adjoint regular problems") {
    const SystemCoefficients sys = example_lpc();
    const SseDescriptor sse = natural_sse(sys, LimitType::LimitPoint);
    validate_sse(sys, sse, 1);
    const RegularBC bc = induce_regular(sys, sse, 15);
    check_regular_bc(bc, 1);
    // first row enforces y1(a) = 0; second row only involves y(b+1)
    CHECK(fro_norm(bc.Q.block(0, 0, 1, 2)) < 1e-14);
    CHECK(fro_norm(bc.P.block(1, 0, 1, 2)) < 1e-14);
}

TEST_CASE("descriptor validation rejects broken data") {
    const SystemCoefficients lcc = example_lcc();
    SseDescriptor bad = natural_sse(lcc, LimitType::LimitCircle);
    bad.N = CMat(2, 2);  // M J M* != 0 = N J N*
    CHECK_THROWS_AS(validate_sse(lcc, bad, 2), InvalidBoundaryCondition);

    const SystemCoefficients lpc = example_lpc();
    SseDescriptor bad_iso = natural_sse(lpc, LimitType::LimitPoint);
    bad_iso.M(0, 1) = cplx{0.0, 1.0};  // (1, i): M J M* = 2i
    CHECK_THROWS_AS(validate_sse(lpc, bad_iso, 1), InvalidBoundaryCondition);

    SseDescriptor wrong_case = natural_sse(lcc, LimitType::LimitCircle);
    CHECK_THROWS_AS(validate_sse(lpc, wrong_case, 1), InvalidBoundaryCondition);
}

TEST_CASE("psi basis of the intermediate reference system") {
    const SystemCoefficients sys = example_mid();
    const PsiBasis psi = build_psi_basis(sys, -1.0);
    CHECK(psi.d == 3);
    REQUIRE(psi.lambda_diag.rows() == 2);
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(std::abs(psi.lambda_diag(i, i).real()) < 1e-10);
        CHECK(std::abs(psi.lambda_diag(i, i).imag()) > 1e-8);
    }
    // The square-summable subspace at lambda0 = -1 is known in closed form:
    // both directions of the summand with the summable weight, plus the
    // geometrically decaying root mu = (3 - sqrt(5))/2 of the constant-weight
    // summand, whose initial direction is (1, mu - 1) in that summand's
    // coordinates. Its orthogonal complement is spanned by w below.
    const double mu = (3.0 - std::sqrt(5.0)) / 2.0;
    CMat w(4, 1);
    w(1, 0) = 1.0 - mu;
    w(3, 0) = 1.0;
    w *= cplx{1.0 / fro_norm(w), 0.0};
    for (std::size_t jcol = 0; jcol < 4; ++jcol) {
        const double overlap = fro_norm(w.adjoint() * psi.init.column(jcol)) /
                               fro_norm(psi.init.column(jcol));
        if (jcol < 3)
            CHECK(overlap < 1e-6);
        else
            CHECK(overlap > 0.1);
    }
    // the frame Gram at a is diag(Lambda, 0)
    const CMat psi1 = psi.init.block(0, 0, 4, 3);
    const CMat s = psi1.adjoint() * canonical_J(2) * psi1;
    CHECK(std::abs(s(0, 0) - psi.lambda_diag(0, 0)) < 1e-10);
    CHECK(std::abs(s(1, 1) - psi.lambda_diag(1, 1)) < 1e-10);
    for (std::size_t i = 0; i < 3; ++i)
        CHECK(std::abs(s(i, 2)) + std::abs(s(2, i)) < 1e-8);
}

TEST_CASE("intermediate extension induces self-adjoint regular problems") {
    const SystemCoefficients sys = example_mid();
    const PsiBasis psi = build_psi_basis(sys, -1.0);
    const SseDescriptor sse = natural_sse(sys, LimitType::Intermediate, &psi);
    validate_sse(sys, sse, 3, &psi);
    for (long b : {8L, 16L}) check_regular_bc(induce_regular(sys, sse, b, &psi), 2);
    CHECK_THROWS_AS(induce_regular(sys, sse, 8), ContractViolation);
}

TEST_CASE("boundary residual vanishes exactly on matched sequences") {
    const SystemCoefficients sys = example_lcc();
    const SseDescriptor sse = natural_sse(sys, LimitType::LimitCircle);
    const RegularBC bc = induce_regular(sys, sse, 10);
    HamSequence y = HamSequence::zeros(1, 0, 11);
    y.at(11)(0, 0) = cplx{0.3, 0.1};
    y.at(11)(1, 0) = cplx{-0.4, 0.0};
    y.at(0) = lu_solve(bc.P, bc.Q * y.at(11));
    CHECK(boundary_residual(bc, y) < 1e-13);
    y.at(0)(0, 0) += 0.5;
    CHECK(boundary_residual(bc, y) > 0.4);
}
