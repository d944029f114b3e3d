#include "hamspec/extension.hpp"

#include <cmath>

#include "hamspec/solution.hpp"

namespace hamspec {

PsiBasis build_psi_basis(const SystemCoefficients& sys, double lambda0,
                         const L2CountOptions& opt) {
    const std::size_t n = sys.n();
    const L2Subspace sub = l2_solution_subspace(sys, cplx{lambda0, 0.0}, opt);
    const std::size_t d = sub.count;
    if (d < n)
        throw InvalidBoundaryCondition(
            "square-summable count at the base point is below n");
    if (d == n)
        throw InvalidBoundaryCondition(
            "base point admits only n square-summable solutions; pick a real "
            "point below the essential spectrum (assumption on the frame)");
    PsiBasis psi;
    psi.lambda0 = lambda0;
    psi.d = d;

    // Wronskian Gram of the square-summable frame is constant in t; evaluate
    // at t = a.
    const CMat init1 = sub.basis.block(0, 0, 2 * n, d);
    const CMat s = init1.adjoint() * canonical_J(n) * init1;
    const SkewDiag sd = diag_skew_hermitian(s);
    const std::size_t r = 2 * d - 2 * n;
    const double scale = std::max(fro_norm(s), 1e-30);
    for (std::size_t i = 0; i < d; ++i) {
        const double mag = std::abs(sd.D(i, i));
        if ((i < r) != (mag > 1e-8 * scale))
            throw InternalConsistency(
                "Wronskian Gram of the square-summable frame has unexpected rank");
    }
    psi.init = CMat(2 * n, 2 * n);
    psi.init.set_block(0, 0, init1 * sd.U);
    for (std::size_t j = d; j < 2 * n; ++j)
        psi.init.set_block(0, j, sub.basis.column(j));
    psi.lambda_diag = sd.D.block(0, 0, r, r);
    return psi;
}

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw InvalidBoundaryCondition(what);
}

}  // namespace

void validate_sse(const SystemCoefficients& sys, const SseDescriptor& sse,
                  std::size_t d, const PsiBasis* psi, double tol) {
    const std::size_t n = sys.n();
    const CMat j = canonical_J(n);
    const double scale_m = 1.0 + fro_norm(sse.M);
    switch (sse.type) {
        case LimitType::LimitCircle: {
            require(d == 2 * n, "limit-circle descriptor for a non-limit-circle endpoint");
            require(sse.M.rows() == 2 * n && sse.M.cols() == 2 * n &&
                        sse.N.rows() == 2 * n && sse.N.cols() == 2 * n,
                    "limit-circle extension needs square 2n x 2n M and N");
            require(rank_of(hcat(sse.M, sse.N)) == 2 * n, "rank (M, N) must be 2n");
            const CMat res = sse.M * j * sse.M.adjoint() - sse.N * j * sse.N.adjoint();
            require(fro_norm(res) <= tol * scale_m * scale_m,
                    "self-adjointness identity M J M* = N J N* fails");
            break;
        }
        case LimitType::LimitPoint: {
            require(d == n, "limit-point descriptor for a non-limit-point endpoint");
            require(sse.M.rows() == n && sse.M.cols() == 2 * n,
                    "limit-point extension needs an n x 2n matrix M");
            require(rank_of(sse.M) == n, "rank M must be n");
            require(fro_norm(sse.M * j * sse.M.adjoint()) <= tol * scale_m * scale_m,
                    "isotropy identity M J M* = 0 fails");
            if (!sse.N.empty()) {
                require(sse.N.rows() == n && sse.N.cols() == 2 * n,
                        "auxiliary far-end matrix must be n x 2n");
                require(rank_of(sse.N) == n, "auxiliary far-end matrix must have rank n");
                const double scale_n = 1.0 + fro_norm(sse.N);
                require(fro_norm(sse.N * j * sse.N.adjoint()) <= tol * scale_n * scale_n,
                        "auxiliary far-end matrix must satisfy N J N* = 0");
            }
            break;
        }
        case LimitType::Intermediate: {
            require(n < d && d < 2 * n, "intermediate descriptor needs n < d < 2n");
            require(psi != nullptr && psi->d == d,
                    "intermediate extension needs the psi basis for Lambda");
            const std::size_t r = 2 * d - 2 * n;
            require(sse.M.rows() == d && sse.M.cols() == 2 * n,
                    "intermediate extension needs a d x 2n matrix M");
            require(sse.N.rows() == d && sse.N.cols() == r,
                    "intermediate extension needs a d x (2d-2n) matrix N");
            require(rank_of(hcat(sse.M, sse.N)) == d, "rank (M, N) must be d");
            // Lambda is diagonal, so Lambda^T = Lambda
            const CMat res = sse.M * j * sse.M.adjoint() -
                             sse.N * psi->lambda_diag * sse.N.adjoint();
            const double scale_n = 1.0 + fro_norm(sse.N) * fro_norm(psi->lambda_diag);
            require(fro_norm(res) <= tol * std::max(scale_m * scale_m, scale_n),
                    "self-adjointness identity M J M* = N Lambda^T N* fails");
            break;
        }
    }
}

RegularBC induce_regular(const SystemCoefficients& sys, const SseDescriptor& sse,
                         long b, const PsiBasis* psi) {
    const std::size_t n = sys.n();
    if (b <= sys.a())
        throw ContractViolation("truncation point must exceed the interval start");
    const CMat j = canonical_J(n);
    const double base = (sse.type == LimitType::Intermediate && psi != nullptr)
                            ? psi->lambda0
                            : sse.lambda0;
    FundamentalMatrix theta(sys, cplx{base, 0.0});
    RegularBC bc;
    bc.b = b;
    switch (sse.type) {
        case LimitType::LimitCircle:
            bc.P = sse.M;
            bc.Q = sse.N * theta.at(b + 1).adjoint() * j;
            break;
        case LimitType::LimitPoint: {
            const CMat aux = sse.N.empty() ? sse.M : sse.N;
            bc.P = vcat(sse.M, CMat(n, 2 * n));
            bc.Q = -1.0 * (vcat(CMat(n, 2 * n), aux) * theta.at(b + 1).adjoint() * j);
            break;
        }
        case LimitType::Intermediate: {
            if (psi == nullptr)
                throw ContractViolation("intermediate induction needs the psi basis");
            const std::size_t d = psi->d;
            const std::size_t r = 2 * d - 2 * n;
            CMat front(2 * n, 2 * n);
            front.set_block(0, 0, sse.N);
            front.set_block(d, r, CMat::identity(2 * n - d));
            const CMat psi_end = theta.at(b + 1) * psi->init;
            bc.P = vcat(sse.M, CMat(2 * n - d, 2 * n));
            bc.Q = front * psi_end.adjoint() * j;
            break;
        }
    }
    return bc;
}

double boundary_residual(const RegularBC& bc, const HamSequence& y) {
    return fro_norm(bc.P * y.at(y.start) - bc.Q * y.at(bc.b + 1));
}

SseDescriptor natural_sse(const SystemCoefficients& sys, LimitType type,
                          const PsiBasis* psi, double lambda0) {
    const std::size_t n = sys.n();
    SseDescriptor sse;
    sse.type = type;
    sse.lambda0 = lambda0;
    switch (type) {
        case LimitType::LimitCircle:
            sse.M = CMat::identity(2 * n);
            sse.N = CMat::identity(2 * n);
            break;
        case LimitType::LimitPoint:
            sse.M = CMat(n, 2 * n);
            sse.M.set_block(0, 0, CMat::identity(n));
            break;
        case LimitType::Intermediate: {
            if (psi == nullptr)
                throw ContractViolation("intermediate extension needs the psi basis");
            const std::size_t d = psi->d;
            const std::size_t r = 2 * d - 2 * n;
            const CMat psi1_a = psi->init.block(0, 0, 2 * n, d);
            sse.M = psi1_a.adjoint() * canonical_J(n);
            sse.N = CMat(d, r);
            sse.N.set_block(0, 0, CMat::identity(r));
            sse.lambda0 = psi->lambda0;
            break;
        }
    }
    return sse;
}

}  // namespace hamspec
