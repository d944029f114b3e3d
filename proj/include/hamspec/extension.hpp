#pragma once

#include "hamspec/classify.hpp"

namespace hamspec {

// Self-adjoint extension data at the singular endpoint. Shapes by case:
//   limit circle:  M, N are 2n x 2n with rank (M,N) = 2n, M J M* = N J N*
//   limit point:   M is n x 2n with rank M = n, M J M* = 0; N (optional)
//                  is an auxiliary matrix with the same constraints used to
//                  close the regular problems at the far end (defaults to M)
//   intermediate:  M is d x 2n, N is d x (2d-2n) with rank (M,N) = d and
//                  M J M* = N Lambda^T N*, Lambda from the psi basis
struct SseDescriptor {
    LimitType type;
    CMat M, N;
    double lambda0 = 0.0;  // real base point of the far-end solution frame
};

// Regular boundary condition P y(a) - Q y(b+1) = 0 on the truncated interval.
struct RegularBC {
    CMat P, Q;
    long b;  // right endpoint of the truncated interval
};

// Square-summable solution frame at a real base point for the intermediate
// case: columns 1..d of Phi(., lambda0) * init span the square-summable
// solutions, arranged so the first 2d-2n have an invertible diagonal
// Wronskian-Gram Lambda; columns d+1..2n complete a solution basis.
struct PsiBasis {
    double lambda0;
    std::size_t d;
    CMat init;         // 2n x 2n initial values at t = a
    CMat lambda_diag;  // (2d-2n) x (2d-2n) diagonal, purely imaginary, invertible
};

// Builds the psi basis by extracting the square-summable solution subspace at
// lambda0 and rotating it with the diagonalization of its Wronskian Gram.
PsiBasis build_psi_basis(const SystemCoefficients& sys, double lambda0,
                         const L2CountOptions& opt = {});

// Checks shapes, rank, and the self-adjointness identity of the descriptor
// against the classified deficiency index d; throws InvalidBoundaryCondition.
// The psi basis is required in the intermediate case (for Lambda) and ignored
// otherwise.
void validate_sse(const SystemCoefficients& sys, const SseDescriptor& sse,
                  std::size_t d, const PsiBasis* psi = nullptr,
                  double tol = 1e-8);

// Induces the regular self-adjoint problem on [a, b] for the given extension.
RegularBC induce_regular(const SystemCoefficients& sys, const SseDescriptor& sse,
                         long b, const PsiBasis* psi = nullptr);

// || P y(a) - Q y(b+1) ||_F for a candidate eigensequence.
double boundary_residual(const RegularBC& bc, const HamSequence& y);

// Convenient valid extensions: limit circle M = N = I; limit point
// M = (I_n, 0) (a Dirichlet-type condition); intermediate M = Psi_1*(a) J,
// N = (I; 0) built on the psi basis.
SseDescriptor natural_sse(const SystemCoefficients& sys, LimitType type,
                          const PsiBasis* psi = nullptr, double lambda0 = 0.0);

}  // namespace hamspec
