#pragma once

#include "hamspec/system.hpp"

namespace hamspec {

// One forward step of the recursion induced by J Delta y = (P + lambda W) R(y):
//   y1(t+1) = E(t) [y1(t) + (B(t) + lambda W2(t)) y2(t)],  E = (I - A)^-1
//   y2(t+1) = y2(t) + (C(t) - lambda W1(t)) y1(t+1) - A*(t) y2(t)
// y may carry several columns (2n x m).
CMat step(const SystemCoefficients& sys, cplx lambda, const CMat& y, long t);

// Solves the initial value problem y(a) = y_a up to t_hi inclusive.
HamSequence solve_ivp(const SystemCoefficients& sys, cplx lambda, const CMat& y_a,
                      long t_hi);

// Phi(t, lambda) with Phi(a) = I, cached lazily.
class FundamentalMatrix {
  public:
    FundamentalMatrix(SystemCoefficients sys, cplx lambda);

    const CMat& at(long t);
    cplx lambda() const { return lambda_; }
    const SystemCoefficients& system() const { return sys_; }

  private:
    SystemCoefficients sys_;
    cplx lambda_;
    std::vector<CMat> cache_;  // cache_[k] = Phi(a + k)
};

// sum_{t=t_lo}^{t_hi} R(y)(t)* W(t) R(x)(t); x, y must cover [t_lo, t_hi + 1].
CMat weighted_inner(const SystemCoefficients& sys, const HamSequence& x,
                    const HamSequence& y, long t_lo, long t_hi);

// (x, y)(t) = y* J x for 2n-column arguments.
CMat bform(const CMat& x, const CMat& y);

// max_t | Delta (y* J x)(t) - (lambda - conj(mu)) R(y)* W R(x)(t) | over the
// window, for x solving at lambda and y solving at mu.
double lagrange_residual(const SystemCoefficients& sys, const HamSequence& x,
                         const HamSequence& y, cplx lambda, cplx mu, long t_lo,
                         long t_hi);

// max_t || Phi(t, conj lambda)* J Phi(t, lambda) - J || over [a, t_hi].
double symplectic_residual(FundamentalMatrix& phi, FundamentalMatrix& phi_conj,
                           long t_hi);

// Transfer matrix of the lambda = 0 system in the R-trace coordinates
// v(t) = R(y)(t): v(t+1) = U(t) v(t),
//   U(t) = [[E(t+1) + E(t+1) B(t+1) C(t),  E(t+1) B(t+1) (I - A*(t))],
//           [C(t),                         I - A*(t)]].
CMat transfer_U(const SystemCoefficients& sys, long t);

struct TailQuantities {
    CMat D;         // sum_{t >= b} V*(t) W(t+1) V(t), V(t) = U(t) ... U(a)
    double eps;     // ||D||_F
    long horizon;   // last term index included
};

// Tail defect matrix past truncation point b; doubling-horizon Cauchy
// criterion with relative tolerance tol, horizon capped at b + cap.
TailQuantities tail_quantities(const SystemCoefficients& sys, long b,
                               double tol = 1e-11, long cap = 1L << 18);

// Per-column tail norms sum_{t >= t0} R(phi_i)* W R(phi_i) of the fundamental
// columns, doubling-horizon Cauchy criterion.
std::vector<double> column_tail_norms(FundamentalMatrix& phi, long t0,
                                      double tol = 1e-11, long cap = 1L << 18);

}  // namespace hamspec
