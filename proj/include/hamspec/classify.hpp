#pragma once

#include "hamspec/solution.hpp"

namespace hamspec {

enum class LimitType { LimitPoint, LimitCircle, Intermediate };

struct DefinitenessResult {
    long t_lo, t_hi;      // window on which every nontrivial solution has norm > 0
    double min_eigen;     // smallest solution-Gram eigenvalue on the window
};

// Searches for a definiteness window [a, T] by doubling T until the solution
// Gram at lambda = 0 is positive definite; throws DefinitenessNotFound at cap.
DefinitenessResult find_definiteness(const SystemCoefficients& sys,
                                     double tol = 1e-10, long cap = 1L << 18);

struct L2CountOptions {
    long t0 = 4;             // first Gram horizon (doubled each round)
    long cap = 1L << 18;     // horizon cap
    double tol_stab = 0.05;  // eigenvalue ratio <= 1 + tol_stab -> square summable
    double tol_div = 1.5;    // eigenvalue ratio >= tol_div -> divergent
    double entry_cap = 1e100;
};

// Number of linearly independent square-summable solutions at lambda: tracks
// sorted solution-Gram eigenvalues across doubling horizons and freezes each
// index once it settles (stable => counted, sustained growth => not).
std::size_t count_l2_solutions(const SystemCoefficients& sys, cplx lambda,
                               const L2CountOptions& opt = {});

struct L2Subspace {
    std::size_t count;  // square-summable dimension
    CMat basis;         // 2n x 2n initial values; square-summable columns first
    long horizon;       // Gram horizon at which every direction settled
};

// Same decision procedure, additionally returning Gram eigenvectors as initial
// values: the first `count` columns span the square-summable solutions.
L2Subspace l2_solution_subspace(const SystemCoefficients& sys, cplx lambda,
                                const L2CountOptions& opt = {});

struct Classification {
    std::size_t d_plus;  // square-summable count at lambda = i
    std::size_t d_minus; // square-summable count at lambda = -i
    std::size_t d;       // common deficiency index
    LimitType type;
    // The weighted space is finite-dimensional (weight of finite total rank);
    // forces the limit-circle case.
    bool finite_dim_space = false;
};

// Classifies the singular endpoint; throws NoSelfAdjointExtension when the
// two half-plane counts differ.
Classification classify(const SystemCoefficients& sys,
                        const L2CountOptions& opt = {});

}  // namespace hamspec
