#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hamspec/extension.hpp"
#include "hamspec/solution.hpp"

namespace hamspec {

// Green-kernel data of a resolvent: y(t) = sum_s G(t, s, z) W(s) R(g)(s) with
//   G(t, s, z) = Phi(t, z) M_kernel R(Phi)*(s, conj z)   for s < t,
//   G(t, s, z) = Phi(t, z) N_kernel R(Phi)*(s, conj z)   for t <= s.
struct GreenData {
    cplx z;
    bool regular = true;  // false: singular half-line limit-circle kernel
    long b = 0;           // truncation point (regular case)
    CMat K;               // boundary limit matrix
    CMat N_kernel;
    CMat M_kernel;        // always N_kernel + J
    double k_residual = 0.0;  // Cauchy residual of the K limit (singular case)
};

// Variation-of-constants resolvent of the regular problem: the returned y on
// [a, b+1] satisfies L(y) = W R(z y - g) and the boundary condition; g must
// cover [a, b+1]. Throws ZIsEigenvalue when z is an eigenvalue.
HamSequence regular_resolvent(const SystemCoefficients& sys, const RegularBC& bc,
                              cplx z, const HamSequence& g);

// K_r = Q Phi(b+1, z); N_r = (P - K_r)^-1 K_r J; M_r = N_r + J.
GreenData green_kernel_regular(const SystemCoefficients& sys, const RegularBC& bc,
                               cplx z);

// Half-line limit-circle kernel: K is the Cauchy limit of N Theta*(t) J
// Phi(t, z) over doubling horizons (Theta at the descriptor's real frame
// point); N_0 = (M - K)^-1 K J. Throws TailDivergence when the limit is not
// Cauchy by the cap (misclassification indicator) and ZIsEigenvalue when
// M - K is singular.
GreenData green_kernel_singular_lcc(const SystemCoefficients& sys,
                                    const SseDescriptor& sse, cplx z,
                                    double tol = 1e-11, long cap = 1L << 18);

// Kernel-sum resolvent on [a, t_hi] for g supported on its window (treated as
// zero outside). Works for both regular and singular kernels.
HamSequence kernel_resolvent(const SystemCoefficients& sys, const GreenData& gd,
                             const HamSequence& g, long t_hi);

// Convenience wrapper: kernel of green_kernel_singular_lcc applied to g.
HamSequence singular_resolvent_lcc(const SystemCoefficients& sys,
                                   const SseDescriptor& sse, cplx z,
                                   const HamSequence& g, long t_hi,
                                   double tol = 1e-11);

struct EigenOptions {
    std::vector<double> shifts = {0.0, -1.0, 1.0, -3.0, 3.0, -9.0, 9.0};
    double theta_tol = 1e-9;    // compressed eigenvalues below this are the
                                // multivalued / out-of-range cluster
    double cluster_tol = 1e-8;  // multiplicity clustering resolution
    double weight_tol = 1e-12;  // positive-eigenvalue cut for W(t)
};

struct EigenList {
    std::vector<double> values;  // ascending, multiplicity included
    std::vector<std::size_t> clusters;  // sizes of multiplicity clusters
    double shift = 0.0;          // resolvent shift actually used
    double theta_tol = 0.0;
    std::size_t discarded = 0;   // size of the near-zero compressed cluster
};

// k-th eigenvalue above zero (k >= 1, ascending) or below zero (k <= -1,
// descending); nullopt when the list has no such index.
std::optional<double> signed_index(const EigenList& eigs, long k);

// Full spectrum of the regular problem by resolvent compression: orthonormal
// basis of the weighted space from per-t eigendecompositions of W(t), the
// compressed resolvent matrix S_ij = <(mu I - H)^-1 e_j, e_i> via one
// Hermitian eigensolve, lambda = mu - 1/theta. Shifts are retried in order
// until the boundary solve is nonsingular.
EigenList eigenvalues_regular(const SystemCoefficients& sys, const RegularBC& bc,
                              const EigenOptions& opt = {});

struct OracleOptions {
    double accept = 1e-6;  // |det| <= accept * grid scale at a refined root
    double width = 1e-10;  // golden-section refinement width
};

// Independent cross-check: scans |det(P - Q Phi(b+1, lambda))| on a real grid
// and refines each local minimum by golden section; returns accepted roots
// (without multiplicities; clustered roots may be missed).
std::vector<double> eigen_oracle(const SystemCoefficients& sys,
                                 const RegularBC& bc, double lo, double hi,
                                 std::size_t grid, const OracleOptions& opt = {});

struct DefectSplit {
    double delta = 0.0;   // delta1 + delta2
    double delta1 = 0.0;  // weighted-norm^2 of the resolvent difference on [a, b]
    double delta2 = 0.0;  // tail weighted-norm^2 of the half-line resolvent
};

// Resolvent defect of the truncation at z for a given g supported on [a, b]:
// compares the half-line limit-circle resolvent against the regular one.
DefectSplit resolvent_defect(const SystemCoefficients& sys,
                             const SseDescriptor& sse, const RegularBC& bc,
                             cplx z, const HamSequence& g, double tol = 1e-11);

struct DefectConstants {
    double alpha0_z = 0.0;      // max full-line solution norm at z
    double alpha0_zbar = 0.0;   // same at conj z
    double alpha_r_z = 0.0;     // max solution tail norm^2 past b at z
    double alpha_r_zbar = 0.0;
    double m0 = 0.0, n0 = 0.0;  // kernel norms of the half-line resolvent
    double m_r = 0.0, n_r = 0.0;  // kernel deviations of the truncation
    double eta = 0.0;           // defect bound coefficient
};

// eta(r) = 12 n^2 [9 a0(z)^2 a0(zb)^2 (m_r^2 + n_r^2) + n0^2 a0(z)^2 a_r(zb)
//                  + 6 (m0^2 + n0^2) a0(zb)^2 a_r(z)], the coefficient in
// delta_r(g) <= eta(r) ||g||^2.
DefectConstants defect_constants(const SystemCoefficients& sys,
                                 const SseDescriptor& sse, const RegularBC& bc,
                                 cplx z, double tol = 1e-11);

struct ErrorBound {
    double e_r = 0.0;  // eigenvalue-reciprocal error radius of the truncation
    double alpha0 = 0.0;
    double m0 = 0.0, n0 = 0.0;
    double eps_r = 0.0;  // tail defect norm past b
};

// e_r = 2 sqrt(3) n alpha0 [(6 m0^2 + 7 n0^2)(||E(a)||^2 + ||E(a)B(a)||^2
//       + n)]^(1/2) eps_r^(1/2), in the frame where the descriptor's base
// point is 0 and 0 is in the resolvent set. Limit-circle only.
ErrorBound error_bound(const SystemCoefficients& sys, const SseDescriptor& sse,
                       long b, double tol = 1e-11);

struct EigenBound {
    double bound = 0.0;
    bool valid = false;  // requires 1 - |lambda| e_r > 0
};

// |lambda|^2 e_r / (1 - |lambda| e_r): radius around the truncated eigenvalue
// containing the half-line eigenvalue once valid.
EigenBound eigenvalue_bound(double lambda, double e_r);

// Partial sum of |lambda_k|^-2 (Hilbert-Schmidt tail witness); values below
// floor_mag are skipped.
double hs_tail_check(const EigenList& eigs, double floor_mag = 1e-12);

enum class Verdict { Converged, InclusiveOnly, Unresolved };

struct Trajectory {
    long k = 0;  // signed index around zero
    std::vector<std::optional<double>> values;   // one per schedule entry
    std::vector<EigenBound> bound_a;             // at lambda_k^(r)
    std::vector<EigenBound> bound_b;             // at the latest estimate
    Verdict verdict = Verdict::Unresolved;
};

struct ApproxOptions {
    const PsiBasis* psi = nullptr;  // intermediate case only
    EigenOptions eig = {};
    long max_index = 5;       // track signed indices |k| <= max_index
    double conv_tol = 1e-7;   // Cauchy tolerance on successive trajectory gaps
    bool with_bounds = true;  // error-bound machinery (limit circle, frame 0)
};

struct ApproximationReport {
    std::vector<long> schedule;
    std::vector<EigenList> per_r;     // empty list where a stage failed
    std::vector<double> e_r;          // NaN where unavailable
    std::vector<double> hs_partial;   // sum |lambda|^-2 per truncation
    std::vector<Trajectory> trajectories;
    std::vector<std::string> errors;  // per-truncation failure records
    bool exact_mode = false;          // limit circle: spectral exactness holds
};

// Truncation-sequence driver: induces the regular problem at each schedule
// point, computes its spectrum, matches trajectories by signed index, and
// attaches error bounds in the limit-circle frame-zero case. Stage errors are
// recorded per truncation; the run continues.
ApproximationReport approximate(const SystemCoefficients& sys,
                                const SseDescriptor& sse,
                                const std::vector<long>& schedule,
                                const ApproxOptions& opt = {});

}  // namespace hamspec
