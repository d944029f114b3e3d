#include "hamspec/classify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hamspec {

namespace {

// Marches Phi and accumulates the solution Gram sum R(Phi)* W R(Phi).
struct GramMarch {
    const SystemCoefficients& sys;
    cplx lambda;
    CMat phi;   // Phi(t)
    CMat gram;
    long t;

    explicit GramMarch(const SystemCoefficients& s, cplx l)
        : sys(s), lambda(l), phi(CMat::identity(2 * s.n())),
          gram(2 * s.n(), 2 * s.n()), t(s.a()) {}

    // Adds terms for t up to horizon-1 (i.e. Gram over [a, horizon-1]).
    void advance_to(long horizon) {
        const std::size_t n = sys.n();
        for (; t < horizon; ++t) {
            const CMat next = step(sys, lambda, phi, t);
            CMat r(2 * n, 2 * n);
            r.set_block(0, 0, next.block(0, 0, n, 2 * n));
            r.set_block(n, 0, phi.block(n, 0, n, 2 * n));
            gram += r.adjoint() * sys.weight(t) * r;
            phi = next;
        }
    }
};

}  // namespace

DefinitenessResult find_definiteness(const SystemCoefficients& sys, double tol,
                                     long cap) {
    GramMarch march(sys, cplx{0.0, 0.0});
    for (long horizon = 4;; horizon *= 2) {
        march.advance_to(sys.a() + horizon);
        if (!march.gram.all_finite())
            throw DefinitenessNotFound("solution Gram overflowed during the search");
        const HermEigen e = herm_eigen(march.gram);
        const double mn = e.values.front();
        if (mn > tol * std::max(1.0, e.values.back()))
            return {sys.a(), sys.a() + horizon - 1, mn};
        if (horizon >= cap)
            throw DefinitenessNotFound(
                "no positive-definite solution Gram window up to horizon " +
                std::to_string(cap));
    }
}

std::size_t count_l2_solutions(const SystemCoefficients& sys, cplx lambda,
                               const L2CountOptions& opt) {
    return l2_solution_subspace(sys, lambda, opt).count;
}

L2Subspace l2_solution_subspace(const SystemCoefficients& sys, cplx lambda,
                                const L2CountOptions& opt) {
    const std::size_t m = 2 * sys.n();
    const double eps = std::numeric_limits<double>::epsilon();
    GramMarch march(sys, lambda);

    // 0 undecided, 1 square-summable, 2 divergent; sorted-index tracking is
    // sound because the Gram grows monotonically in the PSD order. A single
    // stable reading settles an index (partial sums are monotone, so a small
    // ratio means the mass is in); divergence needs two consecutive growth
    // readings, since a converging sum can still show a large ratio while its
    // early mass accumulates.
    std::vector<int> state(m, 0);
    std::vector<int> div_hits(m, 0), zero_hits(m, 0);
    std::vector<double> prev;
    double prev_floor = 0.0;
    const bool finite_support = sys.tail().kind == TailTag::Kind::FiniteSupport;
    CMat last_vectors;  // eigenvectors of the latest finite Gram

    for (long horizon = opt.t0; horizon <= opt.cap; horizon *= 2) {
        march.advance_to(sys.a() + horizon);
        bool capped = !march.gram.all_finite();
        double trace = 0.0;
        if (!capped) {
            for (std::size_t i = 0; i < m; ++i) trace += std::abs(march.gram(i, i));
            capped = trace > opt.entry_cap;
        }
        if (capped) {
            // Everything still growing at this point is not square summable;
            // an index that stayed at numerical zero throughout is.
            for (std::size_t i = 0; i < m; ++i)
                if (state[i] == 0)
                    state[i] = (!prev.empty() && prev[i] <= prev_floor) ? 1 : 2;
        } else {
            const HermEigen e = herm_eigen(march.gram);
            // values below the floor are noise from much larger siblings
            const double floor = 1e3 * eps * std::max(trace, 1e-300);
            if (!prev.empty()) {
                for (std::size_t i = 0; i < m; ++i) {
                    if (state[i] != 0) continue;
                    const double lo = prev[i], hi = e.values[i];
                    if (lo <= prev_floor && hi <= floor) {
                        ++zero_hits[i];
                        div_hits[i] = 0;
                        const bool past_support =
                            finite_support &&
                            sys.a() + horizon - 1 > sys.tail().support_end;
                        if (past_support || zero_hits[i] >= 3) state[i] = 1;
                    } else if (lo > prev_floor && hi >= opt.tol_div * lo) {
                        if (++div_hits[i] >= 2) state[i] = 2;
                    } else if (lo > prev_floor && hi > floor &&
                               hi <= (1.0 + opt.tol_stab) * lo) {
                        state[i] = 1;
                    } else {
                        div_hits[i] = 0;
                    }
                }
            }
            prev = e.values;
            prev_floor = floor;
            last_vectors = e.vectors;
        }
        if (std::none_of(state.begin(), state.end(), [](int s) { return s == 0; })) {
            L2Subspace out;
            out.count = static_cast<std::size_t>(
                std::count(state.begin(), state.end(), 1));
            out.horizon = sys.a() + horizon - 1;
            if (last_vectors.empty())
                throw ClassificationAmbiguous(
                    "solution Gram overflowed before any eigen-decomposition");
            // square-summable directions first, ascending Gram order preserved
            out.basis = CMat(m, m);
            std::size_t k = 0;
            for (int want : {1, 2})
                for (std::size_t i = 0; i < m; ++i)
                    if (state[i] == want)
                        out.basis.set_block(0, k++, last_vectors.column(i));
            return out;
        }
    }
    throw ClassificationAmbiguous(
        "solution Gram growth not separated into bounded/divergent by horizon " +
        std::to_string(opt.cap));
}

Classification classify(const SystemCoefficients& sys, const L2CountOptions& opt) {
    Classification c;
    c.d_plus = count_l2_solutions(sys, cplx{0.0, 1.0}, opt);
    c.d_minus = count_l2_solutions(sys, cplx{0.0, -1.0}, opt);
    if (c.d_plus != c.d_minus)
        throw NoSelfAdjointExtension("deficiency indices differ: d+ = " +
                                     std::to_string(c.d_plus) + ", d- = " +
                                     std::to_string(c.d_minus));
    c.d = c.d_plus;
    // A weight vanishing beyond its support leaves a finite-dimensional
    // weighted space: every solution is trivially square summable.
    c.finite_dim_space = sys.tail().kind == TailTag::Kind::FiniteSupport;
    const std::size_t n = sys.n();
    c.type = c.d == n ? LimitType::LimitPoint
                      : (c.d == 2 * n ? LimitType::LimitCircle
                                      : LimitType::Intermediate);
    if (c.d < n)
        throw InternalConsistency("deficiency index below n; model violates the "
                                  "standing assumptions");
    return c;
}

}  // namespace hamspec
