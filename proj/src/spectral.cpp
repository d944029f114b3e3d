#include "hamspec/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hamspec {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// R(Phi)(t) as a 2n x 2n matrix: top rows from Phi(t+1), bottom from Phi(t).
CMat rphi_at(FundamentalMatrix& phi, long t) {
    const std::size_t n = phi.system().n();
    CMat r(2 * n, 2 * n);
    r.set_block(0, 0, phi.at(t + 1).block(0, 0, n, 2 * n));
    r.set_block(n, 0, phi.at(t).block(n, 0, n, 2 * n));
    return r;
}

// tau(s) = R(Phi)*(s, conj z) W(s) R(g)(s) for s over g's R-trace window.
std::vector<CMat> source_terms(const SystemCoefficients& sys,
                               FundamentalMatrix& phi_bar, const HamSequence& g) {
    std::vector<CMat> tau;
    for (long s = g.start; s < g.end(); ++s)
        tau.push_back(rphi_at(phi_bar, s).adjoint() * (sys.weight(s) * apply_R(g, s)));
    return tau;
}

HamSequence assemble(const SystemCoefficients& sys, FundamentalMatrix& phi,
                     const CMat& m_kernel, const CMat& n_kernel,
                     const std::vector<CMat>& tau, long tau_start, long t_hi) {
    const std::size_t n = sys.n();
    CMat suffix(2 * n, 1), prefix(2 * n, 1);
    for (const CMat& term : tau) suffix += term;
    HamSequence y = HamSequence::zeros(n, sys.a(), t_hi);
    for (long t = sys.a(); t <= t_hi; ++t) {
        // the term at s = t - 1 moves from the suffix to the prefix block
        const long idx = t - 1 - tau_start;
        if (idx >= 0 && idx < static_cast<long>(tau.size())) {
            prefix += tau[static_cast<std::size_t>(idx)];
            suffix -= tau[static_cast<std::size_t>(idx)];
        }
        y.at(t) = phi.at(t) * (m_kernel * prefix + n_kernel * suffix);
    }
    return y;
}

}  // namespace

HamSequence regular_resolvent(const SystemCoefficients& sys, const RegularBC& bc,
                              cplx z, const HamSequence& g) {
    const std::size_t n = sys.n();
    if (g.start != sys.a() || g.end() < bc.b + 1)
        throw ContractViolation("source must cover the regular interval");
    FundamentalMatrix phi(sys, z);
    FundamentalMatrix phi_bar(sys, std::conj(z));
    const CMat j = canonical_J(n);

    CMat total(2 * n, 1);
    std::vector<CMat> tau;
    for (long s = sys.a(); s <= bc.b; ++s) {
        tau.push_back(rphi_at(phi_bar, s).adjoint() *
                      (sys.weight(s) * apply_R(g, s)));
        total += tau.back();
    }
    const CMat end_map = bc.Q * phi.at(bc.b + 1);
    CMat y_a;
    try {
        y_a = lu_solve(bc.P - end_map, end_map * (j * total));
    } catch (const SingularMatrix&) {
        throw ZIsEigenvalue("spectral point is an eigenvalue of the regular problem");
    }

    HamSequence y = HamSequence::zeros(n, sys.a(), bc.b + 1);
    CMat acc = y_a;
    for (long t = sys.a(); t <= bc.b + 1; ++t) {
        if (t > sys.a()) acc += j * tau[static_cast<std::size_t>(t - 1 - sys.a())];
        y.at(t) = phi.at(t) * acc;
    }
    return y;
}

GreenData green_kernel_regular(const SystemCoefficients& sys, const RegularBC& bc,
                               cplx z) {
    FundamentalMatrix phi(sys, z);
    const CMat j = canonical_J(sys.n());
    GreenData gd;
    gd.z = z;
    gd.regular = true;
    gd.b = bc.b;
    gd.K = bc.Q * phi.at(bc.b + 1);
    try {
        gd.N_kernel = lu_solve(bc.P - gd.K, gd.K * j);
    } catch (const SingularMatrix&) {
        throw ZIsEigenvalue("spectral point is an eigenvalue of the regular problem");
    }
    gd.M_kernel = gd.N_kernel + j;
    return gd;
}

GreenData green_kernel_singular_lcc(const SystemCoefficients& sys,
                                    const SseDescriptor& sse, cplx z,
                                    double tol, long cap) {
    if (sse.type != LimitType::LimitCircle)
        throw ContractViolation("half-line kernel requires a limit-circle descriptor");
    const CMat j = canonical_J(sys.n());
    FundamentalMatrix theta(sys, cplx{sse.lambda0, 0.0});
    FundamentalMatrix phi(sys, z);

    const auto eval = [&](long t) {
        return CMat(sse.N * (theta.at(t).adjoint() * (j * phi.at(t))));
    };
    long h = 8;
    CMat k_prev = eval(sys.a() + h);
    GreenData gd;
    gd.z = z;
    gd.regular = false;
    for (h *= 2;; h *= 2) {
        const CMat k_next = eval(sys.a() + h);
        const double diff = fro_norm(k_next - k_prev);
        if (!k_next.all_finite())
            throw TailDivergence("boundary limit matrix overflowed; endpoint "
                                 "is not limit circle as described");
        if (diff <= tol * (1.0 + fro_norm(k_next))) {
            gd.K = k_next;
            gd.k_residual = diff;
            break;
        }
        k_prev = k_next;
        if (h > cap)
            throw TailDivergence("boundary limit matrix not Cauchy within the "
                                 "horizon cap");
    }
    try {
        gd.N_kernel = lu_solve(sse.M - gd.K, gd.K * j);
    } catch (const SingularMatrix&) {
        throw ZIsEigenvalue("spectral point is an eigenvalue of the half-line problem");
    }
    gd.M_kernel = gd.N_kernel + j;
    return gd;
}

HamSequence kernel_resolvent(const SystemCoefficients& sys, const GreenData& gd,
                             const HamSequence& g, long t_hi) {
    if (g.start != sys.a())
        throw ContractViolation("source must start at the interval endpoint");
    FundamentalMatrix phi(sys, gd.z);
    FundamentalMatrix phi_bar(sys, std::conj(gd.z));
    const std::vector<CMat> tau = source_terms(sys, phi_bar, g);
    return assemble(sys, phi, gd.M_kernel, gd.N_kernel, tau, g.start, t_hi);
}

HamSequence singular_resolvent_lcc(const SystemCoefficients& sys,
                                   const SseDescriptor& sse, cplx z,
                                   const HamSequence& g, long t_hi, double tol) {
    return kernel_resolvent(sys, green_kernel_singular_lcc(sys, sse, z, tol), g,
                            t_hi);
}

namespace {

struct BasisElement {
    long t;
    CMat u;   // R-trace value, normalized against the weight
    CMat wu;  // W(t) u
};

EigenList eigen_at_shift(const SystemCoefficients& sys, const RegularBC& bc,
                         double mu, const EigenOptions& opt) {
    const std::size_t n = sys.n();
    const CMat j = canonical_J(n);
    FundamentalMatrix phi(sys, cplx{mu, 0.0});

    // Orthonormal basis of the weighted space: one element per positive
    // weight eigenvalue, supported at a single R-trace slot.
    std::vector<BasisElement> basis;
    std::vector<std::size_t> t_index;  // basis slot -> rphi cache slot
    std::vector<CMat> rphi_cache;
    for (long t = sys.a(); t <= bc.b; ++t) {
        const CMat w = sys.weight(t);
        if (fro_norm(w) == 0.0) continue;
        const HermEigen we = herm_eigen(w);
        bool used = false;
        for (std::size_t i = 0; i < we.values.size(); ++i) {
            if (we.values[i] <= opt.weight_tol * std::max(1.0, we.values.back()))
                continue;
            BasisElement e;
            e.t = t;
            e.u = (1.0 / std::sqrt(we.values[i])) * we.vectors.column(i);
            e.wu = w * e.u;
            basis.push_back(std::move(e));
            t_index.push_back(rphi_cache.size());
            used = true;
        }
        if (used) rphi_cache.push_back(rphi_at(phi, t));
    }

    EigenList out;
    out.shift = mu;
    out.theta_tol = opt.theta_tol;
    if (basis.empty()) return out;

    const std::size_t m = basis.size();
    CMat q(2 * n, m);  // q_j = R(Phi)*(t_j) W(t_j) u_j
    for (std::size_t jcol = 0; jcol < m; ++jcol)
        q.set_block(0, jcol, rphi_cache[t_index[jcol]].adjoint() * basis[jcol].wu);

    const CMat end_map = bc.Q * phi.at(bc.b + 1);
    const CMat c = lu_solve(bc.P - end_map, end_map * (j * q));

    // S_ij = <(mu I - H)^-1 e_j, e_i>; the source of e_j enters the trace at
    // t_j, so the trace of the image is R(Phi) c_j before the support point
    // and R(Phi)(c_j + J q_j) after, with the split value at t_j itself.
    CMat s(m, m);
    for (std::size_t jcol = 0; jcol < m; ++jcol) {
        const CMat cj = c.column(jcol);
        const CMat cqj = cj + j * q.column(jcol);
        for (std::size_t i = 0; i < m; ++i) {
            CMat trace;
            if (basis[i].t < basis[jcol].t)
                trace = rphi_cache[t_index[i]] * cj;
            else if (basis[i].t > basis[jcol].t)
                trace = rphi_cache[t_index[i]] * cqj;
            else
                trace = vcat(phi.at(basis[i].t + 1).block(0, 0, n, 2 * n) * cqj,
                             phi.at(basis[i].t).block(n, 0, n, 2 * n) * cj);
            s(i, jcol) = (basis[i].wu.adjoint() * trace)(0, 0);
        }
    }

    const HermEigen se = herm_eigen(s);
    std::vector<double> vals;
    for (double theta : se.values) {
        if (std::abs(theta) <= opt.theta_tol)
            ++out.discarded;
        else
            vals.push_back(mu - 1.0 / theta);
    }
    std::sort(vals.begin(), vals.end());
    out.values = std::move(vals);
    for (std::size_t i = 0; i < out.values.size(); ++i) {
        const double v = out.values[i];
        if (i == 0 ||
            v - out.values[i - 1] > opt.cluster_tol * std::max(1.0, std::abs(v)))
            out.clusters.push_back(1);
        else
            ++out.clusters.back();
    }
    return out;
}

}  // namespace

std::optional<double> signed_index(const EigenList& eigs, long k) {
    if (k == 0) return std::nullopt;
    const auto split = std::lower_bound(eigs.values.begin(), eigs.values.end(), 0.0);
    if (k > 0) {
        const auto it = split + (k - 1);
        if (it >= eigs.values.end()) return std::nullopt;
        return *it;
    }
    const long below = split - eigs.values.begin();
    if (-k > below) return std::nullopt;
    return eigs.values[static_cast<std::size_t>(below + k)];
}

EigenList eigenvalues_regular(const SystemCoefficients& sys, const RegularBC& bc,
                              const EigenOptions& opt) {
    for (double mu : opt.shifts) {
        try {
            return eigen_at_shift(sys, bc, mu, opt);
        } catch (const SingularMatrix&) {
        } catch (const ZIsEigenvalue&) {
        }
    }
    throw ZIsEigenvalue("every trial resolvent shift hit the spectrum");
}

namespace {

double boundary_det(const SystemCoefficients& sys, const RegularBC& bc,
                    double lambda) {
    CMat phi = CMat::identity(2 * sys.n());
    for (long t = sys.a(); t <= bc.b; ++t)
        phi = step(sys, cplx{lambda, 0.0}, phi, t);
    return std::abs(det(bc.P - bc.Q * phi));
}

}  // namespace

std::vector<double> eigen_oracle(const SystemCoefficients& sys,
                                 const RegularBC& bc, double lo, double hi,
                                 std::size_t grid, const OracleOptions& opt) {
    if (grid < 2 || hi <= lo)
        throw ContractViolation("oracle needs an increasing window and a grid");
    std::vector<double> val(grid + 1);
    const double h = (hi - lo) / static_cast<double>(grid);
    double scale = 0.0;
    for (std::size_t i = 0; i <= grid; ++i) {
        val[i] = boundary_det(sys, bc, lo + h * static_cast<double>(i));
        scale = std::max(scale, val[i]);
    }
    std::vector<double> roots;
    const double gold = (std::sqrt(5.0) - 1.0) / 2.0;
    for (std::size_t i = 1; i + 1 <= grid; ++i) {
        if (!(val[i] < val[i - 1] && val[i] <= val[i + 1])) continue;
        double a = lo + h * static_cast<double>(i - 1);
        double b = lo + h * static_cast<double>(i + 1);
        double x1 = b - gold * (b - a), x2 = a + gold * (b - a);
        double f1 = boundary_det(sys, bc, x1), f2 = boundary_det(sys, bc, x2);
        while (b - a > opt.width) {
            if (f1 <= f2) {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - gold * (b - a);
                f1 = boundary_det(sys, bc, x1);
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + gold * (b - a);
                f2 = boundary_det(sys, bc, x2);
            }
        }
        const double x = 0.5 * (a + b);
        if (boundary_det(sys, bc, x) <= opt.accept * scale &&
            (roots.empty() || x - roots.back() > 10.0 * opt.width))
            roots.push_back(x);
    }
    return roots;
}

namespace {

// sum_{t >= t0} R(y)* W R(y) of the homogeneous solution with y(t0) = y0,
// doubling-horizon Cauchy criterion.
double homogeneous_tail(const SystemCoefficients& sys, cplx z, const CMat& y0,
                        long t0, double tol, long cap) {
    const std::size_t n = sys.n();
    const bool finite = sys.tail().kind == TailTag::Kind::FiniteSupport;
    CMat cur = y0;
    double acc = 0.0;
    long t = t0;
    for (long len = 8;; len *= 2) {
        double block_sum = 0.0;
        for (long stop = t + len; t < stop; ++t) {
            const CMat next = step(sys, z, cur, t);
            CMat r(2 * n, 1);
            r.set_block(0, 0, next.block(0, 0, n, 1));
            r.set_block(n, 0, cur.block(n, 0, n, 1));
            block_sum += (r.adjoint() * (sys.weight(t) * r))(0, 0).real();
            cur = next;
            if (finite && t > sys.tail().support_end) return acc + block_sum;
        }
        acc += block_sum;
        if (!std::isfinite(acc))
            throw TailDivergence("homogeneous tail sum overflowed");
        if (block_sum <= tol * (1.0 + acc)) return acc;
        if (t - t0 > cap)
            throw TailDivergence("homogeneous tail sum not Cauchy within the cap");
    }
}

}  // namespace

DefectSplit resolvent_defect(const SystemCoefficients& sys,
                             const SseDescriptor& sse, const RegularBC& bc,
                             cplx z, const HamSequence& g, double tol) {
    const std::size_t n = sys.n();
    if (g.end() > bc.b + 1)
        throw ContractViolation("defect source must be supported on the "
                                "regular interval");
    HamSequence g_full = HamSequence::zeros(n, sys.a(), bc.b + 1);
    for (long t = g.start; t <= g.end(); ++t) g_full.at(t) = g.at(t);

    const GreenData gd = green_kernel_singular_lcc(sys, sse, z, tol);
    const HamSequence y_sing = kernel_resolvent(sys, gd, g_full, bc.b + 1);
    const HamSequence y_reg = regular_resolvent(sys, bc, z, g_full);

    HamSequence diff = HamSequence::zeros(n, sys.a(), bc.b + 1);
    for (long t = sys.a(); t <= bc.b + 1; ++t)
        diff.at(t) = y_sing.at(t) - y_reg.at(t);

    DefectSplit out;
    out.delta1 = weighted_inner(sys, diff, diff, sys.a(), bc.b)(0, 0).real();
    // past the source support the half-line resolvent is a homogeneous
    // solution, so its tail is marched directly
    out.delta2 = homogeneous_tail(sys, z, y_sing.at(bc.b + 1), bc.b + 1, tol,
                                  1L << 18);
    out.delta = out.delta1 + out.delta2;
    return out;
}

DefectConstants defect_constants(const SystemCoefficients& sys,
                                 const SseDescriptor& sse, const RegularBC& bc,
                                 cplx z, double tol) {
    FundamentalMatrix phi(sys, z);
    FundamentalMatrix phi_bar(sys, std::conj(z));
    DefectConstants dc;
    const std::vector<double> full_z = column_tail_norms(phi, sys.a(), tol);
    const std::vector<double> full_zb = column_tail_norms(phi_bar, sys.a(), tol);
    const std::vector<double> tail_z = column_tail_norms(phi, bc.b + 1, tol);
    const std::vector<double> tail_zb = column_tail_norms(phi_bar, bc.b + 1, tol);
    dc.alpha0_z = std::sqrt(*std::max_element(full_z.begin(), full_z.end()));
    dc.alpha0_zbar = std::sqrt(*std::max_element(full_zb.begin(), full_zb.end()));
    dc.alpha_r_z = *std::max_element(tail_z.begin(), tail_z.end());
    dc.alpha_r_zbar = *std::max_element(tail_zb.begin(), tail_zb.end());

    const GreenData gd0 = green_kernel_singular_lcc(sys, sse, z, tol);
    const GreenData gdr = green_kernel_regular(sys, bc, z);
    dc.m0 = fro_norm(gd0.M_kernel);
    dc.n0 = fro_norm(gd0.N_kernel);
    dc.m_r = fro_norm(gd0.M_kernel - gdr.M_kernel);
    dc.n_r = fro_norm(gd0.N_kernel - gdr.N_kernel);

    const double n2 = static_cast<double>(sys.n() * sys.n());
    const double a0z2 = dc.alpha0_z * dc.alpha0_z;
    const double a0zb2 = dc.alpha0_zbar * dc.alpha0_zbar;
    dc.eta = 12.0 * n2 *
             (9.0 * a0z2 * a0zb2 * (dc.m_r * dc.m_r + dc.n_r * dc.n_r) +
              dc.n0 * dc.n0 * a0z2 * dc.alpha_r_zbar +
              6.0 * (dc.m0 * dc.m0 + dc.n0 * dc.n0) * a0zb2 * dc.alpha_r_z);
    return dc;
}

ErrorBound error_bound(const SystemCoefficients& sys, const SseDescriptor& sse,
                       long b, double tol) {
    const std::size_t n = sys.n();
    if (sse.type != LimitType::LimitCircle)
        throw ContractViolation("error bound requires a limit-circle descriptor");
    if (std::abs(sse.lambda0) > 1e-14)
        throw ContractViolation("error bound requires the frame point at zero; "
                                "apply a spectral shift first");
    const CMat j = canonical_J(n);

    ErrorBound eb;
    // in the zero frame the boundary limit matrix is N J exactly
    CMat n0mat;
    try {
        n0mat = lu_solve(sse.M - sse.N * j, -1.0 * sse.N);
    } catch (const SingularMatrix&) {
        throw ZIsEigenvalue("zero is an eigenvalue of the half-line problem; "
                            "apply a spectral shift");
    }
    eb.n0 = fro_norm(n0mat);
    eb.m0 = fro_norm(n0mat + j);

    FundamentalMatrix phi(sys, cplx{0.0, 0.0});
    const std::vector<double> full = column_tail_norms(phi, sys.a(), tol);
    eb.alpha0 = std::sqrt(*std::max_element(full.begin(), full.end()));
    eb.eps_r = tail_quantities(sys, b, tol).eps;

    const CoeffBlocks cb = sys.at(sys.a());
    const CMat e = lu_solve(CMat::identity(n) - cb.A, CMat::identity(n));
    const double geom = fro_norm(e) * fro_norm(e) +
                        fro_norm(e * cb.B) * fro_norm(e * cb.B) +
                        static_cast<double>(n);
    eb.e_r = 2.0 * std::sqrt(3.0) * static_cast<double>(n) * eb.alpha0 *
             std::sqrt((6.0 * eb.m0 * eb.m0 + 7.0 * eb.n0 * eb.n0) * geom) *
             std::sqrt(eb.eps_r);
    return eb;
}

EigenBound eigenvalue_bound(double lambda, double e_r) {
    EigenBound b;
    const double mag = std::abs(lambda);
    const double denom = 1.0 - mag * e_r;
    b.valid = denom > 0.0;
    b.bound = b.valid ? mag * mag * e_r / denom : kInf;
    return b;
}

double hs_tail_check(const EigenList& eigs, double floor_mag) {
    double sum = 0.0;
    for (double v : eigs.values)
        if (std::abs(v) > floor_mag) sum += 1.0 / (v * v);
    return sum;
}

ApproximationReport approximate(const SystemCoefficients& sys,
                                const SseDescriptor& sse,
                                const std::vector<long>& schedule,
                                const ApproxOptions& opt) {
    ApproximationReport rep;
    rep.schedule = schedule;
    rep.exact_mode = sse.type == LimitType::LimitCircle;
    for (std::size_t i = 1; i < schedule.size(); ++i)
        if (schedule[i] <= schedule[i - 1])
            throw ContractViolation("truncation schedule must be strictly increasing");
    const bool bounds = opt.with_bounds && rep.exact_mode &&
                        std::abs(sse.lambda0) <= 1e-14;

    for (long b : schedule) {
        EigenList eigs;
        double er = std::numeric_limits<double>::quiet_NaN();
        try {
            const RegularBC bc = induce_regular(sys, sse, b, opt.psi);
            eigs = eigenvalues_regular(sys, bc, opt.eig);
            if (bounds) er = error_bound(sys, sse, b).e_r;
        } catch (const Error& err) {
            rep.errors.push_back("b=" + std::to_string(b) + ": " + err.what());
        }
        rep.hs_partial.push_back(hs_tail_check(eigs));
        rep.per_r.push_back(std::move(eigs));
        rep.e_r.push_back(er);
    }

    for (long k = -opt.max_index; k <= opt.max_index; ++k) {
        if (k == 0) continue;
        Trajectory tr;
        tr.k = k;
        std::optional<double> last;
        bool any = false;
        for (std::size_t r = 0; r < schedule.size(); ++r) {
            const std::optional<double> v = signed_index(rep.per_r[r], k);
            tr.values.push_back(v);
            if (v) {
                any = true;
                last = v;
            }
        }
        if (!any) continue;
        for (std::size_t r = 0; r < schedule.size(); ++r) {
            const double er = rep.e_r[r];
            const bool have = std::isfinite(er);
            tr.bound_a.push_back(have && tr.values[r]
                                     ? eigenvalue_bound(*tr.values[r], er)
                                     : EigenBound{kInf, false});
            tr.bound_b.push_back(have && last ? eigenvalue_bound(*last, er)
                                              : EigenBound{kInf, false});
        }
        if (!rep.exact_mode) {
            tr.verdict = Verdict::InclusiveOnly;
        } else {
            std::vector<double> seen;
            for (const auto& v : tr.values)
                if (v) seen.push_back(*v);
            tr.verdict = seen.size() >= 2 && std::abs(seen.back() - seen[seen.size() - 2]) <=
                                                 opt.conv_tol
                             ? Verdict::Converged
                             : Verdict::Unresolved;
        }
        rep.trajectories.push_back(std::move(tr));
    }
    return rep;
}

}  // namespace hamspec
