// Acceptance suite: one line per criterion, nonzero exit when any fails.
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "hamspec/spectral.hpp"

using namespace hamspec;

namespace {

int failures = 0;

void report(int idx, bool ok, const std::string& detail) {
    std::printf("criterion %2d: %s  (%s)\n", idx, ok ? "PASS" : "FAIL",
                detail.c_str());
    if (!ok) ++failures;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

// Random valid system with summably decaying coefficients, deterministic in
// (seed, t) so the provider is pure.
SystemCoefficients random_system(unsigned seed, std::size_t n) {
    return SystemCoefficients(n, 0, [seed, n](long t) {
        std::mt19937 rng(seed * 7919u + static_cast<unsigned>(t) * 104729u);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        const double scale = 0.25 / double((t + 1) * (t + 1));
        const auto rand_mat = [&] {
            CMat m(n, n);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    m(i, j) = scale * cplx{u(rng), u(rng)};
            return m;
        };
        CoeffBlocks b;
        b.A = rand_mat();
        const CMat rb = rand_mat(), rc = rand_mat(), g1 = rand_mat(), g2 = rand_mat();
        b.B = rb + rb.adjoint();
        b.C = rc + rc.adjoint();
        b.W1 = g1 * g1.adjoint();
        b.W2 = g2 * g2.adjoint();
        return b;
    });
}

HamSequence random_source(std::mt19937& rng, std::size_t n, long start, long end) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    HamSequence g = HamSequence::zeros(n, start, end);
    for (long t = start; t <= end; ++t)
        for (std::size_t i = 0; i < 2 * n; ++i)
            g.at(t)(i, 0) = cplx{u(rng), u(rng)};
    return g;
}

RegularBC dirichlet_bc(long b) {
    RegularBC bc;
    bc.b = b;
    bc.P = CMat(2, 2);
    bc.P(0, 0) = 1.0;
    bc.Q = CMat(2, 2);
    bc.Q(1, 0) = 1.0;
    return bc;
}

// The coupled limit-circle fixture in a frame with eigenvalues on both sides
// of zero.
SystemCoefficients shifted_lcc() { return shifted_system(example_lcc(), 5.0); }

void criterion_1() {
    double worst_symp = 0.0, worst_lag = 0.0;
    const std::vector<cplx> probes = {cplx{0.0, 0.0}, cplx{0.0, 1.0},
                                      cplx{0.0, -1.0}, cplx{1.7, 0.0}};
    for (unsigned s = 0; s < 20; ++s) {
        const std::size_t n = 1 + s % 2;
        const SystemCoefficients sys = random_system(100 + s, n);
        for (cplx lambda : probes) {
            FundamentalMatrix phi(sys, lambda);
            FundamentalMatrix phi_conj(sys, std::conj(lambda));
            worst_symp = std::max(worst_symp, symplectic_residual(phi, phi_conj, 200));
        }
        std::mt19937 rng(500 + s);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        CMat x0(2 * n, 1), y0(2 * n, 1);
        for (std::size_t i = 0; i < 2 * n; ++i) {
            x0(i, 0) = cplx{u(rng), u(rng)};
            y0(i, 0) = cplx{u(rng), u(rng)};
        }
        const cplx lam{1.7, 0.0}, mu{0.0, 1.0};
        const HamSequence x = solve_ivp(sys, lam, x0, 201);
        const HamSequence y = solve_ivp(sys, mu, y0, 201);
        worst_lag = std::max(worst_lag, lagrange_residual(sys, x, y, lam, mu, 0, 200));
    }
    report(1, worst_symp <= 1e-10 && worst_lag <= 1e-10,
           "symplectic " + fmt(worst_symp) + ", Lagrange " + fmt(worst_lag) +
               " over 20 systems, t <= 200");
}

void criterion_2() {
    double worst = 0.0;
    bool rank_ok = true;
    const auto check = [&](const SystemCoefficients& sys, const RegularBC& bc,
                           std::size_t n) {
        rank_ok = rank_ok && rank_of(hcat(bc.P, bc.Q)) == 2 * n;
        const CMat j = canonical_J(n);
        worst = std::max(worst, fro_norm(bc.P * j * bc.P.adjoint() -
                                         bc.Q * j * bc.Q.adjoint()));
    };
    for (long b : {15L, 30L, 60L}) {
        const SystemCoefficients lcc = example_lcc();
        check(lcc, induce_regular(lcc, natural_sse(lcc, LimitType::LimitCircle), b), 1);
        const SystemCoefficients lpc = example_lpc();
        check(lpc, induce_regular(lpc, natural_sse(lpc, LimitType::LimitPoint), b), 1);
        const SystemCoefficients mid = example_mid();
        const PsiBasis psi = build_psi_basis(mid, -1.0);
        check(mid,
              induce_regular(mid, natural_sse(mid, LimitType::Intermediate, &psi),
                             b, &psi),
              2);
    }
    report(2, rank_ok && worst <= 1e-9,
           "rank full, identity residual " + fmt(worst) + " over b in {15,30,60}");
}

void criterion_3() {
    const SystemCoefficients sys =
        second_order_system({[](long) { return 1.0; }, [](long) { return 0.0; },
                             [](long) { return 1.0; }, 0});
    const RegularBC bc = dirichlet_bc(8);
    const EigenList eigs = eigenvalues_regular(sys, bc);
    const std::vector<double> roots = eigen_oracle(sys, bc, 0.01, 4.1, 2000);
    double worst_closed = 1e300, worst_oracle = 1e300;
    if (eigs.values.size() == 8 && roots.size() == 8) {
        worst_closed = worst_oracle = 0.0;
        const double pi = std::acos(-1.0);
        for (std::size_t k = 1; k <= 8; ++k) {
            const double exact = 4.0 * std::pow(std::sin(double(k) * pi / 18.0), 2);
            worst_closed = std::max(worst_closed,
                                    std::abs(eigs.values[k - 1] - exact));
            worst_oracle = std::max(worst_oracle,
                                    std::abs(roots[k - 1] - eigs.values[k - 1]));
        }
    }
    report(3, worst_closed <= 1e-8 && worst_oracle <= 1e-7,
           "closed form " + fmt(worst_closed) + ", oracle " + fmt(worst_oracle));
}

void criterion_4() {
    std::mt19937 rng(42);
    const SystemCoefficients sys = example_lcc();
    const RegularBC bc =
        induce_regular(sys, natural_sse(sys, LimitType::LimitCircle), 30);
    const cplx z{0.0, 1.0};
    const GreenData gd = green_kernel_regular(sys, bc, z);
    const double kernel_identity = fro_norm(gd.M_kernel - gd.N_kernel - canonical_J(1));
    double worst = 0.0;
    for (int trial = 0; trial < 5; ++trial) {
        const HamSequence g = random_source(rng, 1, 0, 31);
        const HamSequence direct = regular_resolvent(sys, bc, z, g);
        const HamSequence kernel = kernel_resolvent(sys, gd, g, 31);
        HamSequence diff = HamSequence::zeros(1, 0, 31);
        for (long t = 0; t <= 31; ++t) diff.at(t) = direct.at(t) - kernel.at(t);
        const double dn =
            std::sqrt(weighted_inner(sys, diff, diff, 0, 30)(0, 0).real());
        const double yn =
            std::sqrt(weighted_inner(sys, direct, direct, 0, 30)(0, 0).real());
        worst = std::max(worst, dn / (1.0 + yn));
    }
    report(4, kernel_identity == 0.0 && worst <= 1e-9,
           "kernel vs direct " + fmt(worst) + ", M_r - N_r = J exact");
}

void criterion_5() {
    std::mt19937 rng(43);
    const SystemCoefficients sys = example_lcc();
    const SseDescriptor sse = natural_sse(sys, LimitType::LimitCircle);
    const cplx z{0.0, 1.0};
    const HamSequence g = random_source(rng, 1, 0, 6);
    const double g_norm2 = weighted_inner(sys, g, g, 0, 5)(0, 0).real();
    bool decreasing = true, bounded = true;
    double prev = 1e300, last = 0.0;
    for (long b : {15L, 30L, 60L, 120L}) {
        const RegularBC bc = induce_regular(sys, sse, b);
        const DefectSplit ds = resolvent_defect(sys, sse, bc, z, g);
        decreasing = decreasing && ds.delta < prev;
        prev = last = ds.delta;
        const DefectConstants dc = defect_constants(sys, sse, bc, z);
        bounded = bounded && ds.delta <= dc.eta * g_norm2 * (1.0 + 1e-9);
    }
    report(5, decreasing && last < 1e-6 && bounded,
           "defect decreasing to " + fmt(last) + ", coefficient bound holds");
}

void criterion_6() {
    const SystemCoefficients sys = shifted_lcc();
    const SseDescriptor sse = natural_sse(sys, LimitType::LimitCircle);
    ApproxOptions opt;
    opt.max_index = 3;
    const ApproximationReport rep = approximate(sys, sse, {15, 30, 60, 120}, opt);
    double worst = 0.0;
    std::size_t tracked = 0;
    for (const Trajectory& tr : rep.trajectories) {
        if (std::abs(tr.k) > 3 || !tr.values[2] || !tr.values[3]) continue;
        ++tracked;
        worst = std::max(worst, std::abs(*tr.values[2] - *tr.values[3]));
    }
    report(6, tracked == 6 && worst <= 1e-6,
           std::to_string(tracked) + " trajectories, |l(60) - l(120)| <= " +
               fmt(worst));
}

void criterion_7() {
    const SystemCoefficients sys = shifted_lcc();
    const SseDescriptor sse = natural_sse(sys, LimitType::LimitCircle);
    ApproxOptions opt;
    opt.max_index = 3;
    const ApproximationReport rep = approximate(sys, sse, {60, 120, 480}, opt);
    bool ok = true;
    double worst_margin = 0.0;
    std::size_t checked = 0;
    for (const Trajectory& tr : rep.trajectories) {
        if (std::abs(tr.k) > 3) continue;
        if (!tr.values[2]) {
            ok = false;
            continue;
        }
        const double proxy = *tr.values[2];
        for (std::size_t r = 0; r < 2; ++r) {
            if (!tr.values[r] || !tr.bound_a[r].valid) continue;
            ++checked;
            const double err = std::abs(*tr.values[r] - proxy);
            ok = ok && err <= tr.bound_a[r].bound;
            worst_margin = std::max(worst_margin, err - tr.bound_a[r].bound);
        }
    }
    report(7, ok && checked >= 6,
           std::to_string(checked) + " valid bounds vs b=480 proxy, max excess " +
               fmt(worst_margin));
}

void criterion_8() {
    const Classification lcc = classify(example_lcc());
    const Classification lpc = classify(example_lpc());
    const Classification mid = classify(example_mid());
    const SystemCoefficients finite = second_order_system(
        {[](long) { return 1.0; }, [](long) { return 0.0; },
         [](long t) { return t <= 5 ? 1.0 : 0.0; }, 0},
        {TailTag::Kind::FiniteSupport, 1.0, 6});
    const Classification fin = classify(finite);
    const bool ok = lcc.type == LimitType::LimitCircle && lcc.d == 2 &&
                    lpc.type == LimitType::LimitPoint && lpc.d == 1 &&
                    mid.type == LimitType::Intermediate && mid.d == 3 &&
                    fin.finite_dim_space && fin.d == 2;
    report(8, ok, "lcc d=2, lpc d=1, mid d=3, finite-support d=2n");
}

void criterion_9() {
    const SystemCoefficients sys = example_lcc();
    const SseDescriptor sse = natural_sse(sys, LimitType::LimitCircle);
    const ApproximationReport rep = approximate(sys, sse, {15, 30, 60, 120});
    double lo = 1e300, hi = 0.0;
    for (double h : rep.hs_partial) {
        lo = std::min(lo, h);
        hi = std::max(hi, h);
    }
    report(9, hi < 100.0 && hi - lo <= 1.0,
           "partial sums in [" + fmt(lo) + ", " + fmt(hi) + "] across r");
}

void criterion_10() {
    const SystemCoefficients sys = example_lpc();
    const auto window_stats = [&](long b) {
        const EigenList eigs = eigenvalues_regular(sys, dirichlet_bc(b));
        std::vector<double> in;
        for (double v : eigs.values)
            if (v >= 0.5 && v <= 3.5) in.push_back(v);
        double gap = 0.0;
        for (std::size_t i = 1; i < in.size(); ++i)
            gap = std::max(gap, in[i] - in[i - 1]);
        return std::pair<std::size_t, double>(in.size(), gap);
    };
    const auto s30 = window_stats(30);
    const auto s60 = window_stats(60);
    const auto s120 = window_stats(120);
    const bool ok = s30.first < s60.first && s60.first < s120.first &&
                    s120.second * 2.0 <= s30.second;
    report(10, ok,
           "counts " + std::to_string(s30.first) + "/" +
               std::to_string(s60.first) + "/" + std::to_string(s120.first) +
               ", max gap " + fmt(s30.second) + " -> " + fmt(s120.second));
}

}  // namespace

int main() {
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    criterion_10();
    if (failures) std::printf("%d criterion(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}
