#include "hamspec/solution.hpp"

#include <algorithm>
#include <cmath>

namespace hamspec {

CMat step(const SystemCoefficients& sys, cplx lambda, const CMat& y, long t) {
    const std::size_t n = sys.n();
    if (y.rows() != 2 * n) throw ContractViolation("step: state has wrong height");
    const CoeffBlocks b = sys.at(t);
    const CMat y1 = y.block(0, 0, n, y.cols());
    const CMat y2 = y.block(n, 0, n, y.cols());
    CMat bw = b.B;
    bw += lambda * b.W2;
    const CMat y1n = lu_solve(CMat::identity(n) - b.A, y1 + bw * y2);
    CMat cw = b.C;
    cw -= lambda * b.W1;
    const CMat y2n = y2 + cw * y1n - b.A.adjoint() * y2;
    CMat out(2 * n, y.cols());
    out.set_block(0, 0, y1n);
    out.set_block(n, 0, y2n);
    return out;
}

HamSequence solve_ivp(const SystemCoefficients& sys, cplx lambda, const CMat& y_a,
                      long t_hi) {
    if (t_hi < sys.a()) throw ContractViolation("solve_ivp: empty range");
    HamSequence seq;
    seq.start = sys.a();
    seq.values.reserve(static_cast<std::size_t>(t_hi - sys.a() + 1));
    seq.values.push_back(y_a);
    for (long t = sys.a(); t < t_hi; ++t)
        seq.values.push_back(step(sys, lambda, seq.values.back(), t));
    return seq;
}

FundamentalMatrix::FundamentalMatrix(SystemCoefficients sys, cplx lambda)
    : sys_(std::move(sys)), lambda_(lambda) {
    cache_.push_back(CMat::identity(2 * sys_.n()));
}

const CMat& FundamentalMatrix::at(long t) {
    if (t < sys_.a()) throw ContractViolation("fundamental matrix queried before a");
    while (static_cast<long>(cache_.size()) <= t - sys_.a()) {
        const long s = sys_.a() + static_cast<long>(cache_.size()) - 1;
        CMat next = step(sys_, lambda_, cache_.back(), s);
        if (!next.all_finite())
            throw InternalConsistency("fundamental matrix overflowed at t = " +
                                      std::to_string(s + 1));
        cache_.push_back(std::move(next));
    }
    return cache_[static_cast<std::size_t>(t - sys_.a())];
}

namespace {

// R-trace of a multi-column window value pair.
CMat r_trace(const CMat& yt, const CMat& yt1) {
    const std::size_t n = yt.rows() / 2;
    CMat r(2 * n, yt.cols());
    r.set_block(0, 0, yt1.block(0, 0, n, yt.cols()));
    r.set_block(n, 0, yt.block(n, 0, n, yt.cols()));
    return r;
}

}  // namespace

CMat weighted_inner(const SystemCoefficients& sys, const HamSequence& x,
                    const HamSequence& y, long t_lo, long t_hi) {
    CMat acc(y.at(t_lo).cols(), x.at(t_lo).cols());
    for (long t = t_lo; t <= t_hi; ++t) {
        const CMat rx = r_trace(x.at(t), x.at(t + 1));
        const CMat ry = r_trace(y.at(t), y.at(t + 1));
        acc += ry.adjoint() * sys.weight(t) * rx;
    }
    return acc;
}

CMat bform(const CMat& x, const CMat& y) {
    const std::size_t n = x.rows() / 2;
    return y.adjoint() * canonical_J(n) * x;
}

double lagrange_residual(const SystemCoefficients& sys, const HamSequence& x,
                         const HamSequence& y, cplx lambda, cplx mu, long t_lo,
                         long t_hi) {
    double worst = 0.0;
    for (long t = t_lo; t <= t_hi; ++t) {
        const CMat lhs = bform(x.at(t + 1), y.at(t + 1)) - bform(x.at(t), y.at(t));
        const CMat rx = r_trace(x.at(t), x.at(t + 1));
        const CMat ry = r_trace(y.at(t), y.at(t + 1));
        const CMat rhs = (lambda - std::conj(mu)) * (ry.adjoint() * sys.weight(t) * rx);
        worst = std::max(worst, fro_norm(lhs - rhs));
    }
    return worst;
}

double symplectic_residual(FundamentalMatrix& phi, FundamentalMatrix& phi_conj,
                           long t_hi) {
    if (phi_conj.lambda() != std::conj(phi.lambda()))
        throw ContractViolation("symplectic_residual: spectral parameters not conjugate");
    const CMat j = canonical_J(phi.system().n());
    double worst = 0.0;
    for (long t = phi.system().a(); t <= t_hi; ++t)
        worst = std::max(worst, fro_norm(phi_conj.at(t).adjoint() * j * phi.at(t) - j));
    return worst;
}

CMat transfer_U(const SystemCoefficients& sys, long t) {
    const std::size_t n = sys.n();
    const CoeffBlocks bt = sys.at(t);
    const CoeffBlocks bt1 = sys.at(t + 1);
    const CMat eb = lu_solve(CMat::identity(n) - bt1.A, bt1.B);
    const CMat e = lu_solve(CMat::identity(n) - bt1.A, CMat::identity(n));
    const CMat ima = CMat::identity(n) - bt.A.adjoint();
    CMat u(2 * n, 2 * n);
    u.set_block(0, 0, e + eb * bt.C);
    u.set_block(0, n, eb * ima);
    u.set_block(n, 0, bt.C);
    u.set_block(n, n, ima);
    return u;
}

TailQuantities tail_quantities(const SystemCoefficients& sys, long b, double tol,
                               long cap) {
    if (b < sys.a()) throw ContractViolation("tail_quantities: b before interval start");
    const std::size_t m = 2 * sys.n();
    // V(t) = U(t) ... U(a), marched from a.
    CMat vt = CMat::identity(m);
    for (long s = sys.a(); s <= b; ++s) vt = transfer_U(sys, s) * vt;  // V(b)

    CMat acc(m, m);
    long t = b;
    auto push_term = [&]() {
        acc += vt.adjoint() * sys.weight(t + 1) * vt;
        ++t;
        vt = transfer_U(sys, t) * vt;
    };

    if (sys.tail().kind == TailTag::Kind::FiniteSupport) {
        while (t + 1 <= sys.tail().support_end) push_term();
        return {acc, fro_norm(acc), t - 1};
    }

    long block_len = 16;
    double prev_norm = -1.0;
    while (t <= b + cap) {
        const long stop = std::min(t + block_len - 1, b + cap);
        while (t <= stop) {
            push_term();
            if (!acc.all_finite())
                throw TailDivergence("tail defect sum overflowed at t = " +
                                     std::to_string(t));
        }
        const double cur = fro_norm(acc);
        if (prev_norm >= 0.0 && std::abs(cur - prev_norm) <= tol * std::max(1.0, cur))
            return {acc, cur, t - 1};
        prev_norm = cur;
        block_len *= 2;
    }
    throw TailDivergence("tail defect sum failed the Cauchy criterion by t = " +
                         std::to_string(b + cap));
}

std::vector<double> column_tail_norms(FundamentalMatrix& phi, long t0, double tol,
                                      long cap) {
    const SystemCoefficients& sys = phi.system();
    const std::size_t m = 2 * sys.n();
    std::vector<double> acc(m, 0.0);
    long t = t0;
    auto push_term = [&]() {
        const CMat r = r_trace(phi.at(t), phi.at(t + 1));
        const CMat g = r.adjoint() * sys.weight(t) * r;
        for (std::size_t i = 0; i < m; ++i) acc[i] += g(i, i).real();
        ++t;
    };
    long block_len = 16;
    std::vector<double> prev;
    while (t <= t0 + cap) {
        const long stop = std::min(t + block_len - 1, t0 + cap);
        while (t <= stop) push_term();
        bool settled = !prev.empty();
        for (std::size_t i = 0; settled && i < m; ++i)
            settled = std::abs(acc[i] - prev[i]) <= tol * std::max(1.0, acc[i]);
        if (settled) return acc;
        prev = acc;
        block_len *= 2;
    }
    throw TailDivergence("column tail norms failed the Cauchy criterion by t = " +
                         std::to_string(t0 + cap));
}

}  // namespace hamspec
