#include "hamspec/complexmat.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace hamspec {

CMat CMat::identity(std::size_t n) {
    CMat m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

CMat CMat::col(const std::vector<cplx>& entries) {
    CMat m(entries.size(), 1);
    for (std::size_t i = 0; i < entries.size(); ++i) m(i, 0) = entries[i];
    return m;
}

CMat CMat::adjoint() const {
    CMat m(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) m(j, i) = std::conj((*this)(i, j));
    return m;
}

CMat CMat::transpose() const {
    CMat m(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) m(j, i) = (*this)(i, j);
    return m;
}

CMat CMat::conj() const {
    CMat m(rows_, cols_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) m(i, j) = std::conj((*this)(i, j));
    return m;
}

CMat CMat::block(std::size_t i0, std::size_t j0, std::size_t r, std::size_t c) const {
    if (i0 + r > rows_ || j0 + c > cols_)
        throw ContractViolation("block out of range");
    CMat m(r, c);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) m(i, j) = (*this)(i0 + i, j0 + j);
    return m;
}

void CMat::set_block(std::size_t i0, std::size_t j0, const CMat& b) {
    if (i0 + b.rows() > rows_ || j0 + b.cols() > cols_)
        throw ContractViolation("set_block out of range");
    for (std::size_t i = 0; i < b.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) (*this)(i0 + i, j0 + j) = b(i, j);
}

CMat& CMat::operator+=(const CMat& o) {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw ContractViolation("shape mismatch in +");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
}

CMat& CMat::operator-=(const CMat& o) {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw ContractViolation("shape mismatch in -");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
}

CMat& CMat::operator*=(cplx s) {
    for (auto& v : data_) v *= s;
    return *this;
}

bool CMat::all_finite() const {
    for (const auto& v : data_)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    return true;
}

CMat operator+(CMat a, const CMat& b) { return a += b; }
CMat operator-(CMat a, const CMat& b) { return a -= b; }
CMat operator*(cplx s, CMat a) { return a *= s; }
CMat operator*(double s, CMat a) { return a *= cplx{s, 0.0}; }
CMat operator-(CMat a) { return a *= cplx{-1.0, 0.0}; }

CMat operator*(const CMat& a, const CMat& b) {
    if (a.cols() != b.rows()) throw ContractViolation("shape mismatch in *");
    CMat m(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const cplx aik = a(i, k);
            if (aik == cplx{0.0, 0.0}) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) m(i, j) += aik * b(k, j);
        }
    }
    return m;
}

CMat hcat(const CMat& a, const CMat& b) {
    if (a.rows() != b.rows()) throw ContractViolation("hcat row mismatch");
    CMat m(a.rows(), a.cols() + b.cols());
    m.set_block(0, 0, a);
    m.set_block(0, a.cols(), b);
    return m;
}

CMat vcat(const CMat& a, const CMat& b) {
    if (a.cols() != b.cols()) throw ContractViolation("vcat col mismatch");
    CMat m(a.rows() + b.rows(), a.cols());
    m.set_block(0, 0, a);
    m.set_block(a.rows(), 0, b);
    return m;
}

double fro_norm(const CMat& a) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) s += std::norm(a(i, j));
    return std::sqrt(s);
}

namespace {

struct LU {
    CMat lu;
    std::vector<std::size_t> perm;
    int sign = 1;
    std::size_t first_bad_pivot = SIZE_MAX;  // index of first pivot under threshold
    double threshold = 0.0;
};

LU lu_factor(const CMat& a, double pivot_tol) {
    const std::size_t n = a.rows();
    if (a.rows() != a.cols()) throw ContractViolation("lu: matrix not square");
    LU f;
    f.lu = a;
    f.perm.resize(n);
    std::iota(f.perm.begin(), f.perm.end(), std::size_t{0});
    const double scale = fro_norm(a);
    f.threshold = pivot_tol >= 0.0
                      ? pivot_tol
                      : 1e3 * std::numeric_limits<double>::epsilon() * scale;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        double best = std::abs(f.lu(k, k));
        for (std::size_t i = k + 1; i < n; ++i) {
            const double v = std::abs(f.lu(i, k));
            if (v > best) { best = v; p = i; }
        }
        if (p != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(f.lu(k, j), f.lu(p, j));
            std::swap(f.perm[k], f.perm[p]);
            f.sign = -f.sign;
        }
        if (best <= f.threshold) {
            if (f.first_bad_pivot == SIZE_MAX) f.first_bad_pivot = k;
            continue;
        }
        const cplx piv = f.lu(k, k);
        for (std::size_t i = k + 1; i < n; ++i) {
            const cplx m = f.lu(i, k) / piv;
            f.lu(i, k) = m;
            if (m == cplx{0.0, 0.0}) continue;
            for (std::size_t j = k + 1; j < n; ++j) f.lu(i, j) -= m * f.lu(k, j);
        }
    }
    return f;
}

}  // namespace

CMat lu_solve(const CMat& a, const CMat& b, double pivot_tol) {
    if (a.rows() != b.rows()) throw ContractViolation("lu_solve: rhs row mismatch");
    const LU f = lu_factor(a, pivot_tol);
    if (f.first_bad_pivot != SIZE_MAX)
        throw SingularMatrix("lu_solve: pivot below singularity threshold",
                             f.first_bad_pivot);
    const std::size_t n = a.rows(), m = b.cols();
    CMat x(n, m);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j) x(i, j) = b(f.perm[i], j);
    // forward substitution (unit lower)
    for (std::size_t i = 1; i < n; ++i)
        for (std::size_t k = 0; k < i; ++k) {
            const cplx l = f.lu(i, k);
            if (l == cplx{0.0, 0.0}) continue;
            for (std::size_t j = 0; j < m; ++j) x(i, j) -= l * x(k, j);
        }
    // back substitution
    for (std::size_t ii = n; ii-- > 0;) {
        for (std::size_t k = ii + 1; k < n; ++k) {
            const cplx u = f.lu(ii, k);
            if (u == cplx{0.0, 0.0}) continue;
            for (std::size_t j = 0; j < m; ++j) x(ii, j) -= u * x(k, j);
        }
        const cplx piv = f.lu(ii, ii);
        for (std::size_t j = 0; j < m; ++j) x(ii, j) /= piv;
    }
    return x;
}

cplx det(const CMat& a) {
    const LU f = lu_factor(a, -1.0);
    if (f.first_bad_pivot != SIZE_MAX) return cplx{0.0, 0.0};
    cplx d{static_cast<double>(f.sign), 0.0};
    for (std::size_t k = 0; k < a.rows(); ++k) d *= f.lu(k, k);
    return d;
}

std::size_t rank_of(const CMat& a, double tol) {
    CMat m = a;
    const std::size_t r = m.rows(), c = m.cols();
    const double cutoff = tol * std::max(fro_norm(a), 1e-300);
    std::size_t rank = 0;
    std::size_t row = 0;
    std::vector<bool> used_col(c, false);
    while (row < r) {
        // full pivoting over the remaining submatrix
        std::size_t pi = row, pj = c;
        double best = cutoff;
        for (std::size_t i = row; i < r; ++i)
            for (std::size_t j = 0; j < c; ++j) {
                if (used_col[j]) continue;
                const double v = std::abs(m(i, j));
                if (v > best) { best = v; pi = i; pj = j; }
            }
        if (pj == c) break;
        used_col[pj] = true;
        if (pi != row)
            for (std::size_t j = 0; j < c; ++j) std::swap(m(row, j), m(pi, j));
        const cplx piv = m(row, pj);
        for (std::size_t i = row + 1; i < r; ++i) {
            const cplx f = m(i, pj) / piv;
            if (f == cplx{0.0, 0.0}) continue;
            for (std::size_t j = 0; j < c; ++j) m(i, j) -= f * m(row, j);
        }
        ++rank;
        ++row;
    }
    return rank;
}

HermEigen herm_eigen(const CMat& a, double tol) {
    const std::size_t n = a.rows();
    if (a.rows() != a.cols()) throw ContractViolation("herm_eigen: matrix not square");
    const double scale = fro_norm(a);
    {
        const double herm_res = fro_norm(a - a.adjoint());
        if (herm_res > std::max(tol, 1e-10) * std::max(scale, 1e-300) && herm_res > 1e-12)
            throw ContractViolation("herm_eigen: input not Hermitian");
    }
    CMat m = a;
    CMat v = CMat::identity(n);
    // symmetrize exactly so rounding in the input cannot bias the sweeps
    for (std::size_t i = 0; i < n; ++i) {
        m(i, i) = cplx{m(i, i).real(), 0.0};
        for (std::size_t j = i + 1; j < n; ++j) {
            const cplx avg = 0.5 * (m(i, j) + std::conj(m(j, i)));
            m(i, j) = avg;
            m(j, i) = std::conj(avg);
        }
    }
    const double target = std::max(tol * scale, 1e-300);
    const int max_sweeps = 60;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) off += 2.0 * std::norm(m(i, j));
        off = std::sqrt(off);
        if (off <= target) break;
        const double skip = off / (n > 1 ? static_cast<double>(n) * n : 1.0) * 1e-3;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const cplx apq = m(p, q);
                const double mag = std::abs(apq);
                if (mag <= std::max(skip, 1e-300 * scale) && mag <= target) continue;
                if (mag == 0.0) continue;
                // phase so the rotated off-diagonal entry is real
                const cplx phase = apq / mag;
                const double app = m(p, p).real();
                const double aqq = m(q, q).real();
                const double theta = 0.5 * std::atan2(2.0 * mag, aqq - app);
                const double c = std::cos(theta);
                const cplx s = std::sin(theta) * phase;
                // apply G = [[c, -conj(s)], [s, c]] as A <- G* A G, V <- V G
                for (std::size_t k = 0; k < n; ++k) {
                    const cplx mkp = m(k, p), mkq = m(k, q);
                    m(k, p) = c * mkp - std::conj(s) * mkq;
                    m(k, q) = s * mkp + c * mkq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const cplx mpk = m(p, k), mqk = m(q, k);
                    m(p, k) = c * mpk - s * mqk;
                    m(q, k) = std::conj(s) * mpk + c * mqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const cplx vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - std::conj(s) * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
                m(p, q) = cplx{0.0, 0.0};
                m(q, p) = cplx{0.0, 0.0};
            }
        }
    }
    HermEigen out;
    out.values.resize(n);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<double> diag(n);
    for (std::size_t i = 0; i < n; ++i) diag[i] = m(i, i).real();
    std::sort(order.begin(), order.end(),
              [&](std::size_t x, std::size_t y) { return diag[x] < diag[y]; });
    out.vectors = CMat(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        out.values[j] = diag[order[j]];
        for (std::size_t i = 0; i < n; ++i) out.vectors(i, j) = v(i, order[j]);
    }
    return out;
}

SkewDiag diag_skew_hermitian(const CMat& s, double tol) {
    const std::size_t n = s.rows();
    if (s.rows() != s.cols()) throw ContractViolation("diag_skew_hermitian: not square");
    const double scale = fro_norm(s);
    if (fro_norm(s + s.adjoint()) > std::max(tol * scale, 1e-12))
        throw ContractViolation("diag_skew_hermitian: input not skew-Hermitian");
    // iS is Hermitian; S = U diag(-i theta) U*
    CMat h = cplx{0.0, 1.0} * s;
    const HermEigen eig = herm_eigen(h, std::min(tol, 1e-13));
    // order columns so entries with |theta| above tol*scale come first
    std::vector<std::size_t> order;
    std::vector<std::size_t> zeros;
    const double cut = tol * std::max(scale, 1e-300);
    for (std::size_t j = 0; j < n; ++j) {
        if (std::abs(eig.values[j]) > cut) order.push_back(j);
        else zeros.push_back(j);
    }
    order.insert(order.end(), zeros.begin(), zeros.end());
    SkewDiag out;
    out.U = CMat(n, n);
    out.D = CMat(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t src = order[j];
        out.D(j, j) = cplx{0.0, -eig.values[src]};
        for (std::size_t i = 0; i < n; ++i) out.U(i, j) = eig.vectors(i, src);
    }
    return out;
}

}  // namespace hamspec
