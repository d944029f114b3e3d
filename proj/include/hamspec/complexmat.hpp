#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "hamspec/errors.hpp"

namespace hamspec {

using cplx = std::complex<double>;

// Dense complex matrix, row-major.
class CMat {
  public:
    CMat() = default;
    CMat(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols, cplx{0.0, 0.0}) {}

    static CMat identity(std::size_t n);
    static CMat zero(std::size_t rows, std::size_t cols) { return CMat(rows, cols); }
    // Column vector from entries.
    static CMat col(const std::vector<cplx>& entries);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return data_.empty(); }

    cplx& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const cplx& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    CMat adjoint() const;
    CMat transpose() const;
    CMat conj() const;

    CMat block(std::size_t i0, std::size_t j0, std::size_t r, std::size_t c) const;
    void set_block(std::size_t i0, std::size_t j0, const CMat& b);
    CMat column(std::size_t j) const { return block(0, j, rows_, 1); }

    CMat& operator+=(const CMat& o);
    CMat& operator-=(const CMat& o);
    CMat& operator*=(cplx s);

    bool all_finite() const;

  private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<cplx> data_;
};

CMat operator+(CMat a, const CMat& b);
CMat operator-(CMat a, const CMat& b);
CMat operator*(const CMat& a, const CMat& b);
CMat operator*(cplx s, CMat a);
CMat operator*(double s, CMat a);
CMat operator-(CMat a);

// Horizontal concatenation (A, B).
CMat hcat(const CMat& a, const CMat& b);
// Vertical concatenation.
CMat vcat(const CMat& a, const CMat& b);

// Frobenius norm: square root of the sum of squared moduli.
double fro_norm(const CMat& a);

// X with A X = B via LU with partial pivoting. Throws SingularMatrix when a
// pivot underflows threshold (default 1e3 * eps * ||A||).
CMat lu_solve(const CMat& a, const CMat& b, double pivot_tol = -1.0);

// Product of LU pivots with permutation sign; 0 when a pivot underflows.
cplx det(const CMat& a);

// Pivot count above tol * ||A|| after row reduction with full pivoting.
std::size_t rank_of(const CMat& a, double tol = 1e-10);

struct HermEigen {
    std::vector<double> values;  // ascending
    CMat vectors;                // orthonormal columns
};

// Full spectrum of a Hermitian matrix by cyclic complex Jacobi sweeps.
// Sweeps continue until the off-diagonal Frobenius mass is <= tol * ||A||.
HermEigen herm_eigen(const CMat& a, double tol = 1e-14);

struct SkewDiag {
    CMat U;  // unitary
    CMat D;  // diagonal, purely imaginary entries, nonzero ones first
};

// U* S U = D for skew-Hermitian S, via herm_eigen on iS.
SkewDiag diag_skew_hermitian(const CMat& s, double tol = 1e-12);

}  // namespace hamspec
