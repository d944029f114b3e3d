#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hamspec/complexmat.hpp"

namespace hamspec {

// One step of half-line coefficient data: A, B, C, W1, W2, each n x n.
struct CoeffBlocks {
    CMat A, B, C, W1, W2;
};

// Analytic tail behavior of the weight, used by tail-sum routines.
struct TailTag {
    enum class Kind { General, Geometric, FiniteSupport };
    Kind kind = Kind::General;
    double weight_ratio = 1.0;  // geometric decay ratio of ||W(t)||, Kind::Geometric
    long support_end = 0;       // last t with W(t) != 0, Kind::FiniteSupport
};

// Coefficient data of the half-line system: total map t -> blocks, t >= a.
class SystemCoefficients {
  public:
    SystemCoefficients(std::size_t n, long a,
                       std::function<CoeffBlocks(long)> provider,
                       TailTag tail = {})
        : n_(n), a_(a), provider_(std::move(provider)), tail_(tail) {}

    std::size_t n() const { return n_; }
    long a() const { return a_; }
    const TailTag& tail() const { return tail_; }

    CoeffBlocks at(long t) const;
    // 2n x 2n weight diag(W1, W2).
    CMat weight(long t) const;

  private:
    std::size_t n_;
    long a_;
    std::function<CoeffBlocks(long)> provider_;
    TailTag tail_;
};

// The 2n x 2n canonical symplectic matrix [[0, -I], [I, 0]].
CMat canonical_J(std::size_t n);

// A finite window of 2n-vectors y(t), t = start ... start + size - 1.
struct HamSequence {
    long start = 0;
    std::vector<CMat> values;  // 2n x 1 each

    long end() const { return start + static_cast<long>(values.size()) - 1; }
    const CMat& at(long t) const;
    CMat& at(long t);
    static HamSequence zeros(std::size_t n, long start, long end);
};

struct ValidationIssue {
    long t;
    std::string assumption;  // which standing assumption failed
    double residual;
};

struct ValidationReport {
    bool ok = true;
    std::vector<ValidationIssue> issues;
    double max_herm_residual = 0.0;   // over B, C
    double min_weight_eigen = 0.0;    // over W1, W2
    double min_sv_ImA = 0.0;          // smallest singular value of I - A
};

// Checks B, C Hermitian; W1, W2 PSD; I - A(t) invertible on [t_lo, t_hi].
ValidationReport validate(const SystemCoefficients& sys, long t_lo, long t_hi,
                          double tol = 1e-10);

// P(t) = [[-C, A*], [A, B]].
CMat p_matrix(const SystemCoefficients& sys, long t);

// R(y)(t) = (y1(t+1), y2(t)).
CMat apply_R(const HamSequence& y, long t);

// L(y)(t) = J Delta y(t) - P(t) R(y)(t).
CMat apply_L(const SystemCoefficients& sys, const HamSequence& y, long t);

// Builtin families -------------------------------------------------------

struct SecondOrderParams {
    std::function<double(long)> p;  // p(t) != 0
    std::function<double(long)> q;
    std::function<double(long)> w;  // w(t) >= 0
    long a = 0;
};

// -Delta(p(t) Delta z(t-1)) + q(t) z(t) = lambda w(t) z(t) as an n=1 system.
// State: y1(t) = z(t-1), y2(t) = p(t) Delta z(t-1); blocks A=0, B=1/p, C=q,
// W1=w, W2=0, so that ||y||^2 = sum_{t>=a} w(t) |z(t)|^2.
SystemCoefficients second_order_system(SecondOrderParams params, TailTag tail = {});

// Block-diagonal stacking; deficiency indices add.
SystemCoefficients direct_sum(const SystemCoefficients& s1, const SystemCoefficients& s2);

// Parses the table_with_tail JSON document (fields n, a, rows, tail).
SystemCoefficients table_with_tail_from_json(const std::string& json_text);

// Reference systems ------------------------------------------------------

// p=1, q=0, w(t)=2^-t on a=0; limit circle, d = 2.
SystemCoefficients example_lcc();
// p=1, q=0, w=1 on a=0; limit point, d = 1.
SystemCoefficients example_lpc();
// direct_sum(example_lcc, example_lpc); intermediate, d = 3, n = 2.
SystemCoefficients example_mid();

// Applies the spectral shift s: lambda -> lambda + s at the coefficient level
// (C -> C - s W1, B -> B + s W2), so eigenvalues translate by -s.
SystemCoefficients shifted_system(const SystemCoefficients& sys, double s);

}  // namespace hamspec
