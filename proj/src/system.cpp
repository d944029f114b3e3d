#include "hamspec/system.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <memory>

#include "json.hpp"

namespace hamspec {

CoeffBlocks SystemCoefficients::at(long t) const {
    if (t < a_) throw ContractViolation("coefficient query before interval start");
    CoeffBlocks b = provider_(t);
    const std::size_t n = n_;
    if (b.A.rows() != n || b.A.cols() != n || b.B.rows() != n || b.C.rows() != n ||
        b.W1.rows() != n || b.W2.rows() != n)
        throw ContractViolation("provider returned wrong block dimension");
    return b;
}

CMat SystemCoefficients::weight(long t) const {
    const CoeffBlocks b = at(t);
    CMat w(2 * n_, 2 * n_);
    w.set_block(0, 0, b.W1);
    w.set_block(n_, n_, b.W2);
    return w;
}

CMat canonical_J(std::size_t n) {
    CMat j(2 * n, 2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        j(i, n + i) = cplx{-1.0, 0.0};
        j(n + i, i) = cplx{1.0, 0.0};
    }
    return j;
}

const CMat& HamSequence::at(long t) const {
    if (t < start || t > end()) throw ContractViolation("sequence index out of range");
    return values[static_cast<std::size_t>(t - start)];
}

CMat& HamSequence::at(long t) {
    if (t < start || t > end()) throw ContractViolation("sequence index out of range");
    return values[static_cast<std::size_t>(t - start)];
}

HamSequence HamSequence::zeros(std::size_t n, long start, long end) {
    HamSequence s;
    s.start = start;
    s.values.assign(static_cast<std::size_t>(end - start + 1), CMat(2 * n, 1));
    return s;
}

ValidationReport validate(const SystemCoefficients& sys, long t_lo, long t_hi, double tol) {
    ValidationReport rep;
    rep.min_weight_eigen = std::numeric_limits<double>::infinity();
    rep.min_sv_ImA = std::numeric_limits<double>::infinity();
    const std::size_t n = sys.n();
    for (long t = t_lo; t <= t_hi; ++t) {
        const CoeffBlocks b = sys.at(t);
        const double scale_b = std::max(fro_norm(b.B), 1.0);
        const double scale_c = std::max(fro_norm(b.C), 1.0);
        const double rb = fro_norm(b.B - b.B.adjoint());
        const double rc = fro_norm(b.C - b.C.adjoint());
        rep.max_herm_residual = std::max({rep.max_herm_residual, rb, rc});
        if (rb > tol * scale_b)
            rep.issues.push_back({t, "B Hermitian", rb});
        if (rc > tol * scale_c)
            rep.issues.push_back({t, "C Hermitian", rc});
        for (const CMat* w : {&b.W1, &b.W2}) {
            if (fro_norm(*w - w->adjoint()) > tol * std::max(fro_norm(*w), 1.0)) {
                rep.issues.push_back({t, "W Hermitian", fro_norm(*w - w->adjoint())});
                continue;
            }
            const HermEigen e = herm_eigen(*w, 1e-13);
            const double mn = e.values.empty() ? 0.0 : e.values.front();
            rep.min_weight_eigen = std::min(rep.min_weight_eigen, mn);
            if (mn < -tol * std::max(fro_norm(*w), 1.0))
                rep.issues.push_back({t, "W positive semi-definite", mn});
        }
        // smallest singular value of I - A via the smallest eigenvalue of S*S
        const CMat s = CMat::identity(n) - b.A;
        const HermEigen e = herm_eigen(s.adjoint() * s, 1e-13);
        const double sv = std::sqrt(std::max(e.values.front(), 0.0));
        rep.min_sv_ImA = std::min(rep.min_sv_ImA, sv);
        if (sv <= 1e3 * std::numeric_limits<double>::epsilon() * std::max(fro_norm(s), 1.0))
            rep.issues.push_back({t, "(A1) I - A invertible", sv});
    }
    rep.ok = rep.issues.empty();
    return rep;
}

CMat p_matrix(const SystemCoefficients& sys, long t) {
    const CoeffBlocks b = sys.at(t);
    const std::size_t n = sys.n();
    CMat p(2 * n, 2 * n);
    p.set_block(0, 0, -b.C);
    p.set_block(0, n, b.A.adjoint());
    p.set_block(n, 0, b.A);
    p.set_block(n, n, b.B);
    return p;
}

CMat apply_R(const HamSequence& y, long t) {
    const CMat& yt = y.at(t);
    const CMat& yt1 = y.at(t + 1);
    const std::size_t n = yt.rows() / 2;
    CMat r(2 * n, 1);
    r.set_block(0, 0, yt1.block(0, 0, n, 1));
    r.set_block(n, 0, yt.block(n, 0, n, 1));
    return r;
}

CMat apply_L(const SystemCoefficients& sys, const HamSequence& y, long t) {
    const CMat j = canonical_J(sys.n());
    const CMat dy = y.at(t + 1) - y.at(t);
    return j * dy - p_matrix(sys, t) * apply_R(y, t);
}

SystemCoefficients second_order_system(SecondOrderParams params, TailTag tail) {
    auto p = std::make_shared<SecondOrderParams>(std::move(params));
    auto provider = [p](long t) {
        const double pv = p->p(t);
        if (pv == 0.0) throw ContractViolation("second_order: p(t) must be nonzero");
        CoeffBlocks b{CMat(1, 1), CMat(1, 1), CMat(1, 1), CMat(1, 1), CMat(1, 1)};
        b.B(0, 0) = 1.0 / pv;
        b.C(0, 0) = p->q(t);
        b.W1(0, 0) = p->w(t);
        return b;
    };
    return SystemCoefficients(1, p->a, provider, tail);
}

SystemCoefficients direct_sum(const SystemCoefficients& s1, const SystemCoefficients& s2) {
    if (s1.a() != s2.a())
        throw ContractViolation("direct_sum: interval starts differ");
    const std::size_t n1 = s1.n(), n2 = s2.n();
    auto p1 = std::make_shared<SystemCoefficients>(s1);
    auto p2 = std::make_shared<SystemCoefficients>(s2);
    auto provider = [p1, p2, n1, n2](long t) {
        const CoeffBlocks b1 = p1->at(t);
        const CoeffBlocks b2 = p2->at(t);
        auto stack = [&](const CMat& x1, const CMat& x2) {
            CMat m(n1 + n2, n1 + n2);
            m.set_block(0, 0, x1);
            m.set_block(n1, n1, x2);
            return m;
        };
        return CoeffBlocks{stack(b1.A, b2.A), stack(b1.B, b2.B), stack(b1.C, b2.C),
                           stack(b1.W1, b2.W1), stack(b1.W2, b2.W2)};
    };
    TailTag tail;
    const TailTag &t1 = s1.tail(), &t2 = s2.tail();
    if (t1.kind == TailTag::Kind::FiniteSupport && t2.kind == TailTag::Kind::FiniteSupport) {
        tail.kind = TailTag::Kind::FiniteSupport;
        tail.support_end = std::max(t1.support_end, t2.support_end);
    } else if (t1.kind == TailTag::Kind::Geometric || t2.kind == TailTag::Kind::Geometric) {
        tail.kind = TailTag::Kind::Geometric;
        tail.weight_ratio = std::max(t1.kind == TailTag::Kind::Geometric ? t1.weight_ratio : 1.0,
                                     t2.kind == TailTag::Kind::Geometric ? t2.weight_ratio : 1.0);
    }
    return SystemCoefficients(n1 + n2, s1.a(), provider, tail);
}

namespace {

CMat mat_from_json(const nlohmann::json& j, std::size_t n) {
    if (!j.is_array() || j.size() != n)
        throw ContractViolation("table_with_tail: matrix row count mismatch");
    CMat m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& row = j[i];
        if (!row.is_array() || row.size() != n)
            throw ContractViolation("table_with_tail: matrix column count mismatch");
        for (std::size_t k = 0; k < n; ++k) {
            const auto& e = row[k];
            if (!e.is_array() || e.size() != 2)
                throw ContractViolation("table_with_tail: entries must be [re, im]");
            m(i, k) = cplx{e[0].get<double>(), e[1].get<double>()};
        }
    }
    return m;
}

}  // namespace

SystemCoefficients table_with_tail_from_json(const std::string& json_text) {
    const nlohmann::json doc = nlohmann::json::parse(json_text);
    const std::size_t n = doc.at("n").get<std::size_t>();
    const long a = doc.at("a").get<long>();
    auto rows = std::make_shared<std::map<long, CoeffBlocks>>();
    for (const auto& row : doc.at("rows")) {
        const long t = row.at("t").get<long>();
        CoeffBlocks b;
        b.A = mat_from_json(row.at("A"), n);
        b.B = mat_from_json(row.at("B"), n);
        b.C = mat_from_json(row.at("C"), n);
        b.W1 = mat_from_json(row.at("W1"), n);
        b.W2 = mat_from_json(row.at("W2"), n);
        (*rows)[t] = b;
    }
    if (rows->empty()) throw ContractViolation("table_with_tail: empty rows");
    const long t_last = rows->rbegin()->first;

    const auto& tail_doc = doc.at("tail");
    const std::string kind = tail_doc.at("kind").get<std::string>();
    auto read_opt = [&](const char* key) {
        return tail_doc.contains(key) ? mat_from_json(tail_doc.at(key), n) : CMat(n, n);
    };
    auto tail_blocks = std::make_shared<CoeffBlocks>(CoeffBlocks{
        read_opt("A"), read_opt("B"), read_opt("C"), read_opt("W1"), read_opt("W2")});
    double ratio = 1.0;
    TailTag tag;
    if (kind == "constant") {
        const bool zero_weight =
            fro_norm(tail_blocks->W1) == 0.0 && fro_norm(tail_blocks->W2) == 0.0;
        tag.kind = zero_weight ? TailTag::Kind::FiniteSupport : TailTag::Kind::General;
        tag.support_end = t_last;
    } else if (kind == "geometric") {
        ratio = tail_doc.at("ratio").get<double>();
        tag.kind = TailTag::Kind::Geometric;
        tag.weight_ratio = ratio;
    } else {
        throw ContractViolation("table_with_tail: unknown tail kind '" + kind + "'");
    }
    const bool geometric = (kind == "geometric");

    auto provider = [rows, tail_blocks, t_last, geometric, ratio](long t) {
        const auto it = rows->find(t);
        if (it != rows->end()) return it->second;
        if (t <= t_last) throw ContractViolation("table_with_tail: gap in table rows");
        CoeffBlocks b = *tail_blocks;
        if (geometric) {
            const double f = std::pow(ratio, static_cast<double>(t - (t_last + 1)));
            b.W1 *= cplx{f, 0.0};
            b.W2 *= cplx{f, 0.0};
        }
        return b;
    };
    return SystemCoefficients(n, a, provider, tag);
}

SystemCoefficients example_lcc() {
    SecondOrderParams p;
    p.p = [](long) { return 1.0; };
    p.q = [](long) { return 0.0; };
    p.w = [](long t) { return std::pow(2.0, -static_cast<double>(t)); };
    p.a = 0;
    TailTag tag;
    tag.kind = TailTag::Kind::Geometric;
    tag.weight_ratio = 0.5;
    return second_order_system(std::move(p), tag);
}

SystemCoefficients example_lpc() {
    SecondOrderParams p;
    p.p = [](long) { return 1.0; };
    p.q = [](long) { return 0.0; };
    p.w = [](long) { return 1.0; };
    p.a = 0;
    return second_order_system(std::move(p));
}

SystemCoefficients example_mid() { return direct_sum(example_lcc(), example_lpc()); }

SystemCoefficients shifted_system(const SystemCoefficients& sys, double s) {
    if (s == 0.0) return sys;
    auto base = std::make_shared<SystemCoefficients>(sys);
    auto provider = [base, s](long t) {
        CoeffBlocks b = base->at(t);
        b.C -= s * b.W1;
        b.B += s * b.W2;
        return b;
    };
    return SystemCoefficients(sys.n(), sys.a(), provider, sys.tail());
}

}  // namespace hamspec
