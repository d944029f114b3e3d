#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hamspec/report.hpp"
#include "hamspec/spectral.hpp"

namespace py = pybind11;
using namespace hamspec;

namespace {

CMat mat_from_array(const py::array_t<cplx, py::array::c_style | py::array::forcecast>& a) {
    if (a.ndim() != 2) throw ContractViolation("expected a 2-d array");
    CMat m(static_cast<std::size_t>(a.shape(0)), static_cast<std::size_t>(a.shape(1)));
    auto r = a.unchecked<2>();
    for (py::ssize_t i = 0; i < a.shape(0); ++i)
        for (py::ssize_t j = 0; j < a.shape(1); ++j)
            m(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = r(i, j);
    return m;
}

py::array_t<cplx> array_from_mat(const CMat& m) {
    py::array_t<cplx> a({m.rows(), m.cols()});
    auto w = a.mutable_unchecked<2>();
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            w(static_cast<py::ssize_t>(i), static_cast<py::ssize_t>(j)) = m(i, j);
    return a;
}

// Descriptor plus the frame data the intermediate case needs.
struct Extension {
    SseDescriptor sse;
    std::optional<PsiBasis> psi;

    const PsiBasis* psi_ptr() const { return psi ? &*psi : nullptr; }
};

const char* case_name(LimitType t) {
    switch (t) {
        case LimitType::LimitCircle: return "limit_circle";
        case LimitType::LimitPoint: return "limit_point";
        default: return "intermediate";
    }
}

py::dict classification_dict(const Classification& c) {
    py::dict d;
    d["kind"] = case_name(c.type);
    d["d"] = c.d;
    d["d_plus"] = c.d_plus;
    d["d_minus"] = c.d_minus;
    d["finite_dim_space"] = c.finite_dim_space;
    return d;
}

}  // namespace

PYBIND11_MODULE(_hamspec, m) {
    m.doc() = "regular spectral approximation of singular discrete "
              "Hamiltonian systems";

    py::register_exception<Error>(m, "HamspecError");

    py::class_<SystemCoefficients>(m, "System")
        .def_property_readonly("n", &SystemCoefficients::n)
        .def_property_readonly("a", &SystemCoefficients::a)
        .def("weight", [](const SystemCoefficients& s, long t) {
            return array_from_mat(s.weight(t));
        });

    m.def("builtin_system", [](const std::string& name) {
        if (name == "lcc") return example_lcc();
        if (name == "lpc") return example_lpc();
        if (name == "mid") return example_mid();
        throw ContractViolation("unknown builtin system '" + name + "'");
    });
    m.def("system_from_table_json", &table_with_tail_from_json);
    m.def(
        "second_order",
        [](std::function<double(long)> p, std::function<double(long)> q,
           std::function<double(long)> w, long a, const std::string& tail_kind,
           double ratio, long support_end) {
            TailTag tail;
            if (tail_kind == "geometric") {
                tail.kind = TailTag::Kind::Geometric;
                tail.weight_ratio = ratio;
            } else if (tail_kind == "finite_support") {
                tail.kind = TailTag::Kind::FiniteSupport;
                tail.support_end = support_end;
            } else if (tail_kind != "general") {
                throw ContractViolation("unknown tail kind '" + tail_kind + "'");
            }
            return second_order_system({std::move(p), std::move(q), std::move(w), a},
                                       tail);
        },
        py::arg("p"), py::arg("q"), py::arg("w"), py::arg("a") = 0,
        py::arg("tail_kind") = "general", py::arg("ratio") = 1.0,
        py::arg("support_end") = 0);
    m.def("shifted", &shifted_system, py::arg("system"), py::arg("s"));

    m.def("validate_system", [](const SystemCoefficients& s, long t_lo, long t_hi) {
        const ValidationReport r = validate(s, t_lo, t_hi);
        py::dict d;
        d["ok"] = r.ok;
        d["max_herm_residual"] = r.max_herm_residual;
        d["min_weight_eigen"] = r.min_weight_eigen;
        d["min_sv_ImA"] = r.min_sv_ImA;
        return d;
    });
    m.def("classify",
          [](const SystemCoefficients& s) { return classification_dict(classify(s)); });

    py::class_<Extension>(m, "Extension")
        .def_property_readonly("kind",
                               [](const Extension& e) { return case_name(e.sse.type); })
        .def_property_readonly("M",
                               [](const Extension& e) { return array_from_mat(e.sse.M); })
        .def_property_readonly("N",
                               [](const Extension& e) { return array_from_mat(e.sse.N); });

    m.def(
        "natural_extension",
        [](const SystemCoefficients& sys, double frame_lambda0) {
            Extension e;
            const Classification c = classify(sys);
            if (c.type == LimitType::Intermediate)
                e.psi = build_psi_basis(sys, frame_lambda0);
            e.sse = natural_sse(sys, c.type, e.psi_ptr(), 0.0);
            validate_sse(sys, e.sse, e.psi ? e.psi->d : c.d, e.psi_ptr());
            return e;
        },
        py::arg("system"), py::arg("frame_lambda0") = 0.0);

    py::class_<RegularBC>(m, "RegularBC")
        .def_property_readonly("b", [](const RegularBC& bc) { return bc.b; })
        .def_property_readonly("P", [](const RegularBC& bc) { return array_from_mat(bc.P); })
        .def_property_readonly("Q", [](const RegularBC& bc) { return array_from_mat(bc.Q); });

    m.def("induce", [](const SystemCoefficients& sys, const Extension& e, long b) {
        return induce_regular(sys, e.sse, b, e.psi_ptr());
    });
    m.def("boundary_pair", [](const py::array_t<cplx>& p, const py::array_t<cplx>& q,
                              long b) {
        RegularBC bc;
        bc.P = mat_from_array(p);
        bc.Q = mat_from_array(q);
        bc.b = b;
        return bc;
    });

    m.def("eigenvalues", [](const SystemCoefficients& sys, const RegularBC& bc) {
        const EigenList e = eigenvalues_regular(sys, bc);
        py::dict d;
        d["values"] = e.values;
        d["shift"] = e.shift;
        d["discarded"] = e.discarded;
        return d;
    });
    m.def("eigen_scan", [](const SystemCoefficients& sys, const RegularBC& bc,
                           double lo, double hi, std::size_t grid) {
        return eigen_oracle(sys, bc, lo, hi, grid);
    });

    m.def("resolvent", [](const SystemCoefficients& sys, const RegularBC& bc, cplx z,
                          const py::array_t<cplx>& g_arr) {
        const CMat g_mat = mat_from_array(g_arr);
        if (g_mat.cols() != 2 * sys.n() ||
            g_mat.rows() != static_cast<std::size_t>(bc.b + 2 - sys.a()))
            throw ContractViolation("source must be (b + 2 - a) x 2n");
        HamSequence g = HamSequence::zeros(sys.n(), sys.a(), bc.b + 1);
        for (long t = sys.a(); t <= bc.b + 1; ++t)
            for (std::size_t i = 0; i < 2 * sys.n(); ++i)
                g.at(t)(i, 0) = g_mat(static_cast<std::size_t>(t - sys.a()), i);
        const HamSequence y = regular_resolvent(sys, bc, z, g);
        CMat out(g_mat.rows(), g_mat.cols());
        for (long t = sys.a(); t <= bc.b + 1; ++t)
            for (std::size_t i = 0; i < 2 * sys.n(); ++i)
                out(static_cast<std::size_t>(t - sys.a()), i) = y.at(t)(i, 0);
        return array_from_mat(out);
    });

    m.def(
        "error_radius",
        [](const SystemCoefficients& sys, const Extension& e, long b) {
            const ErrorBound eb = error_bound(sys, e.sse, b);
            py::dict d;
            d["e_r"] = eb.e_r;
            d["alpha0"] = eb.alpha0;
            d["m0"] = eb.m0;
            d["n0"] = eb.n0;
            d["eps_r"] = eb.eps_r;
            return d;
        },
        py::arg("system"), py::arg("extension"), py::arg("b"));

    m.def(
        "approximate",
        [](const SystemCoefficients& sys, const Extension& e,
           const std::vector<long>& schedule, long max_index, double conv_tol) {
            ApproxOptions opt;
            opt.psi = e.psi_ptr();
            opt.max_index = max_index;
            opt.conv_tol = conv_tol;
            const ApproximationReport rep = approximate(sys, e.sse, schedule, opt);
            py::dict d;
            d["schedule"] = rep.schedule;
            d["exact_mode"] = rep.exact_mode;
            d["e_r"] = rep.e_r;
            d["hs_partial"] = rep.hs_partial;
            d["errors"] = rep.errors;
            py::list trs;
            for (const Trajectory& tr : rep.trajectories) {
                py::dict jt;
                jt["k"] = tr.k;
                jt["verdict"] = tr.verdict == Verdict::Converged ? "converged"
                                : tr.verdict == Verdict::InclusiveOnly
                                    ? "inclusive-only"
                                    : "unresolved";
                py::list vals, bounds;
                for (std::size_t r = 0; r < tr.values.size(); ++r) {
                    vals.append(tr.values[r] ? py::cast(*tr.values[r])
                                             : py::none());
                    bounds.append(tr.bound_a[r].valid ? py::cast(tr.bound_a[r].bound)
                                                      : py::none());
                }
                jt["values"] = std::move(vals);
                jt["bounds"] = std::move(bounds);
                trs.append(std::move(jt));
            }
            d["trajectories"] = std::move(trs);
            return d;
        },
        py::arg("system"), py::arg("extension"), py::arg("schedule"),
        py::arg("max_index") = 3, py::arg("conv_tol") = 1e-7);
}
