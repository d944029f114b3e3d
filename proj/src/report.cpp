#include "hamspec/report.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "json.hpp"

namespace hamspec {

namespace {

using nlohmann::json;

CMat cmat_from_json(const json& j) {
    const std::size_t rows = j.size();
    if (rows == 0) throw ContractViolation("config: empty matrix");
    const std::size_t cols = j.at(0).size();
    CMat m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        if (j.at(i).size() != cols)
            throw ContractViolation("config: ragged matrix rows");
        for (std::size_t c = 0; c < cols; ++c) {
            const json& e = j.at(i).at(c);
            if (!e.is_array() || e.size() != 2)
                throw ContractViolation("config: matrix entries must be [re, im]");
            m(i, c) = cplx{e.at(0).get<double>(), e.at(1).get<double>()};
        }
    }
    return m;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

LimitType case_from_string(const std::string& s) {
    if (s == "limit_circle") return LimitType::LimitCircle;
    if (s == "limit_point") return LimitType::LimitPoint;
    if (s == "intermediate") return LimitType::Intermediate;
    throw ContractViolation("config: unknown case '" + s + "'");
}

const char* case_to_string(LimitType t) {
    switch (t) {
        case LimitType::LimitCircle: return "LimitCircle";
        case LimitType::LimitPoint: return "LimitPoint";
        default: return "Intermediate";
    }
}

SystemCoefficients system_from_json(const json& doc) {
    if (doc.contains("builtin")) {
        const std::string name = doc.at("builtin").get<std::string>();
        if (name == "lcc") return example_lcc();
        if (name == "lpc") return example_lpc();
        if (name == "mid") return example_mid();
        throw ContractViolation("config: unknown builtin system '" + name + "'");
    }
    if (doc.contains("table_file"))
        return table_with_tail_from_json(
            read_file(doc.at("table_file").get<std::string>()));
    if (doc.contains("table")) return table_with_tail_from_json(doc.at("table").dump());
    throw ContractViolation("config: system needs builtin, table, or table_file");
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

// Classification, descriptor, and psi frame assembled per the config.
struct Setup {
    Classification cls;
    SseDescriptor sse;
    std::optional<PsiBasis> psi;

    const PsiBasis* psi_ptr() const { return psi ? &*psi : nullptr; }
};

Setup make_setup(const RunConfig& cfg) {
    Setup s;
    const std::size_t n = cfg.system.n();
    if (cfg.case_override) {
        s.cls.type = *cfg.case_override;
        s.cls.d = s.cls.type == LimitType::LimitPoint ? n : 2 * n;
    } else {
        s.cls = classify(cfg.system);
    }
    if (s.cls.type == LimitType::Intermediate) {
        s.psi = build_psi_basis(cfg.system, cfg.frame_lambda0);
        s.cls.d = s.psi->d;
    }
    s.sse = cfg.sse ? *cfg.sse
                    : natural_sse(cfg.system, s.cls.type, s.psi_ptr(), 0.0);
    validate_sse(cfg.system, s.sse, s.cls.d, s.psi_ptr());
    return s;
}

// Truncated boundary pair at b: the config's explicit pair when present
// (checked for self-adjointness), otherwise induced from the descriptor.
RegularBC resolve_bc(const RunConfig& cfg, long b) {
    if (cfg.regular_bc) {
        RegularBC bc = *cfg.regular_bc;
        bc.b = b;
        const std::size_t n = cfg.system.n();
        const CMat j = canonical_J(n);
        const double scale = 1.0 + fro_norm(bc.P) + fro_norm(bc.Q);
        if (rank_of(hcat(bc.P, bc.Q)) != 2 * n ||
            fro_norm(bc.P * j * bc.P.adjoint() - bc.Q * j * bc.Q.adjoint()) >
                1e-8 * scale * scale)
            throw InvalidBoundaryCondition(
                "regular boundary pair is not self-adjoint");
        return bc;
    }
    const Setup s = make_setup(cfg);
    return induce_regular(cfg.system, s.sse, b, s.psi_ptr());
}

int guarded(std::ostream& out, const std::function<int()>& body) {
    try {
        return body();
    } catch (const ClassificationAmbiguous& e) {
        out << "error: " << e.what() << "\n";
        return kExitAmbiguous;
    } catch (const DefinitenessNotFound& e) {
        out << "error: " << e.what() << "\n";
        return kExitAmbiguous;
    } catch (const ZIsEigenvalue& e) {
        out << "error: " << e.what() << "\n";
        return kExitSpectral;
    } catch (const TailDivergence& e) {
        out << "error: " << e.what() << "\n";
        return kExitSpectral;
    } catch (const Error& e) {
        out << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        out << "error: " << e.what() << "\n";
        return kExitUsage;
    }
}

EigenOptions eigen_options(const RunConfig& cfg) {
    EigenOptions eo;
    eo.cluster_tol = cfg.cluster_tol;
    return eo;
}

const char* verdict_to_string(Verdict v) {
    switch (v) {
        case Verdict::Converged: return "converged";
        case Verdict::InclusiveOnly: return "inclusive-only";
        default: return "unresolved";
    }
}

// Simple polyline chart: one line per trajectory, log2 x axis over the
// truncation points, dashed bound envelopes where valid.
void write_convergence_svg(const std::string& path,
                           const ApproximationReport& rep,
                           const std::string& banner) {
    const double width = 720, height = 480, ml = 60, mr = 20, mt = 40, mb = 40;
    double x_lo = 1e300, x_hi = -1e300, y_lo = 1e300, y_hi = -1e300;
    for (long b : rep.schedule) {
        x_lo = std::min(x_lo, std::log2(double(b)));
        x_hi = std::max(x_hi, std::log2(double(b)));
    }
    for (const Trajectory& tr : rep.trajectories)
        for (const auto& v : tr.values)
            if (v) {
                y_lo = std::min(y_lo, *v);
                y_hi = std::max(y_hi, *v);
            }
    if (x_hi <= x_lo) x_hi = x_lo + 1.0;
    if (y_hi <= y_lo) y_hi = y_lo + 1.0;
    const double pad = 0.05 * (y_hi - y_lo);
    y_lo -= pad;
    y_hi += pad;
    const auto px = [&](double b_log) {
        return ml + (b_log - x_lo) / (x_hi - x_lo) * (width - ml - mr);
    };
    const auto py = [&](double v) {
        return height - mb - (v - y_lo) / (y_hi - y_lo) * (height - mt - mb);
    };
    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b", "#17becf", "#e377c2"};
    std::ofstream svg(path);
    if (!svg) throw Error("cannot write " + path);
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
        << "\" height=\"" << height << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << "<text x=\"" << ml << "\" y=\"24\" font-size=\"16\">eigenvalue "
           "trajectories vs truncation point (log2 x)</text>\n";
    if (!banner.empty())
        svg << "<text x=\"" << width - mr << "\" y=\"24\" font-size=\"14\" "
               "text-anchor=\"end\" fill=\"#d62728\">" << banner << "</text>\n";
    svg << "<line x1=\"" << ml << "\" y1=\"" << height - mb << "\" x2=\""
        << width - mr << "\" y2=\"" << height - mb
        << "\" stroke=\"black\"/>\n<line x1=\"" << ml << "\" y1=\"" << mt
        << "\" x2=\"" << ml << "\" y2=\"" << height - mb
        << "\" stroke=\"black\"/>\n";
    std::size_t color = 0;
    for (const Trajectory& tr : rep.trajectories) {
        const char* stroke = palette[color++ % 8];
        std::ostringstream line, lo_env, hi_env;
        for (std::size_t r = 0; r < rep.schedule.size(); ++r) {
            if (!tr.values[r]) continue;
            const double x = px(std::log2(double(rep.schedule[r])));
            line << x << "," << py(*tr.values[r]) << " ";
            if (r < tr.bound_a.size() && tr.bound_a[r].valid) {
                lo_env << x << "," << py(*tr.values[r] - tr.bound_a[r].bound) << " ";
                hi_env << x << "," << py(*tr.values[r] + tr.bound_a[r].bound) << " ";
            }
        }
        svg << "<polyline fill=\"none\" stroke=\"" << stroke
            << "\" stroke-width=\"1.5\" points=\"" << line.str() << "\"/>\n";
        for (const std::string& env : {lo_env.str(), hi_env.str()})
            if (!env.empty())
                svg << "<polyline fill=\"none\" stroke=\"" << stroke
                    << "\" stroke-dasharray=\"4 3\" stroke-width=\"0.8\" "
                       "points=\"" << env << "\"/>\n";
        svg << "<text x=\"" << width - mr - 40 << "\" y=\""
            << mt + 16.0 * double(color) << "\" font-size=\"12\" fill=\""
            << stroke << "\">k=" << tr.k << "</text>\n";
    }
    svg << "</svg>\n";
}

}  // namespace

RunConfig parse_config(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ContractViolation(std::string("config: ") + e.what());
    }
    SystemCoefficients base = system_from_json(doc.at("system"));
    const double shift = doc.value("shift", 0.0);
    RunConfig cfg(shift != 0.0 ? shifted_system(base, shift) : base);
    cfg.shift = shift;
    if (doc.contains("case"))
        cfg.case_override = case_from_string(doc.at("case").get<std::string>());
    cfg.frame_lambda0 = doc.value("frame_lambda0", 0.0);
    if (doc.contains("sse")) {
        const json& s = doc.at("sse");
        SseDescriptor sse;
        sse.type = case_from_string(s.at("case").get<std::string>());
        sse.M = cmat_from_json(s.at("M"));
        if (s.contains("N")) sse.N = cmat_from_json(s.at("N"));
        sse.lambda0 = s.value("lambda0", 0.0);
        cfg.sse = std::move(sse);
        if (!cfg.case_override) cfg.case_override = cfg.sse->type;
    }
    if (doc.contains("regular_bc")) {
        const json& r = doc.at("regular_bc");
        RegularBC bc;
        bc.P = cmat_from_json(r.at("P"));
        bc.Q = cmat_from_json(r.at("Q"));
        cfg.regular_bc = std::move(bc);
    }
    if (doc.contains("schedule")) {
        const json& s = doc.at("schedule");
        if (s.is_array()) {
            for (const json& v : s) cfg.schedule.push_back(v.get<long>());
        } else {
            long b = s.at("b0").get<long>();
            const double factor = s.value("factor", 2.0);
            for (long i = 0; i < s.at("count").get<long>(); ++i) {
                cfg.schedule.push_back(b);
                b = static_cast<long>(std::ceil(double(b) * factor));
            }
        }
        for (std::size_t i = 1; i < cfg.schedule.size(); ++i)
            if (cfg.schedule[i] <= cfg.schedule[i - 1])
                throw ContractViolation("config: schedule must be strictly increasing");
    }
    if (doc.contains("tolerances")) {
        const json& t = doc.at("tolerances");
        cfg.tail_tol = t.value("tail", cfg.tail_tol);
        cfg.cluster_tol = t.value("cluster", cfg.cluster_tol);
        cfg.definiteness_tol = t.value("definiteness", cfg.definiteness_tol);
        cfg.conv_tol = t.value("convergence", cfg.conv_tol);
        if (cfg.tail_tol <= 0 || cfg.cluster_tol <= 0 || cfg.definiteness_tol <= 0)
            throw ContractViolation("config: tolerances must be positive");
    }
    cfg.max_index = doc.value("max_index", cfg.max_index);
    if (doc.contains("emit")) {
        const json& e = doc.at("emit");
        cfg.emit_csv = e.value("csv", true);
        cfg.emit_json = e.value("json", true);
        cfg.emit_svg = e.value("svg", true);
    }
    if (doc.contains("source")) {
        const json& s = doc.at("source");
        const long start = s.value("start", cfg.system.a());
        const json& vals = s.at("values");
        HamSequence g = HamSequence::zeros(cfg.system.n(), start,
                                           start + long(vals.size()) - 1);
        for (std::size_t i = 0; i < vals.size(); ++i) {
            const CMat col = cmat_from_json(vals.at(i));
            if (col.rows() != 2 * cfg.system.n() || col.cols() != 1)
                throw ContractViolation("config: source entries must be 2n x 1");
            g.at(start + long(i)) = col;
        }
        cfg.source = std::move(g);
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    return parse_config(read_file(path));
}

int cmd_validate(const RunConfig& cfg, std::ostream& out) {
    return guarded(out, [&]() -> int {
        const long t_hi = cfg.system.a() +
                          (cfg.schedule.empty() ? 64 : cfg.schedule.back() + 1);
        const ValidationReport vr = validate(cfg.system, cfg.system.a(), t_hi);
        json rep;
        rep["ok"] = vr.ok;
        rep["max_herm_residual"] = vr.max_herm_residual;
        rep["min_weight_eigen"] = vr.min_weight_eigen;
        rep["min_sv_ImA"] = vr.min_sv_ImA;
        rep["issues"] = json::array();
        for (const ValidationIssue& i : vr.issues)
            rep["issues"].push_back(
                {{"t", i.t}, {"assumption", i.assumption}, {"residual", i.residual}});
        if (!vr.ok) {
            out << rep.dump(2) << "\n";
            return kExitValidation;
        }
        const DefinitenessResult dw =
            find_definiteness(cfg.system, cfg.definiteness_tol);
        rep["definiteness_window"] = {dw.t_lo, dw.t_hi};
        rep["definiteness_min_eigen"] = dw.min_eigen;
        const Setup s = make_setup(cfg);  // throws on invalid boundary data
        rep["case"] = case_to_string(s.cls.type);
        out << rep.dump(2) << "\n";
        return kExitOk;
    });
}

int cmd_classify(const RunConfig& cfg, std::ostream& out) {
    return guarded(out, [&]() -> int {
        const Classification c = classify(cfg.system);
        json rep;
        rep["kind"] = case_to_string(c.type);
        rep["d"] = c.d;
        rep["d_plus"] = c.d_plus;
        rep["d_minus"] = c.d_minus;
        rep["finite_dim_space"] = c.finite_dim_space;
        out << rep.dump(2) << "\n";
        return kExitOk;
    });
}

int cmd_eigs(const RunConfig& cfg, const CmdOptions& opt, std::ostream& out) {
    return guarded(out, [&]() -> int {
        long b;
        if (opt.b)
            b = *opt.b;
        else if (!cfg.schedule.empty())
            b = cfg.schedule.front();
        else {
            out << "error: eigs needs --b or a schedule\n";
            return kExitUsage;
        }
        const RegularBC bc = resolve_bc(cfg, b);
        const EigenList eigs = eigenvalues_regular(cfg.system, bc, eigen_options(cfg));
        std::vector<double> roots;
        if (opt.oracle && !eigs.values.empty())
            roots = eigen_oracle(cfg.system, bc, eigs.values.front() - 1.0,
                                 eigs.values.back() + 1.0, 4000);
        out << "index,lambda (cluster_tol=" << fmt(cfg.cluster_tol)
            << "),oracle (width=1e-10)\n";
        for (std::size_t i = 0; i < eigs.values.size(); ++i) {
            out << i + 1 << "," << fmt(eigs.values[i]) << ",";
            if (opt.oracle) {
                double best = 0.0, dist = 1e300;
                for (double r : roots)
                    if (std::abs(r - eigs.values[i]) < dist) {
                        dist = std::abs(r - eigs.values[i]);
                        best = r;
                    }
                if (dist < 1e300) out << fmt(best);
            }
            out << "\n";
        }
        return kExitOk;
    });
}

int cmd_approx(const RunConfig& cfg, const CmdOptions& opt, std::ostream& out) {
    return guarded(out, [&]() -> int {
        if (cfg.schedule.empty()) {
            out << "error: approx needs a non-empty schedule\n";
            return kExitUsage;
        }
        const Setup s = make_setup(cfg);
        ApproxOptions ao;
        ao.psi = s.psi_ptr();
        ao.eig = eigen_options(cfg);
        ao.max_index = cfg.max_index;
        ao.conv_tol = cfg.conv_tol;
        const ApproximationReport rep =
            approximate(cfg.system, s.sse, cfg.schedule, ao);
        if (rep.errors.size() == cfg.schedule.size()) {
            for (const std::string& e : rep.errors) out << "error: " << e << "\n";
            return kExitSpectral;
        }
        std::filesystem::create_directories(opt.out_dir);
        const std::string base = opt.out_dir + "/";
        if (cfg.emit_csv) {
            std::ofstream tcsv(base + "trajectories.csv");
            tcsv << "r,b_r,k,lambda (cluster_tol=" << fmt(cfg.cluster_tol)
                 << "),e_r (tail_tol=" << fmt(cfg.tail_tol)
                 << "),bound_a,bound_b,verdict\n";
            for (const Trajectory& tr : rep.trajectories)
                for (std::size_t r = 0; r < rep.schedule.size(); ++r) {
                    if (!tr.values[r]) continue;
                    tcsv << r << "," << rep.schedule[r] << "," << tr.k << ","
                         << fmt(*tr.values[r]) << "," << fmt(rep.e_r[r]) << ","
                         << (tr.bound_a[r].valid ? fmt(tr.bound_a[r].bound) : "")
                         << ","
                         << (tr.bound_b[r].valid ? fmt(tr.bound_b[r].bound) : "")
                         << "," << verdict_to_string(tr.verdict) << "\n";
                }
            std::ofstream dcsv(base + "defects.csv");
            dcsv << "r,b_r,delta (tail_tol=" << fmt(cfg.tail_tol)
                 << "),delta1,delta2,eta\n";
            if (rep.exact_mode) {
                // deterministic probe source for the defect decay table
                HamSequence g = HamSequence::zeros(cfg.system.n(), cfg.system.a(),
                                                   cfg.system.a() + 5);
                for (long t = g.start; t <= g.end(); ++t)
                    for (std::size_t i = 0; i < 2 * cfg.system.n(); ++i)
                        g.at(t)(i, 0) = 1.0;
                const cplx z{0.0, 1.0};
                for (std::size_t r = 0; r < rep.schedule.size(); ++r) {
                    const RegularBC bc = induce_regular(cfg.system, s.sse,
                                                        rep.schedule[r]);
                    const DefectSplit ds =
                        resolvent_defect(cfg.system, s.sse, bc, z, g, cfg.tail_tol);
                    const DefectConstants dc =
                        defect_constants(cfg.system, s.sse, bc, z, cfg.tail_tol);
                    dcsv << r << "," << rep.schedule[r] << "," << fmt(ds.delta)
                         << "," << fmt(ds.delta1) << "," << fmt(ds.delta2) << ","
                         << fmt(dc.eta) << "\n";
                }
            }
        }
        if (cfg.emit_svg)
            write_convergence_svg(base + "convergence.svg", rep,
                                  rep.exact_mode ? "" : "inclusion-only");
        if (cfg.emit_json) {
            json summary;
            summary["schedule"] = rep.schedule;
            summary["exact_mode"] = rep.exact_mode;
            summary["shift"] = cfg.shift;
            summary["case"] = case_to_string(s.cls.type);
            summary["errors"] = rep.errors;
            summary["hs_partial"] = rep.hs_partial;
            json trs = json::array();
            for (const Trajectory& tr : rep.trajectories) {
                json jt;
                jt["k"] = tr.k;
                jt["verdict"] = verdict_to_string(tr.verdict);
                json vals = json::array();
                for (const auto& v : tr.values)
                    v ? vals.push_back(*v) : vals.push_back(nullptr);
                jt["values"] = std::move(vals);
                trs.push_back(std::move(jt));
            }
            summary["trajectories"] = std::move(trs);
            std::ofstream js(base + "summary.json");
            js << summary.dump(2) << "\n";
        }
        out << "wrote " << opt.out_dir << "\n";
        return kExitOk;
    });
}

int cmd_resolvent(const RunConfig& cfg, const CmdOptions& opt, std::ostream& out) {
    return guarded(out, [&]() -> int {
        if (!opt.z) {
            out << "error: resolvent needs --z\n";
            return kExitUsage;
        }
        const long b = opt.b ? *opt.b
                             : (cfg.schedule.empty() ? 30 : cfg.schedule.back());
        const RegularBC bc = resolve_bc(cfg, b);
        const std::size_t n = cfg.system.n();
        HamSequence g = HamSequence::zeros(n, cfg.system.a(), b + 1);
        if (cfg.source)
            for (long t = cfg.source->start;
                 t <= std::min(cfg.source->end(), b + 1L); ++t)
                g.at(t) = cfg.source->at(t);
        const HamSequence y = regular_resolvent(cfg.system, bc, *opt.z, g);
        out << "t";
        for (std::size_t i = 0; i < 2 * n; ++i)
            out << ",y" << i << "_re,y" << i << "_im";
        out << ",residual (defining relation)\n";
        for (long t = cfg.system.a(); t <= b + 1; ++t) {
            out << t;
            for (std::size_t i = 0; i < 2 * n; ++i)
                out << "," << fmt(y.at(t)(i, 0).real()) << ","
                    << fmt(y.at(t)(i, 0).imag());
            double res = 0.0;
            if (t <= b) {
                const CMat lhs = apply_L(cfg.system, y, t);
                const CMat rhs = cfg.system.weight(t) *
                                 ((*opt.z) * apply_R(y, t) - apply_R(g, t));
                res = fro_norm(lhs - rhs);
            }
            out << "," << fmt(res) << "\n";
        }
        return kExitOk;
    });
}

int run_command(const std::string& name, const RunConfig& cfg,
                const CmdOptions& opt, std::ostream& out) {
    if (name == "validate") return cmd_validate(cfg, out);
    if (name == "classify") return cmd_classify(cfg, out);
    if (name == "eigs") return cmd_eigs(cfg, opt, out);
    if (name == "approx") return cmd_approx(cfg, opt, out);
    if (name == "resolvent") return cmd_resolvent(cfg, opt, out);
    out << "error: unknown command '" << name << "'\n";
    return kExitUsage;
}

}  // namespace hamspec
