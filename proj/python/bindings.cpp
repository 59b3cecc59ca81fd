#include "curvestab/classify.hpp"
#include "curvestab/curvature.hpp"
#include "curvestab/io.hpp"
#include "curvestab/jordan.hpp"
#include "curvestab/linalg.hpp"

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <limits>

namespace py = pybind11;
using namespace curvestab;

namespace {

const char* kind_name(BlockKind k) {
    switch (k) {
        case BlockKind::R1: return "R1";
        case BlockKind::RH: return "RH";
        case BlockKind::C2: return "C2";
        case BlockKind::CH: return "CH";
    }
    return "?";
}

// Markers use the CSV convention: zero -> -inf, undefined -> nan.
Eigen::MatrixXd trace_matrix(const CurvatureTrace& trace) {
    Eigen::MatrixXd out(trace.times.size(), trace.order);
    for (std::size_t i = 0; i < trace.values.size(); ++i) {
        for (int j = 0; j < trace.order; ++j) {
            const LogKappa& k = trace.values[i][j];
            switch (k.flag) {
                case KappaFlag::Ok: out(i, j) = k.log_value; break;
                case KappaFlag::Zero: out(i, j) = -std::numeric_limits<double>::infinity(); break;
                case KappaFlag::Degenerate:
                    out(i, j) = std::numeric_limits<double>::quiet_NaN();
                    break;
            }
        }
    }
    return out;
}

CurvatureTrace make_trace(const std::vector<double>& times, const Eigen::MatrixXd& log_kappa) {
    CurvatureTrace t;
    t.times = times;
    t.order = static_cast<int>(log_kappa.cols());
    for (Eigen::Index i = 0; i < log_kappa.rows(); ++i) {
        std::vector<LogKappa> row;
        for (Eigen::Index j = 0; j < log_kappa.cols(); ++j) {
            const double v = log_kappa(i, j);
            if (std::isnan(v)) {
                row.push_back(LogKappa::degenerate());
            } else if (std::isinf(v) && v < 0) {
                row.push_back(LogKappa::zero());
            } else {
                row.push_back(LogKappa::ok(v));
            }
        }
        t.values.push_back(std::move(row));
    }
    return t;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Curvature-based stability analysis for LTI systems";

    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception<DimensionError>(m, "DimensionError", PyExc_ValueError);
    py::register_exception<DegenerateTrajectoryError>(m, "DegenerateTrajectoryError",
                                                      PyExc_ArithmeticError);
    py::register_exception<SingularMatrixError>(m, "SingularMatrixError", PyExc_ArithmeticError);

    py::class_<JordanBlock>(m, "JordanBlock")
        .def_static("r1", &JordanBlock::r1, py::arg("lam"))
        .def_static("rh", &JordanBlock::rh, py::arg("lam"), py::arg("p"))
        .def_static("c2", &JordanBlock::c2, py::arg("a"), py::arg("b"))
        .def_static("ch", &JordanBlock::ch, py::arg("a"), py::arg("b"), py::arg("m"))
        .def_property_readonly("kind", [](const JordanBlock& b) { return kind_name(b.kind); })
        .def_readonly("lam", &JordanBlock::lambda)
        .def_readonly("a", &JordanBlock::a)
        .def_readonly("b", &JordanBlock::b)
        .def_readonly("order", &JordanBlock::order)
        .def_property_readonly("dimension", &JordanBlock::dimension)
        .def("__repr__", [](const JordanBlock& b) {
            std::ostringstream os;
            os << "JordanBlock(" << kind_name(b.kind);
            if (b.is_complex()) {
                os << ", a=" << b.a << ", b=" << b.b;
            } else {
                os << ", lam=" << b.lambda;
            }
            if (b.kind == BlockKind::RH || b.kind == BlockKind::CH) os << ", order=" << b.order;
            os << ")";
            return os.str();
        });

    py::class_<JordanSpec>(m, "JordanSpec")
        .def(py::init([](std::vector<JordanBlock> blocks) {
                 JordanSpec s;
                 s.blocks = std::move(blocks);
                 if (s.blocks.empty()) throw ParseError("jordan spec has no blocks");
                 return s;
             }),
             py::arg("blocks"))
        .def_readonly("blocks", &JordanSpec::blocks)
        .def_property_readonly("dimension", &JordanSpec::dimension)
        .def_property_readonly("invertible", &JordanSpec::invertible);

    py::class_<SpectrumSummary>(m, "SpectrumSummary")
        .def_readonly("M", &SpectrumSummary::M)
        .def_readonly("M_tilde", &SpectrumSummary::M_tilde)
        .def_readonly("lambda_I", &SpectrumSummary::lambda_I)
        .def_readonly("lambda_II", &SpectrumSummary::lambda_II)
        .def_readonly("xi", &SpectrumSummary::xi)
        .def_readonly("has_imaginary_axis_RH_or_CH",
                      &SpectrumSummary::has_imaginary_axis_RH_or_CH)
        .def_readonly("invertible", &SpectrumSummary::invertible);

    py::class_<LimitClass>(m, "LimitClass")
        .def_property_readonly("tag", [](const LimitClass& l) { return to_string(l.tag); })
        .def_readonly("value", &LimitClass::value)
        .def_readonly("confidence", &LimitClass::confidence)
        .def_readonly("exact", &LimitClass::exact)
        .def_readonly("note", &LimitClass::note)
        .def("__repr__", [](const LimitClass& l) {
            std::ostringstream os;
            os << "LimitClass(" << to_string(l.tag) << ", confidence=" << l.confidence << ")";
            return os.str();
        });

    py::class_<StabilityVerdict>(m, "StabilityVerdict")
        .def_property_readonly("tag", [](const StabilityVerdict& v) { return to_string(v.tag); })
        .def_property_readonly("basis",
                               [](const StabilityVerdict& v) { return to_string(v.basis); })
        .def_readonly("evidence", &StabilityVerdict::evidence)
        .def("__repr__", [](const StabilityVerdict& v) {
            std::ostringstream os;
            os << "StabilityVerdict(" << to_string(v.tag) << ")";
            return os.str();
        });

    py::class_<CurvatureTrace>(m, "Trace")
        .def_property_readonly("times",
                               [](const CurvatureTrace& t) { return t.times; })
        .def_property_readonly("log_kappa", &trace_matrix)
        .def_property_readonly("order", [](const CurvatureTrace& t) { return t.order; })
        .def("__len__", [](const CurvatureTrace& t) { return t.times.size(); });

    m.def("eigenvalues", [](const Matrix& A) {
        const Spectrum s = eigenvalues(A);
        return s.values;
    });
    m.def("singular_values", [](const Matrix& P) {
        const SvdResult r = singular_values(P);
        return py::make_tuple(r.singular_values, r.rank);
    });
    m.def("expm", &expm, py::arg("A"), py::arg("t") = 1.0);
    m.def("apply_power", &apply_power, py::arg("A"), py::arg("k"), py::arg("v"));
    m.def("materialize", &materialize);
    m.def("block_exponential", &block_exponential, py::arg("block"), py::arg("t"));
    m.def("closed_form_trajectory", &closed_form_trajectory, py::arg("spec"), py::arg("r0"),
          py::arg("t"));
    m.def("spectrum_summary", &spectrum_summary);

    m.def("spectral_stability", py::overload_cast<const Matrix&>(&spectral_stability));
    m.def("spectral_stability", py::overload_cast<const JordanSpec&>(&spectral_stability));
    m.def("predict_limit_symbolic", &predict_limit_symbolic, py::arg("spec"),
          py::arg("r0") = std::nullopt);
    m.def(
        "equivalence_bounds",
        [](const Matrix& P, double kappa_r, int i) {
            const Interval iv = equivalence_bounds(P, kappa_r, i);
            return py::make_tuple(iv.lo, iv.hi);
        },
        py::arg("P"), py::arg("kappa_r"), py::arg("i") = 1);
    m.def("sample_initial_values", &sample_initial_values, py::arg("n"), py::arg("count"),
          py::arg("seed"), py::arg("floor") = 1e-6);

    auto trace_opts = [](int order) {
        TraceOptions o;
        o.order = order;
        return o;
    };
    m.def(
        "sample_trace",
        [trace_opts](const Matrix& A, const Vector& r0, double t_max, double step, int order) {
            return sample_trace(A, r0, uniform_grid(t_max, step), trace_opts(order));
        },
        py::arg("A"), py::arg("r0"), py::arg("t_max") = 50.0, py::arg("step") = 0.05,
        py::arg("order") = 1);
    m.def(
        "sample_trace",
        [trace_opts](const JordanSpec& spec, const Vector& r0, double t_max, double step,
                     int order) {
            return sample_trace(spec, r0, uniform_grid(t_max, step), trace_opts(order));
        },
        py::arg("spec"), py::arg("r0"), py::arg("t_max") = 50.0, py::arg("step") = 0.05,
        py::arg("order") = 1);

    m.def("classify_limit",
          [](const CurvatureTrace& t) { return classify_limit(t, ClassifyOptions{}); });
    m.def("classify_limit", [](const std::vector<double>& times, const Eigen::MatrixXd& log_kappa) {
        return classify_limit(make_trace(times, log_kappa), ClassifyOptions{});
    });

    m.def(
        "parse_system",
        [](const std::string& text) -> py::object {
            const SystemInput in = parse_system_input(text);
            if (std::holds_alternative<JordanSpec>(in)) return py::cast(std::get<JordanSpec>(in));
            return py::cast(std::get<Matrix>(in));
        },
        py::arg("text"));

    m.def(
        "classify_report_json",
        [](const std::string& text, int samples, std::uint64_t seed, double t_max, double step) {
            ReportOptions opts;
            opts.samples = samples;
            opts.seed = seed;
            opts.t_max = t_max;
            opts.step = step;
            return report_to_json(classify_system(parse_system_input(text), opts));
        },
        py::arg("text"), py::arg("samples") = 10, py::arg("seed") = 42, py::arg("t_max") = 50.0,
        py::arg("step") = 0.05);
}
