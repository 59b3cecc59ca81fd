#pragma once

#include "curvestab/jordan.hpp"
#include "curvestab/types.hpp"

#include <optional>
#include <string>

namespace curvestab {

/// Derivative vectors r'(t), ..., r^{(m)}(t) at one time point, stored with a
/// shared factor split off: vectors[k-1] = r^{(k)}(t) / exp(log_scale).
struct DerivativeStack {
    double t = 0.0;
    std::vector<Vector> vectors;
    double log_scale = 0.0;
    bool degenerate = false;  // r'(t) = 0, curvature undefined
};

/// log V_k for k = 0..m (V_0 = 1). Entries from degenerate_from onward are
/// -infinity; degeneracy is data here, not an error.
struct VolumeVector {
    std::vector<double> log_V;
    std::optional<int> degenerate_from;
};

enum class KappaFlag { Ok, Zero, Degenerate };

struct LogKappa {
    KappaFlag flag = KappaFlag::Degenerate;
    double log_value = 0.0;  // meaningful only when flag == Ok

    static LogKappa ok(double lv) { return {KappaFlag::Ok, lv}; }
    static LogKappa zero() { return {KappaFlag::Zero, 0.0}; }
    static LogKappa degenerate() { return {KappaFlag::Degenerate, 0.0}; }
};

struct CurvatureTrace {
    std::vector<double> times;
    std::vector<std::vector<LogKappa>> values;  // [time][i-1] = kappa_i
    int order = 1;
    std::string truncation;  // non-empty if the trace stopped early

    [[nodiscard]] std::size_t size() const { return times.size(); }
};

enum class TraceEvaluator {
    Auto,         // analytic for specs; modal when reliable, else propagation
    Propagation,  // expm steps + renormalized state
    Modal,        // eigendecomposition, exact log-domain volumes
    Analytic,     // per-block closed forms (JordanSpec input only)
};

struct TraceOptions {
    int order = 1;
    double pivot_tol = 1e-12;
    TraceEvaluator evaluator = TraceEvaluator::Auto;
};

/// vectors[k-1] = A^k state, rescaled by one common factor so the largest
/// entry is near 1; log_scale_in carries the scale already accumulated in
/// `state` by the caller.
DerivativeStack derivative_stack(const Matrix& A, const Vector& state, double t, int m,
                                 double log_scale_in = 0.0);

/// V_k through the Gram determinant (LDL^T pivots in log space). Equals the
/// Cauchy-Binet sum of squared k x k minors; the minor sum stays around as a
/// test oracle only.
VolumeVector gram_volumes(const DerivativeStack& stack, double pivot_tol = 1e-12);

/// kappa_i for i = 1..m-1 from the stack's volumes, with the stored scale
/// factor folded back in (kappa has homogeneity degree -1 in the curve).
/// Throws DegenerateTrajectoryError when V_1 = 0.
std::vector<LogKappa> curvatures(const DerivativeStack& stack, double pivot_tol = 1e-12);

/// Shared marker logic: log_V has m+1 entries (possibly -inf); kappa_i is
/// finite while V_{i+1} > 0, exactly zero at the first vanishing volume, and
/// undefined past it.
std::vector<LogKappa> kappas_from_log_volumes(const std::vector<double>& log_V, int order,
                                              double log_scale);

std::vector<double> uniform_grid(double t_max, double step);

CurvatureTrace sample_trace(const Matrix& A, const Vector& r0, const std::vector<double>& grid,
                            const TraceOptions& options = {});
CurvatureTrace sample_trace(const JordanSpec& spec, const Vector& r0,
                            const std::vector<double>& grid, const TraceOptions& options = {});

}  // namespace curvestab
