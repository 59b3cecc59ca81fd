#pragma once

#include "curvestab/curvature.hpp"
#include "curvestab/jordan.hpp"
#include "curvestab/types.hpp"

#include <cstdint>
#include <optional>
#include <variant>

namespace curvestab {

enum class LimitTag {
    TO_ZERO,
    TO_POSITIVE_CONSTANT,
    TO_INFINITY,
    BOUNDED_NONVANISHING,
    UNDETERMINED,
};

struct LimitClass {
    LimitTag tag = LimitTag::UNDETERMINED;
    std::optional<double> value;  // the constant, when TO_POSITIVE_CONSTANT and computable
    double confidence = 0.0;
    bool exact = false;  // identically-zero curvature established symbolically
    std::string note;
};

enum class StabilityTag {
    UNSTABLE,
    STABLE,  // stable, possibly asymptotically (what clause 1 can assert)
    STABLE_NOT_ASYMPTOTIC,
    ASYMPTOTICALLY_STABLE,
    INCONCLUSIVE,
};

enum class VerdictBasis { SPECTRAL_ORACLE, CURVATURE_THEOREM };

struct StabilityVerdict {
    StabilityTag tag = StabilityTag::INCONCLUSIVE;
    VerdictBasis basis = VerdictBasis::SPECTRAL_ORACLE;
    std::vector<std::string> evidence;
};

/// Leading exponential rates and polynomial degrees of kappa^2.
/// theta = 6 M~ exactly (absent only when every block is R1 with lambda = 0);
/// eta_bound = 4M; chi_bound is present only when M = 0 and some block sits
/// on the imaginary axis.
struct ExponentAnalysis {
    std::optional<double> theta;
    double eta_bound = 0.0;
    std::optional<int> chi_bound;
    int xi = 0;
};

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

enum class AgreementPolicy { All, Majority };

struct ClassifyOptions {
    double alpha_min = 1e-3;   // log-slope deadband per unit time
    double beta_min = 0.25;    // deadband on the ln t coefficient
    double osc_tol = 0.05;     // relative tail oscillation allowed for a constant
    double kappa_floor = 1e-8; // "bounded away from zero" floor
    double tail_fraction = 0.5;
    int min_tail_samples = 100;
    AgreementPolicy agreement = AgreementPolicy::All;
    double coordinate_floor = 1e-6;
    double det_tol_rel = 1e-9;
};

/// Classical eigenvalue criterion. For arbitrary matrices the
/// simple-elementary-factor clause is decided by comparing rank(A - lambda I)
/// against the eigenvalue's multiplicity at snap tolerance; for JordanSpec it
/// is read off the block kinds exactly.
StabilityVerdict spectral_stability(const Matrix& A);
StabilityVerdict spectral_stability(const JordanSpec& spec);

/// Numerical limit decision for the first curvature of a trace: fits
/// ln kappa ~ alpha t + beta ln t + gamma on the tail window and applies the
/// deadbands in ClassifyOptions.
LimitClass classify_limit(const CurvatureTrace& trace, const ClassifyOptions& options = {});

/// The paper-determined limit for the covered block structures, assuming a
/// generic initial value (all coordinates nonzero). When a concrete r0 is
/// supplied, the constant C is evaluated for the convergent cases.
LimitClass predict_limit_symbolic(const JordanSpec& spec,
                                  const std::optional<Vector>& r0 = std::nullopt);

/// Clause application: qualifying limits (constant / infinity / bounded
/// nonvanishing) on the sampled initial values give STABLE; with
/// invertibility and TO_INFINITY everywhere, ASYMPTOTICALLY_STABLE.
/// Never returns UNSTABLE; the theorem only gives sufficient conditions.
StabilityVerdict theorem_verdict(bool invertible, const std::vector<LimitClass>& limits,
                                 AgreementPolicy policy = AgreementPolicy::All);
StabilityVerdict theorem_verdict(const Matrix& A, const std::vector<Vector>& initial_values,
                                 const std::vector<LimitClass>& limits,
                                 const ClassifyOptions& options = {});

/// Singular-value sandwich on kappa under the equivalence transform v = P r:
/// [delta_n^{2i}/delta_1^{2i+1}, delta_1^{2i}/delta_n^{2i+1}] * kappa_r.
Interval equivalence_bounds(const Matrix& P, double kappa_r, int order_i);

ExponentAnalysis exponent_analysis(const JordanSpec& spec);

/// True for the boundary structure where an order-2 shift chain at eigenvalue
/// zero coexists with a rotation block on the imaginary axis (and no higher
/// axis chain): the first curvature then approaches a positive constant even
/// though the zero solution is unstable, so curvature-based verdicts cannot
/// witness the instability.
bool curvature_blind_boundary(const JordanSpec& spec);

/// Initial values uniform on the unit sphere with every coordinate at least
/// `floor` in magnitude (the sampled surrogate for the generic set).
/// Deterministic for a given seed.
std::vector<Vector> sample_initial_values(int n, int count, std::uint64_t seed,
                                          double floor = 1e-6);

using SystemInput = std::variant<Matrix, JordanSpec>;

struct ReportOptions {
    int samples = 10;
    std::uint64_t seed = 42;
    double t_max = 50.0;
    double step = 0.05;
    ClassifyOptions classify;
    TraceOptions trace;
};

/// Everything cmd_classify reports: oracle, symbolic prediction when the
/// input is a spec, per-sample numeric limits, and the theorem verdict.
struct StabilityReport {
    Spectrum spectrum;
    StabilityVerdict spectral;
    std::optional<LimitClass> symbolic;
    std::vector<Vector> initial_values;
    std::vector<LimitClass> limits;
    StabilityVerdict verdict;
    std::optional<ExponentAnalysis> exponents;
    double det = 0.0;
    bool invertible = false;
    int samples = 0;
    std::uint64_t seed = 0;
};

StabilityReport classify_system(const SystemInput& input, const ReportOptions& options = {});

const char* to_string(LimitTag tag);
const char* to_string(StabilityTag tag);
const char* to_string(VerdictBasis basis);

}  // namespace curvestab
