#include "curvestab/classify.hpp"

#include "curvestab/linalg.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace curvestab {

const char* to_string(LimitTag tag) {
    switch (tag) {
        case LimitTag::TO_ZERO: return "TO_ZERO";
        case LimitTag::TO_POSITIVE_CONSTANT: return "TO_POSITIVE_CONSTANT";
        case LimitTag::TO_INFINITY: return "TO_INFINITY";
        case LimitTag::BOUNDED_NONVANISHING: return "BOUNDED_NONVANISHING";
        case LimitTag::UNDETERMINED: return "UNDETERMINED";
    }
    return "?";
}

const char* to_string(StabilityTag tag) {
    switch (tag) {
        case StabilityTag::UNSTABLE: return "UNSTABLE";
        case StabilityTag::STABLE: return "STABLE";
        case StabilityTag::STABLE_NOT_ASYMPTOTIC: return "STABLE_NOT_ASYMPTOTIC";
        case StabilityTag::ASYMPTOTICALLY_STABLE: return "ASYMPTOTICALLY_STABLE";
        case StabilityTag::INCONCLUSIVE: return "INCONCLUSIVE";
    }
    return "?";
}

const char* to_string(VerdictBasis basis) {
    return basis == VerdictBasis::SPECTRAL_ORACLE ? "SPECTRAL_ORACLE" : "CURVATURE_THEOREM";
}

namespace {

std::string format_eigenvalue(const Complex& z) {
    std::ostringstream os;
    os << z.real();
    if (z.imag() != 0.0) os << (z.imag() > 0 ? "+" : "-") << std::abs(z.imag()) << "i";
    return os.str();
}

}  // namespace

StabilityVerdict spectral_stability(const Matrix& A) {
    StabilityVerdict v;
    v.basis = VerdictBasis::SPECTRAL_ORACLE;
    const Spectrum spec = eigenvalues(A);
    const double snap = snap_tolerance(A);
    const Eigen::Index n = A.rows();

    double max_re = -std::numeric_limits<double>::infinity();
    std::vector<Complex> axis;
    for (const Complex& z : spec.values) {
        double re = z.real();
        if (std::abs(re) <= snap) {
            if (re != 0.0) {
                std::ostringstream os;
                os << "eigenvalue " << format_eigenvalue(z) << " snapped to the imaginary axis (|Re| <= "
                   << snap << ")";
                v.evidence.push_back(os.str());
            }
            re = 0.0;
            axis.push_back(z);
        }
        max_re = std::max(max_re, re);
    }
    {
        std::ostringstream os;
        os << "eigenvalues:";
        for (const Complex& z : spec.values) os << " " << format_eigenvalue(z);
        v.evidence.insert(v.evidence.begin(), os.str());
    }

    if (max_re < 0.0) {
        v.tag = StabilityTag::ASYMPTOTICALLY_STABLE;
        return v;
    }
    if (max_re > 0.0) {
        v.tag = StabilityTag::UNSTABLE;
        v.evidence.push_back("an eigenvalue has positive real part");
        return v;
    }

    // Cluster the imaginary-axis eigenvalues and compare algebraic
    // multiplicity against the rank defect of A - lambda I.
    const double cluster_tol = 1e-7 * std::max(1.0, A.norm());
    std::vector<bool> used(axis.size(), false);
    bool simple = true;
    for (std::size_t i = 0; i < axis.size(); ++i) {
        if (used[i]) continue;
        int alg = 0;
        Complex sum(0, 0);
        for (std::size_t j = i; j < axis.size(); ++j) {
            if (!used[j] && std::abs(axis[j] - axis[i]) <= cluster_tol) {
                used[j] = true;
                ++alg;
                sum += axis[j];
            }
        }
        const Complex lambda(0.0, (sum / static_cast<double>(alg)).imag());
        ComplexMatrix shifted = A.cast<Complex>();
        shifted.diagonal().array() -= lambda;
        Eigen::JacobiSVD<ComplexMatrix> svd(shifted);
        const double rank_tol = 1e-9 * std::max(1.0, A.norm());
        int rank = 0;
        for (Eigen::Index k = 0; k < svd.singularValues().size(); ++k) {
            if (svd.singularValues()(k) > rank_tol) ++rank;
        }
        const int geo = static_cast<int>(n) - rank;
        std::ostringstream os;
        os << "imaginary-axis eigenvalue " << format_eigenvalue(lambda) << ": algebraic multiplicity "
           << alg << ", geometric multiplicity " << geo;
        v.evidence.push_back(os.str());
        if (geo < alg) simple = false;
    }
    v.tag = simple ? StabilityTag::STABLE_NOT_ASYMPTOTIC : StabilityTag::UNSTABLE;
    if (!simple) v.evidence.push_back("imaginary-axis eigenvalue with a nontrivial Jordan chain");
    return v;
}

StabilityVerdict spectral_stability(const JordanSpec& spec) {
    StabilityVerdict v;
    v.basis = VerdictBasis::SPECTRAL_ORACLE;
    double max_re = -std::numeric_limits<double>::infinity();
    bool axis_simple = true;
    for (const auto& blk : spec.blocks) {
        max_re = std::max(max_re, blk.real_part());
        if (blk.real_part() == 0.0 &&
            (blk.kind == BlockKind::RH || blk.kind == BlockKind::CH)) {
            axis_simple = false;
        }
    }
    {
        std::ostringstream os;
        os << "max real part " << max_re << " over " << spec.blocks.size() << " blocks";
        v.evidence.push_back(os.str());
    }
    if (max_re < 0.0) {
        v.tag = StabilityTag::ASYMPTOTICALLY_STABLE;
    } else if (max_re > 0.0) {
        v.tag = StabilityTag::UNSTABLE;
    } else if (axis_simple) {
        v.tag = StabilityTag::STABLE_NOT_ASYMPTOTIC;
        v.evidence.push_back("every imaginary-axis block is R1 or C2");
    } else {
        v.tag = StabilityTag::UNSTABLE;
        v.evidence.push_back("imaginary-axis RH or CH block present");
    }
    return v;
}

namespace {

// One-regressor least squares y ~ slope * x + intercept.
struct TrendFit {
    double slope = 0.0;
    double se = 0.0;   // standard error of the slope
    double rho = 0.0;  // rms residual
    double span = 0.0; // range of the regressor
};

TrendFit fit_trend(const std::vector<double>& xs, const std::vector<double>& ys) {
    const int n = static_cast<int>(xs.size());
    double sx = 0, sy = 0;
    for (int i = 0; i < n; ++i) {
        sx += xs[i];
        sy += ys[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0;
    for (int i = 0; i < n; ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    TrendFit fit;
    fit.slope = sxy / std::max(sxx, 1e-300);
    double ss = 0;
    for (int i = 0; i < n; ++i) {
        const double r = ys[i] - my - fit.slope * (xs[i] - mx);
        ss += r * r;
    }
    fit.rho = std::sqrt(ss / std::max(1, n - 2));
    fit.se = fit.rho / std::sqrt(std::max(sxx, 1e-300));
    const auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
    fit.span = *hi - *lo;
    return fit;
}

struct TailStats {
    int total = 0;
    int ok = 0;
    int zero = 0;
    int degenerate = 0;
    TrendFit exp_fit;  // ln kappa ~ alpha t
    TrendFit pow_fit;  // ln kappa ~ beta ln t
    double spread = 0.0;  // max - min of ln kappa on the tail
    double mean = 0.0;
    double min_log = 0.0;
};

std::optional<TailStats> tail_stats(const CurvatureTrace& trace, const ClassifyOptions& opt) {
    if (trace.times.size() < 2 || trace.values.empty()) return std::nullopt;
    const double T = trace.times.back();
    const double t0 = T * (1.0 - opt.tail_fraction);

    TailStats st;
    std::vector<double> ts, ys;
    for (std::size_t i = 0; i < trace.times.size(); ++i) {
        if (trace.times[i] < t0 || trace.values[i].empty()) continue;
        ++st.total;
        const LogKappa& k = trace.values[i].front();
        switch (k.flag) {
            case KappaFlag::Ok:
                ++st.ok;
                ts.push_back(trace.times[i]);
                ys.push_back(k.log_value);
                break;
            case KappaFlag::Zero: ++st.zero; break;
            case KappaFlag::Degenerate: ++st.degenerate; break;
        }
    }
    if (st.ok < 3) return st.total > 0 ? std::optional<TailStats>(st) : std::nullopt;

    // The joint basis {t, ln t, 1} is nearly collinear on [T/2, T], so a
    // single regression can trade alpha against beta and even flip a sign.
    // Fit the exponential and power models separately instead and let their
    // residuals decide which trend is real.
    std::vector<double> log_ts(ts.size());
    for (std::size_t i = 0; i < ts.size(); ++i) log_ts[i] = std::log(ts[i]);
    st.exp_fit = fit_trend(ts, ys);
    st.pow_fit = fit_trend(log_ts, ys);

    const auto [mn, mx] = std::minmax_element(ys.begin(), ys.end());
    st.spread = *mx - *mn;
    st.min_log = *mn;
    double mean = 0;
    for (double y : ys) mean += y;
    st.mean = mean / static_cast<double>(ys.size());
    return st;
}

double margin_confidence(double metric, double threshold, double se) {
    const double z = (std::abs(metric) - threshold) / std::max(se, 1e-15);
    if (z <= 0.0) return 0.0;
    return z / (z + 1.0);
}

}  // namespace

LimitClass classify_limit(const CurvatureTrace& trace, const ClassifyOptions& opt) {
    LimitClass out;
    const auto st = tail_stats(trace, opt);
    if (!st || st->total < opt.min_tail_samples) {
        out.tag = LimitTag::UNDETERMINED;
        out.confidence = 0.0;
        out.note = "trace too short for a tail classification";
        return out;
    }
    if (st->zero >= static_cast<int>(0.9 * st->total)) {
        out.tag = LimitTag::TO_ZERO;
        out.confidence = 1.0;
        out.exact = (st->zero == st->total);
        out.note = "first curvature vanishes on the tail";
        return out;
    }
    if (st->degenerate >= static_cast<int>(0.9 * st->total)) {
        out.tag = LimitTag::UNDETERMINED;
        out.confidence = 0.0;
        out.note = "trajectory degenerate (r' = 0) on the tail";
        return out;
    }
    if (st->ok < opt.min_tail_samples) {
        out.tag = LimitTag::UNDETERMINED;
        out.confidence = 0.0;
        out.note = "too few finite curvature samples on the tail";
        return out;
    }

    const double alpha = st->exp_fit.slope;
    const double beta = st->pow_fit.slope;
    std::ostringstream note;
    note << "tail fit: alpha=" << alpha << " beta=" << beta << " spread=" << st->spread;
    out.note = note.str();

    // A trend only counts when it explains the tail variation: the fitted
    // drift across the window must dominate the residual, so bounded
    // oscillation cannot fake a slope. Between the two models, the one with
    // the smaller residual describes the tail.
    const bool alpha_real = std::abs(alpha) * st->exp_fit.span >= 2.0 * st->exp_fit.rho;
    const bool beta_real = std::abs(beta) * st->pow_fit.span >= 2.0 * st->pow_fit.rho;
    const bool exp_preferred = st->exp_fit.rho <= st->pow_fit.rho;
    if (std::abs(alpha) > opt.alpha_min && alpha_real && exp_preferred) {
        out.tag = alpha < 0 ? LimitTag::TO_ZERO : LimitTag::TO_INFINITY;
        out.confidence = margin_confidence(alpha, opt.alpha_min, st->exp_fit.se);
        return out;
    }
    // Polynomial trend: ln kappa ~ beta ln t.
    if (std::abs(beta) > opt.beta_min && beta_real) {
        out.tag = beta < 0 ? LimitTag::TO_ZERO : LimitTag::TO_INFINITY;
        out.confidence = margin_confidence(beta, opt.beta_min, st->pow_fit.se);
        return out;
    }
    // Exponential trend that merely fits worse than the power model still
    // decides when both point the same way.
    if (std::abs(alpha) > opt.alpha_min && alpha_real) {
        out.tag = alpha < 0 ? LimitTag::TO_ZERO : LimitTag::TO_INFINITY;
        out.confidence = margin_confidence(alpha, opt.alpha_min, st->exp_fit.se);
        return out;
    }

    const double const_spread = std::log1p(opt.osc_tol);
    if (st->spread < const_spread) {
        out.tag = LimitTag::TO_POSITIVE_CONSTANT;
        out.value = std::exp(st->mean);
        out.confidence = std::clamp(1.0 - st->spread / const_spread, 0.0, 1.0);
        return out;
    }
    if (std::exp(st->min_log) > opt.kappa_floor) {
        out.tag = LimitTag::BOUNDED_NONVANISHING;
        const double decades = std::log10(std::exp(st->min_log) / opt.kappa_floor);
        out.confidence = std::clamp(0.5 + decades / 16.0, 0.0, 1.0);
        return out;
    }
    out.tag = LimitTag::UNDETERMINED;
    out.confidence = 0.2;
    out.note += "; oscillation reaches the zero floor";
    return out;
}

namespace {

LimitClass exact_zero(const std::string& note) {
    LimitClass out;
    out.tag = LimitTag::TO_ZERO;
    out.confidence = 1.0;
    out.exact = true;
    out.note = note;
    return out;
}

LimitClass decided(LimitTag tag, const std::string& note) {
    LimitClass out;
    out.tag = tag;
    out.confidence = 1.0;
    out.note = note;
    return out;
}

LimitClass predict_all_r1(const JordanSpec& spec, const std::optional<Vector>& r0) {
    const SpectrumSummary sum = spectrum_summary(spec);
    if (!sum.lambda_I) {
        return exact_zero("zero matrix: every trajectory is a constant point");
    }
    if (!sum.lambda_II) {
        return exact_zero("single nonzero eigenvalue: derivative vectors stay parallel");
    }
    const double li = *sum.lambda_I, lii = *sum.lambda_II;
    const double tol = 1e-9 * std::max({1.0, std::abs(li), std::abs(lii)});
    if (std::abs(2.0 * li - lii) <= tol) {
        LimitClass out = decided(LimitTag::TO_POSITIVE_CONSTANT,
                                 "diagonal case with 2*lambda_I = lambda_II");
        if (r0) {
            // Leading coefficient ratio of kappa^2 at the balanced exponents.
            double num = 0.0;
            double den = 0.0;
            std::vector<double> lam(spec.blocks.size());
            for (std::size_t i = 0; i < spec.blocks.size(); ++i) lam[i] = spec.blocks[i].lambda;
            for (std::size_t i = 0; i < lam.size(); ++i) {
                if (lam[i] == li) den += li * li * (*r0)(i) * (*r0)(i);
                for (std::size_t j = i + 1; j < lam.size(); ++j) {
                    const bool leading = (lam[i] == li && lam[j] == lii) ||
                                         (lam[i] == lii && lam[j] == li);
                    if (!leading) continue;
                    const double c = lam[i] * lam[j] * (lam[j] - lam[i]) * (*r0)(i) * (*r0)(j);
                    num += c * c;
                }
            }
            if (den > 0.0 && num > 0.0) out.value = std::sqrt(num / (den * den * den));
        }
        return out;
    }
    if (2.0 * li > lii) {
        return decided(LimitTag::TO_ZERO, "diagonal case with 2*lambda_I > lambda_II");
    }
    return decided(LimitTag::TO_INFINITY, "diagonal case with 2*lambda_I < lambda_II");
}

}  // namespace

LimitClass predict_limit_symbolic(const JordanSpec& spec, const std::optional<Vector>& r0) {
    if (spec.blocks.empty()) throw ParseError("jordan spec has no blocks");
    if (r0) require_vector(*r0, spec.dimension(), "predict_limit_symbolic r0");

    if (spec.all_r1()) return predict_all_r1(spec, r0);

    if (spec.blocks.size() == 1) {
        const JordanBlock& blk = spec.blocks.front();
        switch (blk.kind) {
            case BlockKind::RH:
                if (blk.lambda < 0.0) {
                    return decided(LimitTag::TO_INFINITY, "nilpotent chain with negative eigenvalue");
                }
                if (blk.lambda == 0.0 && blk.order == 2) {
                    return exact_zero("2x2 nilpotent block: first curvature vanishes identically");
                }
                return decided(LimitTag::TO_ZERO, "nilpotent chain with nonnegative eigenvalue");
            case BlockKind::C2: {
                if (blk.a > 0.0) return decided(LimitTag::TO_ZERO, "expanding spiral");
                if (blk.a < 0.0) return decided(LimitTag::TO_INFINITY, "contracting spiral");
                LimitClass out = decided(LimitTag::TO_POSITIVE_CONSTANT,
                                         "circular trajectory: curvature is 1/radius");
                if (r0) {
                    const double rad = r0->norm();
                    if (rad > 0.0) out.value = 1.0 / rad;
                }
                return out;
            }
            case BlockKind::CH:
                return blk.a < 0.0
                           ? decided(LimitTag::TO_INFINITY, "contracting chain of spirals")
                           : decided(LimitTag::TO_ZERO, "non-contracting chain of spirals");
            case BlockKind::R1:
                break;  // handled by the all-R1 branch
        }
    }

    const SpectrumSummary sum = spectrum_summary(spec);
    if (sum.M > 0.0) {
        return decided(LimitTag::TO_ZERO,
                       "growing mode dominates: denominator rate 6M exceeds numerator rate 4M");
    }
    if (sum.M == 0.0 && sum.has_imaginary_axis_RH_or_CH) {
        // The degree comparison chi < xi only bites when some axis chain has
        // p >= 3 (RH) or m >= 2 (CH). A lone p=2 shift chain contributes no
        // leading-power numerator terms on its own, so kappa still decays --
        // unless an axis rotation block coexists with it: then both leading
        // degrees are zero and kappa tends to a positive constant even though
        // the system is unstable. That boundary is reported as undecided.
        int axis_rh_p = 0;
        bool axis_ch = false, axis_c2 = false;
        for (const auto& blk : spec.blocks) {
            if (blk.kind == BlockKind::RH && blk.lambda == 0.0) {
                axis_rh_p = std::max(axis_rh_p, blk.order);
            }
            if (blk.kind == BlockKind::CH && blk.a == 0.0) axis_ch = true;
            if (blk.kind == BlockKind::C2 && blk.a == 0.0) axis_c2 = true;
        }
        if (axis_rh_p >= 3 || axis_ch) {
            return decided(LimitTag::TO_ZERO,
                           "imaginary-axis chain: denominator degree exceeds numerator degree");
        }
        if (!axis_c2) {
            return decided(LimitTag::TO_ZERO,
                           "order-2 shift chains alone: leading numerator terms vanish");
        }
        LimitClass out;
        out.tag = LimitTag::UNDETERMINED;
        out.confidence = 0.5;
        out.note =
            "axis shift chain of order 2 with an axis rotation: curvature approaches a positive "
            "constant and does not witness the instability";
        return out;
    }
    if (sum.invertible && sum.M == 0.0) {
        LimitClass out;
        out.tag = LimitTag::UNDETERMINED;
        out.confidence = 0.5;
        out.note =
            "curvature eventually bounded; limit is zero or a bounded non-vanishing oscillation";
        return out;
    }
    LimitClass out;
    out.tag = LimitTag::UNDETERMINED;
    out.confidence = 0.0;
    out.note = "block mixture outside the classified cases";
    return out;
}

StabilityVerdict theorem_verdict(bool invertible, const std::vector<LimitClass>& limits,
                                 AgreementPolicy policy) {
    if (limits.empty()) throw DimensionError("theorem verdict requires sampled initial values");
    int qualifying = 0, to_infinity = 0, to_zero = 0, undetermined = 0;
    for (const auto& l : limits) {
        switch (l.tag) {
            case LimitTag::TO_POSITIVE_CONSTANT:
            case LimitTag::BOUNDED_NONVANISHING: ++qualifying; break;
            case LimitTag::TO_INFINITY:
                ++qualifying;
                ++to_infinity;
                break;
            case LimitTag::TO_ZERO: ++to_zero; break;
            case LimitTag::UNDETERMINED: ++undetermined; break;
        }
    }
    const int n = static_cast<int>(limits.size());
    StabilityVerdict v;
    v.basis = VerdictBasis::CURVATURE_THEOREM;
    {
        std::ostringstream os;
        os << "samples=" << n << " non-vanishing=" << qualifying << " to_infinity=" << to_infinity
           << " to_zero=" << to_zero << " undetermined=" << undetermined
           << " invertible=" << (invertible ? "yes" : "no")
           << " policy=" << (policy == AgreementPolicy::All ? "all" : "majority");
        v.evidence.push_back(os.str());
    }
    const bool qualifies = policy == AgreementPolicy::All ? qualifying == n : 2 * qualifying > n;
    const bool all_infinity = policy == AgreementPolicy::All ? to_infinity == n : 2 * to_infinity > n;
    if (qualifies) {
        if (invertible && all_infinity) {
            v.tag = StabilityTag::ASYMPTOTICALLY_STABLE;
            v.evidence.push_back("curvature grows without bound and the matrix is invertible");
        } else {
            v.tag = StabilityTag::STABLE;
            v.evidence.push_back("curvature stays away from zero on the sampled initial values");
        }
        return v;
    }
    v.tag = StabilityTag::INCONCLUSIVE;
    v.evidence.push_back(to_zero == n ? "curvature vanishes in the limit; the criterion is silent"
                                      : "sampled limits disagree or are undetermined");
    return v;
}

StabilityVerdict theorem_verdict(const Matrix& A, const std::vector<Vector>& initial_values,
                                 const std::vector<LimitClass>& limits,
                                 const ClassifyOptions& options) {
    if (initial_values.size() != limits.size()) {
        throw DimensionError("theorem_verdict: one limit per initial value expected");
    }
    return theorem_verdict(is_invertible(A, options.det_tol_rel), limits, options.agreement);
}

Interval equivalence_bounds(const Matrix& P, double kappa_r, int order_i) {
    require_system_matrix(P);
    if (kappa_r < 0.0) throw DimensionError("equivalence_bounds: kappa must be nonnegative");
    if (order_i < 1) throw DimensionError("equivalence_bounds: curvature order must be >= 1");
    const SvdResult svd = singular_values(P);
    if (svd.rank < P.rows()) throw SingularMatrixError("equivalence transform is singular");
    const double d1 = svd.singular_values.front();
    const double dn = svd.singular_values.back();
    const double i = static_cast<double>(order_i);
    return {std::pow(dn, 2 * i) / std::pow(d1, 2 * i + 1) * kappa_r,
            std::pow(d1, 2 * i) / std::pow(dn, 2 * i + 1) * kappa_r};
}

bool curvature_blind_boundary(const JordanSpec& spec) {
    int axis_rh_p = 0;
    bool axis_ch = false, axis_c2 = false;
    double max_re = -std::numeric_limits<double>::infinity();
    for (const auto& blk : spec.blocks) {
        max_re = std::max(max_re, blk.real_part());
        if (blk.kind == BlockKind::RH && blk.lambda == 0.0) {
            axis_rh_p = std::max(axis_rh_p, blk.order);
        }
        if (blk.kind == BlockKind::CH && blk.a == 0.0) axis_ch = true;
        if (blk.kind == BlockKind::C2 && blk.a == 0.0) axis_c2 = true;
    }
    return max_re == 0.0 && axis_rh_p == 2 && axis_c2 && !axis_ch;
}

ExponentAnalysis exponent_analysis(const JordanSpec& spec) {
    const SpectrumSummary sum = spectrum_summary(spec);
    ExponentAnalysis out;
    if (sum.M_tilde) out.theta = 6.0 * *sum.M_tilde;
    out.eta_bound = 4.0 * sum.M;
    out.xi = sum.xi;

    if (sum.M == 0.0) {
        std::optional<int> chi;
        int rh_p = 0;
        int cm = 0;
        for (const auto& blk : spec.blocks) {
            if (blk.kind == BlockKind::RH && blk.lambda == 0.0) rh_p = std::max(rh_p, blk.order);
            if (blk.is_complex() && blk.a == 0.0) cm = std::max(cm, blk.order);
        }
        if (spec.blocks.size() == 1 && rh_p > 0) {
            // Pure nilpotent chain: the leading minors cancel one degree more
            // than the general bound allows.
            if (rh_p >= 3) chi = 4 * (rh_p - 3);
        } else {
            if (rh_p > 0) chi = 4 * (rh_p - 2);
            if (cm > 0) chi = std::max(chi.value_or(0), 4 * (cm - 1));
        }
        out.chi_bound = chi;
    }
    return out;
}

std::vector<Vector> sample_initial_values(int n, int count, std::uint64_t seed, double floor) {
    if (n < 1 || count < 1) throw DimensionError("sample_initial_values: need n >= 1, count >= 1");
    std::mt19937_64 rng(seed);
    // Explicit Box-Muller so results are reproducible across standard
    // libraries (std::normal_distribution is implementation-defined).
    auto uniform01 = [&rng]() { return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53; };
    auto gaussian = [&]() {
        const double u1 = uniform01();
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
    };

    std::vector<Vector> out;
    out.reserve(count);
    int attempts = 0;
    while (static_cast<int>(out.size()) < count) {
        if (++attempts > 100000) {
            throw CurvestabError("initial-value sampling: coordinate floor rejects everything");
        }
        Vector v(n);
        for (int i = 0; i < n; ++i) v(i) = gaussian();
        const double nrm = v.norm();
        if (nrm == 0.0) continue;
        v /= nrm;
        if (v.cwiseAbs().minCoeff() < floor) continue;
        out.push_back(std::move(v));
    }
    return out;
}

StabilityReport classify_system(const SystemInput& input, const ReportOptions& options) {
    StabilityReport report;
    report.samples = options.samples;
    report.seed = options.seed;

    const JordanSpec* spec = std::get_if<JordanSpec>(&input);
    const Matrix A = spec ? materialize(*spec) : std::get<Matrix>(input);
    require_system_matrix(A);
    const int n = static_cast<int>(A.rows());

    report.spectrum = spec ? spec_eigenvalues(*spec) : eigenvalues(A);
    report.spectral = spec ? spectral_stability(*spec) : spectral_stability(A);
    report.det = determinant(A);
    report.invertible = spec ? spec->invertible() : is_invertible(A, options.classify.det_tol_rel);
    if (spec) {
        report.symbolic = predict_limit_symbolic(*spec);
        report.exponents = exponent_analysis(*spec);
    }

    if (n < 2) {
        report.verdict.tag = StabilityTag::INCONCLUSIVE;
        report.verdict.basis = VerdictBasis::CURVATURE_THEOREM;
        report.verdict.evidence.push_back("first curvature undefined in dimension 1");
        return report;
    }

    report.initial_values =
        sample_initial_values(n, options.samples, options.seed, options.classify.coordinate_floor);
    const std::vector<double> grid = uniform_grid(options.t_max, options.step);
    TraceOptions trace_opts = options.trace;
    trace_opts.order = std::clamp(trace_opts.order, 1, n - 1);
    for (const Vector& r0 : report.initial_values) {
        const CurvatureTrace trace = spec ? sample_trace(*spec, r0, grid, trace_opts)
                                          : sample_trace(A, r0, grid, trace_opts);
        report.limits.push_back(classify_limit(trace, options.classify));
    }
    report.verdict = theorem_verdict(report.invertible, report.limits, options.classify.agreement);
    if (spec && curvature_blind_boundary(*spec) &&
        (report.verdict.tag == StabilityTag::STABLE ||
         report.verdict.tag == StabilityTag::ASYMPTOTICALLY_STABLE)) {
        report.verdict.evidence.push_back(
            "boundary structure: an order-2 axis shift chain with an axis rotation keeps the "
            "curvature positive; the spectral oracle is authoritative here");
    }
    return report;
}

}  // namespace curvestab
