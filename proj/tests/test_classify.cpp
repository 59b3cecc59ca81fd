#include "curvestab/classify.hpp"

#include "curvestab/linalg.hpp"
#include "test_helpers.hpp"

#include <doctest.h>

#include <cmath>
#include <functional>

using namespace curvestab;
using namespace testutil;

namespace {

CurvatureTrace synthetic_trace(const std::function<double(double)>& log_kappa, double t_max = 60.0,
                               double step = 0.05) {
    CurvatureTrace trace;
    trace.order = 1;
    for (double t = step; t <= t_max + step / 2; t += step) {
        trace.times.push_back(t);
        trace.values.push_back({LogKappa::ok(log_kappa(t))});
    }
    return trace;
}

bool oracle_stable(StabilityTag tag) {
    return tag == StabilityTag::STABLE_NOT_ASYMPTOTIC ||
           tag == StabilityTag::ASYMPTOTICALLY_STABLE;
}

}  // namespace

TEST_CASE("spectral_stability: worked examples") {
    CHECK(spectral_stability(example1_matrix()).tag == StabilityTag::STABLE_NOT_ASYMPTOTIC);
    CHECK(spectral_stability(example2_matrix()).tag == StabilityTag::ASYMPTOTICALLY_STABLE);

    // nilpotent chain at zero: stable spectrum, non-simple elementary factor
    JordanSpec shift{{JordanBlock::rh(0.0, 2)}};
    CHECK(spectral_stability(shift).tag == StabilityTag::UNSTABLE);
    CHECK(spectral_stability(materialize(shift)).tag == StabilityTag::UNSTABLE);

    // repeated zero eigenvalue in separate 1x1 blocks is fine
    CHECK(spectral_stability(Matrix(Matrix::Zero(2, 2))).tag ==
          StabilityTag::STABLE_NOT_ASYMPTOTIC);

    Matrix up = Matrix::Zero(2, 2);
    up.diagonal() << 1, 2;
    CHECK(spectral_stability(up).tag == StabilityTag::UNSTABLE);

    JordanSpec center{{JordanBlock::c2(0.0, 3.0), JordanBlock::r1(-1.0)}};
    CHECK(spectral_stability(center).tag == StabilityTag::STABLE_NOT_ASYMPTOTIC);
    CHECK(spectral_stability(materialize(center)).tag == StabilityTag::STABLE_NOT_ASYMPTOTIC);

    JordanSpec ch_axis{{JordanBlock::ch(0.0, 1.0, 2)}};
    CHECK(spectral_stability(ch_axis).tag == StabilityTag::UNSTABLE);
    CHECK(spectral_stability(materialize(ch_axis)).tag == StabilityTag::UNSTABLE);
}

TEST_CASE("classify_limit: synthetic tails") {
    const LimitClass dec = classify_limit(synthetic_trace([](double t) { return -t; }));
    CHECK(dec.tag == LimitTag::TO_ZERO);
    CHECK(dec.confidence > 0.9);

    const LimitClass grow =
        classify_limit(synthetic_trace([](double t) { return 2 * t - std::log(t); }));
    CHECK(grow.tag == LimitTag::TO_INFINITY);
    CHECK(grow.confidence > 0.9);

    const LimitClass flat = classify_limit(
        synthetic_trace([](double t) { return std::log(0.3) + 1e-3 * std::sin(t); }));
    CHECK(flat.tag == LimitTag::TO_POSITIVE_CONSTANT);
    REQUIRE(flat.value.has_value());
    CHECK(*flat.value == doctest::Approx(0.3).epsilon(1e-2));
    CHECK(flat.confidence > 0.9);

    const LimitClass osc = classify_limit(
        synthetic_trace([](double t) { return std::log(2.0 + std::sin(3.0 * t)); }));
    CHECK(osc.tag == LimitTag::BOUNDED_NONVANISHING);

    const LimitClass poly =
        classify_limit(synthetic_trace([](double t) { return -2.0 * std::log(t); }));
    CHECK(poly.tag == LimitTag::TO_ZERO);

    // too short
    const LimitClass brief = classify_limit(synthetic_trace([](double) { return 0.0; }, 2.0, 0.5));
    CHECK(brief.tag == LimitTag::UNDETERMINED);
    CHECK(brief.confidence == 0.0);
}

TEST_CASE("classify_limit: exact zero and degenerate tails") {
    CurvatureTrace zero;
    zero.order = 1;
    for (double t = 0; t <= 60; t += 0.05) {
        zero.times.push_back(t);
        zero.values.push_back({LogKappa::zero()});
    }
    const LimitClass z = classify_limit(zero);
    CHECK(z.tag == LimitTag::TO_ZERO);
    CHECK(z.exact);
    CHECK(z.confidence == 1.0);

    CurvatureTrace dead;
    dead.order = 1;
    for (double t = 0; t <= 60; t += 0.05) {
        dead.times.push_back(t);
        dead.values.push_back({LogKappa::degenerate()});
    }
    const LimitClass d = classify_limit(dead);
    CHECK(d.tag == LimitTag::UNDETERMINED);
    CHECK(d.confidence == 0.0);
}

TEST_CASE("classify_limit: worked 4x4 example converges to the known constant") {
    const Matrix A = example1_matrix();
    Vector r0(4);
    r0 << 1, 1, 1, 2;
    const auto trace = sample_trace(A, r0, uniform_grid(50.0, 0.05));
    const LimitClass l = classify_limit(trace);
    CHECK(l.tag == LimitTag::TO_POSITIVE_CONSTANT);
    REQUIRE(l.value.has_value());
    const double expected = example1_limit(r0);
    CHECK(std::abs(*l.value - expected) / expected < 0.02);
    CHECK(l.confidence >= 0.9);
}

TEST_CASE("predict_limit_symbolic: diagonal trichotomy") {
    JordanSpec inf{{JordanBlock::r1(-5), JordanBlock::r1(-6)}};
    CHECK(predict_limit_symbolic(inf).tag == LimitTag::TO_INFINITY);

    JordanSpec zero{{JordanBlock::r1(1), JordanBlock::r1(2)}};
    CHECK(predict_limit_symbolic(zero).tag == LimitTag::TO_ZERO);

    JordanSpec constant{{JordanBlock::r1(-3), JordanBlock::r1(-6)}};
    Vector r0(2);
    r0 << 0.8, -0.6;
    const LimitClass c = predict_limit_symbolic(constant, r0);
    CHECK(c.tag == LimitTag::TO_POSITIVE_CONSTANT);
    REQUIRE(c.value.has_value());

    // cross-check the predicted constant against the numeric tail
    const auto trace = sample_trace(constant, r0, uniform_grid(60.0, 0.05));
    const LimitClass numeric = classify_limit(trace);
    CHECK(numeric.tag == LimitTag::TO_POSITIVE_CONSTANT);
    CHECK(*numeric.value == doctest::Approx(*c.value).epsilon(1e-6));

    // identically-zero cases
    CHECK(predict_limit_symbolic({{JordanBlock::r1(0), JordanBlock::r1(0)}}).exact);
    const LimitClass only_one =
        predict_limit_symbolic({{JordanBlock::r1(-4), JordanBlock::r1(0)}});
    CHECK(only_one.tag == LimitTag::TO_ZERO);
    CHECK(only_one.exact);
}

TEST_CASE("predict_limit_symbolic: single blocks") {
    CHECK(predict_limit_symbolic({{JordanBlock::rh(-1.0, 3)}}).tag == LimitTag::TO_INFINITY);
    CHECK(predict_limit_symbolic({{JordanBlock::rh(0.5, 3)}}).tag == LimitTag::TO_ZERO);
    CHECK(predict_limit_symbolic({{JordanBlock::rh(0.0, 3)}}).tag == LimitTag::TO_ZERO);
    CHECK(predict_limit_symbolic({{JordanBlock::rh(0.0, 2)}}).exact);

    CHECK(predict_limit_symbolic({{JordanBlock::c2(1.0, 1.0)}}).tag == LimitTag::TO_ZERO);
    CHECK(predict_limit_symbolic({{JordanBlock::c2(-1.0, 1.0)}}).tag == LimitTag::TO_INFINITY);
    Vector r0(2);
    r0 << 3, 4;
    const LimitClass circle = predict_limit_symbolic({{JordanBlock::c2(0.0, 2.0)}}, r0);
    CHECK(circle.tag == LimitTag::TO_POSITIVE_CONSTANT);
    CHECK(*circle.value == doctest::Approx(1.0 / 5.0));

    CHECK(predict_limit_symbolic({{JordanBlock::ch(-1.0, 2.0, 2)}}).tag == LimitTag::TO_INFINITY);
    CHECK(predict_limit_symbolic({{JordanBlock::ch(0.0, 2.0, 2)}}).tag == LimitTag::TO_ZERO);
    CHECK(predict_limit_symbolic({{JordanBlock::ch(0.7, 2.0, 2)}}).tag == LimitTag::TO_ZERO);
}

TEST_CASE("predict_limit_symbolic: mixed-spectrum rules") {
    // positive growth rate present
    JordanSpec growing{{JordanBlock::r1(1.0), JordanBlock::c2(-1.0, 1.0)}};
    CHECK(predict_limit_symbolic(growing).tag == LimitTag::TO_ZERO);

    // imaginary-axis chain forces decay
    JordanSpec axis_chain{{JordanBlock::ch(0.0, 1.0, 2), JordanBlock::r1(-1.0)}};
    CHECK(predict_limit_symbolic(axis_chain).tag == LimitTag::TO_ZERO);
    JordanSpec axis_rh{{JordanBlock::rh(0.0, 3), JordanBlock::c2(-0.5, 1.0)}};
    CHECK(predict_limit_symbolic(axis_rh).tag == LimitTag::TO_ZERO);

    // invertible with a center: bounded, composite outcome
    JordanSpec bounded{{JordanBlock::c2(0.0, 1.0), JordanBlock::c2(-1.0, 2.0)}};
    const LimitClass b = predict_limit_symbolic(bounded);
    CHECK(b.tag == LimitTag::UNDETERMINED);
    CHECK(b.note.find("bounded") != std::string::npos);

    // not covered: mixed strictly-negative spectrum
    JordanSpec mixed{{JordanBlock::ch(-2.0, 4.0, 2), JordanBlock::r1(-2.0)}};
    CHECK(predict_limit_symbolic(mixed).tag == LimitTag::UNDETERMINED);

    // not covered: singular with a center but no axis chain
    JordanSpec singular{{JordanBlock::r1(0.0), JordanBlock::c2(-1.0, 1.0)}};
    CHECK(predict_limit_symbolic(singular).tag == LimitTag::UNDETERMINED);
}

TEST_CASE("theorem_verdict: clause application") {
    auto limits = [](std::initializer_list<LimitTag> tags) {
        std::vector<LimitClass> out;
        for (LimitTag t : tags) {
            LimitClass l;
            l.tag = t;
            l.confidence = 1.0;
            out.push_back(l);
        }
        return out;
    };

    CHECK(theorem_verdict(true, limits({LimitTag::TO_INFINITY, LimitTag::TO_INFINITY})).tag ==
          StabilityTag::ASYMPTOTICALLY_STABLE);
    CHECK(theorem_verdict(false, limits({LimitTag::TO_INFINITY, LimitTag::TO_INFINITY})).tag ==
          StabilityTag::STABLE);
    CHECK(theorem_verdict(true, limits({LimitTag::TO_POSITIVE_CONSTANT,
                                        LimitTag::BOUNDED_NONVANISHING}))
              .tag == StabilityTag::STABLE);
    CHECK(theorem_verdict(true, limits({LimitTag::TO_ZERO, LimitTag::TO_ZERO})).tag ==
          StabilityTag::INCONCLUSIVE);
    CHECK(theorem_verdict(true, limits({LimitTag::TO_INFINITY, LimitTag::UNDETERMINED})).tag ==
          StabilityTag::INCONCLUSIVE);
    CHECK(theorem_verdict(true,
                          limits({LimitTag::TO_INFINITY, LimitTag::TO_INFINITY,
                                  LimitTag::UNDETERMINED}),
                          AgreementPolicy::Majority)
              .tag == StabilityTag::ASYMPTOTICALLY_STABLE);
    CHECK_THROWS_AS(theorem_verdict(true, {}), DimensionError);

    // the curvature route never declares instability
    for (auto tags : {limits({LimitTag::TO_ZERO}), limits({LimitTag::UNDETERMINED})}) {
        CHECK(theorem_verdict(true, tags).tag != StabilityTag::UNSTABLE);
    }
}

TEST_CASE("equivalence_bounds: worked intervals") {
    std::mt19937_64 rng(12);
    const Matrix Q = random_orthogonal(rng, 3);
    const Interval iv = equivalence_bounds(Q, 2.5, 1);
    CHECK(iv.lo == doctest::Approx(2.5).epsilon(1e-12));
    CHECK(iv.hi == doctest::Approx(2.5).epsilon(1e-12));

    Matrix D = Matrix::Zero(2, 2);
    D.diagonal() << 2, 1;
    const Interval dv = equivalence_bounds(D, 1.0, 1);
    CHECK(dv.lo == doctest::Approx(1.0 / 8.0));
    CHECK(dv.hi == doctest::Approx(4.0));

    Matrix S = Matrix::Zero(2, 2);
    S(0, 0) = 1.0;
    CHECK_THROWS_AS(equivalence_bounds(S, 1.0, 1), SingularMatrixError);
}

TEST_CASE("equivalence_bounds: measured ratios stay inside the interval") {
    std::mt19937_64 rng(2718);
    const Matrix A = random_matrix(rng, 4);
    const Matrix P = random_matrix(rng, 4) + 3.0 * Matrix::Identity(4, 4);
    REQUIRE(singular_values(P).rank == 4);
    const Vector r0 = random_generic_vector(rng, 4);
    const Matrix B = P * A * P.inverse();
    const Vector v0 = P * r0;
    const auto grid = uniform_grid(5.0, 0.1);
    const auto tr = sample_trace(A, r0, grid);
    const auto tv = sample_trace(B, v0, grid);
    const Interval iv = equivalence_bounds(P, 1.0, 1);
    int checked = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (tr.values[i][0].flag != KappaFlag::Ok || tv.values[i][0].flag != KappaFlag::Ok) continue;
        const double ratio = std::exp(tv.values[i][0].log_value - tr.values[i][0].log_value);
        CHECK(ratio >= iv.lo * (1 - 1e-9));
        CHECK(ratio <= iv.hi * (1 + 1e-9));
        ++checked;
    }
    CHECK(checked >= 50);
}

TEST_CASE("exponent_analysis: rates and degrees") {
    const ExponentAnalysis diag =
        exponent_analysis({{JordanBlock::r1(-5), JordanBlock::r1(-6)}});
    REQUIRE(diag.theta.has_value());
    CHECK(*diag.theta == -30.0);
    CHECK(diag.eta_bound == -20.0);
    CHECK(diag.eta_bound > *diag.theta);  // numerator can win: growth
    CHECK_FALSE(diag.chi_bound.has_value());

    const ExponentAnalysis grow =
        exponent_analysis({{JordanBlock::r1(2.0), JordanBlock::c2(-1, 1)}});
    CHECK(*grow.theta == 12.0);
    CHECK(grow.eta_bound == 8.0);
    CHECK(grow.eta_bound < *grow.theta);  // denominator wins: kappa -> 0

    const ExponentAnalysis chain = exponent_analysis({{JordanBlock::rh(0.0, 3)}});
    CHECK(*chain.theta == 0.0);
    CHECK(chain.xi == 6);
    REQUIRE(chain.chi_bound.has_value());
    CHECK(*chain.chi_bound == 0);
    CHECK(*chain.chi_bound < chain.xi);

    const ExponentAnalysis mixed =
        exponent_analysis({{JordanBlock::rh(0.0, 3), JordanBlock::c2(0.0, 1.0)}});
    REQUIRE(mixed.chi_bound.has_value());
    CHECK(*mixed.chi_bound == 4);  // general bound 4(p-2) once blocks mix
}

TEST_CASE("sample_initial_values: deterministic, unit norm, away from axes") {
    const auto a = sample_initial_values(5, 8, 1234);
    const auto b = sample_initial_values(5, 8, 1234);
    const auto c = sample_initial_values(5, 8, 4321);
    REQUIRE(a.size() == 8);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK((a[i] - b[i]).norm() == 0.0);
        CHECK(a[i].norm() == doctest::Approx(1.0));
        CHECK(a[i].cwiseAbs().minCoeff() >= 1e-6);
    }
    CHECK((a[0] - c[0]).norm() > 0.0);
}

TEST_CASE("symbolic and numeric limits agree on decisive specs") {
    std::mt19937_64 rng(60601);
    int decisive = 0;
    for (int rep = 0; rep < 40; ++rep) {
        const JordanSpec spec = random_jordan_spec(rng, 6);
        const LimitClass predicted = predict_limit_symbolic(spec);
        if (predicted.tag == LimitTag::UNDETERMINED) continue;
        ++decisive;
        for (int iv = 0; iv < 5; ++iv) {
            const Vector r0 = random_generic_vector(rng, spec.dimension());
            const auto trace = sample_trace(spec, r0, uniform_grid(60.0, 0.05));
            const LimitClass numeric = classify_limit(trace);
            CHECK(numeric.tag == predicted.tag);
            CHECK(numeric.confidence >= 0.9);
        }
    }
    CHECK(decisive > 10);
}

TEST_CASE("limit tag is independent of the generic initial value") {
    std::mt19937_64 rng(515);
    const JordanSpec spec{{JordanBlock::r1(-5.0), JordanBlock::r1(-6.0), JordanBlock::r1(-8.0)}};
    const LimitClass predicted = predict_limit_symbolic(spec);
    REQUIRE(predicted.tag == LimitTag::TO_INFINITY);
    for (int iv = 0; iv < 20; ++iv) {
        const Vector r0 = random_generic_vector(rng, spec.dimension());
        const auto trace = sample_trace(spec, r0, uniform_grid(60.0, 0.05));
        CHECK(classify_limit(trace).tag == predicted.tag);
    }
}

TEST_CASE("soundness mini-sweep: curvature claims never contradict the oracle") {
    std::mt19937_64 rng(8080);
    int undetermined = 0, total = 0;
    for (int rep = 0; rep < 100; ++rep) {
        const JordanSpec spec = random_jordan_spec(rng, 8);
        const StabilityTag oracle = spectral_stability(spec).tag;
        bool all_decisive = true;
        bool all_qualifying = true;
        bool all_infinity = true;
        for (int iv = 0; iv < 3; ++iv) {
            const Vector r0 = random_generic_vector(rng, spec.dimension());
            const auto trace = sample_trace(spec, r0, uniform_grid(60.0, 0.1));
            const LimitClass l = classify_limit(trace);
            ++total;
            if (l.tag == LimitTag::UNDETERMINED) {
                ++undetermined;
                all_decisive = false;
            }
            if (l.tag == LimitTag::TO_ZERO || l.tag == LimitTag::UNDETERMINED) {
                all_qualifying = false;
            }
            if (l.tag != LimitTag::TO_INFINITY) all_infinity = false;
        }
        if (!all_decisive) continue;
        if (all_qualifying) CHECK(oracle_stable(oracle));
        if (spec.invertible() && all_infinity) {
            CHECK(oracle == StabilityTag::ASYMPTOTICALLY_STABLE);
        }
    }
    CHECK(undetermined < total / 10);
}

TEST_CASE("classify_system: end-to-end reports") {
    ReportOptions opts;
    opts.samples = 5;
    opts.seed = 99;
    opts.t_max = 40.0;

    const StabilityReport r1 = classify_system(example1_matrix(), opts);
    CHECK(r1.spectral.tag == StabilityTag::STABLE_NOT_ASYMPTOTIC);
    CHECK(r1.verdict.tag == StabilityTag::STABLE);
    CHECK_FALSE(r1.invertible);

    const StabilityReport r2 = classify_system(example2_matrix(), opts);
    CHECK(r2.spectral.tag == StabilityTag::ASYMPTOTICALLY_STABLE);
    CHECK(r2.verdict.tag == StabilityTag::ASYMPTOTICALLY_STABLE);
    CHECK(r2.det == doctest::Approx(-800.0).epsilon(1e-9));
    CHECK(r2.invertible);

    Matrix up = Matrix::Zero(2, 2);
    up.diagonal() << 1, 2;
    const StabilityReport r3 = classify_system(up, opts);
    CHECK(r3.spectral.tag == StabilityTag::UNSTABLE);
    CHECK(r3.verdict.tag == StabilityTag::INCONCLUSIVE);

    JordanSpec spec{{JordanBlock::c2(-2, 4), JordanBlock::c2(-2, 4), JordanBlock::r1(-2)}};
    const StabilityReport r4 = classify_system(spec, opts);
    CHECK(r4.spectral.tag == StabilityTag::ASYMPTOTICALLY_STABLE);
    CHECK(r4.symbolic.has_value());
    CHECK(r4.exponents.has_value());
    CHECK(r4.verdict.basis == VerdictBasis::CURVATURE_THEOREM);
}
