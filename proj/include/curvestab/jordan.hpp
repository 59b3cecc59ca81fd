#pragma once

#include "curvestab/types.hpp"

#include <optional>

namespace curvestab {

enum class BlockKind { R1, RH, C2, CH };

/// One real Jordan block. R1 is 1x1 with real eigenvalue lambda; RH is pxp
/// (p >= 2) with lambda on the diagonal and 1 on the superdiagonal; C2 is the
/// 2x2 rotation-scaling block for a +/- bi (b > 0); CH is 2mx2m (m >= 2) with
/// C2 blocks on the diagonal and I2 on the block superdiagonal.
struct JordanBlock {
    BlockKind kind;
    double lambda = 0.0;  // R1/RH
    double a = 0.0;       // C2/CH
    double b = 0.0;       // C2/CH, b > 0
    int order = 1;        // p for RH, m for CH

    static JordanBlock r1(double lambda);
    static JordanBlock rh(double lambda, int p);
    static JordanBlock c2(double a, double b);
    static JordanBlock ch(double a, double b, int m);

    [[nodiscard]] int dimension() const;
    [[nodiscard]] double real_part() const { return kind == BlockKind::R1 || kind == BlockKind::RH ? lambda : a; }
    [[nodiscard]] bool is_complex() const { return kind == BlockKind::C2 || kind == BlockKind::CH; }
};

struct JordanSpec {
    std::vector<JordanBlock> blocks;

    [[nodiscard]] int dimension() const;
    [[nodiscard]] bool all_r1() const;
    /// a=0 CH or lambda=0 RH block present (the hypothesis that forces
    /// kappa -> 0 when M = 0).
    [[nodiscard]] bool has_imaginary_axis_rh_or_ch() const;
    /// No zero eigenvalue in any block.
    [[nodiscard]] bool invertible() const;
};

/// Spectral summary quantities that drive the limit classification.
/// M is the max real part over the spectrum; M_tilde is the same after
/// removing zero eigenvalues that live in R1 blocks (absent when that
/// removal empties the spectrum, i.e. every block is R1 with lambda = 0).
/// lambda_I / lambda_II are the largest and second largest *distinct*
/// elements of sigma(A) \ {0}, populated only for all-R1 specs.
/// xi is the leading polynomial degree of the denominator of kappa^2.
struct SpectrumSummary {
    double M = 0.0;
    std::optional<double> M_tilde;
    std::optional<double> lambda_I;
    std::optional<double> lambda_II;
    int xi = 0;
    bool has_imaginary_axis_RH_or_CH = false;
    bool invertible = true;
};

/// Block-diagonal matrix with the blocks laid out in order.
Matrix materialize(const JordanSpec& spec);

/// Closed-form e^{tB} for a single block.
Matrix block_exponential(const JordanBlock& block, double t);

/// Trajectory e^{tA} r0 evaluated through the per-block closed forms
/// (polynomial / trigonometric-polynomial coefficients), not through a
/// generic matrix exponential.
Vector closed_form_trajectory(const JordanSpec& spec, const Vector& r0, double t);

SpectrumSummary spectrum_summary(const JordanSpec& spec);

/// Eigenvalues implied by the blocks (with multiplicity), sorted like
/// curvestab::eigenvalues.
Spectrum spec_eigenvalues(const JordanSpec& spec);

}  // namespace curvestab
