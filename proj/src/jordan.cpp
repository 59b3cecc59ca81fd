#include "curvestab/jordan.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace curvestab {

namespace {

void require_finite(double x, const char* what) {
    if (!std::isfinite(x)) {
        std::ostringstream os;
        os << "jordan block: " << what << " must be finite";
        throw ParseError(os.str());
    }
}

void sort_spectrum(std::vector<Complex>& values) {
    std::sort(values.begin(), values.end(), [](const Complex& a, const Complex& b) {
        if (a.real() != b.real()) return a.real() > b.real();
        return a.imag() > b.imag();
    });
}

}  // namespace

JordanBlock JordanBlock::r1(double lambda) {
    require_finite(lambda, "lambda");
    return {BlockKind::R1, lambda, 0.0, 0.0, 1};
}

JordanBlock JordanBlock::rh(double lambda, int p) {
    require_finite(lambda, "lambda");
    if (p < 2) throw ParseError("RH block requires order p >= 2");
    return {BlockKind::RH, lambda, 0.0, 0.0, p};
}

JordanBlock JordanBlock::c2(double a, double b) {
    require_finite(a, "a");
    require_finite(b, "b");
    if (!(b > 0.0)) throw ParseError("C2 block requires b > 0");
    return {BlockKind::C2, 0.0, a, b, 1};
}

JordanBlock JordanBlock::ch(double a, double b, int m) {
    require_finite(a, "a");
    require_finite(b, "b");
    if (!(b > 0.0)) throw ParseError("CH block requires b > 0");
    if (m < 2) throw ParseError("CH block requires order m >= 2");
    return {BlockKind::CH, 0.0, a, b, m};
}

int JordanBlock::dimension() const {
    switch (kind) {
        case BlockKind::R1: return 1;
        case BlockKind::RH: return order;
        case BlockKind::C2: return 2;
        case BlockKind::CH: return 2 * order;
    }
    return 0;
}

int JordanSpec::dimension() const {
    int n = 0;
    for (const auto& b : blocks) n += b.dimension();
    return n;
}

bool JordanSpec::all_r1() const {
    return std::all_of(blocks.begin(), blocks.end(),
                       [](const JordanBlock& b) { return b.kind == BlockKind::R1; });
}

bool JordanSpec::has_imaginary_axis_rh_or_ch() const {
    for (const auto& b : blocks) {
        if (b.kind == BlockKind::RH && b.lambda == 0.0) return true;
        if (b.kind == BlockKind::CH && b.a == 0.0) return true;
    }
    return false;
}

bool JordanSpec::invertible() const {
    for (const auto& b : blocks) {
        if ((b.kind == BlockKind::R1 || b.kind == BlockKind::RH) && b.lambda == 0.0) return false;
    }
    return true;  // C2/CH have |lambda|^2 = a^2 + b^2 > 0
}

Matrix materialize(const JordanSpec& spec) {
    if (spec.blocks.empty()) throw ParseError("jordan spec has no blocks");
    const int n = spec.dimension();
    Matrix A = Matrix::Zero(n, n);
    int off = 0;
    for (const auto& blk : spec.blocks) {
        const int d = blk.dimension();
        switch (blk.kind) {
            case BlockKind::R1:
                A(off, off) = blk.lambda;
                break;
            case BlockKind::RH:
                for (int i = 0; i < d; ++i) {
                    A(off + i, off + i) = blk.lambda;
                    if (i + 1 < d) A(off + i, off + i + 1) = 1.0;
                }
                break;
            case BlockKind::C2:
                A(off, off) = blk.a;
                A(off, off + 1) = blk.b;
                A(off + 1, off) = -blk.b;
                A(off + 1, off + 1) = blk.a;
                break;
            case BlockKind::CH:
                for (int i = 0; i < blk.order; ++i) {
                    const int r = off + 2 * i;
                    A(r, r) = blk.a;
                    A(r, r + 1) = blk.b;
                    A(r + 1, r) = -blk.b;
                    A(r + 1, r + 1) = blk.a;
                    if (i + 1 < blk.order) {
                        A(r, r + 2) = 1.0;
                        A(r + 1, r + 3) = 1.0;
                    }
                }
                break;
        }
        off += d;
    }
    return A;
}

Matrix block_exponential(const JordanBlock& blk, double t) {
    const int d = blk.dimension();
    Matrix E = Matrix::Zero(d, d);
    switch (blk.kind) {
        case BlockKind::R1:
            E(0, 0) = std::exp(blk.lambda * t);
            break;
        case BlockKind::RH: {
            const double e = std::exp(blk.lambda * t);
            for (int i = 0; i < d; ++i) {
                double term = 1.0;  // t^l / l!
                for (int j = i; j < d; ++j) {
                    E(i, j) = e * term;
                    term *= t / static_cast<double>(j - i + 1);
                }
            }
            break;
        }
        case BlockKind::C2: {
            const double e = std::exp(blk.a * t);
            const double c = std::cos(blk.b * t), s = std::sin(blk.b * t);
            E << e * c, e * s, -e * s, e * c;
            break;
        }
        case BlockKind::CH: {
            const double e = std::exp(blk.a * t);
            const double c = std::cos(blk.b * t), s = std::sin(blk.b * t);
            for (int i = 0; i < blk.order; ++i) {
                double term = 1.0;
                for (int j = i; j < blk.order; ++j) {
                    const double f = e * term;
                    E(2 * i, 2 * j) = f * c;
                    E(2 * i, 2 * j + 1) = f * s;
                    E(2 * i + 1, 2 * j) = -f * s;
                    E(2 * i + 1, 2 * j + 1) = f * c;
                    term *= t / static_cast<double>(j - i + 1);
                }
            }
            break;
        }
    }
    return E;
}

Vector closed_form_trajectory(const JordanSpec& spec, const Vector& r0, double t) {
    require_vector(r0, spec.dimension(), "closed_form_trajectory r0");
    Vector out(spec.dimension());
    int off = 0;
    for (const auto& blk : spec.blocks) {
        const int d = blk.dimension();
        switch (blk.kind) {
            case BlockKind::R1:
                out(off) = std::exp(blk.lambda * t) * r0(off);
                break;
            case BlockKind::RH: {
                // r_k(t) = e^{lambda t} P_k(t),  P_k(t) = sum_l r_{k+l,0} t^l / l!
                // with the convention that coordinates beyond the block are zero.
                const double e = std::exp(blk.lambda * t);
                for (int k = 0; k < d; ++k) {
                    double acc = 0.0, term = 1.0;
                    for (int l = 0; k + l < d; ++l) {
                        acc += r0(off + k + l) * term;
                        term *= t / static_cast<double>(l + 1);
                    }
                    out(off + k) = e * acc;
                }
                break;
            }
            case BlockKind::C2: {
                const double e = std::exp(blk.a * t);
                const double c = std::cos(blk.b * t), s = std::sin(blk.b * t);
                out(off) = e * (r0(off) * c + r0(off + 1) * s);
                out(off + 1) = e * (-r0(off) * s + r0(off + 1) * c);
                break;
            }
            case BlockKind::CH: {
                const double e = std::exp(blk.a * t);
                const double c = std::cos(blk.b * t), s = std::sin(blk.b * t);
                for (int i = 0; i < blk.order; ++i) {
                    double t1 = 0.0, t2 = 0.0, term = 1.0;
                    for (int k = 0; i + k < blk.order; ++k) {
                        const double x = r0(off + 2 * (i + k));
                        const double y = r0(off + 2 * (i + k) + 1);
                        t1 += term * (x * c + y * s);
                        t2 += term * (-x * s + y * c);
                        term *= t / static_cast<double>(k + 1);
                    }
                    out(off + 2 * i) = e * t1;
                    out(off + 2 * i + 1) = e * t2;
                }
                break;
            }
        }
        off += d;
    }
    return out;
}

Spectrum spec_eigenvalues(const JordanSpec& spec) {
    Spectrum s;
    for (const auto& blk : spec.blocks) {
        switch (blk.kind) {
            case BlockKind::R1:
                s.values.emplace_back(blk.lambda, 0.0);
                break;
            case BlockKind::RH:
                s.values.insert(s.values.end(), blk.order, Complex(blk.lambda, 0.0));
                break;
            case BlockKind::C2:
                s.values.emplace_back(blk.a, blk.b);
                s.values.emplace_back(blk.a, -blk.b);
                break;
            case BlockKind::CH:
                for (int i = 0; i < blk.order; ++i) {
                    s.values.emplace_back(blk.a, blk.b);
                    s.values.emplace_back(blk.a, -blk.b);
                }
                break;
        }
    }
    sort_spectrum(s.values);
    return s;
}

SpectrumSummary spectrum_summary(const JordanSpec& spec) {
    if (spec.blocks.empty()) throw ParseError("jordan spec has no blocks");
    SpectrumSummary out;
    out.has_imaginary_axis_RH_or_CH = spec.has_imaginary_axis_rh_or_ch();
    out.invertible = spec.invertible();

    double M = -std::numeric_limits<double>::infinity();
    std::optional<double> M_tilde;
    for (const auto& blk : spec.blocks) {
        M = std::max(M, blk.real_part());
        // sigma~ drops only the zero eigenvalues that sit in R1 blocks.
        if (blk.kind == BlockKind::R1 && blk.lambda == 0.0) continue;
        const double re = blk.real_part();
        if (!M_tilde || re > *M_tilde) M_tilde = re;
    }
    out.M = M;
    out.M_tilde = M_tilde;

    if (spec.all_r1()) {
        std::vector<double> distinct;
        for (const auto& blk : spec.blocks) {
            if (blk.lambda != 0.0) distinct.push_back(blk.lambda);
        }
        std::sort(distinct.begin(), distinct.end(), std::greater<>());
        distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
        if (!distinct.empty()) out.lambda_I = distinct[0];
        if (distinct.size() > 1) out.lambda_II = distinct[1];
    }

    // xi = max{xi_R, xi_C} over blocks attaining M~. A missing block family
    // contributes nothing to the max.
    out.xi = 0;
    if (M_tilde) {
        const double mt = *M_tilde;
        std::optional<int> xi_r, xi_c;
        for (const auto& blk : spec.blocks) {
            if (blk.is_complex()) {
                if (blk.a == mt) xi_c = std::max(xi_c.value_or(0), 6 * (blk.order - 1));
            } else if (blk.lambda == mt) {
                if (mt != 0.0) {
                    xi_r = std::max(xi_r.value_or(0), 6 * (blk.order - 1));
                } else if (blk.kind == BlockKind::RH) {
                    // R1 blocks at zero are outside sigma~ and do not count here.
                    xi_r = std::max(xi_r.value_or(0), 6 * (blk.order - 2));
                }
            }
        }
        if (xi_r || xi_c) out.xi = std::max(xi_r.value_or(0), xi_c.value_or(0));
    }
    return out;
}

}  // namespace curvestab
