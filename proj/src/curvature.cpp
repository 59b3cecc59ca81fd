#include "curvestab/curvature.hpp"

#include "curvestab/linalg.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace curvestab {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Relative floor below which a small determinant is treated as an exact
// cancellation (the subset contributes a true zero minor).
constexpr double kDetFloor = 1e-13;

double log_sum_exp(const std::vector<double>& terms) {
    double mx = kNegInf;
    for (double v : terms) mx = std::max(mx, v);
    if (!std::isfinite(mx)) return kNegInf;
    double acc = 0.0;
    for (double v : terms) acc += std::exp(v - mx);
    return mx + std::log(acc);
}

// Visits all k-subsets of {0..n-1} in lexicographic order.
template <typename F>
void for_each_combination(int n, int k, F&& fn) {
    std::vector<int> idx(k);
    for (int i = 0; i < k; ++i) idx[i] = i;
    while (true) {
        fn(idx);
        int i = k - 1;
        while (i >= 0 && idx[i] == n - k + i) --i;
        if (i < 0) break;
        ++idx[i];
        for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
}

double binomial(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r *= static_cast<double>(n - k + i) / i;
    return r;
}

}  // namespace

DerivativeStack derivative_stack(const Matrix& A, const Vector& state, double t, int m,
                                 double log_scale_in) {
    require_system_matrix(A);
    require_vector(state, A.rows(), "derivative_stack state");
    if (m < 1 || m > A.rows()) throw DimensionError("derivative_stack: need 1 <= m <= n");

    DerivativeStack out;
    out.t = t;
    out.vectors.reserve(m);
    Vector v = state;
    for (int k = 0; k < m; ++k) {
        v = A * v;
        out.vectors.push_back(v);
    }
    const double v1 = out.vectors.front().norm();
    if (v1 == 0.0 || v1 < 1e-13 * A.norm() * state.norm()) {
        out.degenerate = true;
        out.log_scale = log_scale_in;
        return out;
    }
    double s = 0.0;
    for (const auto& w : out.vectors) s = std::max(s, w.lpNorm<Eigen::Infinity>());
    for (auto& w : out.vectors) w /= s;
    out.log_scale = log_scale_in + std::log(s);
    return out;
}

VolumeVector gram_volumes(const DerivativeStack& stack, double pivot_tol) {
    const int m = static_cast<int>(stack.vectors.size());
    if (m < 1) throw DimensionError("gram_volumes: empty stack");

    Matrix G(m, m);
    for (int i = 0; i < m; ++i) {
        for (int j = i; j < m; ++j) {
            G(i, j) = G(j, i) = stack.vectors[i].dot(stack.vectors[j]);
        }
    }

    // Unpivoted LDL^T: V_k^2 = det of the leading k x k minor = prod of the
    // first k pivots. Pivoting would reorder the vectors and change the V_k.
    VolumeVector out;
    out.log_V.assign(m + 1, kNegInf);
    out.log_V[0] = 0.0;
    Matrix L = Matrix::Identity(m, m);
    std::vector<double> d(m, 0.0);
    double acc = 0.0;
    for (int j = 0; j < m; ++j) {
        double dj = G(j, j);
        for (int s = 0; s < j; ++s) dj -= L(j, s) * L(j, s) * d[s];
        if (!(dj > pivot_tol * G(j, j)) || G(j, j) == 0.0) {
            out.degenerate_from = j + 1;
            return out;
        }
        d[j] = dj;
        for (int i = j + 1; i < m; ++i) {
            double lij = G(i, j);
            for (int s = 0; s < j; ++s) lij -= L(i, s) * L(j, s) * d[s];
            L(i, j) = lij / dj;
        }
        acc += 0.5 * std::log(dj);
        out.log_V[j + 1] = acc;
    }
    return out;
}

std::vector<LogKappa> kappas_from_log_volumes(const std::vector<double>& log_V, int order,
                                              double log_scale) {
    const int m = static_cast<int>(log_V.size()) - 1;
    int df = m + 1;
    for (int k = 1; k <= m; ++k) {
        if (!std::isfinite(log_V[k])) {
            df = k;
            break;
        }
    }
    if (df == 1) throw DegenerateTrajectoryError("curvature undefined: V_1 = 0 (r'(t) = 0)");
    std::vector<LogKappa> out;
    out.reserve(order);
    for (int i = 1; i <= order && i <= m - 1; ++i) {
        if (i + 1 < df) {
            out.push_back(LogKappa::ok(log_V[i + 1] + log_V[i - 1] - log_V[1] - 2.0 * log_V[i] -
                                       log_scale));
        } else if (i + 1 == df) {
            out.push_back(LogKappa::zero());
        } else {
            out.push_back(LogKappa::degenerate());
        }
    }
    while (static_cast<int>(out.size()) < order) out.push_back(LogKappa::degenerate());
    return out;
}

std::vector<LogKappa> curvatures(const DerivativeStack& stack, double pivot_tol) {
    if (stack.degenerate) {
        throw DegenerateTrajectoryError("curvature undefined: r'(t) = 0");
    }
    const int m = static_cast<int>(stack.vectors.size());
    const VolumeVector vols = gram_volumes(stack, pivot_tol);
    return kappas_from_log_volumes(vols.log_V, m - 1, stack.log_scale);
}

std::vector<double> uniform_grid(double t_max, double step) {
    if (!(t_max > 0.0) || !(step > 0.0)) throw ParseError("grid requires t_max > 0 and step > 0");
    std::vector<double> grid;
    const int count = static_cast<int>(std::floor(t_max / step + 0.5)) + 1;
    grid.reserve(count);
    for (int i = 0; i < count; ++i) grid.push_back(i * step);
    return grid;
}

namespace {

void require_grid(const std::vector<double>& grid) {
    if (grid.empty()) throw ParseError("empty time grid");
    if (grid.front() < 0.0) throw ParseError("grid must start at t >= 0");
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (!(grid[i] > grid[i - 1])) throw ParseError("grid must be strictly increasing");
    }
}

// ---------------------------------------------------------------------------
// Per-time evaluation of log V_k via subset sums with exact exponential
// factors. Both analytic evaluators produce, for every k-subset I of rows, a
// term  2 * (rate_I * t + log |det of the de-exponentiated k x k minor|)
// and log-sum-exp them, which keeps full relative accuracy at any t.
// ---------------------------------------------------------------------------

std::vector<LogKappa> finish_point(const std::vector<double>& log_V, int order) {
    if (!std::isfinite(log_V[1])) {
        return std::vector<LogKappa>(order, LogKappa::degenerate());
    }
    return kappas_from_log_volumes(log_V, order, 0.0);
}

// --- Block-analytic evaluator (JordanSpec input) ---------------------------
//
// Every coordinate of r^{(k)}(t) inside a block factors as e^{rho t} times a
// polynomial / trigonometric polynomial; rho is constant per row. The reduced
// entries stay polynomially bounded, so minors never massively cancel across
// exponential scales.

class BlockAnalyticEvaluator {
  public:
    BlockAnalyticEvaluator(const JordanSpec& spec, const Vector& r0, int m)
        : spec_(spec), r0_(r0), m_(m), n_(spec.dimension()) {
        row_rate_.resize(n_);
        int off = 0;
        for (const auto& blk : spec.blocks) {
            for (int i = 0; i < blk.dimension(); ++i) row_rate_[off + i] = blk.real_part();
            off += blk.dimension();
        }
    }

    // log V_k for k = 0..m at time t.
    std::vector<double> log_volumes(double t) const {
        Matrix S = reduced_stack(t);
        std::vector<double> log_V(m_ + 1, kNegInf);
        log_V[0] = 0.0;
        for (int k = 1; k <= m_; ++k) {
            std::vector<double> terms;
            for_each_combination(n_, k, [&](const std::vector<int>& rows) {
                double rate = 0.0;
                Matrix sub(k, k);
                for (int i = 0; i < k; ++i) {
                    rate += row_rate_[rows[i]];
                    sub.row(i) = S.row(rows[i]).head(k);
                }
                double hadamard = 1.0;
                for (int i = 0; i < k; ++i) hadamard *= sub.row(i).norm();
                if (hadamard == 0.0) return;
                const double det = sub.partialPivLu().determinant();
                if (std::abs(det) < kDetFloor * hadamard) return;
                terms.push_back(2.0 * (rate * t + std::log(std::abs(det))));
            });
            log_V[k] = 0.5 * log_sum_exp(terms);
            if (!std::isfinite(log_V[k])) break;  // V_j = 0 for all j >= k
        }
        return log_V;
    }

  private:
    // Reduced entries: r^{(k)}_row(t) / e^{rho_row t}, for k = 1..m.
    Matrix reduced_stack(double t) const {
        Matrix S(n_, m_);
        int off = 0;
        for (const auto& blk : spec_.blocks) {
            switch (blk.kind) {
                case BlockKind::R1: {
                    double pw = 1.0;
                    for (int k = 1; k <= m_; ++k) {
                        pw *= blk.lambda;
                        S(off, k - 1) = pw * r0_(off);
                    }
                    break;
                }
                case BlockKind::RH: {
                    const int p = blk.order;
                    // P_j(t), 1-based; zero beyond the block.
                    std::vector<double> P(p + 1, 0.0);
                    for (int j = 1; j <= p; ++j) {
                        double acc = 0.0, term = 1.0;
                        for (int l = 0; j + l <= p; ++l) {
                            acc += r0_(off + j - 1 + l) * term;
                            term *= t / (l + 1);
                        }
                        P[j] = acc;
                    }
                    for (int j = 1; j <= p; ++j) {
                        for (int k = 1; k <= m_; ++k) {
                            double acc = 0.0;
                            const int lmax = std::min(k, p - j);
                            for (int l = 0; l <= lmax; ++l) {
                                acc += binomial(k, l) * std::pow(blk.lambda, k - l) * P[j + l];
                            }
                            S(off + j - 1, k - 1) = acc;
                        }
                    }
                    break;
                }
                case BlockKind::C2:
                case BlockKind::CH: {
                    // The block acts as a complex Jordan chain for
                    // lambda_c = a - ib on z_j = x_j + i y_j.
                    const int mm = blk.order;
                    const Complex lam(blk.a, -blk.b);
                    const Complex rot = std::exp(Complex(0.0, -blk.b * t));
                    std::vector<Complex> P(mm + 1, Complex(0.0, 0.0));
                    for (int j = 1; j <= mm; ++j) {
                        Complex acc(0.0, 0.0);
                        double term = 1.0;
                        for (int s = 0; j + s <= mm; ++s) {
                            acc += Complex(r0_(off + 2 * (j - 1 + s)), r0_(off + 2 * (j - 1 + s) + 1)) *
                                   term;
                            term *= t / (s + 1);
                        }
                        P[j] = acc;
                    }
                    std::vector<Complex> lam_pow(m_ + 1);
                    lam_pow[0] = Complex(1.0, 0.0);
                    for (int k = 1; k <= m_; ++k) lam_pow[k] = lam_pow[k - 1] * lam;
                    for (int j = 1; j <= mm; ++j) {
                        for (int k = 1; k <= m_; ++k) {
                            Complex acc(0.0, 0.0);
                            const int lmax = std::min(k, mm - j);
                            for (int l = 0; l <= lmax; ++l) {
                                acc += binomial(k, l) * lam_pow[k - l] * P[j + l];
                            }
                            acc *= rot;
                            S(off + 2 * (j - 1), k - 1) = acc.real();
                            S(off + 2 * (j - 1) + 1, k - 1) = acc.imag();
                        }
                    }
                    break;
                }
            }
            off += blk.dimension();
        }
        return S;
    }

    const JordanSpec& spec_;
    Vector r0_;
    int m_;
    int n_;
    std::vector<double> row_rate_;
};

// --- Modal evaluator (diagonalizable SystemMatrix input) -------------------
//
// With A = W diag(lambda) W^{-1} and c = W^{-1} r0, Cauchy-Binet twice gives
//   minor_I([r' ... r^{(k)}]) = sum_J det(W[I,J]) prod_J(c_j lambda_j)
//                               Vandermonde(lambda_J) e^{(sum_J lambda_j) t},
// an exponential polynomial with constant coefficients. Evaluating it with
// the dominant exponent factored out sidesteps the precision collapse that
// plain state propagation suffers once (spectral gap) * t exceeds ~36.

class ModalEvaluator {
  public:
    static std::optional<ModalEvaluator> create(const Matrix& A, const Vector& r0, int m) {
        const Eigen::Index n = A.rows();
        if (n > 12) return std::nullopt;  // subset count growth
        Eigen::EigenSolver<Matrix> solver(A);
        if (solver.info() != Eigen::Success) return std::nullopt;
        ComplexMatrix W = solver.eigenvectors();
        ComplexVector lam = solver.eigenvalues();
        Eigen::JacobiSVD<ComplexMatrix> svd(W);
        const double smin = svd.singularValues().minCoeff();
        const double smax = svd.singularValues().maxCoeff();
        if (!(smin > 0.0) || smax / smin > 1e7) return std::nullopt;
        const double residual = (A.cast<Complex>() * W - W * lam.asDiagonal()).norm();
        if (residual > 1e-9 * std::max(1.0, A.norm())) return std::nullopt;
        ComplexVector c = W.partialPivLu().solve(r0.cast<Complex>());
        if (!c.allFinite()) return std::nullopt;

        // The limit class is discontinuous at eigenvalue collisions and at the
        // imaginary axis. Cluster nearly-equal eigenvalues to a common value
        // and snap tiny ones to zero, so that the Cauchy-Binet coefficients
        // that vanish for the intended spectrum vanish exactly instead of
        // surviving as noise floors that take over once (gap * t) is large.
        const double cluster = 1e-7 * std::max(1.0, A.norm());
        std::vector<bool> done(n, false);
        for (Eigen::Index i = 0; i < n; ++i) {
            if (done[i]) continue;
            Complex sum(0, 0);
            int count = 0;
            for (Eigen::Index j = i; j < n; ++j) {
                if (!done[j] && std::abs(lam(j) - lam(i)) <= cluster) ++count, sum += lam(j);
            }
            const Complex mean = sum / static_cast<double>(count);
            for (Eigen::Index j = i; j < n; ++j) {
                if (!done[j] && std::abs(lam(j) - lam(i)) <= cluster) {
                    lam(j) = mean;
                    done[j] = true;
                }
            }
        }
        const double snap = snap_tolerance(A);
        for (Eigen::Index i = 0; i < n; ++i) {
            if (std::abs(lam(i)) <= snap) {
                lam(i) = Complex(0.0, 0.0);
            } else if (std::abs(lam(i).real()) <= snap) {
                lam(i) = Complex(0.0, lam(i).imag());
            }
        }
        return ModalEvaluator(std::move(W), std::move(lam), std::move(c), static_cast<int>(n), m);
    }

    std::vector<double> log_volumes(double t) const {
        std::vector<double> log_V(m_ + 1, kNegInf);
        log_V[0] = 0.0;
        for (int k = 1; k <= m_; ++k) {
            std::vector<double> terms;
            for (const auto& minor : minors_[k - 1]) {
                double shift = kNegInf;
                for (const auto& tm : minor) {
                    shift = std::max(shift, tm.mu.real() * t + tm.log_mag);
                }
                if (!std::isfinite(shift)) continue;
                Complex sum(0.0, 0.0);
                double abs_sum = 0.0;
                for (const auto& tm : minor) {
                    const Complex e = std::exp(Complex(tm.mu.real() * t + tm.log_mag - shift,
                                                       tm.mu.imag() * t + tm.phase));
                    sum += e;
                    abs_sum += std::abs(e);
                }
                const double re = std::abs(sum.real());
                if (re < kDetFloor * abs_sum) continue;
                terms.push_back(2.0 * (shift + std::log(re)));
            }
            log_V[k] = 0.5 * log_sum_exp(terms);
            if (!std::isfinite(log_V[k])) break;
        }
        return log_V;
    }

  private:
    struct Term {
        Complex mu;      // sum of the modes' eigenvalues
        double log_mag;  // log |coefficient|
        double phase;    // arg(coefficient)
    };

    ModalEvaluator(ComplexMatrix W, ComplexVector lam, ComplexVector c, int n, int m) : m_(m) {
        minors_.resize(m);
        for (int k = 1; k <= m; ++k) {
            std::vector<std::vector<int>> mode_subsets;
            std::vector<Complex> coeffs;
            std::vector<Complex> mus;
            for_each_combination(n, k, [&](const std::vector<int>& J) {
                Complex coeff(1.0, 0.0);
                Complex mu(0.0, 0.0);
                for (int j : J) {
                    coeff *= c(j) * lam(j);
                    mu += lam(j);
                }
                for (int p = 0; p < k; ++p) {
                    for (int q = p + 1; q < k; ++q) coeff *= lam(J[q]) - lam(J[p]);
                }
                mode_subsets.push_back(J);
                coeffs.push_back(coeff);
                mus.push_back(mu);
            });
            auto& rows_out = minors_[k - 1];
            for_each_combination(n, k, [&](const std::vector<int>& I) {
                std::vector<Term> terms;
                for (std::size_t s = 0; s < mode_subsets.size(); ++s) {
                    if (coeffs[s] == Complex(0.0, 0.0)) continue;
                    ComplexMatrix sub(k, k);
                    for (int r = 0; r < k; ++r) {
                        for (int cidx = 0; cidx < k; ++cidx) {
                            sub(r, cidx) = W(I[r], mode_subsets[s][cidx]);
                        }
                    }
                    const Complex det = sub.partialPivLu().determinant();
                    const Complex g = det * coeffs[s];
                    const double mag = std::abs(g);
                    if (mag == 0.0) continue;
                    terms.push_back({mus[s], std::log(mag), std::arg(g)});
                }
                if (!terms.empty()) rows_out.push_back(std::move(terms));
            });
        }
    }

    int m_;
    std::vector<std::vector<std::vector<Term>>> minors_;  // [k-1][subset I][term]
};

CurvatureTrace propagate_trace(const Matrix& A, const Vector& r0, const std::vector<double>& grid,
                               const TraceOptions& options) {
    const int m = options.order + 1;
    CurvatureTrace trace;
    trace.order = options.order;

    Vector state = r0;
    double log_scale = 0.0;
    double prev_t = 0.0;
    Matrix step;
    double step_delta = -1.0;

    for (double t : grid) {
        const double delta = t - prev_t;
        if (delta > 0.0) {
            if (std::abs(delta - step_delta) > 1e-12 * std::max(delta, step_delta)) {
                step = expm(A, delta);
                step_delta = delta;
            }
            state = step * state;
            if (!state.allFinite()) {
                std::ostringstream os;
                os << "state overflow at t=" << t << " despite renormalization";
                trace.truncation = os.str();
                return trace;
            }
            const double nrm = state.norm();
            if (nrm > 0.0) {
                log_scale += std::log(nrm);
                state /= nrm;
            }
        }
        prev_t = t;

        trace.times.push_back(t);
        try {
            DerivativeStack stack = derivative_stack(A, state, t, m, log_scale);
            trace.values.push_back(curvatures(stack, options.pivot_tol));
        } catch (const DegenerateTrajectoryError&) {
            trace.values.emplace_back(options.order, LogKappa::degenerate());
        }
    }
    return trace;
}

}  // namespace

CurvatureTrace sample_trace(const Matrix& A, const Vector& r0, const std::vector<double>& grid,
                            const TraceOptions& options) {
    require_system_matrix(A);
    require_vector(r0, A.rows(), "sample_trace r0");
    require_grid(grid);
    if (options.order < 1 || options.order > A.rows() - 1) {
        throw DimensionError("sample_trace: need 1 <= order <= n-1");
    }
    if (options.evaluator == TraceEvaluator::Analytic) {
        throw ParseError("analytic evaluator requires a JordanSpec input");
    }

    if (options.evaluator == TraceEvaluator::Auto || options.evaluator == TraceEvaluator::Modal) {
        auto modal = ModalEvaluator::create(A, r0, options.order + 1);
        if (modal) {
            CurvatureTrace trace;
            trace.order = options.order;
            for (double t : grid) {
                trace.times.push_back(t);
                trace.values.push_back(finish_point(modal->log_volumes(t), options.order));
            }
            return trace;
        }
        if (options.evaluator == TraceEvaluator::Modal) {
            throw EigenSolverError("modal evaluator unavailable: eigenbasis missing or ill-conditioned");
        }
    }
    return propagate_trace(A, r0, grid, options);
}

CurvatureTrace sample_trace(const JordanSpec& spec, const Vector& r0,
                            const std::vector<double>& grid, const TraceOptions& options) {
    require_vector(r0, spec.dimension(), "sample_trace r0");
    require_grid(grid);
    const int n = spec.dimension();
    if (options.order < 1 || options.order > n - 1) {
        throw DimensionError("sample_trace: need 1 <= order <= n-1");
    }
    if (options.evaluator == TraceEvaluator::Propagation ||
        options.evaluator == TraceEvaluator::Modal || n > 16) {
        TraceOptions opts = options;
        if (opts.evaluator == TraceEvaluator::Analytic) opts.evaluator = TraceEvaluator::Auto;
        return sample_trace(materialize(spec), r0, grid, opts);
    }

    BlockAnalyticEvaluator eval(spec, r0, options.order + 1);
    CurvatureTrace trace;
    trace.order = options.order;
    for (double t : grid) {
        trace.times.push_back(t);
        trace.values.push_back(finish_point(eval.log_volumes(t), options.order));
    }
    return trace;
}

}  // namespace curvestab
