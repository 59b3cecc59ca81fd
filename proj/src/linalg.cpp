#include "curvestab/linalg.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace curvestab {

double Spectrum::max_real_part() const {
    double m = -std::numeric_limits<double>::infinity();
    for (const auto& z : values) m = std::max(m, z.real());
    return m;
}

void require_system_matrix(const Matrix& A) {
    if (A.rows() != A.cols() || A.rows() == 0) {
        throw DimensionError("system matrix must be square and non-empty");
    }
    if (!A.allFinite()) {
        throw ParseError("system matrix has non-finite entries");
    }
}

void require_vector(const Vector& v, Eigen::Index expected, const char* what) {
    if (v.size() != expected) {
        std::ostringstream os;
        os << what << ": expected length " << expected << ", got " << v.size();
        throw DimensionError(os.str());
    }
    if (!v.allFinite()) {
        std::ostringstream os;
        os << what << ": non-finite entries";
        throw ParseError(os.str());
    }
}

Spectrum eigenvalues(const Matrix& A) {
    require_system_matrix(A);
    Eigen::EigenSolver<Matrix> solver(A, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success) {
        std::ostringstream os;
        os << "eigenvalue iteration failed to converge (n=" << A.rows()
           << ", ||A||_F=" << A.norm() << ")";
        throw EigenSolverError(os.str());
    }
    Spectrum s;
    s.values.assign(solver.eigenvalues().data(),
                    solver.eigenvalues().data() + solver.eigenvalues().size());
    std::sort(s.values.begin(), s.values.end(), [](const Complex& a, const Complex& b) {
        if (a.real() != b.real()) return a.real() > b.real();
        return a.imag() > b.imag();
    });
    // Pairing check: every non-real value must have a conjugate partner.
    const double tol = 1e-8 * std::max(1.0, A.norm());
    std::vector<bool> used(s.values.size(), false);
    s.conjugate_paired = true;
    for (std::size_t i = 0; i < s.values.size(); ++i) {
        if (used[i] || std::abs(s.values[i].imag()) <= tol) continue;
        bool found = false;
        for (std::size_t j = i + 1; j < s.values.size(); ++j) {
            if (used[j]) continue;
            if (std::abs(s.values[j] - std::conj(s.values[i])) <= tol) {
                used[i] = used[j] = true;
                found = true;
                break;
            }
        }
        if (!found) s.conjugate_paired = false;
    }
    return s;
}

SvdResult singular_values(const Matrix& P) {
    if (!P.allFinite()) throw ParseError("matrix has non-finite entries");
    Eigen::JacobiSVD<Matrix> svd(P);
    SvdResult r;
    r.singular_values.assign(svd.singularValues().data(),
                             svd.singularValues().data() + svd.singularValues().size());
    const double cutoff = r.singular_values.empty()
                              ? 0.0
                              : r.singular_values.front() * 1e-14 * std::max(P.rows(), P.cols());
    r.rank = static_cast<int>(std::count_if(r.singular_values.begin(), r.singular_values.end(),
                                            [&](double s) { return s > cutoff; }));
    return r;
}

namespace {

// (13,13) Pade approximant; coefficients from Higham's 2005 scaling-and-squaring
// analysis, with theta_13 = 5.37 as the no-scaling threshold.
Matrix expm_pade13(const Matrix& A) {
    static const double b[] = {64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
                               1187353796428800.0,  129060195264000.0,   10559470521600.0,
                               670442572800.0,      33522128640.0,       1323241920.0,
                               40840800.0,          960960.0,            16380.0,
                               182.0,               1.0};
    const Eigen::Index n = A.rows();
    const Matrix I = Matrix::Identity(n, n);
    const Matrix A2 = A * A;
    const Matrix A4 = A2 * A2;
    const Matrix A6 = A4 * A2;
    const Matrix U =
        A * (A6 * (b[13] * A6 + b[11] * A4 + b[9] * A2) + b[7] * A6 + b[5] * A4 + b[3] * A2 + b[1] * I);
    const Matrix V =
        A6 * (b[12] * A6 + b[10] * A4 + b[8] * A2) + b[6] * A6 + b[4] * A4 + b[2] * A2 + b[0] * I;
    return (V - U).partialPivLu().solve(V + U);
}

}  // namespace

Matrix expm(const Matrix& A, double t) {
    require_system_matrix(A);
    if (!std::isfinite(t)) throw ParseError("expm: t must be finite");
    Matrix B = t * A;
    const double theta13 = 5.371920351148152;
    const double norm = B.cwiseAbs().rowwise().sum().maxCoeff();  // infinity norm
    int squarings = 0;
    if (norm > theta13) {
        squarings = static_cast<int>(std::ceil(std::log2(norm / theta13)));
        B /= std::ldexp(1.0, squarings);
    }
    Matrix E = expm_pade13(B);
    for (int i = 0; i < squarings; ++i) {
        E = E * E;
        if (!E.allFinite()) {
            std::ostringstream os;
            os << "expm overflow: ||tA|| = " << norm;
            throw OverflowError(os.str());
        }
    }
    if (!E.allFinite()) throw OverflowError("expm produced non-finite entries");
    return E;
}

Vector apply_power(const Matrix& A, int k, const Vector& v) {
    require_system_matrix(A);
    require_vector(v, A.rows(), "apply_power vector");
    if (k < 0) throw DimensionError("apply_power: k must be non-negative");
    Vector w = v;
    for (int i = 0; i < k; ++i) w = A * w;
    return w;
}

double determinant(const Matrix& A) {
    require_system_matrix(A);
    return A.partialPivLu().determinant();
}

bool is_invertible(const Matrix& A, double tol_rel) {
    const double d = std::abs(determinant(A));
    return d > tol_rel * std::pow(A.norm(), static_cast<double>(A.rows()));
}

double snap_tolerance(const Matrix& A, double factor) {
    return factor * std::max(1.0, A.norm());
}

}  // namespace curvestab
