#pragma once

#include <Eigen/Core>

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace curvestab {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using Complex = std::complex<double>;

struct CurvestabError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Input could not be parsed or fails a structural invariant.
struct ParseError : CurvestabError {
    using CurvestabError::CurvestabError;
};

struct DimensionError : CurvestabError {
    using CurvestabError::CurvestabError;
};

/// The iterative eigenvalue solver failed to converge.
struct EigenSolverError : CurvestabError {
    using CurvestabError::CurvestabError;
};

struct OverflowError : CurvestabError {
    using CurvestabError::CurvestabError;
};

struct SingularMatrixError : CurvestabError {
    using CurvestabError::CurvestabError;
};

/// The trajectory has a vanishing velocity, so curvature is undefined.
struct DegenerateTrajectoryError : CurvestabError {
    using CurvestabError::CurvestabError;
};

/// All eigenvalues of a real matrix, counted with multiplicity.
/// Non-real values come in conjugate pairs; `conjugate_paired` records
/// whether pairing held to within the solver's tolerance.
struct Spectrum {
    std::vector<Complex> values;
    bool conjugate_paired = true;

    [[nodiscard]] double max_real_part() const;
};

/// Singular values, non-increasing; entries beyond `rank` are numerically zero.
struct SvdResult {
    std::vector<double> singular_values;
    int rank = 0;
};

/// Throws unless A is square with all entries finite.
void require_system_matrix(const Matrix& A);

/// Throws unless v has the expected length and finite entries.
void require_vector(const Vector& v, Eigen::Index expected, const char* what);

}  // namespace curvestab
