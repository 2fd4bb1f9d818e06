#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <vector>

namespace mulsemi {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;

/// Square complex matrix with finite entries. Thin value wrapper over
/// Eigen::MatrixXcd that enforces its invariants on construction.
class CMatrix {
public:
    CMatrix() = default;
    explicit CMatrix(Eigen::MatrixXcd m);

    static CMatrix identity(Eigen::Index n);
    static CMatrix zero(Eigen::Index n);
    static CMatrix diagonal(const std::vector<Complex>& diag);

    Eigen::Index dim() const noexcept { return m_.rows(); }
    const Eigen::MatrixXcd& eigen() const noexcept { return m_; }
    Complex operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }

    friend CMatrix operator*(const CMatrix& a, const CMatrix& b) { return CMatrix(a.m_ * b.m_, 0); }
    friend CVector operator*(const CMatrix& a, const CVector& x) { return a.m_ * x; }
    friend bool operator==(const CMatrix& a, const CMatrix& b) { return a.m_ == b.m_; }

private:
    CMatrix(Eigen::MatrixXcd m, int) : m_(std::move(m)) {}  // unchecked
    Eigen::MatrixXcd m_;
};

/// Operator 2-norm (largest singular value).
double norm2(const Eigen::MatrixXcd& a);
inline double norm2(const CMatrix& a) { return norm2(a.eigen()); }

/// e^{tA} by scaling and squaring with a diagonal Pade approximant of degree
/// 3, 5, 7, 9 or 13, chosen from the 1-norm of tA.
CMatrix expm(const CMatrix& a, double t);

/// Eigenvalues with multiplicity from a complex Schur decomposition.
std::vector<Complex> eigenvalues(const CMatrix& a);

struct SpectralSummary {
    std::vector<Complex> eigenvalues;
    double spectral_bound = 0.0;
    std::vector<Complex> imaginary_eigs;  ///< eigenvalues with |Re| <= re_tol

    /// r(e^{tA}) = e^{t s(A)} in finite dimension.
    double spectral_radius_of_exp_at(double t) const;
};

SpectralSummary spectral_summary(const CMatrix& a, double re_tol = 1e-9);

/// max Re(lambda) over the spectrum.
double spectral_bound(const CMatrix& a);

/// max |lambda| over the spectrum.
double spectral_radius(const CMatrix& a);

enum class CesaroMethod { ClosedForm, Quadrature };

/// S(t) = (1/t) int_0^t e^{tau A} dtau.
/// ClosedForm evaluates (1/t) A^{-1}(e^{tA} - I) and rejects singular A.
/// Quadrature uses composite Simpson on interval counts doubled until the
/// Richardson error estimate drops below 1e-10 * max(1, ||e^{tA}||).
CMatrix cesaro_mean(const CMatrix& a, double t, CesaroMethod method);

/// Mean ergodic projection onto ker A along ran A. The zero eigenvalue must be
/// semisimple (rank A == rank A^2); a defective zero eigenvalue throws
/// UnboundedSemigroupError. Returns the zero matrix when A is nonsingular.
CMatrix ergodic_projection(const CMatrix& a, double re_tol = 1e-9);

/// Numerical rank with singular values above tol * max(1, sigma_max) counted.
Eigen::Index numerical_rank(const Eigen::MatrixXcd& a, double tol);

/// True when `lambda` (an eigenvalue of A) is semisimple, tested as
/// rank(A - lambda I) == rank((A - lambda I)^2).
bool is_semisimple(const CMatrix& a, Complex lambda, double tol = 1e-9);

/// A^n by binary powering.
CMatrix matrix_power(const CMatrix& a, unsigned long long n);

}  // namespace mulsemi
