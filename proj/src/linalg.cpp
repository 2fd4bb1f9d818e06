#include "mulsemi/linalg.hpp"

#include "mulsemi/error.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <array>
#include <cmath>

namespace mulsemi {

namespace {

constexpr const char* kModule = "linalg";

using Mat = Eigen::MatrixXcd;

bool all_finite(const Mat& m) {
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag())) return false;
    return true;
}

double norm1(const Mat& m) { return m.cwiseAbs().colwise().sum().maxCoeff(); }

// Pade coefficients b_0..b_m of the diagonal approximant r_m for exp.
constexpr std::array<double, 4> kPade3 = {120.0, 60.0, 12.0, 1.0};
constexpr std::array<double, 6> kPade5 = {30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0};
constexpr std::array<double, 8> kPade7 = {17297280.0, 8648640.0, 1995840.0, 277200.0,
                                          25200.0,    1512.0,    56.0,      1.0};
constexpr std::array<double, 10> kPade9 = {17643225600.0, 8821612800.0, 2075673600.0, 302702400.0,
                                           30270240.0,    2162160.0,    110880.0,     3960.0,
                                           90.0,          1.0};
constexpr std::array<double, 14> kPade13 = {
    64764752532480000.0, 32382376266240000.0, 7771770303897600.0, 1187353796428800.0,
    129060195264000.0,   10559470521600.0,    670442572800.0,     33522128640.0,
    1323241920.0,        40840800.0,          960960.0,           16380.0,
    182.0,               1.0};

// Largest 1-norms for which r_m attains double precision backward error.
constexpr double kTheta3 = 1.495585217958292e-2;
constexpr double kTheta5 = 2.539398330063230e-1;
constexpr double kTheta7 = 9.504178996162932e-1;
constexpr double kTheta9 = 2.097847961257068e0;
constexpr double kTheta13 = 5.371920351148152e0;

template <std::size_t N>
Mat pade_low(const Mat& a, const std::array<double, N>& b) {
    const Eigen::Index n = a.rows();
    const Mat id = Mat::Identity(n, n);
    const Mat a2 = a * a;
    Mat u_even = b[1] * id;
    Mat v = b[0] * id;
    Mat power = id;
    for (std::size_t k = 2; k < N; k += 2) {
        power = power * a2;
        v += b[k] * power;
        if (k + 1 < N) u_even += b[k + 1] * power;
    }
    const Mat u = a * u_even;
    return (v - u).partialPivLu().solve(v + u);
}

Mat pade13(const Mat& a) {
    const auto& b = kPade13;
    const Eigen::Index n = a.rows();
    const Mat id = Mat::Identity(n, n);
    const Mat a2 = a * a;
    const Mat a4 = a2 * a2;
    const Mat a6 = a4 * a2;
    const Mat u = a * (a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 + b[5] * a4 +
                       b[3] * a2 + b[1] * id);
    const Mat v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 + b[4] * a4 + b[2] * a2 +
                  b[0] * id;
    return (v - u).partialPivLu().solve(v + u);
}

Mat expm_raw(const Mat& a) {
    const double nrm = norm1(a);
    if (nrm <= kTheta3) return pade_low(a, kPade3);
    if (nrm <= kTheta5) return pade_low(a, kPade5);
    if (nrm <= kTheta7) return pade_low(a, kPade7);
    if (nrm <= kTheta9) return pade_low(a, kPade9);
    int squarings = 0;
    if (nrm > kTheta13) squarings = static_cast<int>(std::ceil(std::log2(nrm / kTheta13)));
    Mat r = pade13(a * std::ldexp(1.0, -squarings));
    for (int k = 0; k < squarings; ++k) r = r * r;
    return r;
}

}  // namespace

CMatrix::CMatrix(Eigen::MatrixXcd m) : m_(std::move(m)) {
    if (m_.rows() != m_.cols() || m_.rows() == 0)
        throw InvalidMatrixError(kModule, "CMatrix", "matrix must be square and nonempty");
    if (!all_finite(m_)) throw InvalidMatrixError(kModule, "CMatrix", "non-finite entry");
}

CMatrix CMatrix::identity(Eigen::Index n) { return CMatrix(Mat::Identity(n, n)); }
CMatrix CMatrix::zero(Eigen::Index n) { return CMatrix(Mat::Zero(n, n)); }

CMatrix CMatrix::diagonal(const std::vector<Complex>& diag) {
    Mat m = Mat::Zero(static_cast<Eigen::Index>(diag.size()), static_cast<Eigen::Index>(diag.size()));
    for (std::size_t i = 0; i < diag.size(); ++i) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = diag[i];
    return CMatrix(std::move(m));
}

double norm2(const Eigen::MatrixXcd& a) {
    if (a.size() == 0) return 0.0;
    if (a.rows() == 1 && a.cols() == 1) return std::abs(a(0, 0));
    const Eigen::SelfAdjointEigenSolver<Mat> es(a.adjoint() * a, Eigen::EigenvaluesOnly);
    return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

CMatrix expm(const CMatrix& a, double t) {
    if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError(kModule, "expm", "t must be finite and >= 0");
    if (a.dim() == 0) throw InvalidMatrixError(kModule, "expm", "empty matrix");
    if (t == 0.0) return CMatrix::identity(a.dim());
    Mat r = expm_raw(t * a.eigen());
    if (!all_finite(r)) throw NumericalFailure(kModule, "expm", "result overflowed", 0);
    return CMatrix(std::move(r));
}

std::vector<Complex> eigenvalues(const CMatrix& a) {
    const Eigen::Index n = a.dim();
    if (n == 1) return {a(0, 0)};
    Eigen::ComplexEigenSolver<Mat> es;
    es.compute(a.eigen(), false);
    if (es.info() != Eigen::Success)
        throw NumericalFailure(kModule, "eigenvalues", "complex Schur iteration did not converge",
                               static_cast<long>(es.getMaxIterations() * n));
    const auto& ev = es.eigenvalues();
    return std::vector<Complex>(ev.data(), ev.data() + ev.size());
}

double SpectralSummary::spectral_radius_of_exp_at(double t) const {
    return std::exp(t * spectral_bound);
}

SpectralSummary spectral_summary(const CMatrix& a, double re_tol) {
    SpectralSummary s;
    s.eigenvalues = eigenvalues(a);
    s.spectral_bound = -std::numeric_limits<double>::infinity();
    for (const Complex& l : s.eigenvalues) {
        s.spectral_bound = std::max(s.spectral_bound, l.real());
        if (std::abs(l.real()) <= re_tol) s.imaginary_eigs.push_back(l);
    }
    return s;
}

double spectral_bound(const CMatrix& a) {
    double best = -std::numeric_limits<double>::infinity();
    for (const Complex& l : eigenvalues(a)) best = std::max(best, l.real());
    return best;
}

double spectral_radius(const CMatrix& a) {
    double best = 0.0;
    for (const Complex& l : eigenvalues(a)) best = std::max(best, std::abs(l));
    return best;
}

namespace {

CMatrix cesaro_closed_form(const CMatrix& a, double t) {
    const Eigen::Index n = a.dim();
    const Eigen::JacobiSVD<Mat> svd(a.eigen());
    const auto& sv = svd.singularValues();
    const double smax = sv(0);
    const double smin = sv(n - 1);
    if (smax == 0.0 || smin < 1e-12 * smax)
        throw SingularityError(kModule, "cesaro_mean",
                               "generator is singular; use CesaroMethod::Quadrature");
    const Mat e = expm(a, t).eigen();
    Mat s = a.eigen().partialPivLu().solve(e - Mat::Identity(n, n));
    s /= t;
    return CMatrix(std::move(s));
}

// Composite Simpson on m (even) intervals of (1/t) int_0^t e^{tau A} dtau;
// integrand values are powers of e^{hA}.
Mat simpson_mean(const CMatrix& a, double t, long m) {
    const Eigen::Index n = a.dim();
    const double h = t / static_cast<double>(m);
    const Mat step = expm(a, h).eigen();
    Mat power = Mat::Identity(n, n);
    Mat sum = power;
    for (long k = 1; k <= m; ++k) {
        power = power * step;
        const double w = (k == m) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
        sum += w * power;
    }
    return sum * (h / (3.0 * t));
}

CMatrix cesaro_quadrature(const CMatrix& a, double t) {
    constexpr long kMaxIntervals = 1L << 24;
    const double scale = std::max(1.0, norm2(expm(a, t)));
    const double tol = 1e-10 * scale;
    long m = 2 * std::max(1L, static_cast<long>(std::ceil(t * std::max(1.0, norm1(a.eigen())) / 4.0)));
    m += m % 2;
    m = std::min(m, kMaxIntervals / 2);
    Mat coarse = simpson_mean(a, t, m);
    long iterations = 0;
    while (true) {
        const long fine_m = 2 * m;
        Mat fine = simpson_mean(a, t, fine_m);
        ++iterations;
        const double estimate = norm2(fine - coarse) / 15.0;
        if (estimate <= tol) {
            // Richardson extrapolation of the two Simpson sums.
            Mat extrapolated = fine + (fine - coarse) / 15.0;
            return CMatrix(std::move(extrapolated));
        }
        if (fine_m >= kMaxIntervals)
            throw NumericalFailure(kModule, "cesaro_mean", "Simpson refinement did not reach tolerance",
                                   iterations);
        coarse = std::move(fine);
        m = fine_m;
    }
}

}  // namespace

CMatrix cesaro_mean(const CMatrix& a, double t, CesaroMethod method) {
    if (!(t > 0.0) || !std::isfinite(t)) throw DomainError(kModule, "cesaro_mean", "t must be > 0");
    return method == CesaroMethod::ClosedForm ? cesaro_closed_form(a, t) : cesaro_quadrature(a, t);
}

Eigen::Index numerical_rank(const Eigen::MatrixXcd& a, double tol) {
    if (a.size() == 0) return 0;
    const Eigen::JacobiSVD<Mat> svd(a);
    const auto& sv = svd.singularValues();
    const double cutoff = tol * std::max(1.0, sv(0));
    Eigen::Index r = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > cutoff) ++r;
    return r;
}

bool is_semisimple(const CMatrix& a, Complex lambda, double tol) {
    const Mat b = a.eigen() - lambda * Mat::Identity(a.dim(), a.dim());
    return numerical_rank(b, tol) == numerical_rank(b * b, tol);
}

CMatrix ergodic_projection(const CMatrix& a, double re_tol) {
    if (!(re_tol > 0.0)) throw DomainError(kModule, "ergodic_projection", "re_tol must be > 0");
    const Eigen::Index n = a.dim();
    const Eigen::JacobiSVD<Mat> svd(a.eigen(), Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double cutoff = re_tol * std::max(1.0, sv(0));
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < n; ++i)
        if (sv(i) > cutoff) ++rank;
    const Eigen::Index kernel = n - rank;
    if (kernel == 0) return CMatrix::zero(n);
    if (numerical_rank(a.eigen() * a.eigen(), re_tol) != rank)
        throw UnboundedSemigroupError(kModule, "ergodic_projection",
                                      "zero eigenvalue is defective; Cesaro means diverge");
    // Right and left null spaces: V spans ker A, W spans ker A^H = (ran A)^perp.
    const Mat v = svd.matrixV().rightCols(kernel);
    const Mat w = svd.matrixU().rightCols(kernel);
    const Mat gram = w.adjoint() * v;
    Mat p = v * gram.partialPivLu().solve(w.adjoint());
    return CMatrix(std::move(p));
}

CMatrix matrix_power(const CMatrix& a, unsigned long long n) {
    Mat result = Mat::Identity(a.dim(), a.dim());
    Mat base = a.eigen();
    while (n > 0) {
        if (n & 1ULL) result = result * base;
        n >>= 1ULL;
        if (n > 0) base = base * base;
    }
    if (!all_finite(result)) throw NumericalFailure(kModule, "matrix_power", "power overflowed", 0);
    return CMatrix(std::move(result));
}

}  // namespace mulsemi
