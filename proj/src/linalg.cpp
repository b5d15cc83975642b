#include "povm/linalg.hpp"

#include <algorithm>
#include <string>

#include "povm/errors.hpp"
#include "povm/tolerances.hpp"

namespace povm {

std::size_t checked_dim(const ComplexMatrix& m) {
    if (m.rows() != m.cols()) {
        throw DimensionError("matrix is not square: " + std::to_string(m.rows()) + "x" +
                             std::to_string(m.cols()));
    }
    const auto n = static_cast<std::size_t>(m.rows());
    if (n == 0 || n > kMaxDim) {
        throw DimensionError("matrix dimension " + std::to_string(n) + " outside [1, " +
                             std::to_string(kMaxDim) + "]");
    }
    return n;
}

double hermiticity_defect(const ComplexMatrix& m) {
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

bool is_hermitian(const ComplexMatrix& m, double tol) {
    return m.rows() == m.cols() && hermiticity_defect(m) <= tol;
}

Spectrum spectral_decompose(const ComplexMatrix& m) {
    checked_dim(m);
    if (!is_hermitian(m, tolerances().herm)) {
        throw InvariantError("spectral_decompose: matrix is not Hermitian (defect " +
                             std::to_string(hermiticity_defect(m)) + ")");
    }
    // Symmetrize so round-off in the strict upper triangle cannot leak in.
    const ComplexMatrix h = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h);
    if (solver.info() != Eigen::Success) {
        throw InvariantError("spectral_decompose: eigen solver did not converge");
    }
    return {solver.eigenvalues(), solver.eigenvectors()};
}

ComplexMatrix psd_sqrt(const ComplexMatrix& m) {
    const Spectrum s = spectral_decompose(m);
    if (s.values(0) < -tolerances().psd) {
        throw InvariantError("psd_sqrt: matrix has eigenvalue " + std::to_string(s.values(0)));
    }
    const RealVector roots = s.values.cwiseMax(0.0).cwiseSqrt();
    return s.vectors * roots.cast<Complex>().asDiagonal() * s.vectors.adjoint();
}

double hermitian_spectral_norm(const ComplexMatrix& m) {
    const Spectrum s = spectral_decompose(m);
    return std::max(std::abs(s.values(0)), std::abs(s.values(s.values.size() - 1)));
}

double spectral_norm(const ComplexMatrix& m) {
    Eigen::JacobiSVD<ComplexMatrix> svd(m);
    return svd.singularValues()(0);
}

double max_abs_entry(const ComplexMatrix& m) { return m.cwiseAbs().maxCoeff(); }

double real_trace_product(const ComplexMatrix& a, const ComplexMatrix& b) {
    // Tr(ab) = sum_ij a_ij b_ji
    return (a.array() * b.transpose().array()).sum().real();
}

ComplexMatrix projector(const ComplexVector& v) {
    const ComplexVector u = v / v.norm();
    return u * u.adjoint();
}

ComplexMatrix basis_projector(std::size_t dim, std::size_t i) {
    ComplexMatrix p = ComplexMatrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    p(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = 1.0;
    return p;
}

} // namespace povm
