#pragma once

#include <complex>
#include <cstddef>

#include <Eigen/Dense>

namespace povm {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr std::size_t kMaxDim = 256;

struct Spectrum {
    RealVector values;     // ascending
    ComplexMatrix vectors; // orthonormal columns, vectors.col(i) pairs with values(i)
};

// Throws DimensionError unless m is square with 1 <= dim <= kMaxDim.
std::size_t checked_dim(const ComplexMatrix& m);

// max_ij |m - m^dagger|
double hermiticity_defect(const ComplexMatrix& m);

bool is_hermitian(const ComplexMatrix& m, double tol);

// Eigendecomposition of a Hermitian matrix. Throws InvariantError if m is not
// Hermitian within tolerances().herm. Eigenvalues ascending.
Spectrum spectral_decompose(const ComplexMatrix& m);

// Principal square root of a PSD matrix; eigenvalues within -tol_psd of 0 are clamped.
ComplexMatrix psd_sqrt(const ComplexMatrix& m);

// Largest |eigenvalue| of a Hermitian matrix.
double hermitian_spectral_norm(const ComplexMatrix& m);

// Largest singular value of an arbitrary square matrix.
double spectral_norm(const ComplexMatrix& m);

double max_abs_entry(const ComplexMatrix& m);

// Re Tr(a b) without forming the product.
double real_trace_product(const ComplexMatrix& a, const ComplexMatrix& b);

ComplexMatrix projector(const ComplexVector& v);

ComplexMatrix basis_projector(std::size_t dim, std::size_t i);

} // namespace povm
