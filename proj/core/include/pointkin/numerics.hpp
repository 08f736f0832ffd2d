#pragma once

#include <Eigen/Dense>

#include <initializer_list>

namespace pointkin {

/// Largest supported state dimension (m + 1). Dense kernels keep their
/// storage inline up to this size, so hot loops never touch the heap.
inline constexpr int kMaxDim = 16;

using DenseMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor, kMaxDim, kMaxDim>;
using DenseVector = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim, 1>;

/// Builds a validated square matrix from nested rows. Throws ValidationError
/// on ragged/non-square input, non-finite entries, or dimension > kMaxDim.
DenseMatrix dense_matrix(std::initializer_list<std::initializer_list<double>> rows);

/// Throws ValidationError unless `m` is square, non-empty and finite.
void require_square_finite(const DenseMatrix& m, const char* what);

/// Largest absolute entry.
double max_abs(const DenseMatrix& m);

struct SymEigenDecomposition {
  DenseVector values;   // ascending
  DenseMatrix vectors;  // orthonormal columns
};

/// Eigendecomposition of a symmetric matrix (only the lower triangle is read).
SymEigenDecomposition sym_eigen(const DenseMatrix& m);

/// e^M by Padé scaling-and-squaring. Handles defective matrices.
/// Throws NumericsError when the result overflows.
DenseMatrix matrix_exponential(const DenseMatrix& m);

enum class PsdPolicy {
  /// Zero eigenvalues in [-eps_clip, 0); anything more negative is an error.
  Strict,
  /// Zero every negative eigenvalue (projection onto the PSD cone).
  Project,
};

struct PsdSqrt {
  DenseMatrix root;
  int clipped = 0;             // eigenvalues set to zero
  double min_eigenvalue = 0.0;
};

/// Relative clipping threshold: eps_clip = kPsdClipRelative * max|B|.
inline constexpr double kPsdClipRelative = 1e-8;

/// Symmetric square root S of a symmetric positive-semidefinite B (S*S = B).
/// With PsdPolicy::Strict an eigenvalue below -eps_clip throws
/// NumericsError("diffusion matrix not PSD ...").
PsdSqrt psd_sqrt(const DenseMatrix& b, PsdPolicy policy = PsdPolicy::Strict);

/// Solves M x = b with partial pivoting. Throws NumericsError when M is
/// singular to working precision (the message carries the pivot magnitude).
DenseVector solve_linear(const DenseMatrix& m, const DenseVector& b);

}  // namespace pointkin
