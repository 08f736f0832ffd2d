#include "pointkin/numerics.hpp"

#include "pointkin/error.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <limits>
#include <sstream>

namespace pointkin {

DenseMatrix dense_matrix(std::initializer_list<std::initializer_list<double>> rows) {
  const auto d = static_cast<Eigen::Index>(rows.size());
  if (d == 0 || d > kMaxDim) {
    throw ValidationError("matrix dimension must be in [1, " + std::to_string(kMaxDim) + "]");
  }
  DenseMatrix m(d, d);
  Eigen::Index i = 0;
  for (const auto& row : rows) {
    if (static_cast<Eigen::Index>(row.size()) != d) {
      throw ValidationError("matrix must be square: row " + std::to_string(i) + " has " +
                            std::to_string(row.size()) + " entries, expected " +
                            std::to_string(d));
    }
    Eigen::Index j = 0;
    for (double v : row) m(i, j++) = v;
    ++i;
  }
  require_square_finite(m, "matrix");
  return m;
}

void require_square_finite(const DenseMatrix& m, const char* what) {
  if (m.rows() == 0 || m.rows() != m.cols()) {
    std::ostringstream os;
    os << what << " must be square and non-empty (got " << m.rows() << "x" << m.cols() << ")";
    throw ValidationError(os.str());
  }
  if (!m.allFinite()) {
    throw ValidationError(std::string(what) + " has non-finite entries");
  }
}

double max_abs(const DenseMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

SymEigenDecomposition sym_eigen(const DenseMatrix& m) {
  require_square_finite(m, "symmetric matrix");
  Eigen::SelfAdjointEigenSolver<DenseMatrix> solver(m, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) {
    throw NumericsError("symmetric eigensolver did not converge");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

DenseMatrix matrix_exponential(const DenseMatrix& m) {
  require_square_finite(m, "exponent matrix");
  // Extended precision keeps small entries (cancellation) accurate to ~1e-15 relative.
  using Extended = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor,
                                 kMaxDim, kMaxDim>;
  const Extended ext = m.cast<long double>();
  DenseMatrix result = Extended(ext.exp()).cast<double>();
  if (!result.allFinite()) {
    std::ostringstream os;
    os.precision(6);
    os << "matrix exponential overflow (max|M| = " << max_abs(m)
       << ", 1-norm = " << m.cwiseAbs().colwise().sum().maxCoeff() << ")";
    throw NumericsError(os.str());
  }
  return result;
}

PsdSqrt psd_sqrt(const DenseMatrix& b, PsdPolicy policy) {
  require_square_finite(b, "diffusion matrix");
  const double scale = max_abs(b);
  const double sym_tol = 1e-10 * std::max(1.0, scale);
  for (Eigen::Index i = 0; i < b.rows(); ++i) {
    for (Eigen::Index j = 0; j < i; ++j) {
      if (std::abs(b(i, j) - b(j, i)) > sym_tol) {
        std::ostringstream os;
        os << "diffusion matrix not symmetric at (" << i << "," << j << ")";
        throw ValidationError(os.str());
      }
    }
  }

  PsdSqrt out;
  if (scale == 0.0) {
    out.root = DenseMatrix::Zero(b.rows(), b.cols());
    return out;
  }

  Eigen::SelfAdjointEigenSolver<DenseMatrix> solver(b, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) {
    throw NumericsError("symmetric eigensolver did not converge");
  }
  DenseVector w = solver.eigenvalues();
  out.min_eigenvalue = w.minCoeff();
  const double eps_clip = kPsdClipRelative * scale;
  for (Eigen::Index k = 0; k < w.size(); ++k) {
    if (w(k) >= 0.0) {
      w(k) = std::sqrt(w(k));
      continue;
    }
    if (policy == PsdPolicy::Strict && w(k) < -eps_clip) {
      std::ostringstream os;
      os.precision(17);
      os << "diffusion matrix not PSD: eigenvalue " << w(k) << " below -" << eps_clip;
      throw NumericsError(os.str());
    }
    w(k) = 0.0;
    ++out.clipped;
  }
  const auto& v = solver.eigenvectors();
  out.root = v * w.asDiagonal() * v.transpose();
  // Symmetrize exactly; the product above is symmetric only up to rounding.
  out.root = 0.5 * (out.root + out.root.transpose()).eval();
  return out;
}

DenseVector solve_linear(const DenseMatrix& m, const DenseVector& b) {
  require_square_finite(m, "system matrix");
  if (b.size() != m.rows()) {
    throw ValidationError("right-hand side has dimension " + std::to_string(b.size()) +
                          ", expected " + std::to_string(m.rows()));
  }
  if (!b.allFinite()) throw ValidationError("right-hand side has non-finite entries");

  Eigen::PartialPivLU<DenseMatrix> lu(m);
  const auto diag = lu.matrixLU().diagonal().cwiseAbs();
  const double pivot_min = diag.minCoeff();
  const double threshold = std::numeric_limits<double>::epsilon() *
                           static_cast<double>(m.rows()) * std::max(max_abs(m), 1e-300);
  if (!(pivot_min > threshold)) {
    std::ostringstream os;
    os.precision(6);
    os << "matrix is singular to working precision (smallest pivot " << pivot_min << ")";
    throw NumericsError(os.str());
  }
  return lu.solve(b);
}

}  // namespace pointkin
