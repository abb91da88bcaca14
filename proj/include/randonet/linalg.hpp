// Copyright 2026 The RandONet Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Regularized pseudo-inversion of dense real matrices.
//
// Two factorization routes are provided, both returning the action of a
// rank-truncated Moore-Penrose pseudo-inverse rather than the inverse itself:
//
//   * truncated SVD: A = U_r S_r V_r^T keeping singular values above a
//     tolerance, A^+ = V_r S_r^-1 U_r^T;
//   * complete orthogonal decomposition (COD): a rank-revealing Householder
//     QR with column pivoting, A P = Q [R11 R12; 0 ~0], followed by an RZ
//     reduction of the leading trapezoid, [R11 R12] = [T 0] Z^T, so that
//     A = Q_1 T [I 0] Z^T P^T and A^+ = P Z [T^-1; 0] Q_1^T. T is upper
//     triangular and is inverted by back substitution.
//
// LQ factorizations of a matrix are obtained by factorizing its transpose.

#ifndef RANDONET_LINALG_HPP_
#define RANDONET_LINALG_HPP_

#include <Eigen/Dense>
#include <iosfwd>
#include <string>
#include <vector>

namespace randonet::linalg {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Which pseudo-inverse action to compute: kLeft is A^+ B, kRight is B A^+.
enum class Side { kLeft, kRight };

/// Threshold below which singular values (tSVD) or pivots |R_kk| (COD) are
/// treated as zero. The automatic rule is max(rows, cols) * eps * leading,
/// where `leading` is sigma_max or |R_00|.
class RankTolerance {
 public:
  static RankTolerance automatic() { return RankTolerance(-1.0); }
  static RankTolerance absolute(double value);

  bool is_automatic() const { return value_ < 0.0; }
  double value() const { return value_; }
  double resolve(Index rows, Index cols, double leading) const;

  std::string to_string() const;

 private:
  explicit RankTolerance(double v) : value_(v) {}
  double value_;
};

/// Throws kNonFinite if any entry is NaN or Inf, kShapeMismatch if empty.
void require_finite(const Matrix& a, const char* what);

struct TruncatedSvd {
  Index rows = 0;
  Index cols = 0;
  Matrix left_vectors;    // rows x r
  Vector singular_values; // r, non-increasing
  Matrix right_vectors;   // cols x r
  double rank_tolerance = 0.0;

  Index rank() const { return singular_values.size(); }
};

TruncatedSvd tsvd_factorize(const Matrix& a,
                            RankTolerance tol = RankTolerance::automatic());

Matrix tsvd_pinv_apply(const TruncatedSvd& f, const Matrix& b, Side side);

/// W = Y Psi^T (Psi Psi^T + lambda^2 I)^-1, evaluated through the SVD of Psi
/// with filter factors sigma^2 / (sigma^2 + lambda^2). Psi is N x m, Y is
/// k x m, the result is k x N. With lambda = 0 this is the tSVD solution at
/// the automatic tolerance.
Matrix tikhonov_solve(const Matrix& psi, const Matrix& y, double lambda);

struct CodFactors {
  Index rows = 0;
  Index cols = 0;
  Index numerical_rank = 0;
  double rank_tolerance = 0.0;
  // Column j of A P is column permutation[j] of A.
  std::vector<Index> permutation;
  // Householder QR in LAPACK packed form: reflector k lives below the
  // diagonal of column k, tau in qr_tau(k). Only the first rank columns are
  // meaningful.
  Matrix qr_packed;
  Vector qr_tau;
  // RZ reflectors: reflector k acts on coordinates {k} and {r, ..., cols-1}
  // with essential part rz_vectors.row(k) (length cols - r).
  Matrix rz_vectors;
  Vector rz_tau;
  // r x r upper triangular core.
  Matrix middle_triangular;

  /// Q_1, rows x r with orthonormal columns.
  Matrix left_orthogonal() const;
  /// Z, cols x cols orthogonal; A P = Q_1 T [I 0] Z^T.
  Matrix right_orthogonal() const;
  /// Permutation matrix P with A P the pivoted matrix.
  Matrix permutation_matrix() const;
};

CodFactors cod_factorize(const Matrix& a,
                         RankTolerance tol = RankTolerance::automatic());

Matrix cod_pinv_apply(const CodFactors& f, const Matrix& b, Side side);

/// Diagnostic dump of factor contents as JSON.
void dump_factors(std::ostream& os, const TruncatedSvd& f);
void dump_factors(std::ostream& os, const CodFactors& f);

}  // namespace randonet::linalg

#endif  // RANDONET_LINALG_HPP_
