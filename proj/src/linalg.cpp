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

#include "randonet/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

#include "json.hpp"

#include "randonet/error.hpp"

namespace randonet::linalg {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

std::string shape(Index r, Index c) {
  std::ostringstream os;
  os << r << "x" << c;
  return os.str();
}

void require_conforming(bool ok, const char* op, Index ar, Index ac,
                        const Matrix& b, Side side) {
  if (ok) return;
  std::ostringstream os;
  os << op << ": cannot apply pseudo-inverse of a " << shape(ar, ac)
     << " matrix " << (side == Side::kLeft ? "to" : "from the right of")
     << " a " << shape(b.rows(), b.cols()) << " operand";
  fail(ErrorKind::kShapeMismatch, os.str());
}

// E <- Z E, Z = H_{r-1} ... H_0 with H_k acting on coordinates {k} u tail.
void apply_z_on_left(const CodFactors& f, Matrix& e) {
  const Index r = f.numerical_rank;
  const Index tail = f.cols - r;
  if (tail == 0) return;
  Eigen::RowVectorXd w(e.cols());
  for (Index k = 0; k < r; ++k) {
    const double tau = f.rz_tau(k);
    if (tau == 0.0) continue;
    auto v = f.rz_vectors.row(k);
    w.noalias() = e.row(k) + v * e.bottomRows(tail);
    e.row(k) -= tau * w;
    e.bottomRows(tail).noalias() -= tau * v.transpose() * w;
  }
}

// G <- G Z.
void apply_z_on_right(const CodFactors& f, Matrix& g) {
  const Index r = f.numerical_rank;
  const Index tail = f.cols - r;
  if (tail == 0) return;
  Vector w(g.rows());
  for (Index k = r - 1; k >= 0; --k) {
    const double tau = f.rz_tau(k);
    if (tau == 0.0) continue;
    auto v = f.rz_vectors.row(k);
    w.noalias() = g.col(k) + g.rightCols(tail) * v.transpose();
    g.col(k) -= tau * w;
    g.rightCols(tail).noalias() -= tau * w * v;
  }
}

// x <- Q^T x (transpose) or x <- Q x, Q = H_0 ... H_{r-1}.
void apply_q(const CodFactors& f, Matrix& x, bool transpose) {
  const Index r = f.numerical_rank;
  Vector work(x.cols());
  for (Index i = 0; i < r; ++i) {
    const Index k = transpose ? i : r - 1 - i;
    const Index len = f.rows - k;
    x.bottomRows(len).applyHouseholderOnTheLeft(
        f.qr_packed.col(k).tail(len - 1), f.qr_tau(k), work.data());
  }
}

nlohmann::json to_json_array(const Vector& v) {
  return nlohmann::json(std::vector<double>(v.data(), v.data() + v.size()));
}

}  // namespace

RankTolerance RankTolerance::absolute(double value) {
  require(std::isfinite(value) && value > 0.0, ErrorKind::kInvalidArgument,
          "rank tolerance must be a positive finite number");
  return RankTolerance(value);
}

double RankTolerance::resolve(Index rows, Index cols, double leading) const {
  if (!is_automatic()) return value_;
  return static_cast<double>(std::max(rows, cols)) * kEps * leading;
}

std::string RankTolerance::to_string() const {
  if (is_automatic()) return "auto";
  std::ostringstream os;
  os.precision(17);
  os << value_;
  return os.str();
}

void require_finite(const Matrix& a, const char* what) {
  require(a.rows() >= 1 && a.cols() >= 1, ErrorKind::kShapeMismatch,
          std::string(what) + ": matrix must have at least one row and column");
  require(a.allFinite(), ErrorKind::kNonFinite,
          std::string(what) + ": matrix contains NaN or Inf entries");
}

TruncatedSvd tsvd_factorize(const Matrix& a, RankTolerance tol) {
  require_finite(a, "tsvd_factorize");
  Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& sigma = svd.singularValues();
  TruncatedSvd f;
  f.rows = a.rows();
  f.cols = a.cols();
  f.rank_tolerance = tol.resolve(a.rows(), a.cols(), sigma.size() ? sigma(0) : 0.0);
  Index r = 0;
  while (r < sigma.size() && sigma(r) > f.rank_tolerance) ++r;
  f.singular_values = sigma.head(r);
  f.left_vectors = svd.matrixU().leftCols(r);
  f.right_vectors = svd.matrixV().leftCols(r);
  return f;
}

Matrix tsvd_pinv_apply(const TruncatedSvd& f, const Matrix& b, Side side) {
  const Vector inv = f.singular_values.cwiseInverse();
  if (side == Side::kLeft) {
    require_conforming(b.rows() == f.rows, "tsvd_pinv_apply", f.rows, f.cols, b,
                       side);
    if (f.rank() == 0) return Matrix::Zero(f.cols, b.cols());
    const Matrix projected = inv.asDiagonal() * (f.left_vectors.transpose() * b);
    return f.right_vectors * projected;
  }
  require_conforming(b.cols() == f.cols, "tsvd_pinv_apply", f.rows, f.cols, b,
                     side);
  if (f.rank() == 0) return Matrix::Zero(b.rows(), f.rows);
  const Matrix projected = (b * f.right_vectors) * inv.asDiagonal();
  return projected * f.left_vectors.transpose();
}

Matrix tikhonov_solve(const Matrix& psi, const Matrix& y, double lambda) {
  require(std::isfinite(lambda) && lambda >= 0.0, ErrorKind::kInvalidArgument,
          "tikhonov_solve: lambda must be finite and non-negative");
  require_finite(psi, "tikhonov_solve");
  require_finite(y, "tikhonov_solve");
  if (y.cols() != psi.cols()) {
    fail(ErrorKind::kShapeMismatch,
         "tikhonov_solve: features " + shape(psi.rows(), psi.cols()) +
             " and targets " + shape(y.rows(), y.cols()) +
             " must share the sample dimension");
  }
  if (lambda == 0.0) {
    return tsvd_pinv_apply(tsvd_factorize(psi), y, Side::kRight);
  }
  Eigen::BDCSVD<Matrix> svd(psi, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& sigma = svd.singularValues();
  Index r = 0;
  while (r < sigma.size() && sigma(r) > 0.0) ++r;
  const double l2 = lambda * lambda;
  // filter_i / sigma_i with filter_i = sigma_i^2 / (sigma_i^2 + lambda^2).
  Vector weight(r);
  for (Index i = 0; i < r; ++i) {
    weight(i) = sigma(i) / (sigma(i) * sigma(i) + l2);
  }
  const Matrix yv = (y * svd.matrixV().leftCols(r)) * weight.asDiagonal();
  return yv * svd.matrixU().leftCols(r).transpose();
}

CodFactors cod_factorize(const Matrix& a, RankTolerance tol) {
  require_finite(a, "cod_factorize");
  const Index rows = a.rows();
  const Index cols = a.cols();
  const Index kmax = std::min(rows, cols);

  CodFactors f;
  f.rows = rows;
  f.cols = cols;
  f.qr_packed = a;
  f.qr_tau = Vector::Zero(kmax);
  f.permutation.resize(cols);
  std::iota(f.permutation.begin(), f.permutation.end(), Index{0});

  Matrix& qr = f.qr_packed;
  Vector norms = qr.colwise().norm().transpose();
  Vector reference_norms = norms;
  Vector workspace(cols);
  const double tol3z = std::sqrt(kEps);
  double threshold = 0.0;
  Index rank = 0;

  // Householder QR with column pivoting (Businger-Golub), stopped as soon as
  // the largest remaining column norm drops to the tolerance.
  for (Index k = 0; k < kmax; ++k) {
    Index pivot;
    norms.tail(cols - k).maxCoeff(&pivot);
    pivot += k;
    if (pivot != k) {
      qr.col(pivot).swap(qr.col(k));
      std::swap(f.permutation[pivot], f.permutation[k]);
      norms(pivot) = norms(k);
      reference_norms(pivot) = reference_norms(k);
    }

    double tau = 0.0;
    double beta = 0.0;
    qr.col(k).tail(rows - k).makeHouseholderInPlace(tau, beta);
    qr(k, k) = beta;
    if (k == 0) threshold = tol.resolve(rows, cols, std::abs(beta));
    if (!(std::abs(beta) > threshold)) break;
    f.qr_tau(k) = tau;
    rank = k + 1;

    if (k + 1 < cols) {
      qr.bottomRightCorner(rows - k, cols - k - 1)
          .applyHouseholderOnTheLeft(qr.col(k).tail(rows - k - 1), tau,
                                     workspace.data());
    }
    // Partial column norm downdate with recomputation on cancellation
    // (the LAPACK xLAQP2 rule).
    for (Index j = k + 1; j < cols; ++j) {
      if (norms(j) == 0.0) continue;
      double t = std::abs(qr(k, j)) / norms(j);
      t = std::max(0.0, (1.0 + t) * (1.0 - t));
      const double ratio = norms(j) / reference_norms(j);
      if (t * ratio * ratio <= tol3z) {
        norms(j) = k + 1 < rows ? qr.col(j).tail(rows - k - 1).norm() : 0.0;
        reference_norms(j) = norms(j);
      } else {
        norms(j) *= std::sqrt(t);
      }
    }
  }
  f.numerical_rank = rank;
  f.rank_tolerance = threshold;

  // RZ reduction of the r x cols upper trapezoid [R11 R12] to [T 0] Z^T.
  const Index r = rank;
  const Index tail = cols - r;
  Matrix trap = qr.topRows(r).triangularView<Eigen::Upper>();
  f.rz_vectors = Matrix::Zero(r, tail);
  f.rz_tau = Vector::Zero(r);
  if (tail > 0) {
    Vector x(tail + 1);
    Vector w;
    for (Index k = r - 1; k >= 0; --k) {
      x(0) = trap(k, k);
      x.tail(tail) = trap.row(k).tail(tail).transpose();
      double tau = 0.0;
      double beta = 0.0;
      x.makeHouseholderInPlace(tau, beta);
      auto v = x.tail(tail);
      if (k > 0) {
        w.noalias() = trap.col(k).head(k) + trap.topRightCorner(k, tail) * v;
        trap.col(k).head(k) -= tau * w;
        trap.topRightCorner(k, tail).noalias() -= tau * w * v.transpose();
      }
      trap(k, k) = beta;
      trap.row(k).tail(tail).setZero();
      f.rz_vectors.row(k) = v.transpose();
      f.rz_tau(k) = tau;
    }
  }
  f.middle_triangular = trap.leftCols(r).triangularView<Eigen::Upper>();
  return f;
}

Matrix cod_pinv_apply(const CodFactors& f, const Matrix& b, Side side) {
  const Index r = f.numerical_rank;
  const auto core = f.middle_triangular.triangularView<Eigen::Upper>();

  if (side == Side::kLeft) {
    require_conforming(b.rows() == f.rows, "cod_pinv_apply", f.rows, f.cols, b,
                       side);
    if (r == 0) return Matrix::Zero(f.cols, b.cols());
    Matrix qtb = b;
    apply_q(f, qtb, true);
    Matrix e = Matrix::Zero(f.cols, b.cols());
    e.topRows(r) = core.solve(qtb.topRows(r));
    apply_z_on_left(f, e);
    Matrix x(f.cols, b.cols());
    for (Index j = 0; j < f.cols; ++j) x.row(f.permutation[j]) = e.row(j);
    return x;
  }

  require_conforming(b.cols() == f.cols, "cod_pinv_apply", f.rows, f.cols, b,
                     side);
  if (r == 0) return Matrix::Zero(b.rows(), f.rows);
  Matrix g(b.rows(), f.cols);
  for (Index j = 0; j < f.cols; ++j) g.col(j) = b.col(f.permutation[j]);
  apply_z_on_right(f, g);
  Matrix y = Matrix::Zero(f.rows, b.rows());
  y.topRows(r) = core.transpose().solve(g.leftCols(r).transpose());
  apply_q(f, y, false);
  return y.transpose();
}

Matrix CodFactors::left_orthogonal() const {
  Matrix q = Matrix::Identity(rows, numerical_rank);
  apply_q(*this, q, false);
  return q;
}

Matrix CodFactors::right_orthogonal() const {
  Matrix z = Matrix::Identity(cols, cols);
  apply_z_on_left(*this, z);
  return z;
}

Matrix CodFactors::permutation_matrix() const {
  Matrix p = Matrix::Zero(cols, cols);
  for (Index j = 0; j < cols; ++j) p(permutation[j], j) = 1.0;
  return p;
}

void dump_factors(std::ostream& os, const TruncatedSvd& f) {
  nlohmann::json j;
  j["factorization"] = "tsvd";
  j["rows"] = f.rows;
  j["cols"] = f.cols;
  j["rank"] = f.rank();
  j["rank_tolerance"] = f.rank_tolerance;
  j["singular_values"] = to_json_array(f.singular_values);
  os << j.dump(2) << "\n";
}

void dump_factors(std::ostream& os, const CodFactors& f) {
  nlohmann::json j;
  j["factorization"] = "cod";
  j["rows"] = f.rows;
  j["cols"] = f.cols;
  j["rank"] = f.numerical_rank;
  j["rank_tolerance"] = f.rank_tolerance;
  j["permutation"] = f.permutation;
  j["core_diagonal"] = to_json_array(f.middle_triangular.diagonal());
  os << j.dump(2) << "\n";
}

}  // namespace randonet::linalg
