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

#include "acceptance/acceptance.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <utility>

#include "randonet/embeddings.hpp"
#include "randonet/error.hpp"
#include "randonet/funcgen.hpp"
#include "randonet/harness.hpp"
#include "randonet/linalg.hpp"
#include "randonet/model.hpp"
#include "randonet/problems.hpp"
#include "randonet/rng.hpp"

namespace randonet::acceptance {
namespace {

CriterionResult make_result(int id, std::string title) {
  CriterionResult r;
  r.id = id;
  r.title = std::move(title);
  return r;
}

using embeddings::EmbeddingKind;
using harness::ExperimentConfig;
using harness::ReportRow;
using linalg::Index;
using linalg::Matrix;
using linalg::Side;
using linalg::Vector;

std::string sci(double v) {
  std::ostringstream os;
  os << std::setprecision(3) << std::scientific << v;
  return os.str();
}

ReportRow run_one(int case_id, EmbeddingKind kind, Index m, double frac,
                  std::uint64_t seed = 0) {
  ExperimentConfig cfg;
  cfg.case_id = case_id;
  cfg.branch_kinds = {kind};
  cfg.branch_sizes = {m};
  cfg.train_fraction = frac;
  cfg.seed_embed = seed;
  cfg.seed_split = seed;
  return harness::run_experiment(cfg).rows.at(0);
}

// ---------------------------------------------------------------------------
// Criteria 1-6: benchmark targets.

CriterionResult criterion1() {
  CriterionResult r = make_result(1, "case 1 antiderivative, JL M=100, 80% train");
  const auto start = std::chrono::steady_clock::now();
  const ReportRow row = run_one(1, EmbeddingKind::kJL, 100, 0.8);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  r.pass = row.mse <= 1e-16 && row.l2_median <= 1e-7 && secs < 10.0;
  r.detail = "mse " + sci(row.mse) + " (<= 1e-16), median L2 " +
             sci(row.l2_median) + " (<= 1e-7), " + sci(secs) +
             " s incl. data (< 10 s), train " + std::to_string(row.train_size);
  return r;
}

CriterionResult criterion2() {
  CriterionResult r = make_result(2, "case 1 antiderivative, JL M=100, 150 training functions");
  const ReportRow row = run_one(1, EmbeddingKind::kJL, 100, 0.15);
  r.pass = row.mse <= 1e-14 && row.train_size == 150;
  r.detail = "mse " + sci(row.mse) + " (<= 1e-14), train " +
             std::to_string(row.train_size);
  return r;
}

CriterionResult criterion3() {
  CriterionResult r = make_result(3, "case 2 pendulum, RFFN M=2000 and JL M=100, 80% train");
  const ReportRow rffn = run_one(2, EmbeddingKind::kRFFN, 2000, 0.8);
  const ReportRow jl = run_one(2, EmbeddingKind::kJL, 100, 0.8);
  r.pass = rffn.mse <= 1e-10 && jl.mse <= 1e-9;
  r.detail = "RFFN mse " + sci(rffn.mse) + " (<= 1e-10), JL mse " +
             sci(jl.mse) + " (<= 1e-9)";
  return r;
}

CriterionResult criterion4() {
  CriterionResult r = make_result(4, "case 3 linear PDE, JL M=100, 80% train");
  const ReportRow row = run_one(3, EmbeddingKind::kJL, 100, 0.8);
  r.pass = row.mse <= 1e-12 && row.l2_median <= 1e-5;
  r.detail = "mse " + sci(row.mse) + " (<= 1e-12), median L2 " +
             sci(row.l2_median) + " (<= 1e-5)";
  return r;
}

CriterionResult criterion5() {
  CriterionResult r = make_result(5, "case 4 Burgers, RFFN M=2000 accurate, JL M=40 plateaus");
  const ReportRow rffn = run_one(4, EmbeddingKind::kRFFN, 2000, 0.8);
  const ReportRow jl = run_one(4, EmbeddingKind::kJL, 40, 0.8);
  r.pass = rffn.mse <= 1e-8 && jl.mse >= 1e-4;
  r.detail = "RFFN mse " + sci(rffn.mse) + " (<= 1e-8), JL mse " +
             sci(jl.mse) + " (>= 1e-4)";
  return r;
}

CriterionResult criterion6() {
  CriterionResult r = make_result(6, "case 5 Allen-Cahn, RFFN M=2000, 80% train");
  const ReportRow row = run_one(5, EmbeddingKind::kRFFN, 2000, 0.8);
  r.pass = row.mse <= 1e-6;
  r.detail = "mse " + sci(row.mse) + " (<= 1e-6)";
  return r;
}

// ---------------------------------------------------------------------------
// Criterion 7: convergence in M, best of three seeds.

CriterionResult criterion7() {
  CriterionResult r = make_result(7, "convergence: best-of-3 MSE(M=2000) <= 1e-3 MSE(M=10)");
  const std::vector<Index> sizes{10, 40, 100, 500, 2000};
  bool all = true;
  std::string detail;
  for (int c = 1; c <= 5; ++c) {
    const EmbeddingKind kind =
        (c == 1 || c == 3) ? EmbeddingKind::kJL : EmbeddingKind::kRFFN;
    std::vector<double> best(sizes.size(), INFINITY);
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
      ExperimentConfig cfg;
      cfg.case_id = c;
      cfg.branch_kinds = {kind};
      cfg.branch_sizes = sizes;
      cfg.seed_embed = seed;
      cfg.seed_split = seed;
      const auto rep = harness::sweep(cfg);
      for (std::size_t i = 0; i < sizes.size(); ++i) {
        best[i] = std::min(best[i], rep.rows.at(i).mse);
      }
    }
    const bool ok = best.back() <= 1e-3 * best.front();
    all = all && ok;
    detail += "case " + std::to_string(c) + " " +
              std::string(embeddings::kind_name(kind)) + " " +
              sci(best.front()) + " -> " + sci(best.back()) +
              (ok ? "" : " FAIL") + (c < 5 ? "; " : "");
  }
  r.pass = all;
  r.detail = detail;
  return r;
}

// ---------------------------------------------------------------------------
// Criterion 8: property suite.

struct PropertyCheck {
  std::string name;
  std::function<std::pair<bool, std::string>()> run;
};

Matrix gaussian_matrix(Index rows, Index cols, std::uint64_t seed) {
  Rng rng(seed);
  Matrix a(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) a(i, j) = rng.gaussian();
  return a;
}

double rel(const Matrix& a, const Matrix& b) {
  const double nb = b.norm();
  return (a - b).norm() / (nb > 0.0 ? nb : 1.0);
}

std::pair<bool, std::string> check_moore_penrose() {
  double worst = 0.0;
  for (auto [rows, cols] : {std::pair<Index, Index>{30, 20}, {20, 30}}) {
    const Matrix a = gaussian_matrix(rows, cols, 11 + rows);
    const Matrix eye_r = Matrix::Identity(rows, rows);
    const auto svd = linalg::tsvd_factorize(a);
    const auto cod = linalg::cod_factorize(a);
    for (const Matrix& pinv : {linalg::tsvd_pinv_apply(svd, eye_r, Side::kLeft),
                               linalg::cod_pinv_apply(cod, eye_r, Side::kLeft)}) {
      worst = std::max(worst, rel(a * pinv * a, a));
      worst = std::max(worst, rel(pinv * a * pinv, pinv));
    }
  }
  return {worst <= 1e-10, "MP " + sci(worst)};
}

std::pair<bool, std::string> check_solver_agreement() {
  // Rank 6 with singular values 1..1e-3 and the rest at 1e-14: a clean gap.
  const Index rows = 40, cols = 25;
  Eigen::HouseholderQR<Matrix> qu(gaussian_matrix(rows, rows, 21));
  Eigen::HouseholderQR<Matrix> qv(gaussian_matrix(cols, cols, 22));
  const Matrix u = qu.householderQ() * Matrix::Identity(rows, cols);
  const Matrix v = qv.householderQ() * Matrix::Identity(cols, cols);
  Vector sigma = Vector::Constant(cols, 1e-14);
  for (Index i = 0; i < 6; ++i) sigma(i) = std::pow(10.0, -0.6 * static_cast<double>(i));
  const Matrix a = u * sigma.asDiagonal() * v.transpose();
  const Matrix b = gaussian_matrix(rows, 3, 23);
  const auto tol = linalg::RankTolerance::absolute(1e-9);
  const Matrix xs = linalg::tsvd_pinv_apply(linalg::tsvd_factorize(a, tol), b, Side::kLeft);
  const Matrix xc = linalg::cod_pinv_apply(linalg::cod_factorize(a, tol), b, Side::kLeft);
  const double e = rel(xc, xs);
  return {e <= 1e-8, "tsvd/cod " + sci(e)};
}

std::pair<bool, std::string> check_tikhonov_limit() {
  const Matrix psi = gaussian_matrix(50, 200, 31);
  const Matrix y = gaussian_matrix(3, 200, 32);
  const Matrix w0 = linalg::tikhonov_solve(psi, y, 0.0);
  const Matrix w1 = linalg::tikhonov_solve(psi, y, 1e-14);
  const double e = rel(w1, w0);
  return {e <= 1e-6, "tikhonov " + sci(e)};
}

std::pair<bool, std::string> check_rffn_kernel() {
  auto spec = embeddings::rffn_spec(2, 4000, 41);
  spec.input_scale = 1.0;
  const auto map = embeddings::sample(spec);
  Rng rng(42);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    Vector u(2), d(2);
    u << rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0);
    const double radius = rng.uniform(0.0, 3.0);
    const double angle = rng.uniform(0.0, 2.0 * M_PI);
    d << radius * std::cos(angle), radius * std::sin(angle);
    const Vector v = u + d;
    const double k = map.apply_one(u).dot(map.apply_one(v)) * 4.0;
    worst = std::max(worst, std::abs(k - std::exp(-radius * radius / 2.0)));
  }
  return {worst <= 0.05, "kernel " + sci(worst)};
}

double max_rel(const Vector& approx, const Vector& exact) {
  return (approx - exact).cwiseAbs().maxCoeff() /
         std::max(exact.cwiseAbs().maxCoeff(), 1e-300);
}

std::pair<bool, std::string> check_derivatives() {
  double worst = 0.0;
  for (int c = 1; c <= 5; ++c) {
    const auto cs = problems::case_study(c, 51, 5);
    const Vector x = funcgen::equispaced(cs.domain_lo, cs.domain_hi, 100);
    for (const auto& p : funcgen::sample_params(cs.sampling)) {
      const double h1 = 1e-5, h2 = 1e-4;
      Vector fd1(x.size()), fd2(x.size());
      for (Index i = 0; i < x.size(); ++i) {
        auto u = [&](double t) { return funcgen::eval_u(p, t); };
        fd1(i) = (u(x(i) - 2 * h1) - 8 * u(x(i) - h1) + 8 * u(x(i) + h1) -
                  u(x(i) + 2 * h1)) /
                 (12 * h1);
        fd2(i) = (-u(x(i) - 2 * h2) + 16 * u(x(i) - h2) - 30 * u(x(i)) +
                  16 * u(x(i) + h2) - u(x(i) + 2 * h2)) /
                 (12 * h2 * h2);
      }
      worst = std::max(worst, max_rel(fd1, funcgen::eval_du(p, x)));
      worst = std::max(worst, max_rel(fd2, funcgen::eval_d2u(p, x)));
    }
  }
  return {worst <= 1e-6, "du/d2u " + sci(worst)};
}

std::pair<bool, std::string> check_rhs_operators() {
  double worst = 0.0;
  for (int c = 3; c <= 5; ++c) {
    const auto cs = problems::case_study(c, 61, 5);
    // Fine grid with 100 sub-intervals per output interval, plus ghost points.
    const Index sub = 100;
    const double h = (cs.domain_hi - cs.domain_lo) / static_cast<double>((cs.n - 1) * sub);
    for (const auto& p : funcgen::sample_params(cs.sampling)) {
      const Vector exact = problems::case_output(cs, p);
      Vector fd(cs.n);
      for (Index k = 0; k < cs.n; ++k) {
        const double x = cs.domain_lo + static_cast<double>(k * sub) * h;
        const double um = funcgen::eval_u(p, x - h);
        const double u0 = funcgen::eval_u(p, x);
        const double up = funcgen::eval_u(p, x + h);
        const double du = (up - um) / (2 * h);
        const double d2u = (up - 2 * u0 + um) / (h * h);
        if (c == 3) fd(k) = cs.nu * d2u + cs.gamma * du + cs.zeta * u0;
        if (c == 4) fd(k) = cs.nu * d2u - u0 * du;
        if (c == 5) fd(k) = cs.nu * d2u + u0 - u0 * u0 * u0;
      }
      worst = std::max(worst, max_rel(fd, exact));
    }
  }
  return {worst <= 1e-5, "rhs " + sci(worst)};
}

std::pair<bool, std::string> check_antiderivative() {
  const auto cs = problems::case_study(1, 71, 20);
  double worst = 0.0;
  for (const auto& p : funcgen::sample_params(cs.sampling)) {
    auto u = [&](double t) { return funcgen::eval_u(p, t); };
    for (double x : {0.05, 0.2, 0.37, 0.5, 0.71, 0.9, 1.0}) {
      const double q = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
          u, 0.0, x, 15, 1e-14);
      worst = std::max(worst, std::abs(q - funcgen::eval_antiderivative(p, x, 0.0)));
    }
  }
  return {worst <= 1e-12, "antiderivative " + sci(worst)};
}

std::pair<bool, std::string> check_pendulum_linear() {
  const double eps = 1e-6, k = 9.81;
  auto p = funcgen::RandomFunctionParams::zero(200);
  p.a0 = eps;
  const Vector t = funcgen::equispaced(0.0, 1.0, 100);
  const Vector v = problems::pendulum_trajectory(p, k, t, {});
  double worst = 0.0;
  for (Index i = 0; i < t.size(); ++i) {
    const double exact = eps / k * (1.0 - std::cos(std::sqrt(k) * t(i)));
    worst = std::max(worst, std::abs(v(i) - exact));
  }
  return {worst <= 1e-9, "pendulum " + sci(worst)};
}

std::pair<bool, std::string> check_aligned_unaligned() {
  auto cs = problems::case_study(3, 81, 5);
  cs.m = 10;
  cs.n = 10;
  const auto data = problems::build_case(cs);
  const auto& ds = data.dataset;
  const auto trunk = embeddings::tanh_trunk_spec(cs.domain_lo, cs.domain_hi, 8, 0.0, 82);
  const auto branch = embeddings::jl_spec(10, 8, 83);
  const auto ma = model::train_aligned(ds, trunk, branch);
  const auto mu = model::train_unaligned(model::explode_aligned(ds), trunk, branch);
  const Matrix pa = ma.evaluate_batch(ds.inputs, ds.output_grid);
  const Matrix pu = mu.evaluate_batch(ds.inputs, ds.output_grid);
  const double e = (pa - pu).colwise().norm().maxCoeff();
  return {e <= 1e-6, "aligned/unaligned " + sci(e)};
}

std::pair<bool, std::string> check_determinism() {
  ExperimentConfig cfg;
  cfg.case_id = 4;
  cfg.dataset_size = 200;
  cfg.branch_kinds = {EmbeddingKind::kJL, EmbeddingKind::kRFFN};
  cfg.branch_sizes = {20, 100};
  cfg.seed_data = 91;
  cfg.seed_embed = 92;
  cfg.seed_split = 93;
  harness::DatasetCache c1, c2;
  const auto a = harness::run_experiment(cfg, {}, &c1);
  const auto b = harness::run_experiment(cfg, {}, &c2);
  bool same = a.dataset_fingerprint == b.dataset_fingerprint &&
              a.rows.size() == b.rows.size();
  for (std::size_t i = 0; same && i < a.rows.size(); ++i) {
    const auto& x = a.rows[i];
    const auto& y = b.rows[i];
    same = x.mse == y.mse && x.l2_p5 == y.l2_p5 && x.l2_median == y.l2_median &&
           x.l2_p95 == y.l2_p95;
  }
  return {same, same ? "determinism ok" : "determinism MISMATCH"};
}

CriterionResult criterion8() {
  CriterionResult r = make_result(8, "property suite");
  const std::vector<PropertyCheck> checks = {
      {"moore_penrose", check_moore_penrose},
      {"solver_agreement", check_solver_agreement},
      {"tikhonov_limit", check_tikhonov_limit},
      {"rffn_kernel", check_rffn_kernel},
      {"derivatives", check_derivatives},
      {"rhs_operators", check_rhs_operators},
      {"antiderivative", check_antiderivative},
      {"pendulum_linear", check_pendulum_linear},
      {"aligned_unaligned", check_aligned_unaligned},
      {"determinism", check_determinism},
  };
  r.pass = true;
  for (std::size_t i = 0; i < checks.size(); ++i) {
    std::pair<bool, std::string> res;
    try {
      res = checks[i].run();
    } catch (const std::exception& e) {
      res = {false, checks[i].name + " threw: " + e.what()};
    }
    r.pass = r.pass && res.first;
    r.detail += res.second + (res.first ? "" : " FAIL");
    if (i + 1 < checks.size()) r.detail += ", ";
  }
  return r;
}

}  // namespace

CriterionResult run_criterion(int id) {
  const auto start = std::chrono::steady_clock::now();
  CriterionResult r;
  try {
    switch (id) {
      case 1: r = criterion1(); break;
      case 2: r = criterion2(); break;
      case 3: r = criterion3(); break;
      case 4: r = criterion4(); break;
      case 5: r = criterion5(); break;
      case 6: r = criterion6(); break;
      case 7: r = criterion7(); break;
      case 8: r = criterion8(); break;
      default:
        fail(ErrorKind::kInvalidArgument,
             "unknown acceptance criterion " + std::to_string(id));
    }
  } catch (const std::exception& e) {
    r.id = id;
    r.title = "criterion " + std::to_string(id);
    r.pass = false;
    r.detail = std::string("error: ") + e.what();
  }
  r.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return r;
}

std::vector<CriterionResult> run_criteria(const std::vector<int>& ids,
                                          std::ostream& out) {
  std::vector<int> todo = ids;
  if (todo.empty()) {
    for (int i = 1; i <= kNumCriteria; ++i) todo.push_back(i);
  }
  std::vector<CriterionResult> results;
  for (int id : todo) {
    results.push_back(run_criterion(id));
    out << format_line(results.back()) << std::endl;
  }
  return results;
}

std::string format_line(const CriterionResult& r) {
  std::ostringstream os;
  os << (r.pass ? "PASS" : "FAIL") << " criterion " << r.id << ": " << r.title
     << " | " << r.detail << " | " << std::fixed << std::setprecision(1)
     << r.seconds << " s";
  return os.str();
}

}  // namespace randonet::acceptance
