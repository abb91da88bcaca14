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

#include "randonet/funcgen.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>

#include "randonet/error.hpp"
#include "randonet/rng.hpp"

namespace randonet::funcgen {
namespace {

constexpr double kTinyShape = 1e-12;

double sign_factor(ExponentSign sign) {
  return sign == ExponentSign::kDecaying ? -1.0 : 1.0;
}

void check_range(const Range& r, const char* name) {
  require(std::isfinite(r.lo) && std::isfinite(r.hi) && r.lo <= r.hi,
          ErrorKind::kInvalidArgument,
          std::string("sampling range for ") + name +
              " must be finite with lo <= hi");
}

// erf(b) - erf(a), using erfc when both arguments share a sign so that the
// result keeps full relative accuracy in the tails.
double erf_difference(double b, double a) {
  if (a > 0.0 && b > 0.0) return std::erfc(a) - std::erfc(b);
  if (a < 0.0 && b < 0.0) return std::erfc(-b) - std::erfc(-a);
  return std::erf(b) - std::erf(a);
}

double poly_antiderivative(const RandomFunctionParams& p, double x) {
  return x * (p.a0 + x * (p.a1 / 2.0 + x * p.a2 / 3.0));
}

}  // namespace

void RandomFunctionParams::validate() const {
  require(s.size() == w.size() && c.size() == w.size(),
          ErrorKind::kShapeMismatch, "w, s and c must have equal length");
  require(w.allFinite() && s.allFinite() && c.allFinite() &&
              std::isfinite(a0) && std::isfinite(a1) && std::isfinite(a2),
          ErrorKind::kNonFinite, "function parameters must be finite");
  require((s.array() >= 0.0).all(), ErrorKind::kInvalidArgument,
          "shape parameters must be non-negative");
}

RandomFunctionParams RandomFunctionParams::zero(Index terms) {
  RandomFunctionParams p;
  p.w = Vector::Zero(terms);
  p.s = Vector::Zero(terms);
  p.c = Vector::Zero(terms);
  return p;
}

void CaseSamplingConfig::validate() const {
  check_range(w, "w");
  check_range(s, "s");
  check_range(c, "c");
  check_range(a, "a");
  require(s.lo >= 0.0, ErrorKind::kInvalidArgument,
          "shape parameter range must be non-negative");
  require(std::isfinite(domain_lo) && std::isfinite(domain_hi) &&
              domain_lo < domain_hi,
          ErrorKind::kInvalidArgument, "domain must satisfy lo < hi");
  require(size >= 1, ErrorKind::kInvalidArgument, "dataset size must be >= 1");
  require(num_terms >= 0, ErrorKind::kInvalidArgument,
          "number of RBF terms must be non-negative");
}

RandomFunctionParams sample_one(const CaseSamplingConfig& cfg,
                                std::uint64_t index, std::uint64_t attempt) {
  Rng rng = Rng::for_stream(cfg.seed ^ splitmix64(attempt), index);
  const Index k = cfg.num_terms;
  RandomFunctionParams p;
  p.sign = cfg.sign;
  p.w.resize(k);
  p.s.resize(k);
  p.c.resize(k);
  for (Index j = 0; j < k; ++j) p.w(j) = rng.uniform(cfg.w.lo, cfg.w.hi);
  for (Index j = 0; j < k; ++j) p.s(j) = rng.uniform(cfg.s.lo, cfg.s.hi);
  for (Index j = 0; j < k; ++j) p.c(j) = rng.uniform(cfg.c.lo, cfg.c.hi);
  p.a0 = rng.uniform(cfg.a.lo, cfg.a.hi);
  p.a1 = rng.uniform(cfg.a.lo, cfg.a.hi);
  p.a2 = rng.uniform(cfg.a.lo, cfg.a.hi);
  return p;
}

std::vector<RandomFunctionParams> sample_params(const CaseSamplingConfig& cfg) {
  cfg.validate();
  std::vector<RandomFunctionParams> out;
  out.reserve(static_cast<std::size_t>(cfg.size));
  for (Index i = 0; i < cfg.size; ++i) {
    out.push_back(sample_one(cfg, static_cast<std::uint64_t>(i)));
  }
  return out;
}

double eval_u(const RandomFunctionParams& p, double x) {
  const double sg = sign_factor(p.sign);
  double sum = 0.0;
  for (Index j = 0; j < p.w.size(); ++j) {
    const double d = x - p.c(j);
    sum += p.w(j) * std::exp(sg * p.s(j) * d * d);
  }
  return sum + p.a0 + x * (p.a1 + x * p.a2);
}

double eval_du(const RandomFunctionParams& p, double x) {
  const double sg = sign_factor(p.sign);
  double sum = 0.0;
  for (Index j = 0; j < p.w.size(); ++j) {
    const double d = x - p.c(j);
    sum += 2.0 * sg * p.s(j) * d * p.w(j) * std::exp(sg * p.s(j) * d * d);
  }
  return sum + p.a1 + 2.0 * p.a2 * x;
}

double eval_d2u(const RandomFunctionParams& p, double x) {
  const double sg = sign_factor(p.sign);
  double sum = 0.0;
  for (Index j = 0; j < p.w.size(); ++j) {
    const double d = x - p.c(j);
    const double s = p.s(j);
    sum += p.w(j) * std::exp(sg * s * d * d) *
           (4.0 * s * s * d * d + 2.0 * sg * s);
  }
  return sum + 2.0 * p.a2;
}

double erfi(double x) {
  if (x == 0.0) return 0.0;
  if (x < 0.0) return -erfi(-x);
  // erfi(x) = 2/sqrt(pi) sum_n x^(2n+1) / (n! (2n+1)); all terms positive.
  const double x2 = x * x;
  double term = x;
  double sum = x;
  for (int n = 1; n < 100000; ++n) {
    term *= x2 / n;
    const double add = term / (2 * n + 1);
    sum += add;
    if (n > x2 && add <= sum * std::numeric_limits<double>::epsilon() * 0.5) {
      break;
    }
    if (!std::isfinite(sum)) break;
  }
  return 2.0 / std::sqrt(std::numbers::pi) * sum;
}

double eval_antiderivative(const RandomFunctionParams& p, double x, double x0) {
  if (x == x0) return 0.0;
  const double half_sqrt_pi = std::sqrt(std::numbers::pi) / 2.0;
  double sum = 0.0;
  for (Index j = 0; j < p.w.size(); ++j) {
    const double s = p.s(j);
    if (s < kTinyShape) {
      sum += p.w(j) * (x - x0);
      continue;
    }
    const double r = std::sqrt(s);
    const double zb = r * (x - p.c(j));
    const double za = r * (x0 - p.c(j));
    const double diff = p.sign == ExponentSign::kDecaying
                            ? erf_difference(zb, za)
                            : erfi(zb) - erfi(za);
    sum += p.w(j) * half_sqrt_pi / r * diff;
  }
  return sum + poly_antiderivative(p, x) - poly_antiderivative(p, x0);
}

Vector equispaced(double lo, double hi, Index n) {
  require(n >= 1, ErrorKind::kInvalidArgument, "grid needs at least one point");
  if (n == 1) return Vector::Constant(1, lo);
  Vector g(n);
  const double h = (hi - lo) / static_cast<double>(n - 1);
  for (Index i = 0; i < n; ++i) g(i) = lo + h * static_cast<double>(i);
  g(n - 1) = hi;
  return g;
}

Vector eval_u(const RandomFunctionParams& p, const Vector& x) {
  Vector out(x.size());
  for (Index i = 0; i < x.size(); ++i) out(i) = eval_u(p, x(i));
  return out;
}

Vector eval_du(const RandomFunctionParams& p, const Vector& x) {
  Vector out(x.size());
  for (Index i = 0; i < x.size(); ++i) out(i) = eval_du(p, x(i));
  return out;
}

Vector eval_d2u(const RandomFunctionParams& p, const Vector& x) {
  Vector out(x.size());
  for (Index i = 0; i < x.size(); ++i) out(i) = eval_d2u(p, x(i));
  return out;
}

void write_dataset_csv(std::ostream& os,
                       const std::vector<RandomFunctionParams>& params,
                       const Matrix& inputs, const Matrix& outputs,
                       const std::vector<std::string>& header) {
  const auto s = static_cast<Index>(params.size());
  require(inputs.cols() == s && outputs.cols() == s, ErrorKind::kShapeMismatch,
          "dataset CSV needs one U and V column per parameter set");
  const Index k = s > 0 ? params.front().num_terms() : 0;
  for (const auto& p : params) {
    require(p.num_terms() == k, ErrorKind::kShapeMismatch,
            "all functions must have the same number of RBF terms");
  }

  os << "# randonet-dataset v1\n";
  for (const auto& line : header) os << "# " << line << "\n";
  os << "id";
  for (const char* name : {"w", "s", "c"}) {
    for (Index j = 0; j < k; ++j) os << ',' << name << '_' << j;
  }
  os << ",a0,a1,a2";
  for (Index j = 0; j < inputs.rows(); ++j) os << ",u_" << j;
  for (Index j = 0; j < outputs.rows(); ++j) os << ",v_" << j;
  os << "\n";

  const auto old_precision = os.precision(17);
  for (Index i = 0; i < s; ++i) {
    const auto& p = params[static_cast<std::size_t>(i)];
    os << i;
    for (const Vector* v : {&p.w, &p.s, &p.c}) {
      for (Index j = 0; j < k; ++j) os << ',' << (*v)(j);
    }
    os << ',' << p.a0 << ',' << p.a1 << ',' << p.a2;
    for (Index j = 0; j < inputs.rows(); ++j) os << ',' << inputs(j, i);
    for (Index j = 0; j < outputs.rows(); ++j) os << ',' << outputs(j, i);
    os << "\n";
  }
  os.precision(old_precision);
}

}  // namespace randonet::funcgen
