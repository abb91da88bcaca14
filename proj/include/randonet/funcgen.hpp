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

// Random analytic input functions
//
//   u(x) = sum_j w_j exp(-s_j (x - c_j)^2) + a0 + a1 x + a2 x^2
//
// with exact first and second derivatives and antiderivative. The growing
// convention exp(+s (x - c)^2) is kept for auditing only.

#ifndef RANDONET_FUNCGEN_HPP_
#define RANDONET_FUNCGEN_HPP_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "randonet/linalg.hpp"

namespace randonet::funcgen {

using linalg::Index;
using linalg::Matrix;
using linalg::Vector;

enum class ExponentSign { kDecaying, kGrowing };

struct RandomFunctionParams {
  Vector w;
  Vector s;
  Vector c;
  double a0 = 0.0;
  double a1 = 0.0;
  double a2 = 0.0;
  ExponentSign sign = ExponentSign::kDecaying;

  Index num_terms() const { return w.size(); }
  void validate() const;

  /// Zero function with `terms` RBF slots.
  static RandomFunctionParams zero(Index terms);
};

struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

struct CaseSamplingConfig {
  Range w{-1.0, 1.0};
  Range s{0.0, 500.0};
  Range c{0.0, 1.0};
  // Shared by a0, a1, a2.
  Range a{-1.0, 1.0};
  double domain_lo = 0.0;
  double domain_hi = 1.0;
  Index size = 1;
  std::uint64_t seed = 0;
  Index num_terms = 200;
  ExponentSign sign = ExponentSign::kDecaying;

  void validate() const;
};

/// Function `index` of the dataset, drawn from its own stream so the result
/// does not depend on generation order. Draw order: w, s, c (each term by
/// term), then a0, a1, a2. `attempt` selects a fresh draw for resampling.
RandomFunctionParams sample_one(const CaseSamplingConfig& cfg,
                                std::uint64_t index, std::uint64_t attempt = 0);

std::vector<RandomFunctionParams> sample_params(const CaseSamplingConfig& cfg);

double eval_u(const RandomFunctionParams& p, double x);
double eval_du(const RandomFunctionParams& p, double x);
double eval_d2u(const RandomFunctionParams& p, double x);

/// Integral of u from x0 to x.
double eval_antiderivative(const RandomFunctionParams& p, double x, double x0);

/// Imaginary error function erfi(x) = -i erf(ix), by its power series.
double erfi(double x);

/// n equispaced points from lo to hi inclusive.
Vector equispaced(double lo, double hi, Index n);

Vector eval_u(const RandomFunctionParams& p, const Vector& x);
Vector eval_du(const RandomFunctionParams& p, const Vector& x);
Vector eval_d2u(const RandomFunctionParams& p, const Vector& x);

/// Version 1 dataset CSV.
///
///   # randonet-dataset v1
///   # <key>=<value>                  one line per entry of `header`
///   id,w_0..w_{K-1},s_0..,c_0..,a0,a1,a2,u_0..u_{m-1},v_0..v_{n-1}
///
/// One row per function. u_j are the columns of U (input grid), v_k of V
/// (output grid). Values use 17 significant digits.
void write_dataset_csv(std::ostream& os,
                       const std::vector<RandomFunctionParams>& params,
                       const Matrix& inputs, const Matrix& outputs,
                       const std::vector<std::string>& header);

}  // namespace randonet::funcgen

#endif  // RANDONET_FUNCGEN_HPP_
