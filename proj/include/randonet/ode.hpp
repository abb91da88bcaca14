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

// Dormand-Prince 5(4) with local extrapolation, FSAL, and the standard
// fourth-order continuous extension for output between accepted steps.

#ifndef RANDONET_ODE_HPP_
#define RANDONET_ODE_HPP_

#include <functional>

#include "randonet/linalg.hpp"

namespace randonet::ode {

using linalg::Index;
using linalg::Matrix;
using linalg::Vector;

struct OdeSolverConfig {
  double abs_tol = 1e-12;
  double rel_tol = 1e-10;
  long max_steps = 1'000'000;
  // Non-positive selects the automatic initial step.
  double initial_step = 0.0;

  void validate() const;
};

struct OdeStats {
  long accepted = 0;
  long rejected = 0;
  long evaluations = 0;
};

/// dydt = f(t, y).
using OdeRhs = std::function<void(double t, const Vector& y, Vector& dydt)>;

/// Integrates from t0 and returns y at each entry of `t_out` (non-decreasing,
/// all >= t0) as the columns of a dim x t_out.size() matrix. Throws
/// kIntegrationFailure on step-size underflow or when max_steps is exceeded.
Matrix integrate(const OdeRhs& f, double t0, const Vector& y0,
                 const Vector& t_out, const OdeSolverConfig& cfg,
                 OdeStats* stats = nullptr);

}  // namespace randonet::ode

#endif  // RANDONET_ODE_HPP_
