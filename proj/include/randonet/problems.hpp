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

// Benchmark operators.
//
//   1  antiderivative      v(x) = int_0^x u
//   2  forced pendulum     v'' = -k sin(v) + u(t), v(0) = v'(0) = 0
//   3  linear PDE RHS      nu u'' + gamma u' + zeta u
//   4  Burgers RHS         nu u'' - u u'
//   5  Allen-Cahn RHS      nu u'' + u - u^3

#ifndef RANDONET_PROBLEMS_HPP_
#define RANDONET_PROBLEMS_HPP_

#include <iosfwd>
#include <string>
#include <vector>

#include "randonet/funcgen.hpp"
#include "randonet/model.hpp"
#include "randonet/ode.hpp"

namespace randonet::problems {

using funcgen::CaseSamplingConfig;
using funcgen::RandomFunctionParams;
using linalg::Index;
using linalg::Matrix;
using linalg::Vector;
using model::AlignedDataset;
using ode::OdeSolverConfig;

struct CaseStudy {
  int id = 1;
  std::string name;
  double domain_lo = 0.0;
  double domain_hi = 1.0;
  Index m = 100;
  Index n = 100;
  CaseSamplingConfig sampling;
  double k = 9.81;     // case 2
  double nu = 0.0;     // cases 3-5
  double gamma = 0.0;  // case 3
  double zeta = 0.0;   // case 3

  void validate() const;
  Vector input_grid() const;
  Vector output_grid() const;
};

/// Default configuration of case `id` (1..5) with the given sampling seed.
/// `size` overrides the number of functions when positive.
CaseStudy case_study(int id, std::uint64_t seed = 0, Index size = 0);

struct CaseData {
  AlignedDataset dataset;
  std::vector<RandomFunctionParams> params;
  // Human-readable notes, e.g. resampled case-2 functions.
  std::vector<std::string> events;
};

/// Output profile of one function on the case's output grid.
Vector case_output(const CaseStudy& cs, const RandomFunctionParams& p,
                   const OdeSolverConfig& ode = {});

/// Pendulum trajectory sampled at `t`, u evaluated analytically.
Vector pendulum_trajectory(const RandomFunctionParams& p, double k,
                           const Vector& t, const OdeSolverConfig& ode);

CaseData build_case(const CaseStudy& cs, const OdeSolverConfig& ode = {});

CaseData build_case1(const CaseStudy& cs);
CaseData build_case2(const CaseStudy& cs, const OdeSolverConfig& ode = {});
CaseData build_case3(const CaseStudy& cs);
CaseData build_case4(const CaseStudy& cs);
CaseData build_case5(const CaseStudy& cs);

/// Dataset CSV (see funcgen::write_dataset_csv) with a header block holding
/// the case id, constants, grids and seed.
void write_case_csv(std::ostream& os, const CaseStudy& cs, const CaseData& data);

}  // namespace randonet::problems

#endif  // RANDONET_PROBLEMS_HPP_
