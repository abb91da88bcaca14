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

#include "randonet/problems.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <exception>
#include <cmath>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "randonet/error.hpp"

namespace randonet::problems {
namespace {

constexpr int kMaxResampleAttempts = 16;

// Runs body(i) for i in [0, count) on a few threads. Each index writes only
// its own slot, so the result is independent of scheduling.
template <typename Body>
void parallel_for(Index count, Body body) {
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const auto workers =
      static_cast<unsigned>(std::min<Index>(count, static_cast<Index>(hw)));
  if (workers <= 1) {
    for (Index i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<Index> cursor{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const Index i = cursor.fetch_add(1);
        if (i >= count || failed.load()) return;
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          failed = true;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

void CaseStudy::validate() const {
  require(id >= 1 && id <= 5, ErrorKind::kInvalidArgument,
          "case id must be in 1..5");
  require(domain_lo < domain_hi, ErrorKind::kInvalidArgument,
          "case domain must satisfy lo < hi");
  require(m >= 2 && n >= 2, ErrorKind::kInvalidArgument,
          "grids need at least two points");
  sampling.validate();
}

Vector CaseStudy::input_grid() const {
  return funcgen::equispaced(domain_lo, domain_hi, m);
}

Vector CaseStudy::output_grid() const {
  return funcgen::equispaced(domain_lo, domain_hi, n);
}

CaseStudy case_study(int id, std::uint64_t seed, Index size) {
  CaseStudy cs;
  cs.id = id;
  auto& smp = cs.sampling;
  smp.seed = seed;
  smp.num_terms = 200;
  switch (id) {
    case 1:
      cs.name = "antiderivative";
      cs.domain_lo = 0.0;
      cs.domain_hi = 1.0;
      smp.w = {-1.0, 1.0};
      smp.a = {-1.0, 1.0};
      smp.s = {0.0, 500.0};
      smp.c = {0.0, 1.0};
      smp.size = 1000;
      break;
    case 2:
      cs.name = "pendulum";
      cs.domain_lo = 0.0;
      cs.domain_hi = 1.0;
      cs.k = 9.81;
      smp.w = {-0.05, 0.05};
      smp.a = {-0.05, 0.05};
      smp.s = {0.0, 500.0};
      smp.c = {0.0, 1.0};
      smp.size = 3000;
      break;
    case 3:
      cs.name = "linear_pde";
      cs.domain_lo = -1.0;
      cs.domain_hi = 1.0;
      cs.nu = 0.1;
      cs.gamma = 0.4;
      cs.zeta = -1.0;
      smp.w = {-1.0, 1.0};
      smp.a = {-1.0, 1.0};
      smp.s = {0.0, 50.0};
      smp.c = {0.0, 1.0};
      smp.size = 2000;
      break;
    case 4:
    case 5:
      cs.name = id == 4 ? "burgers" : "allen_cahn";
      cs.domain_lo = -1.0;
      cs.domain_hi = 1.0;
      cs.nu = 0.01;
      smp.w = {-0.05, 0.05};
      smp.a = {-0.05, 0.05};
      smp.s = {0.0, 50.0};
      smp.c = {-1.0, 1.0};
      smp.size = id == 4 ? 2000 : 3000;
      break;
    default:
      fail(ErrorKind::kInvalidArgument,
           "unknown case id " + std::to_string(id) + " (expected 1..5)");
  }
  smp.domain_lo = cs.domain_lo;
  smp.domain_hi = cs.domain_hi;
  if (size > 0) smp.size = size;
  return cs;
}

Vector pendulum_trajectory(const RandomFunctionParams& p, double k,
                           const Vector& t, const OdeSolverConfig& ode) {
  auto rhs = [&p, k](double time, const Vector& y, Vector& dy) {
    dy(0) = y(1);
    dy(1) = -k * std::sin(y(0)) + funcgen::eval_u(p, time);
  };
  const Matrix traj = ode::integrate(rhs, 0.0, Vector::Zero(2), t, ode);
  return traj.row(0).transpose();
}

Vector case_output(const CaseStudy& cs, const RandomFunctionParams& p,
                   const OdeSolverConfig& ode) {
  const Vector y = cs.output_grid();
  Vector v(y.size());
  switch (cs.id) {
    case 1:
      for (Index i = 0; i < y.size(); ++i) {
        v(i) = funcgen::eval_antiderivative(p, y(i), 0.0);
      }
      return v;
    case 2:
      return pendulum_trajectory(p, cs.k, y, ode);
    case 3:
      for (Index i = 0; i < y.size(); ++i) {
        v(i) = cs.nu * funcgen::eval_d2u(p, y(i)) +
               cs.gamma * funcgen::eval_du(p, y(i)) +
               cs.zeta * funcgen::eval_u(p, y(i));
      }
      return v;
    case 4:
      for (Index i = 0; i < y.size(); ++i) {
        v(i) = cs.nu * funcgen::eval_d2u(p, y(i)) -
               funcgen::eval_u(p, y(i)) * funcgen::eval_du(p, y(i));
      }
      return v;
    case 5:
      for (Index i = 0; i < y.size(); ++i) {
        const double u = funcgen::eval_u(p, y(i));
        v(i) = cs.nu * funcgen::eval_d2u(p, y(i)) + u - u * u * u;
      }
      return v;
    default:
      fail(ErrorKind::kInvalidArgument, "unknown case id");
  }
}

CaseData build_case(const CaseStudy& cs, const OdeSolverConfig& ode) {
  cs.validate();
  if (cs.id == 2) ode.validate();
  const Index s = cs.sampling.size;
  CaseData data;
  data.dataset.input_grid = cs.input_grid();
  data.dataset.output_grid = cs.output_grid();
  data.dataset.inputs.resize(cs.m, s);
  data.dataset.outputs.resize(cs.n, s);
  data.params.resize(static_cast<std::size_t>(s));
  std::vector<std::string> notes(static_cast<std::size_t>(s));

  parallel_for(s, [&](Index i) {
    const auto idx = static_cast<std::size_t>(i);
    for (int attempt = 0;; ++attempt) {
      RandomFunctionParams p =
          funcgen::sample_one(cs.sampling, static_cast<std::uint64_t>(i),
                              static_cast<std::uint64_t>(attempt));
      try {
        Vector v = case_output(cs, p, ode);
        data.dataset.outputs.col(i) = v;
      } catch (const Error& e) {
        if (cs.id != 2 || e.kind() != ErrorKind::kIntegrationFailure ||
            attempt + 1 >= kMaxResampleAttempts) {
          throw;
        }
        notes[idx] += "function " + std::to_string(i) + " attempt " +
                      std::to_string(attempt) + " rejected: " + e.what() + "\n";
        continue;
      }
      data.dataset.inputs.col(i) = funcgen::eval_u(p, data.dataset.input_grid);
      data.params[idx] = std::move(p);
      break;
    }
  });

  for (const auto& n : notes) {
    std::istringstream lines(n);
    for (std::string line; std::getline(lines, line);) {
      if (!line.empty()) data.events.push_back(line);
    }
  }
  data.dataset.validate();
  return data;
}

namespace {
void require_case(const CaseStudy& cs, int id) {
  require(cs.id == id, ErrorKind::kInvalidArgument,
          "build_case" + std::to_string(id) + " called with case " +
              std::to_string(cs.id));
}
}  // namespace

CaseData build_case1(const CaseStudy& cs) {
  require_case(cs, 1);
  return build_case(cs);
}

CaseData build_case2(const CaseStudy& cs, const OdeSolverConfig& ode) {
  require_case(cs, 2);
  return build_case(cs, ode);
}

CaseData build_case3(const CaseStudy& cs) {
  require_case(cs, 3);
  return build_case(cs);
}

CaseData build_case4(const CaseStudy& cs) {
  require_case(cs, 4);
  return build_case(cs);
}

CaseData build_case5(const CaseStudy& cs) {
  require_case(cs, 5);
  return build_case(cs);
}

void write_case_csv(std::ostream& os, const CaseStudy& cs, const CaseData& data) {
  const auto& smp = cs.sampling;
  auto range = [](const funcgen::Range& r) {
    return "[" + format_double(r.lo) + "," + format_double(r.hi) + "]";
  };
  std::vector<std::string> header = {
      "case=" + std::to_string(cs.id),
      "name=" + cs.name,
      "domain=[" + format_double(cs.domain_lo) + "," +
          format_double(cs.domain_hi) + "]",
      "m=" + std::to_string(cs.m),
      "n=" + std::to_string(cs.n),
      "grid=equispaced",
      "seed=" + std::to_string(smp.seed),
      "size=" + std::to_string(smp.size),
      "terms=" + std::to_string(smp.num_terms),
      "w_range=" + range(smp.w),
      "s_range=" + range(smp.s),
      "c_range=" + range(smp.c),
      "a_range=" + range(smp.a),
      std::string("exponent=") +
          (smp.sign == funcgen::ExponentSign::kDecaying ? "decaying" : "growing"),
  };
  switch (cs.id) {
    case 2:
      header.push_back("k=" + format_double(cs.k));
      break;
    case 3:
      header.push_back("nu=" + format_double(cs.nu));
      header.push_back("gamma=" + format_double(cs.gamma));
      header.push_back("zeta=" + format_double(cs.zeta));
      break;
    case 4:
    case 5:
      header.push_back("nu=" + format_double(cs.nu));
      break;
    default:
      break;
  }
  for (const auto& e : data.events) header.push_back("event=" + e);
  funcgen::write_dataset_csv(os, data.params, data.dataset.inputs,
                             data.dataset.outputs, header);
}

}  // namespace randonet::problems
