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

#include "randonet/ode.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "randonet/error.hpp"

namespace randonet::ode {
namespace {

constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                 a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                 a75 = -2187.0 / 6784, a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

// Continuous extension: y(t + th) = y + h sum_i k_i (sum_p b[i][p] th^(p+1)).
constexpr std::array<std::array<double, 4>, 7> kDense = {{
    {1.0, -183.0 / 64, 37.0 / 12, -145.0 / 128},
    {0.0, 0.0, 0.0, 0.0},
    {0.0, 1500.0 / 371, -1000.0 / 159, 1000.0 / 371},
    {0.0, -125.0 / 32, 125.0 / 12, -375.0 / 64},
    {0.0, 9477.0 / 3392, -729.0 / 106, 25515.0 / 6784},
    {0.0, -11.0 / 7, 11.0 / 3, -55.0 / 28},
    {0.0, 3.0 / 2, -4.0, 5.0 / 2},
}};

double rms_norm(const Vector& v, const Vector& scale) {
  return std::sqrt((v.array() / scale.array()).square().mean());
}

[[noreturn]] void integration_failure(const std::string& what, double t,
                                      double h, long steps) {
  std::ostringstream os;
  os << "ODE integration failed: " << what << " at t = " << t << " (h = " << h
     << ", " << steps << " steps)";
  fail(ErrorKind::kIntegrationFailure, os.str());
}

}  // namespace

void OdeSolverConfig::validate() const {
  require(abs_tol > 0.0 && rel_tol > 0.0, ErrorKind::kInvalidArgument,
          "ODE tolerances must be positive");
  require(max_steps > 0, ErrorKind::kInvalidArgument,
          "ODE max_steps must be positive");
}

Matrix integrate(const OdeRhs& f, double t0, const Vector& y0,
                 const Vector& t_out, const OdeSolverConfig& cfg,
                 OdeStats* stats) {
  cfg.validate();
  const Index dim = y0.size();
  Matrix out(dim, t_out.size());
  for (Index i = 0; i < t_out.size(); ++i) {
    require(t_out(i) >= t0 && (i == 0 || t_out(i) >= t_out(i - 1)),
            ErrorKind::kInvalidArgument,
            "output times must be non-decreasing and not before t0");
  }
  OdeStats local;
  OdeStats& st = stats ? *stats : local;
  st = OdeStats{};

  Index next = 0;
  while (next < t_out.size() && t_out(next) == t0) out.col(next++) = y0;
  if (next == t_out.size()) return out;
  const double t_end = t_out(t_out.size() - 1);

  auto scale_of = [&](const Vector& a, const Vector& b) {
    return Vector((cfg.abs_tol +
                   cfg.rel_tol * a.cwiseAbs().cwiseMax(b.cwiseAbs()).array())
                      .matrix());
  };

  std::array<Vector, 7> k;
  for (auto& ki : k) ki.resize(dim);
  Vector y = y0;
  Vector ynew(dim), tmp(dim), err(dim);
  double t = t0;
  f(t, y, k[0]);
  ++st.evaluations;

  double h = cfg.initial_step;
  if (h <= 0.0) {
    const Vector sc = scale_of(y, y);
    const double d0 = rms_norm(y, sc);
    const double d1 = rms_norm(k[0], sc);
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h0 = std::min(h0, t_end - t0);
    tmp = y + h0 * k[0];
    f(t + h0, tmp, k[1]);
    ++st.evaluations;
    const double d2 = rms_norm(k[1] - k[0], sc) / h0;
    const double dmax = std::max(d1, d2);
    const double h1 = dmax <= 1e-15 ? std::max(1e-6, h0 * 1e-3)
                                    : std::pow(0.01 / dmax, 1.0 / 5.0);
    h = std::min(100.0 * h0, h1);
  }

  bool last_rejected = false;
  long steps = 0;
  while (next < t_out.size()) {
    if (steps >= cfg.max_steps) {
      integration_failure("maximum number of steps exceeded", t, h, steps);
    }
    const double h_min = 16.0 * std::numeric_limits<double>::epsilon() *
                         std::max(std::abs(t), 1.0);
    if (h < h_min) integration_failure("step size underflow", t, h, steps);
    if (t + h > t_end) h = t_end - t;
    ++steps;

    tmp = y + h * a21 * k[0];
    f(t + c2 * h, tmp, k[1]);
    tmp = y + h * (a31 * k[0] + a32 * k[1]);
    f(t + c3 * h, tmp, k[2]);
    tmp = y + h * (a41 * k[0] + a42 * k[1] + a43 * k[2]);
    f(t + c4 * h, tmp, k[3]);
    tmp = y + h * (a51 * k[0] + a52 * k[1] + a53 * k[2] + a54 * k[3]);
    f(t + c5 * h, tmp, k[4]);
    tmp = y + h * (a61 * k[0] + a62 * k[1] + a63 * k[2] + a64 * k[3] +
                   a65 * k[4]);
    f(t + h, tmp, k[5]);
    ynew = y + h * (a71 * k[0] + a73 * k[2] + a74 * k[3] + a75 * k[4] +
                    a76 * k[5]);
    const double t_new = (t + h >= t_end) ? t_end : t + h;
    f(t_new, ynew, k[6]);
    st.evaluations += 6;

    err = h * (e1 * k[0] + e3 * k[2] + e4 * k[3] + e5 * k[4] + e6 * k[5] +
               e7 * k[6]);
    const double en = rms_norm(err, scale_of(y, ynew));
    if (!std::isfinite(en)) {
      integration_failure("non-finite error estimate", t, h, steps);
    }

    if (en <= 1.0) {
      ++st.accepted;
      while (next < t_out.size() && t_out(next) <= t_new) {
        const double tq = t_out(next);
        if (tq == t_new) {
          out.col(next) = ynew;
        } else {
          const double th = (tq - t) / h;
          Vector acc = y;
          for (std::size_t i = 0; i < 7; ++i) {
            const auto& b = kDense[i];
            const double w = th * (b[0] + th * (b[1] + th * (b[2] + th * b[3])));
            if (w != 0.0) acc += (h * w) * k[i];
          }
          out.col(next) = acc;
        }
        ++next;
      }
      t = t_new;
      y = ynew;
      k[0] = k[6];
      double fac = en == 0.0 ? 10.0 : 0.9 * std::pow(en, -0.2);
      fac = std::clamp(fac, 0.2, 10.0);
      if (last_rejected) fac = std::min(fac, 1.0);
      h *= fac;
      last_rejected = false;
    } else {
      ++st.rejected;
      h *= std::max(0.2, 0.9 * std::pow(en, -0.2));
      last_rejected = true;
    }
  }
  return out;
}

}  // namespace randonet::ode
