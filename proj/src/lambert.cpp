// Copyright 2026 The uowsn-loc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "uowsn/lambert.hpp"

#include <cmath>
#include <stdexcept>

namespace uowsn {

namespace {

double initial_guess(double x) {
  constexpr double kE = 2.718281828459045235;
  if (x < -0.3235) {
    // Series around the branch point x = -1/e, w = -1 + p - p^2/3 + ...
    const double p = std::sqrt(std::max(0.0, 2.0 * (1.0 + kE * x)));
    return -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p;
  }
  if (x <= kE) {
    // Rational guess, exact at x = 0; Halley does the rest.
    return x * (1.0 + 1.5 * x) / (1.0 + x * (2.25 + x));
  }
  // Asymptotic w ~ L1 - L2 + L2/L1 for large arguments.
  const double l1 = std::log(x);
  const double l2 = std::log(l1);
  return l1 - l2 + l2 / l1;
}

}  // namespace

double lambert_w0(double x) {
  constexpr double kInvE = 0.36787944117144232160;
  if (std::isnan(x)) throw std::domain_error("lambert_w0: NaN argument");
  if (x < -kInvE) {
    // Allow round-off right at the branch point.
    if (x > -kInvE - 1e-15) return -1.0;
    throw std::domain_error("lambert_w0: argument below -1/e");
  }
  if (x == 0.0) return 0.0;

  double w = initial_guess(x);
  for (int iter = 0; iter < 50; ++iter) {
    const double ew = std::exp(w);
    const double f = w * ew - x;
    if (std::abs(f) <= 1e-14 * std::max(1.0, std::abs(x))) break;
    // Halley step: f' = e^w (w + 1), f'' = e^w (w + 2).
    const double wp1 = w + 1.0;
    const double denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
    const double step = f / denom;
    w -= step;
    if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(w))) break;
  }
  return w;
}

}  // namespace uowsn
