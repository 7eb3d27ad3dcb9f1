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

#ifndef UOWSN_LAMBERT_HPP
#define UOWSN_LAMBERT_HPP

namespace uowsn {

/// Principal branch W0 of the Lambert W function: the solution of
/// w * exp(w) = x with w >= -1, defined for x >= -1/e.
///
/// Halley iteration refined from a regime-dependent initial guess
/// (branch-point series near -1/e, rational guess for small x, log
/// asymptotic for large x). Residual |w e^w - x| <= 1e-14 * max(1, |x|).
///
/// Throws std::domain_error for x < -1/e (below the branch point).
double lambert_w0(double x);

}  // namespace uowsn

#endif  // UOWSN_LAMBERT_HPP
