/*
 * Copyright 2026 The gmclab Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <functional>
#include <vector>

namespace gmclab {

/// Adaptive Gauss-Kronrod (31-point) integration on [a, b].
double integrate(const std::function<double(double)>& f, double a, double b,
                 double tolerance = 1e-13);

/// Integrates over consecutive pieces of a sorted breakpoint list. Breakpoints
/// outside [a, b] are ignored; f only needs to be smooth inside each piece.
double integrate_pieces(const std::function<double(double)>& f, double a, double b,
                        std::vector<double> breakpoints, double tolerance = 1e-13);

/// Gauss-Legendre rule mapped to [0, 1]; weights sum to one.
/// Tanh-sinh rule; tolerates integrable endpoint singularities.
double integrate_singular(const std::function<double(double)>& f, double a, double b,
                          double tolerance = 1e-12);

struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Rules are computed once per order and cached.
const GaussLegendre& gauss_legendre(int order);

}  // namespace gmclab
