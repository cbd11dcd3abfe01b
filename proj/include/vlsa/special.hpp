/*
 * Copyright 2026 The VLSA Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef VLSA_SPECIAL_HPP_
#define VLSA_SPECIAL_HPP_

namespace vlsa {

// Regularized lower/upper incomplete gamma P(a, x), Q(a, x) = 1 - P(a, x).
// Series below x = a + 1, Lentz continued fraction above.
double regularized_gamma_p(double a, double x);
double regularized_gamma_q(double a, double x);

// Upper tail of the chi-square distribution.
double chi_square_sf(double statistic, double dof);

}  // namespace vlsa

#endif  // VLSA_SPECIAL_HPP_
