// Copyright 2026 The qtrack Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef QTRACK_QUANTILE_FUNCTIONS_HPP
#define QTRACK_QUANTILE_FUNCTIONS_HPP

namespace qtrack {

// Standard normal CDF.
double norm_cdf(double x);

// Standard normal quantile function. Accurate to ~1e-15 over p in (0, 1);
// throws std::domain_error outside.
double inv_norm_cdf(double p);

// Regularized lower incomplete gamma P(a, x) for a > 0, x >= 0.
double lower_gamma_regularized(double a, double x);

// Chi-squared CDF with df > 0 degrees of freedom (df need not be integral).
double chisq_cdf(double x, double df);

// Chi-squared quantile function; |chisq_cdf(result, df) - p| <= 1e-10.
// Throws std::domain_error for p outside (0, 1) or df <= 0.
double inv_chisq_cdf(double p, double df);

}  // namespace qtrack

#endif  // QTRACK_QUANTILE_FUNCTIONS_HPP
