// Copyright 2026 The qpdist developers
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

#pragma once

#include <vector>

#include "qpdist/linalg.hpp"

namespace qpdist {

/// Probability distribution over a finite outcome set.
class ClassicalDistribution {
 public:
  explicit ClassicalDistribution(std::vector<double> probabilities);
  int outcomes() const { return static_cast<int>(p_.size()); }
  const std::vector<double>& probabilities() const { return p_; }
  double operator[](int i) const { return p_[i]; }

 private:
  std::vector<double> p_;
};

/// Trace distance D(rho, sigma) = tr|rho - sigma| / 2, in [0, 1].
double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma);

/// Fidelity in the squared-trace convention,
/// F(rho, sigma) = tr(sqrt(sqrt(rho) sigma sqrt(rho)))^2.
/// A pure-state shortcut F = <psi|sigma|psi> is used when rho has rank one.
double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma);

/// Bures metric sqrt(2 - 2 sqrt(F)).
double bures_metric(const DensityMatrix& rho, const DensityMatrix& sigma);
/// Angle arccos(sqrt(F)).
double fidelity_angle(const DensityMatrix& rho, const DensityMatrix& sigma);
/// C metric sqrt(1 - F).
double c_metric(const DensityMatrix& rho, const DensityMatrix& sigma);

double bures_from_fidelity(double f);
double angle_from_fidelity(double f);
double c_from_fidelity(double f);

/// The 1 - sqrt(F) <= D <= sqrt(1 - F) sandwich.
struct FvgCheck {
  double lower;     // 1 - sqrt(F)
  double distance;  // D
  double upper;     // sqrt(1 - F)
  bool holds;       // sandwich within 1e-9
};

FvgCheck fuchs_van_de_graaf(const DensityMatrix& rho,
                            const DensityMatrix& sigma);

/// Kolmogorov (l1) distance sum |p - q| / 2.
double kolmogorov(const ClassicalDistribution& p,
                  const ClassicalDistribution& q);

/// Bhattacharya overlap sum sqrt(p q).
double bhattacharya(const ClassicalDistribution& p,
                    const ClassicalDistribution& q);

/// Computational-basis measurement statistics: the diagonal of rho.
ClassicalDistribution measure_in_basis(const DensityMatrix& rho);

namespace detail {
// Unvalidated kernels for optimizer and Monte Carlo hot paths.
double trace_distance_raw(const Mat& a, const Mat& b);
double fidelity_raw(const Mat& a, const Mat& b);
// F(|psi><psi|, rho) = <psi|rho|psi>.
double fidelity_with_pure_raw(const Vec& psi, const Mat& rho);
}  // namespace detail

}  // namespace qpdist
