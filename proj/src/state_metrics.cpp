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

#include "qpdist/state_metrics.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

namespace qpdist {

ClassicalDistribution::ClassicalDistribution(std::vector<double> probabilities)
    : p_(std::move(probabilities)) {
  if (p_.empty())
    throw DimensionMismatch("ClassicalDistribution: no outcomes");
  double sum = 0.0;
  for (double& v : p_) {
    if (v < 0.0) {
      if (v < -1e-12)
        throw Error("ClassicalDistribution: negative probability");
      v = 0.0;  // floating-point dust
    }
    sum += v;
  }
  if (std::abs(sum - 1.0) > tol::kTrace)
    throw Error("ClassicalDistribution: probabilities sum to " +
                std::to_string(sum));
}

namespace detail {

double trace_distance_raw(const Mat& a, const Mat& b) {
  Mat diff = a - b;
  diff = 0.5 * (diff + diff.adjoint().eval());
  Eigen::SelfAdjointEigenSolver<Mat> es(diff, Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

double fidelity_with_pure_raw(const Vec& psi, const Mat& rho) {
  const double f = (psi.adjoint() * rho * psi).real()(0, 0);
  return std::clamp(f, 0.0, 1.0);
}

double fidelity_raw(const Mat& a, const Mat& b) {
  Eigen::SelfAdjointEigenSolver<Mat> ea(a);
  const auto& vals = ea.eigenvalues();
  const int n = static_cast<int>(a.rows());
  // Rank-one shortcut: F(|psi><psi|, b) = <psi|b|psi>.
  if (n >= 2 && vals(n - 2) < tol::kRank) {
    Vec psi = ea.eigenvectors().col(n - 1);
    return fidelity_with_pure_raw(psi, b);
  }
  // Numerically-zero eigenvalues must be clamped to exactly zero: taking
  // sqrt of +-1e-16 dust injects 1e-8 into the result, which ruins the
  // rank-deficient case (Choi states are structurally rank-deficient).
  const double cutoff_a = vals.cwiseAbs().maxCoeff() * 1e-13;
  RVec clamped(n);
  for (int i = 0; i < n; ++i)
    clamped(i) = (vals(i) > cutoff_a) ? vals(i) : 0.0;
  Mat root = ea.eigenvectors() * clamped.cwiseSqrt().asDiagonal() *
             ea.eigenvectors().adjoint();
  Mat inner = root * b * root;
  inner = 0.5 * (inner + inner.adjoint().eval());
  Eigen::SelfAdjointEigenSolver<Mat> es(inner, Eigen::EigenvaluesOnly);
  const double cutoff_m = es.eigenvalues().cwiseAbs().maxCoeff() * 1e-13;
  double s = 0.0;
  for (int i = 0; i < es.eigenvalues().size(); ++i)
    if (es.eigenvalues()(i) > cutoff_m) s += std::sqrt(es.eigenvalues()(i));
  return std::clamp(s * s, 0.0, 1.0);
}

}  // namespace detail

static void check_dims(const DensityMatrix& rho, const DensityMatrix& sigma,
                       const char* op) {
  if (rho.dim() != sigma.dim())
    throw DimensionMismatch(std::string(op) + ": dimension mismatch");
}

double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma) {
  check_dims(rho, sigma, "trace_distance");
  return detail::trace_distance_raw(rho.matrix(), sigma.matrix());
}

double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
  check_dims(rho, sigma, "fidelity");
  return detail::fidelity_raw(rho.matrix(), sigma.matrix());
}

double bures_from_fidelity(double f) {
  return std::sqrt(std::max(2.0 - 2.0 * std::sqrt(std::clamp(f, 0.0, 1.0)), 0.0));
}

double angle_from_fidelity(double f) {
  return std::acos(std::sqrt(std::clamp(f, 0.0, 1.0)));
}

double c_from_fidelity(double f) {
  return std::sqrt(std::max(1.0 - std::clamp(f, 0.0, 1.0), 0.0));
}

double bures_metric(const DensityMatrix& rho, const DensityMatrix& sigma) {
  return bures_from_fidelity(fidelity(rho, sigma));
}

double fidelity_angle(const DensityMatrix& rho, const DensityMatrix& sigma) {
  return angle_from_fidelity(fidelity(rho, sigma));
}

double c_metric(const DensityMatrix& rho, const DensityMatrix& sigma) {
  return c_from_fidelity(fidelity(rho, sigma));
}

FvgCheck fuchs_van_de_graaf(const DensityMatrix& rho,
                            const DensityMatrix& sigma) {
  const double f = fidelity(rho, sigma);
  FvgCheck out;
  out.lower = 1.0 - std::sqrt(f);
  out.distance = trace_distance(rho, sigma);
  out.upper = std::sqrt(std::max(1.0 - f, 0.0));
  out.holds = (out.lower <= out.distance + 1e-9) &&
              (out.distance <= out.upper + 1e-9);
  return out;
}

double kolmogorov(const ClassicalDistribution& p,
                  const ClassicalDistribution& q) {
  if (p.outcomes() != q.outcomes())
    throw DimensionMismatch("kolmogorov: outcome counts differ");
  double s = 0.0;
  for (int i = 0; i < p.outcomes(); ++i) s += std::abs(p[i] - q[i]);
  return 0.5 * s;
}

double bhattacharya(const ClassicalDistribution& p,
                    const ClassicalDistribution& q) {
  if (p.outcomes() != q.outcomes())
    throw DimensionMismatch("bhattacharya: outcome counts differ");
  double s = 0.0;
  for (int i = 0; i < p.outcomes(); ++i) s += std::sqrt(p[i] * q[i]);
  return s;
}

ClassicalDistribution measure_in_basis(const DensityMatrix& rho) {
  std::vector<double> p(rho.dim());
  for (int i = 0; i < rho.dim(); ++i) p[i] = rho.matrix()(i, i).real();
  return ClassicalDistribution(std::move(p));
}

}  // namespace qpdist
