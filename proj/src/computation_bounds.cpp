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

#include "qpdist/computation_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace qpdist {

namespace {
constexpr double kBoundSlack = 1e-7;

BoundRow make_row(std::string name, double lhs, double rhs,
                  bool upper_bound = true) {
  BoundRow row;
  row.name = std::move(name);
  row.lhs = lhs;
  row.rhs = rhs;
  // For ">=" rows callers pass (lhs, rhs) already oriented as lhs <= rhs.
  row.slack = rhs - lhs;
  row.holds = lhs <= rhs + kBoundSlack;
  (void)upper_bound;
  return row;
}
}  // namespace

FunctionSpec::FunctionSpec(int dim_, std::vector<int> f_)
    : dim(dim_), f(std::move(f_)) {
  if (static_cast<int>(f.size()) != dim)
    throw DimensionMismatch("FunctionSpec: map must be total on {0..d-1}");
  for (int v : f)
    if (v < 0 || v >= dim)
      throw Error("FunctionSpec: output out of range");
}

FunctionSpec FunctionSpec::identity_map(int dim) {
  std::vector<int> f(dim);
  std::iota(f.begin(), f.end(), 0);
  return FunctionSpec(dim, std::move(f));
}

UnitaryOperator FunctionSpec::permutation_unitary() const {
  std::vector<bool> seen(dim, false);
  for (int v : f) {
    if (seen[v]) throw Error("FunctionSpec: not a bijection");
    seen[v] = true;
  }
  Mat u = Mat::Zero(dim, dim);
  for (int x = 0; x < dim; ++x) u(f[x], x) = 1.0;
  return UnitaryOperator(std::move(u));
}

ErrorProbabilities error_probabilities(const Channel& ch,
                                       const FunctionSpec& spec) {
  if (ch.dim() != spec.dim)
    throw DimensionMismatch("error_probabilities: dimension mismatch");
  ErrorProbabilities out;
  out.per_instance.resize(spec.dim);
  for (int x = 0; x < spec.dim; ++x) {
    Mat in = Mat::Zero(spec.dim, spec.dim);
    in(x, x) = 1.0;
    const Mat result = ch.apply_to_operator(in);
    const double success = result(spec.f[x], spec.f[x]).real();
    out.per_instance[x] = std::clamp(1.0 - success, 0.0, 1.0);
  }
  out.worst = *std::max_element(out.per_instance.begin(),
                                out.per_instance.end());
  out.average = std::accumulate(out.per_instance.begin(),
                                out.per_instance.end(), 0.0) /
                static_cast<double>(spec.dim);
  return out;
}

SamplingOutcome sampling_outcome(const Channel& ideal, const Channel& real) {
  if (ideal.dim() != real.dim())
    throw DimensionMismatch("sampling_outcome: dimension mismatch");
  const int d = ideal.dim();
  SamplingOutcome out;
  std::vector<double> joint_p, joint_q;
  joint_p.reserve(static_cast<std::size_t>(d) * d);
  joint_q.reserve(static_cast<std::size_t>(d) * d);
  for (int x = 0; x < d; ++x) {
    const DensityMatrix in = DensityMatrix::pure(PureState::basis_state(d, x));
    ClassicalDistribution p = measure_in_basis(ideal.apply(in));
    ClassicalDistribution q = measure_in_basis(real.apply(in));
    for (int y = 0; y < d; ++y) {
      joint_p.push_back(p[y] / d);
      joint_q.push_back(q[y] / d);
    }
    out.per_instance_ideal.push_back(std::move(p));
    out.per_instance_real.push_back(std::move(q));
  }
  out.joint_ideal = ClassicalDistribution(std::move(joint_p));
  out.joint_real = ClassicalDistribution(std::move(joint_q));
  return out;
}

bool BoundReport::all_hold() const {
  for (const BoundRow& row : rows)
    if (row.applicable && !row.holds) return false;
  return true;
}

BoundReport verify_function_worst(const Channel& e, const Channel& f_ideal,
                                  const FunctionSpec& spec, double d_stab,
                                  double c_stab) {
  const ErrorProbabilities pe = error_probabilities(e, spec);
  const ErrorProbabilities pe_id = error_probabilities(f_ideal, spec);
  BoundReport report;
  report.rows.push_back(
      make_row("p_e <= p_e_id + D_stab", pe.worst, pe_id.worst + d_stab));
  const double rhs = std::pow(std::sqrt(pe_id.worst) + c_stab, 2.0);
  report.rows.push_back(
      make_row("p_e <= (sqrt(p_e_id) + C_stab)^2", pe.worst, rhs));
  return report;
}

BoundReport verify_function_average(const Channel& e, const Channel& f_ideal,
                                    const FunctionSpec& spec, double d_pro,
                                    double f_pro) {
  const ErrorProbabilities pe = error_probabilities(e, spec);
  const ErrorProbabilities pe_id = error_probabilities(f_ideal, spec);
  BoundReport report;
  report.rows.push_back(make_row("avg p_e <= avg p_e_id + D_pro", pe.average,
                                 pe_id.average + d_pro));
  BoundRow fid_row = make_row("avg p_e <= 1 - F_pro (exact ideal)",
                              pe.average, 1.0 - f_pro);
  // The fidelity bound only covers ideal computations that succeed with
  // probability one.
  fid_row.applicable = pe_id.average <= 1e-12;
  report.rows.push_back(std::move(fid_row));
  return report;
}

BoundReport verify_sampling(const Channel& e, const Channel& f_ideal,
                            double d_stab, double f_stab, double d_pro,
                            double f_pro) {
  const SamplingOutcome out = sampling_outcome(f_ideal, e);
  const int d = e.dim();
  double max_d = 0.0;
  double min_f = 1.0;
  for (int x = 0; x < d; ++x) {
    max_d = std::max(max_d, kolmogorov(out.per_instance_real[x],
                                       out.per_instance_ideal[x]));
    min_f = std::min(min_f, bhattacharya(out.per_instance_real[x],
                                         out.per_instance_ideal[x]));
  }
  BoundReport report;
  report.rows.push_back(
      make_row("max_x D(q_x, p_x) <= D_stab", max_d, d_stab));
  report.rows.push_back(
      make_row("min_x F(q_x, p_x) >= F_stab", f_stab, min_f));
  report.rows.push_back(make_row(
      "D(q, p) <= D_pro", kolmogorov(out.joint_real, out.joint_ideal), d_pro));
  report.rows.push_back(make_row(
      "F(q, p) >= F_pro", f_pro,
      bhattacharya(out.joint_real, out.joint_ideal)));
  return report;
}

}  // namespace qpdist
