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

#include <string>
#include <vector>

#include "qpdist/channel.hpp"
#include "qpdist/state_metrics.hpp"

namespace qpdist {

/// A function computation: basis input x should end up as basis state f(x).
struct FunctionSpec {
  int dim = 0;
  std::vector<int> f;  // total map on {0..dim-1}

  FunctionSpec(int dim_, std::vector<int> f_);
  static FunctionSpec identity_map(int dim);
  /// The permutation unitary |x> -> |f(x)> (f must be a bijection).
  UnitaryOperator permutation_unitary() const;
};

/// True error probabilities of a channel attempting the function: per
/// instance p_e(x) = 1 - <f(x)| E(|x><x|) |f(x)>, plus the worst and
/// uniform-average aggregates.
struct ErrorProbabilities {
  std::vector<double> per_instance;
  double worst = 0.0;
  double average = 0.0;
};

ErrorProbabilities error_probabilities(const Channel& ch,
                                       const FunctionSpec& spec);

/// Measurement statistics of ideal and real channels on every basis input,
/// plus the joint distributions with uniform instance weight 1/d.
struct SamplingOutcome {
  std::vector<ClassicalDistribution> per_instance_ideal;
  std::vector<ClassicalDistribution> per_instance_real;
  ClassicalDistribution joint_ideal{std::vector<double>{1.0}};
  ClassicalDistribution joint_real{std::vector<double>{1.0}};
};

SamplingOutcome sampling_outcome(const Channel& ideal, const Channel& real);

struct BoundRow {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;  // rhs - lhs
  bool holds = false;  // lhs <= rhs + 1e-7
  bool applicable = true;
};

struct BoundReport {
  std::vector<BoundRow> rows;
  bool all_hold() const;
};

/// Worst-case function bounds: p_e <= p_e_id + D_stab and
/// p_e <= (sqrt(p_e_id) + C_stab)^2.
BoundReport verify_function_worst(const Channel& e, const Channel& f_ideal,
                                  const FunctionSpec& spec, double d_stab,
                                  double c_stab);

/// Average-case function bounds: mean p_e <= mean p_e_id + D_pro, and when
/// the ideal computation is exact, mean p_e <= 1 - F_pro (otherwise that
/// row is marked not applicable).
BoundReport verify_function_average(const Channel& e, const Channel& f_ideal,
                                    const FunctionSpec& spec, double d_pro,
                                    double f_pro);

/// Sampling bounds: max_x D(q_x, p_x) <= D_stab, min_x F(q_x, p_x) >=
/// F_stab, D(q, p) <= D_pro, F(q, p) >= F_pro.
BoundReport verify_sampling(const Channel& e, const Channel& f_ideal,
                            double d_stab, double f_stab, double d_pro,
                            double f_pro);

}  // namespace qpdist
