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

#include <cstdint>
#include <vector>

#include "qpdist/channel.hpp"

namespace qpdist {

/// Shot budget for a simulated experiment; 0 means exact expectation values.
struct ShotModel {
  long long shots_per_setting = 0;
  std::uint64_t seed = 0;
};

enum class PlanScheme { General, PauliMinimal };

/// A direct J-fidelity estimation plan: input states rho_k (unnormalized
/// allowed), Hermitian observables, and a complex weight matrix W so that
/// F_pro(E, U) = Re[ sum_{kl} W_kl tr(obs_l E(rho_k)) ] / d^3.
///
/// Observables handed to the builder may be non-Hermitian; they are split
/// into Hermitian and anti-Hermitian parts (the stored observables are the
/// Hermitian pieces and the weights absorb the i).  `nonzero_weight_count`
/// counts the nonzero entries of the pre-split coefficient matrix M, the
/// number of observable averages in the d^4 sense; `settings_count` counts
/// the realized (input, Hermitian observable) pairs.
class EstimationPlan {
 public:
  EstimationPlan(int dim, UnitaryOperator target, std::vector<Mat> inputs,
                 std::vector<Mat> hermitian_observables,
                 Eigen::MatrixXcd weights, PlanScheme scheme,
                 double input_condition, double observable_condition,
                 int nonzero_weight_count);

  int dim() const { return dim_; }
  const UnitaryOperator& target() const { return target_; }
  const std::vector<Mat>& input_states() const { return inputs_; }
  const std::vector<Mat>& observables() const { return observables_; }
  const Eigen::MatrixXcd& weights() const { return weights_; }
  PlanScheme scheme() const { return scheme_; }
  double input_condition() const { return input_condition_; }
  double observable_condition() const { return observable_condition_; }
  int nonzero_weight_count() const { return nonzero_weight_count_; }
  int settings_count() const { return settings_count_; }
  const std::vector<HermitianEig>& observable_eigs() const {
    return observable_eigs_;
  }

 private:
  int dim_;
  UnitaryOperator target_;
  std::vector<Mat> inputs_;
  std::vector<Mat> observables_;
  Eigen::MatrixXcd weights_;  // inputs x observables
  PlanScheme scheme_;
  double input_condition_;
  double observable_condition_;
  int nonzero_weight_count_;
  int settings_count_;
  std::vector<HermitianEig> observable_eigs_;  // cached for shot sampling
};

/// Direct evaluation of F_pro(E, U) = (1/d^3) sum_j tr(U U_j^dag U^dag
/// E(U_j)) over a Hilbert-Schmidt orthogonal unitary basis.  Uses the
/// Pauli-product basis; NoUnitaryBasis if the dimension is not a power of
/// two and no basis is supplied.
double f_pro_unitary_basis(const Channel& e, const UnitaryOperator& u);
double f_pro_unitary_basis(const Channel& e, const UnitaryOperator& u,
                           const std::vector<Mat>& unitary_basis);

/// Plan from caller-chosen spanning sets of d^2 input states and d^2
/// observables (DegenerateSpanningSet if either Gram system has condition
/// number above 1e8).  Requires the Pauli-product basis internally.
EstimationPlan build_plan_general(const UnitaryOperator& u,
                                  const std::vector<Mat>& input_states,
                                  const std::vector<Mat>& observables);

/// The d^2-setting scheme: per-qubit input states from {I, I+X, I+Y, I+Z}
/// (tensor products, unnormalized) and derived observables
/// sigma_l = sum_k a_kl U U_k U^dag, which are Hermitian for this input
/// set.  The weight matrix is the identity.
EstimationPlan build_plan_pauli_minimal(const UnitaryOperator& u,
                                        int n_qubits);

struct EstimateResult {
  double estimate = 0.0;
  double std_error = 0.0;
  long long shots_per_setting = 0;
  std::uint64_t seed = 0;
};

/// Evaluates the plan on a channel.  shots 0: exact expectation values and
/// zero standard error.  shots > 0: every tr(obs E(rho_k)) is estimated by
/// sampling the observable's eigenbasis on the normalized input state
/// (unnormalized inputs are rescaled by tr(rho_k)); the standard error is
/// propagated through the weights assuming independent settings.
EstimateResult run_plan(const EstimationPlan& plan, const Channel& e,
                        const ShotModel& shots);

/// Informationally complete Pauli-input / Pauli-observable process
/// tomography with linear inversion, projected onto the valid Choi set by
/// alternating eigenvalue clamping with the trace-preserving correction.
Channel simulate_tomography(const Channel& e, const ShotModel& shots);

}  // namespace qpdist
