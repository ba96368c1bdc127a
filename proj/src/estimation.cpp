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

#include "qpdist/estimation.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>

#include "qpdist/process_metrics.hpp"

namespace qpdist {

namespace {

bool is_power_of_two(int d) { return d >= 1 && (d & (d - 1)) == 0; }

int log2_exact(int d) {
  int n = 0;
  while ((1 << n) < d) ++n;
  return n;
}

Vec vectorize(const Mat& m) {
  Vec v(m.rows() * m.cols());
  for (int c = 0; c < m.cols(); ++c)
    for (int r = 0; r < m.rows(); ++r) v(c * m.rows() + r) = m(r, c);
  return v;
}

std::vector<Mat> pauli_basis(int dim) {
  if (!is_power_of_two(dim))
    throw NoUnitaryBasis(
        "no built-in unitary operator basis for dim " + std::to_string(dim) +
        "; supply one explicitly");
  const int n = log2_exact(dim);
  std::vector<Mat> basis;
  basis.reserve(static_cast<std::size_t>(dim) * dim);
  for (int j = 0; j < dim * dim; ++j)
    basis.push_back(channels::pauli_product(n, j));
  return basis;
}

// Columns are the vectorized set elements; condition number from SVD.
struct SpanningSystem {
  Mat columns;            // d^2 x d^2
  Eigen::PartialPivLU<Mat> lu;
  double condition;
};

SpanningSystem spanning_system(const std::vector<Mat>& set, int dim,
                               const char* what) {
  const int d2 = dim * dim;
  if (static_cast<int>(set.size()) != d2)
    throw DimensionMismatch(std::string(what) + ": expected d^2 operators");
  Mat cols(d2, d2);
  for (int k = 0; k < d2; ++k) {
    if (set[k].rows() != dim || set[k].cols() != dim)
      throw DimensionMismatch(std::string(what) + ": wrong operator shape");
    cols.col(k) = vectorize(set[k]);
  }
  Eigen::JacobiSVD<Mat> svd(cols);
  const double smin = svd.singularValues().minCoeff();
  const double smax = svd.singularValues().maxCoeff();
  const double cond = (smin > 0) ? smax / smin
                                 : std::numeric_limits<double>::infinity();
  if (!(cond <= 1e8))
    throw DegenerateSpanningSet(std::string(what) +
                                ": condition number exceeds 1e8");
  SpanningSystem sys;
  sys.columns = cols;
  sys.lu = Eigen::PartialPivLU<Mat>(sys.columns);
  sys.condition = cond;
  return sys;
}

// Fixed-seed channels used for plan self-validation.
std::vector<Channel> validation_channels(int dim) {
  std::vector<Channel> out;
  Rng rng(0x9d2c5680u);
  for (int i = 0; i < 10; ++i) {
    Rng child = rng.split(static_cast<std::uint64_t>(dim) * 100 + i);
    out.push_back(channels::random_channel(dim, 1 + (i % dim), child));
  }
  return out;
}

double plan_exact_estimate(const EstimationPlan& plan, const Channel& e) {
  const double d = plan.dim();
  Cplx total = 0.0;
  for (std::size_t k = 0; k < plan.input_states().size(); ++k) {
    const Mat out = e.apply_to_operator(plan.input_states()[k]);
    for (std::size_t l = 0; l < plan.observables().size(); ++l) {
      const Cplx w = plan.weights()(k, l);
      if (std::abs(w) < 1e-14) continue;
      total += w * (plan.observables()[l] * out).trace();
    }
  }
  return (total / (d * d * d)).real();
}

}  // namespace

EstimationPlan::EstimationPlan(int dim, UnitaryOperator target,
                               std::vector<Mat> inputs,
                               std::vector<Mat> hermitian_observables,
                               Eigen::MatrixXcd weights, PlanScheme scheme,
                               double input_condition,
                               double observable_condition,
                               int nonzero_weight_count)
    : dim_(dim),
      target_(std::move(target)),
      inputs_(std::move(inputs)),
      observables_(std::move(hermitian_observables)),
      weights_(std::move(weights)),
      scheme_(scheme),
      input_condition_(input_condition),
      observable_condition_(observable_condition),
      nonzero_weight_count_(nonzero_weight_count) {
  for (const Mat& obs : observables_)
    if (hermiticity_defect(obs) > 1e-10)
      throw NonHermitianInput("EstimationPlan: observable not Hermitian");
  settings_count_ = 0;
  for (int k = 0; k < weights_.rows(); ++k)
    for (int l = 0; l < weights_.cols(); ++l)
      if (std::abs(weights_(k, l)) > 1e-12) ++settings_count_;
  observable_eigs_.reserve(observables_.size());
  for (const Mat& obs : observables_)
    observable_eigs_.push_back(hermitian_eig(obs));
}

double f_pro_unitary_basis(const Channel& e, const UnitaryOperator& u,
                           const std::vector<Mat>& unitary_basis) {
  const int d = e.dim();
  if (u.dim() != d)
    throw DimensionMismatch("f_pro_unitary_basis: dimension mismatch");
  if (static_cast<int>(unitary_basis.size()) != d * d)
    throw BadBasis("f_pro_unitary_basis: expected d^2 basis operators");
  for (std::size_t j = 0; j < unitary_basis.size(); ++j)
    for (std::size_t k = j; k < unitary_basis.size(); ++k) {
      const Cplx ip = (unitary_basis[j].adjoint() * unitary_basis[k]).trace();
      const Cplx want = (j == k) ? Cplx(d, 0) : Cplx(0, 0);
      if (std::abs(ip - want) > 1e-8)
        throw BadBasis("f_pro_unitary_basis: basis not HS-orthogonal");
    }
  const Mat& um = u.matrix();
  Cplx total = 0.0;
  for (const Mat& uj : unitary_basis)
    total += (um * uj.adjoint() * um.adjoint() * e.apply_to_operator(uj))
                 .trace();
  const double dd = d;
  return (total / (dd * dd * dd)).real();
}

double f_pro_unitary_basis(const Channel& e, const UnitaryOperator& u) {
  return f_pro_unitary_basis(e, u, pauli_basis(e.dim()));
}

EstimationPlan build_plan_general(const UnitaryOperator& u,
                                  const std::vector<Mat>& input_states,
                                  const std::vector<Mat>& observables) {
  const int d = u.dim();
  const int d2 = d * d;
  const std::vector<Mat> ubasis = pauli_basis(d);
  SpanningSystem in_sys = spanning_system(input_states, d, "input states");
  SpanningSystem obs_sys = spanning_system(observables, d, "observables");

  // a_jk: U_j = sum_k a_jk rho_k;  b_jl: U U_j U^dag = sum_l b_jl sigma_l.
  Mat a(d2, d2), b(d2, d2);
  for (int j = 0; j < d2; ++j) {
    a.row(j) = in_sys.lu.solve(vectorize(ubasis[j])).transpose();
    Mat conj = u.matrix() * ubasis[j] * u.matrix().adjoint();
    b.row(j) = obs_sys.lu.solve(vectorize(conj)).transpose();
  }
  Mat m = a.transpose() * b;  // M_kl = sum_j a_jk b_jl
  int nonzero = 0;
  for (int k = 0; k < d2; ++k)
    for (int l = 0; l < d2; ++l)
      if (std::abs(m(k, l)) > 1e-12) ++nonzero;

  // Split each observable into Hermitian and anti-Hermitian parts.
  std::vector<Mat> herm_obs;
  Eigen::MatrixXcd weights = Eigen::MatrixXcd::Zero(d2, 2 * d2);
  int col = 0;
  for (int l = 0; l < d2; ++l) {
    Mat h = 0.5 * (observables[l] + observables[l].adjoint());
    Mat k = Cplx(0, -0.5) * (observables[l] - observables[l].adjoint());
    const bool has_h = h.cwiseAbs().maxCoeff() > 1e-12;
    const bool has_k = k.cwiseAbs().maxCoeff() > 1e-12;
    if (has_h) {
      herm_obs.push_back(std::move(h));
      weights.col(col) = m.col(l);
      ++col;
    }
    if (has_k) {
      herm_obs.push_back(std::move(k));
      weights.col(col) = Cplx(0, 1) * m.col(l);
      ++col;
    }
  }
  weights.conservativeResize(d2, col);

  EstimationPlan plan(d, u, input_states, std::move(herm_obs),
                      std::move(weights), PlanScheme::General,
                      in_sys.condition, obs_sys.condition, nonzero);
  for (const Channel& ch : validation_channels(d)) {
    const double got = plan_exact_estimate(plan, ch);
    const double want = j_fidelity(ch, Channel::from_unitary(u));
    if (std::abs(got - want) > 1e-8)
      throw Error("build_plan_general: plan self-validation failed");
  }
  return plan;
}

EstimationPlan build_plan_pauli_minimal(const UnitaryOperator& u,
                                        int n_qubits) {
  const int d = 1 << n_qubits;
  if (u.dim() != d)
    throw DimensionMismatch("build_plan_pauli_minimal: dim != 2^n");
  const int d2 = d * d;
  const std::vector<Mat> ubasis = pauli_basis(d);

  // Input states: tensor products over qubits of {I, I+X, I+Y, I+Z},
  // base-4 index with the leftmost qubit most significant.
  std::vector<Mat> single(4);
  for (int s = 0; s < 4; ++s)
    single[s] = (s == 0) ? channels::pauli(0)
                         : Mat(channels::pauli(0) + channels::pauli(s));
  std::vector<Mat> inputs;
  inputs.reserve(d2);
  for (int idx = 0; idx < d2; ++idx) {
    Mat m = Mat::Identity(1, 1);
    for (int q = 0; q < n_qubits; ++q) {
      const int shift = 2 * (n_qubits - 1 - q);
      m = kron(m, single[(idx >> shift) & 3]);
    }
    inputs.push_back(std::move(m));
  }

  SpanningSystem in_sys = spanning_system(inputs, d, "input states");
  Mat a(d2, d2);
  for (int j = 0; j < d2; ++j)
    a.row(j) = in_sys.lu.solve(vectorize(ubasis[j])).transpose();

  // sigma_l = sum_k a_kl U U_k U^dag; Hermitian because the a are real for
  // this input set and the U_k are Hermitian.
  std::vector<Mat> observables;
  observables.reserve(d2);
  for (int l = 0; l < d2; ++l) {
    Mat sigma = Mat::Zero(d, d);
    for (int k = 0; k < d2; ++k) {
      if (std::abs(a(k, l)) < 1e-14) continue;
      sigma += a(k, l) * (u.matrix() * ubasis[k] * u.matrix().adjoint());
    }
    if (hermiticity_defect(sigma) > 1e-10)
      throw NonHermitianInput(
          "build_plan_pauli_minimal: derived observable not Hermitian");
    observables.push_back(0.5 * (sigma + sigma.adjoint().eval()));
  }

  Eigen::MatrixXcd weights = Eigen::MatrixXcd::Identity(d2, d2);
  EstimationPlan plan(d, u, std::move(inputs), std::move(observables),
                      std::move(weights), PlanScheme::PauliMinimal,
                      in_sys.condition, in_sys.condition, d2);
  for (const Channel& ch : validation_channels(d)) {
    const double got = plan_exact_estimate(plan, ch);
    const double want = j_fidelity(ch, Channel::from_unitary(u));
    if (std::abs(got - want) > 1e-8)
      throw Error("build_plan_pauli_minimal: plan self-validation failed");
  }
  return plan;
}

EstimateResult run_plan(const EstimationPlan& plan, const Channel& e,
                        const ShotModel& shots) {
  if (e.dim() != plan.dim())
    throw DimensionMismatch("run_plan: channel dimension mismatch");
  const double d = plan.dim();
  const double d3 = d * d * d;
  EstimateResult out;
  out.shots_per_setting = shots.shots_per_setting;
  out.seed = shots.seed;

  if (shots.shots_per_setting == 0) {
    out.estimate = plan_exact_estimate(plan, e);
    out.std_error = 0.0;
    return out;
  }

  const long long n = shots.shots_per_setting;
  Rng root(shots.seed);
  double est = 0.0;
  double var = 0.0;
  const int n_obs = static_cast<int>(plan.observables().size());
  for (std::size_t k = 0; k < plan.input_states().size(); ++k) {
    const Mat& rho_k = plan.input_states()[k];
    const double trace_k = rho_k.trace().real();
    bool used = false;
    for (int l = 0; l < n_obs; ++l)
      if (std::abs(plan.weights()(k, l)) > 1e-14) used = true;
    if (!used) continue;
    if (trace_k <= 1e-12)
      throw Error("run_plan: input state has nonpositive trace; "
                  "shot simulation needs physical inputs");
    Mat prepared = rho_k / trace_k;
    Eigen::SelfAdjointEigenSolver<Mat> prep_check(prepared,
                                                  Eigen::EigenvaluesOnly);
    if (prep_check.eigenvalues().minCoeff() < -1e-9)
      throw Error("run_plan: input state is not PSD; "
                  "shot simulation needs physical inputs");
    const Mat out_state = e.apply_to_operator(prepared);

    for (int l = 0; l < n_obs; ++l) {
      const Cplx w = plan.weights()(k, l);
      if (std::abs(w) < 1e-14) continue;
      const HermitianEig& eig = plan.observable_eigs()[l];
      std::vector<double> probs(eig.values.size());
      for (int y = 0; y < eig.values.size(); ++y) {
        const Vec v = eig.vectors.col(y);
        probs[y] = std::max(0.0, (v.adjoint() * out_state * v).real()(0, 0));
      }
      double psum = 0.0;
      for (double p : probs) psum += p;
      for (double& p : probs) p /= psum;

      Rng rng = root.split(k * static_cast<std::size_t>(n_obs) + l);
      const std::vector<long long> counts = rng.multinomial(n, probs);
      double mean = 0.0;
      for (int y = 0; y < eig.values.size(); ++y)
        mean += eig.values(y) * counts[y];
      mean /= static_cast<double>(n);
      double sample_var = 0.0;
      for (int y = 0; y < eig.values.size(); ++y) {
        const double dev = eig.values(y) - mean;
        sample_var += dev * dev * counts[y];
      }
      sample_var /= std::max(1.0, static_cast<double>(n - 1));

      const double t_hat = mean * trace_k;
      const double t_var = sample_var / static_cast<double>(n) *
                           trace_k * trace_k;
      est += (w * t_hat).real();
      const double wr = w.real();
      var += wr * wr * t_var;
    }
  }
  out.estimate = est / d3;
  out.std_error = std::sqrt(var) / d3;
  return out;
}

// ---------------------------------------------------------------------------
// Tomography

namespace {

// Per-qubit tomography input states |0>, |1>, |+>, |+i>.
std::vector<Mat> tomography_inputs(int n_qubits) {
  std::vector<Mat> single(4, Mat::Zero(2, 2));
  single[0](0, 0) = 1.0;
  single[1](1, 1) = 1.0;
  single[2] << 0.5, 0.5, 0.5, 0.5;
  single[3] << 0.5, Cplx(0, -0.5), Cplx(0, 0.5), 0.5;
  const int d = 1 << n_qubits;
  std::vector<Mat> inputs;
  inputs.reserve(static_cast<std::size_t>(d) * d);
  for (int idx = 0; idx < d * d; ++idx) {
    Mat m = Mat::Identity(1, 1);
    for (int q = 0; q < n_qubits; ++q) {
      const int shift = 2 * (n_qubits - 1 - q);
      m = kron(m, single[(idx >> shift) & 3]);
    }
    inputs.push_back(std::move(m));
  }
  return inputs;
}

// Alternating projection onto {PSD, unit trace} and {tr_Q = I/d}.
Mat project_to_choi(Mat x, int d) {
  const Mat eye_q = Mat::Identity(d, d);
  for (int round = 0; round < 2000; ++round) {
    // Trace-preserving correction.
    Mat defect = Mat::Identity(d, d) / static_cast<double>(d) -
                 partial_trace(x, Subsystem::B, d, d);
    x += kron(defect, eye_q / static_cast<double>(d));
    // PSD clamp and renormalize.
    x = 0.5 * (x + x.adjoint().eval());
    Eigen::SelfAdjointEigenSolver<Mat> es(x);
    RVec vals = es.eigenvalues().cwiseMax(0.0);
    const double clamped = es.eigenvalues().minCoeff();
    vals /= vals.sum();
    x = es.eigenvectors() * vals.asDiagonal() * es.eigenvectors().adjoint();
    Mat tp = partial_trace(x, Subsystem::B, d, d) -
             Mat::Identity(d, d) / static_cast<double>(d);
    if (tp.cwiseAbs().maxCoeff() < 1e-9 && clamped > -1e-9) break;
  }
  return 0.5 * (x + x.adjoint().eval());
}

}  // namespace

Channel simulate_tomography(const Channel& e, const ShotModel& shots) {
  const int d = e.dim();
  if (!is_power_of_two(d))
    throw NoUnitaryBasis("simulate_tomography: dim must be a power of two");
  const int n_qubits = log2_exact(d);
  const int d2 = d * d;
  const std::vector<Mat> inputs = tomography_inputs(n_qubits);
  const std::vector<Mat> paulis = pauli_basis(d);

  // Expectation data m_kj = tr(P_j E(rho_k)), exact or sampled.
  Mat data(d2, d2);
  Rng root(shots.seed);
  std::vector<HermitianEig> pauli_eigs;
  if (shots.shots_per_setting > 0) {
    pauli_eigs.reserve(paulis.size());
    for (const Mat& p : paulis) pauli_eigs.push_back(hermitian_eig(p));
  }
  for (int k = 0; k < d2; ++k) {
    const Mat out_state = e.apply_to_operator(inputs[k]);
    for (int j = 0; j < d2; ++j) {
      if (shots.shots_per_setting == 0) {
        data(k, j) = (paulis[j] * out_state).trace();
        continue;
      }
      const HermitianEig& eig = pauli_eigs[j];
      std::vector<double> probs(d);
      double psum = 0.0;
      for (int y = 0; y < d; ++y) {
        const Vec v = eig.vectors.col(y);
        probs[y] = std::max(0.0, (v.adjoint() * out_state * v).real()(0, 0));
        psum += probs[y];
      }
      for (double& p : probs) p /= psum;
      Rng rng = root.split(static_cast<std::uint64_t>(k) * d2 + j);
      const std::vector<long long> counts =
          rng.multinomial(shots.shots_per_setting, probs);
      double mean = 0.0;
      for (int y = 0; y < d; ++y) mean += eig.values(y) * counts[y];
      data(k, j) = mean / static_cast<double>(shots.shots_per_setting);
    }
  }

  // Linear inversion: E(rho_k) = sum_j m_kj P_j / d, then matrix units
  // through the input-state expansion.
  std::vector<Mat> e_on_inputs(d2);
  for (int k = 0; k < d2; ++k) {
    Mat m = Mat::Zero(d, d);
    for (int j = 0; j < d2; ++j) m += data(k, j) * paulis[j];
    e_on_inputs[k] = m / static_cast<double>(d);
  }
  SpanningSystem in_sys = spanning_system(inputs, d, "tomography inputs");

  Mat choi = Mat::Zero(d2, d2);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) {
      Mat unit = Mat::Zero(d, d);
      unit(a, b) = 1.0;
      const Vec coeff = in_sys.lu.solve(vectorize(unit));
      Mat image = Mat::Zero(d, d);
      for (int k = 0; k < d2; ++k) image += coeff(k) * e_on_inputs[k];
      // Choi block (a, b) on the ancilla-first layout.
      choi.block(a * d, b * d, d, d) = image / static_cast<double>(d);
    }

  Mat projected = project_to_choi(std::move(choi), d);
  return Channel::from_choi(
      ChoiState(d, DensityMatrix::unchecked(std::move(projected))));
}

}  // namespace qpdist
