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

#include <doctest.h>

#include <cmath>

#include "qpdist/estimation.hpp"
#include "qpdist/process_metrics.hpp"

using namespace qpdist;

namespace {
// Weyl clock-and-shift basis: HS-orthogonal unitaries for any dimension.
std::vector<Mat> clock_shift_basis(int d) {
  Mat clock = Mat::Zero(d, d);
  Mat shift = Mat::Zero(d, d);
  const Cplx omega = std::exp(Cplx(0, 2.0 * M_PI / d));
  for (int i = 0; i < d; ++i) {
    clock(i, i) = std::pow(omega, i);
    shift((i + 1) % d, i) = 1.0;
  }
  std::vector<Mat> basis;
  Mat cpow = Mat::Identity(d, d);
  for (int a = 0; a < d; ++a) {
    Mat spow = Mat::Identity(d, d);
    for (int b = 0; b < d; ++b) {
      basis.push_back(cpow * spow);
      spow = shift * spow;
    }
    cpow = clock * cpow;
  }
  return basis;
}
}  // namespace

TEST_CASE("unitary-basis evaluation of the process fidelity") {
  Channel id = channels::identity(2);
  UnitaryOperator uid(Mat::Identity(2, 2));
  CHECK(f_pro_unitary_basis(id, uid) == doctest::Approx(1.0).epsilon(1e-12));

  Channel depol = channels::depolarizing(2, 1.0);
  CHECK(f_pro_unitary_basis(depol, uid) ==
        doctest::Approx(0.25).epsilon(1e-12));

  Rng rng(71);
  for (int d : {2, 4}) {
    for (int i = 0; i < 20; ++i) {
      Rng child = rng.split(d * 100 + i);
      Channel e = channels::random_channel(d, 1 + (i % 4), child);
      UnitaryOperator u = channels::random_unitary(d, child);
      const double want = j_fidelity(e, Channel::from_unitary(u));
      CHECK(std::abs(f_pro_unitary_basis(e, u) - want) < 1e-9);
    }
  }
}

TEST_CASE("unitary-basis evaluation with a caller-supplied basis") {
  // Dimension 3 has no Pauli-product basis; the clock-shift set works.
  Rng rng(73);
  Channel e = channels::random_channel(3, 2, rng);
  UnitaryOperator u = channels::random_unitary(3, rng);
  CHECK_THROWS_AS(f_pro_unitary_basis(e, u), NoUnitaryBasis);
  const double want = j_fidelity(e, Channel::from_unitary(u));
  CHECK(std::abs(f_pro_unitary_basis(e, u, clock_shift_basis(3)) - want) <
        1e-9);
}

TEST_CASE("pauli-minimal plan") {
  UnitaryOperator uid(Mat::Identity(2, 2));
  EstimationPlan plan = build_plan_pauli_minimal(uid, 1);
  CHECK(plan.input_states().size() == 4);
  CHECK(plan.observables().size() == 4);
  CHECK(plan.settings_count() == 4);
  for (const Mat& obs : plan.observables())
    CHECK(hermiticity_defect(obs) < 1e-10);

  Rng rng(79);
  UnitaryOperator had(channels::hadamard());
  EstimationPlan hp = build_plan_pauli_minimal(had, 1);
  Channel e = channels::random_channel(2, 3, rng);
  const double want = j_fidelity(e, Channel::from_unitary(had));
  CHECK(std::abs(run_plan(hp, e, ShotModel{}).estimate - want) < 1e-8);

  // Two qubits with a CNOT target and a product channel.
  UnitaryOperator cnot(channels::cnot());
  EstimationPlan cp = build_plan_pauli_minimal(cnot, 2);
  CHECK(cp.settings_count() == 16);
  Channel noisy = tensor(channels::depolarizing(2, 1.0),
                         channels::identity(2));
  const double want2 = j_fidelity(noisy, Channel::from_unitary(cnot));
  CHECK(std::abs(run_plan(cp, noisy, ShotModel{}).estimate - want2) < 1e-8);
}

TEST_CASE("general plan from matrix-unit spanning sets") {
  Rng rng(83);
  UnitaryOperator uid(Mat::Identity(2, 2));
  OperatorBasis units = OperatorBasis::matrix_units(2);
  EstimationPlan plan =
      build_plan_general(uid, units.operators(), units.operators());
  CHECK(plan.nonzero_weight_count() <= 16);
  for (int i = 0; i < 10; ++i) {
    Rng child = rng.split(i);
    Channel e = channels::random_channel(2, 1 + (i % 4), child);
    const double want = j_fidelity(e, Channel::from_unitary(uid));
    CHECK(std::abs(run_plan(plan, e, ShotModel{}).estimate - want) < 1e-8);
  }

  // Rank-deficient input set is rejected.
  std::vector<Mat> degenerate = units.operators();
  degenerate[3] = degenerate[0];
  CHECK_THROWS_AS(build_plan_general(uid, degenerate, units.operators()),
                  DegenerateSpanningSet);
}

TEST_CASE("shot-noise estimation: accuracy and scaling") {
  UnitaryOperator uid(Mat::Identity(2, 2));
  EstimationPlan plan = build_plan_pauli_minimal(uid, 1);
  Channel bf = channels::bit_flip(0.3);

  EstimateResult exact = run_plan(plan, bf, ShotModel{0, 0});
  CHECK(exact.std_error == 0.0);
  CHECK(std::abs(exact.estimate - 0.7) < 1e-10);

  EstimateResult big = run_plan(plan, bf, ShotModel{1000000, 424242});
  CHECK(big.std_error > 0.0);
  CHECK(std::abs(big.estimate - 0.7) < 4.0 * big.std_error);

  // stderr ~ 1/sqrt(shots): two decades in shots, one in stderr.
  EstimateResult small = run_plan(plan, bf, ShotModel{10000, 424242});
  const double ratio = small.std_error / big.std_error;
  CHECK(ratio > 10.0 * 0.8);
  CHECK(ratio < 10.0 * 1.2);
}

TEST_CASE("shot-noise estimates are unbiased") {
  UnitaryOperator had(channels::hadamard());
  EstimationPlan plan = build_plan_pauli_minimal(had, 1);
  Rng rng(89);
  Channel e = channels::random_channel(2, 2, rng);
  const double truth = j_fidelity(e, Channel::from_unitary(had));
  double sum = 0.0, sumsq = 0.0;
  const int reps = 200;
  for (int i = 0; i < reps; ++i) {
    EstimateResult est = run_plan(plan, e, ShotModel{2000, 1000 + i});
    sum += est.estimate;
    sumsq += est.estimate * est.estimate;
  }
  const double mean = sum / reps;
  const double var = (sumsq - reps * mean * mean) / (reps - 1);
  const double se_mean = std::sqrt(var / reps);
  CHECK(std::abs(mean - truth) < 3.0 * se_mean + 1e-12);
}

TEST_CASE("tomography round-trips exactly with exact data") {
  Rng rng(97);
  for (int i = 0; i < 5; ++i) {
    Rng child = rng.split(i);
    Channel e = channels::random_channel(2, 1 + (i % 4), child);
    Channel rec = simulate_tomography(e, ShotModel{0, 0});
    CHECK((rec.choi().matrix() - e.choi().matrix()).cwiseAbs().maxCoeff() <
          1e-8);
  }
  // Two-qubit case.
  Rng r4(101);
  Channel e4 = channels::random_channel(4, 3, r4);
  Channel rec4 = simulate_tomography(e4, ShotModel{0, 0});
  CHECK((rec4.choi().matrix() - e4.choi().matrix()).cwiseAbs().maxCoeff() <
        1e-8);
}

TEST_CASE("tomography with shot noise stays close and yields a valid Choi") {
  Channel depol = channels::depolarizing(2, 1.0);
  Channel rec = simulate_tomography(depol, ShotModel{100000, 31337});
  // Valid ChoiState by construction (the constructor validates); distance
  // to truth within the frozen empirical tolerance.
  CHECK(j_distance(rec, depol) < 0.02);
}
