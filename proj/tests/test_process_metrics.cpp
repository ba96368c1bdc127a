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

#include "qpdist/process_metrics.hpp"

using namespace qpdist;

namespace {
Channel zgate() {
  return Channel::from_unitary(UnitaryOperator(channels::pauli(3)));
}

OptimizerConfig test_config(std::uint64_t seed) {
  OptimizerConfig c;
  c.seed = seed;
  return c;
}
}  // namespace

TEST_CASE("J distance closed forms") {
  Channel id = channels::identity(2);
  Channel depol = channels::depolarizing(2, 1.0);
  CHECK(j_distance(id, id) == doctest::Approx(0.0));
  CHECK(j_distance(depol, id) == doctest::Approx(0.75).epsilon(1e-12));
  for (double p : {0.1, 0.3, 0.5}) {
    Channel bf = channels::bit_flip(p);
    CHECK(j_distance(bf, id) == doctest::Approx(p).epsilon(1e-10));
    // Independent route through the trace-norm oracle.
    const double direct =
        0.5 * trace_norm(bf.choi().matrix() - id.choi().matrix());
    CHECK(j_distance(bf, id) == doctest::Approx(direct).epsilon(1e-12));
  }
}

TEST_CASE("J fidelity closed forms and the pure-target shortcut") {
  Channel id = channels::identity(2);
  Channel depol = channels::depolarizing(2, 1.0);
  Rng rng(3);
  Channel u = Channel::from_unitary(channels::random_unitary(2, rng));
  CHECK(j_fidelity(u, u) == doctest::Approx(1.0));
  CHECK(j_fidelity(depol, id) == doctest::Approx(0.25).epsilon(1e-12));
  for (double p : {0.1, 0.3, 0.5})
    CHECK(j_fidelity(channels::bit_flip(p), id) ==
          doctest::Approx(1.0 - p).epsilon(1e-10));

  // Unitary reference: <Phi_U| rho_E |Phi_U> equals the general formula.
  Channel e = channels::random_channel(2, 3, rng);
  Vec phi = maximally_entangled_vector(2);
  Vec phi_u = kron(Mat::Identity(2, 2), u.kraus().elements()[0]) * phi;
  const double direct =
      (phi_u.adjoint() * e.choi().matrix() * phi_u).real()(0, 0);
  CHECK(j_fidelity(e, u) == doctest::Approx(direct).epsilon(1e-9));
}

TEST_CASE("average fidelity formula") {
  Channel id = channels::identity(2);
  UnitaryOperator uid(Mat::Identity(2, 2));
  CHECK(f_ave_formula(id, uid) == doctest::Approx(1.0));

  Channel depol = channels::depolarizing(2, 1.0);
  CHECK(f_ave_formula(depol, uid) == doctest::Approx(0.5).epsilon(1e-12));

  // Embedding as I (x) E drops the value to 0.4: F_ave is not stable.
  Channel embedded = tensor(channels::identity(2), depol);
  UnitaryOperator uid4(Mat::Identity(4, 4));
  CHECK(f_ave_formula(embedded, uid4) == doctest::Approx(0.4).epsilon(1e-12));
}

TEST_CASE("Monte Carlo averages: trivial pair and Horodecki cross-check") {
  Channel id = channels::identity(2);
  McEstimate same_d = ave_measure_mc(id, id, Metric::TraceDistance, 100, 5);
  CHECK(same_d.estimate == doctest::Approx(0.0));
  CHECK(same_d.std_error == doctest::Approx(0.0));
  McEstimate same_f = ave_measure_mc(id, id, Metric::Fidelity, 100, 5);
  CHECK(same_f.estimate == doctest::Approx(1.0));
  CHECK(same_f.std_error == doctest::Approx(0.0).epsilon(1e-12));

  Channel depol = channels::depolarizing(2, 1.0);
  McEstimate mc = ave_measure_mc(depol, id, Metric::Fidelity, 100000, 99);
  CHECK(std::abs(mc.estimate - 0.5) <= 3.0 * mc.std_error + 1e-12);
}

TEST_CASE("worst case: trivial, Z rotation, depolarizing") {
  Channel id = channels::identity(2);
  OptimizerResult same =
      worst_case(id, id, Metric::TraceDistance, test_config(1));
  CHECK(same.value == doctest::Approx(0.0).epsilon(1e-9));
  OptimizerResult same_f = worst_case(id, id, Metric::Fidelity, test_config(2));
  CHECK(same_f.value == doctest::Approx(1.0).epsilon(1e-9));

  // min_psi |<psi|Z|psi>|^2 = 0, attained on the equator.
  OptimizerResult fz = worst_case(zgate(), id, Metric::Fidelity, test_config(3));
  CHECK(fz.value == doctest::Approx(0.0).epsilon(1e-8));
  // The reported state is pure.
  const Mat& arg = fz.argmin_state.matrix();
  CHECK((arg * arg - arg).cwiseAbs().maxCoeff() < 1e-8);

  // D_max(depol, id) = 1/2 with a Haar brute-force oracle.
  Channel depol = channels::depolarizing(2, 1.0);
  OptimizerResult dm =
      worst_case(depol, id, Metric::TraceDistance, test_config(4));
  CHECK(dm.value == doctest::Approx(0.5).epsilon(1e-8));
  Rng rng(17);
  double brute = 0.0;
  for (int i = 0; i < 10000; ++i) {
    DensityMatrix psi = DensityMatrix::pure(haar_state(2, rng));
    brute = std::max(brute, trace_distance(depol.apply(psi), id.apply(psi)));
  }
  CHECK(dm.value >= brute - 1e-6);
}

TEST_CASE("stabilized measures: closed forms and instability of D_max") {
  Channel id = channels::identity(2);
  OptimizerResult same = stabilized(id, id, Metric::Fidelity, test_config(5));
  CHECK(same.value == doctest::Approx(1.0).epsilon(1e-9));

  OptimizerResult fz = stabilized(zgate(), id, Metric::Fidelity, test_config(6));
  CHECK(fz.value == doctest::Approx(0.0).epsilon(1e-9));

  Channel depol = channels::depolarizing(2, 1.0);
  OptimizerResult ds =
      stabilized(depol, id, Metric::TraceDistance, test_config(7));
  CHECK(ds.value >= 0.75 - 1e-6);
  CHECK(ds.value == doctest::Approx(0.75).epsilon(1e-6));

  OptimizerResult dm =
      worst_case(depol, id, Metric::TraceDistance, test_config(8));
  CHECK(ds.value > dm.value + 0.2);  // 3/4 vs 1/2

  // The maximally entangled input witnesses the gap directly.
  CHECK(stabilized_objective(depol, id, Metric::TraceDistance,
                             DensityMatrix::maximally_mixed(2), 2) ==
        doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("stabilized objective matches the canonical-purification route") {
  Rng rng(21);
  Channel e = channels::random_channel(2, 3, rng);
  Channel f = channels::random_channel(2, 2, rng);
  for (int i = 0; i < 5; ++i) {
    Mat g = detail::random_gaussian(2, 2, rng);
    Mat m = g * g.adjoint();
    m /= m.trace().real();
    DensityMatrix rho = DensityMatrix::unchecked(m);
    PureState psi = purify(rho, 2);
    std::vector<Mat> ke, kf;
    for (const Mat& k : e.kraus().elements())
      ke.push_back(kron(Mat::Identity(2, 2), k));
    for (const Mat& k : f.kraus().elements())
      kf.push_back(kron(Mat::Identity(2, 2), k));
    Mat in = psi.amplitudes() * psi.amplitudes().adjoint();
    const double direct = detail::fidelity_raw(apply_kraus_raw(ke, in),
                                               apply_kraus_raw(kf, in));
    CHECK(stabilized_objective(e, f, Metric::Fidelity, rho, 2) ==
          doctest::Approx(direct).epsilon(1e-10));
  }
}

TEST_CASE("optimizer invariants") {
  Rng rng(33);
  Channel e = channels::random_channel(2, 2, rng);
  Channel f = Channel::from_unitary(channels::random_unitary(2, rng));
  for (Metric m : {Metric::TraceDistance, Metric::Fidelity}) {
    OptimizerResult stab = stabilized(e, f, m, test_config(40));
    OptimizerResult worst = worst_case(e, f, m, test_config(41));
    if (stab.converged) CHECK(stab.final_gap <= test_config(0).gap_tolerance);
    if (m == Metric::TraceDistance) {
      CHECK(stab.value >= worst.value - 1e-6);
    } else {
      CHECK(stab.value <= worst.value + 1e-6);
    }
  }
}

TEST_CASE("process purity") {
  Rng rng(51);
  Channel u = Channel::from_unitary(channels::random_unitary(3, rng));
  CHECK(process_purity(u) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(process_purity(channels::depolarizing(2, 1.0)) ==
        doctest::Approx(0.25).epsilon(1e-12));
  CHECK(process_purity(channels::bit_flip(0.5)) ==
        doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("full report: trivial pair and bit-flip closed forms") {
  Channel id = channels::identity(2);
  ReportConfig config;
  config.seed = 77;
  config.mc.samples = 2000;
  MeasureReport same = full_report(id, id, config);
  CHECK(same.d_pro == doctest::Approx(0.0));
  CHECK(same.f_pro == doctest::Approx(1.0));
  CHECK(same.d_max == doctest::Approx(0.0).epsilon(1e-8));
  CHECK(same.f_min == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(same.d_stab == doctest::Approx(0.0).epsilon(1e-8));
  CHECK(same.f_stab == doctest::Approx(1.0).epsilon(1e-8));
  REQUIRE(same.f_ave.has_value());
  CHECK(*same.f_ave == doctest::Approx(1.0));

  MeasureReport bf = full_report(channels::bit_flip(0.3), id, config);
  CHECK(bf.d_pro == doctest::Approx(0.3).epsilon(1e-9));
  CHECK(bf.f_pro == doctest::Approx(0.7).epsilon(1e-9));
  REQUIRE(bf.f_ave.has_value());
  CHECK(*bf.f_ave == doctest::Approx(0.8).epsilon(1e-9));
  CHECK(bf.c_stab ==
        doctest::Approx(std::sqrt(1.0 - bf.f_stab)).epsilon(1e-12));
  CHECK(bf.fvg_process_holds);
  CHECK(bf.dmax_le_dstab);
  CHECK(bf.fmin_ge_fstab);

  // Non-unitary reference: no Horodecki value.
  MeasureReport vs_noise =
      full_report(id, channels::depolarizing(2, 0.5), config);
  CHECK_FALSE(vs_noise.f_ave.has_value());

  Rng rng(61);
  Channel e = channels::random_channel(2, 2, rng);
  Channel f = channels::random_channel(2, 3, rng);
  MeasureReport rnd = full_report(e, f, config);
  CHECK(rnd.fvg_process_holds);
  CHECK(rnd.dmax_le_dstab);
  CHECK(rnd.fmin_ge_fstab);
}
