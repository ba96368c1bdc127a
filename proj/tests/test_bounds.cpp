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

#include "qpdist/computation_bounds.hpp"
#include "qpdist/process_metrics.hpp"

using namespace qpdist;

TEST_CASE("function specs and permutation unitaries") {
  FunctionSpec spec(4, {1, 0, 3, 2});
  UnitaryOperator u = spec.permutation_unitary();
  CHECK(u.matrix()(1, 0).real() == doctest::Approx(1.0));
  CHECK_THROWS_AS(FunctionSpec(2, {0}), DimensionMismatch);
  CHECK_THROWS_AS(FunctionSpec(2, {0, 2}), Error);
  CHECK_THROWS_AS(FunctionSpec(2, std::vector<int>{0, 0}).permutation_unitary(),
                  Error);
}

TEST_CASE("error probabilities") {
  FunctionSpec flip(2, {1, 0});
  Channel x = Channel::from_unitary(UnitaryOperator(channels::pauli(1)));
  ErrorProbabilities exact = error_probabilities(x, flip);
  CHECK(exact.worst == doctest::Approx(0.0));
  CHECK(exact.average == doctest::Approx(0.0));

  FunctionSpec idmap = FunctionSpec::identity_map(2);
  ErrorProbabilities bf =
      error_probabilities(channels::bit_flip(0.3), idmap);
  CHECK(bf.per_instance[0] == doctest::Approx(0.3));
  CHECK(bf.per_instance[1] == doctest::Approx(0.3));
  CHECK(bf.worst == doctest::Approx(0.3));
  CHECK(bf.average == doctest::Approx(0.3));

  ErrorProbabilities depol =
      error_probabilities(channels::depolarizing(2, 1.0), idmap);
  CHECK(depol.worst == doctest::Approx(0.5));
  CHECK(depol.average == doctest::Approx(0.5));

  // Aggregates are exactly the max and the mean.
  Rng rng(7);
  Channel noisy = channels::random_channel(4, 3, rng);
  FunctionSpec spec4(4, {2, 0, 3, 1});
  ErrorProbabilities ep = error_probabilities(noisy, spec4);
  double worst = 0.0, avg = 0.0;
  for (double v : ep.per_instance) {
    worst = std::max(worst, v);
    avg += v;
  }
  CHECK(ep.worst == worst);
  CHECK(ep.average == avg / 4.0);
}

TEST_CASE("sampling outcomes") {
  Channel id = channels::identity(2);
  SamplingOutcome same = sampling_outcome(id, id);
  for (int x = 0; x < 2; ++x) {
    CHECK(kolmogorov(same.per_instance_real[x], same.per_instance_ideal[x]) ==
          doctest::Approx(0.0));
    CHECK(bhattacharya(same.per_instance_real[x],
                       same.per_instance_ideal[x]) == doctest::Approx(1.0));
  }

  Channel had = Channel::from_unitary(UnitaryOperator(channels::hadamard()));
  SamplingOutcome ho = sampling_outcome(had, id);
  // x = 0: ideal (1/2, 1/2) vs real (1, 0): Kolmogorov distance 1/2.
  CHECK(ho.per_instance_ideal[0][0] == doctest::Approx(0.5));
  CHECK(ho.per_instance_real[0][0] == doctest::Approx(1.0));
  CHECK(kolmogorov(ho.per_instance_real[0], ho.per_instance_ideal[0]) ==
        doctest::Approx(0.5));

  // Joint marginals are uniform over instances.
  for (int x = 0; x < 2; ++x) {
    double mass = 0.0;
    for (int y = 0; y < 2; ++y) mass += ho.joint_ideal[x * 2 + y];
    CHECK(mass == doctest::Approx(0.5).epsilon(1e-10));
  }
}

TEST_CASE("function bounds on the fixtures") {
  Channel id = channels::identity(2);
  FunctionSpec idmap = FunctionSpec::identity_map(2);

  // Trivial: everything zero.
  BoundReport trivial = verify_function_worst(id, id, idmap, 0.0, 0.0);
  CHECK(trivial.all_hold());

  // Bit flip 0.2 against the exact identity computation.
  Channel bf = channels::bit_flip(0.2);
  OptimizerConfig cfg;
  cfg.seed = 5;
  const double d_stab =
      stabilized(bf, id, Metric::TraceDistance, cfg).value;
  const double f_stab = stabilized(bf, id, Metric::Fidelity, cfg).value;
  const double c_stab = std::sqrt(1.0 - f_stab);
  CHECK(d_stab >= 0.2 - 1e-8);  // D_stab >= D_pro = p
  BoundReport worst = verify_function_worst(bf, id, idmap, d_stab, c_stab);
  CHECK(worst.all_hold());
  CHECK(worst.rows[0].lhs == doctest::Approx(0.2));

  // Depolarizing closed forms: 1/2 <= 3/4 on both average rows.
  Channel depol = channels::depolarizing(2, 1.0);
  BoundReport avg = verify_function_average(depol, id, idmap, 0.75, 0.25);
  CHECK(avg.all_hold());
  CHECK(avg.rows[0].lhs == doctest::Approx(0.5));
  CHECK(avg.rows[0].rhs == doctest::Approx(0.75));
  CHECK(avg.rows[1].applicable);
  CHECK(avg.rows[1].rhs == doctest::Approx(0.75));

  // The fidelity row is skipped when the ideal computation errs.
  Channel noisy_ideal = compose(id, channels::depolarizing(2, 0.1));
  BoundReport na = verify_function_average(
      noisy_ideal, noisy_ideal, idmap, 0.0, 1.0);
  CHECK_FALSE(na.rows[1].applicable);
  CHECK(na.all_hold());
}

TEST_CASE("sampling bounds on the fixtures") {
  Channel id = channels::identity(2);
  Channel bf = channels::bit_flip(0.3);
  OptimizerConfig cfg;
  cfg.seed = 6;
  const double d_stab =
      stabilized(bf, id, Metric::TraceDistance, cfg).value;
  const double f_stab = stabilized(bf, id, Metric::Fidelity, cfg).value;
  BoundReport rep = verify_sampling(bf, id, d_stab, f_stab,
                                    j_distance(bf, id), j_fidelity(bf, id));
  CHECK(rep.all_hold());
  // max_x D(q_x, p_x) = 0.3 for the bit flip against the identity.
  CHECK(rep.rows[0].lhs == doctest::Approx(0.3));
  CHECK(rep.rows[0].rhs >= 0.3 - 1e-8);
}

TEST_CASE("tightness probe: the Kolmogorov bound is non-vacuous") {
  // X vs I: the joint distributions are disjoint, D(q, p) = 1 = D_pro.
  Channel id = channels::identity(2);
  Channel x = Channel::from_unitary(UnitaryOperator(channels::pauli(1)));
  const double d_pro = j_distance(x, id);
  BoundReport rep = verify_sampling(x, id, 1.0, 0.0, d_pro, j_fidelity(x, id));
  CHECK(rep.all_hold());
  const double slack = rep.rows[2].rhs - rep.rows[2].lhs;
  CHECK(slack < 0.5);
  CHECK(rep.rows[2].lhs == doctest::Approx(1.0));
}
