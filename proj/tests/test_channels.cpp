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

#include "qpdist/channel.hpp"
#include "qpdist/state_metrics.hpp"

using namespace qpdist;

namespace {
double max_abs(const Mat& m) { return m.cwiseAbs().maxCoeff(); }

Channel full_depolarizing_kraus() {
  std::vector<Mat> elements;
  for (int k = 0; k < 4; ++k) elements.push_back(0.5 * channels::pauli(k));
  return Channel::from_kraus(KrausChannel(2, std::move(elements)));
}

DensityMatrix random_density(int dim, Rng& rng) {
  Mat g = detail::random_gaussian(dim, dim, rng);
  Mat m = g * g.adjoint();
  m /= m.trace().real();
  return DensityMatrix::unchecked(0.5 * (m + m.adjoint().eval()));
}
}  // namespace

TEST_CASE("apply: identity, Pauli twirl, bit flip") {
  Rng rng(1);
  Channel id = channels::identity(2);
  Channel depol = full_depolarizing_kraus();
  for (int i = 0; i < 10; ++i) {
    DensityMatrix rho = random_density(2, rng);
    CHECK(max_abs(id.apply(rho).matrix() - rho.matrix()) < 1e-14);
    // Pauli twirl: the uniform Pauli channel sends everything to I/2.
    CHECK(max_abs(depol.apply(rho).matrix() - 0.5 * Mat::Identity(2, 2)) <
          1e-12);
  }
  DensityMatrix zero = DensityMatrix::pure(PureState::basis_state(2, 0));
  Mat out = channels::bit_flip(0.3).apply(zero).matrix();
  CHECK(out(0, 0).real() == doctest::Approx(0.7));
  CHECK(out(1, 1).real() == doctest::Approx(0.3));
  CHECK_THROWS_AS(id.apply(DensityMatrix::maximally_mixed(3)),
                  DimensionMismatch);
}

TEST_CASE("kraus_to_choi closed forms") {
  Vec phi = maximally_entangled_vector(2);

  Channel id = channels::identity(2);
  CHECK(max_abs(id.choi().matrix() - phi * phi.adjoint()) < 1e-14);

  // Full depolarizing: I/4; cross-checked by applying I (x) E to Phi.
  Channel depol = full_depolarizing_kraus();
  CHECK(max_abs(depol.choi().matrix() - Mat::Identity(4, 4) / 4.0) < 1e-12);
  std::vector<Mat> lifted;
  for (const Mat& e : depol.kraus().elements())
    lifted.push_back(kron(Mat::Identity(2, 2), e));
  Mat direct = apply_kraus_raw(lifted, phi * phi.adjoint());
  CHECK(max_abs(depol.choi().matrix() - direct) < 1e-12);

  // Bit flip: mixture of two orthogonal Bell projectors.
  const double p = 0.3;
  Vec phi_x = kron(Mat::Identity(2, 2), channels::pauli(1)) * phi;
  CHECK(std::abs(phi.dot(phi_x)) < 1e-14);  // orthogonal
  Mat want = (1 - p) * (phi * phi.adjoint()) + p * (phi_x * phi_x.adjoint());
  CHECK(max_abs(channels::bit_flip(p).choi().matrix() - want) < 1e-12);
}

TEST_CASE("choi_to_kraus closed forms and round trips") {
  // |Phi><Phi| extracts a single identity element (up to the phase fix).
  Channel id = channels::identity(2);
  KrausChannel k = choi_to_kraus(id.choi());
  CHECK(k.elements().size() == 1);
  CHECK(max_abs(k.elements()[0] - Mat::Identity(2, 2)) < 1e-10);

  // I/4: four orthogonal elements with unit Hilbert-Schmidt norm.
  KrausChannel k4 = choi_to_kraus(
      ChoiState(2, DensityMatrix::unchecked(Mat::Identity(4, 4) / 4.0)));
  CHECK(k4.elements().size() == 4);
  // Trace preservation forces sum_j ||E_j||_HS^2 = d, so the four balanced
  // elements carry Hilbert-Schmidt norm^2 = 1/2 each (Pauli/2 up to mixing).
  for (const Mat& e : k4.elements())
    CHECK((e.adjoint() * e).trace().real() == doctest::Approx(0.5));
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = i + 1; j < 4; ++j)
      CHECK(std::abs((k4.elements()[i].adjoint() * k4.elements()[j]).trace())
            < 1e-12);

  Rng rng(17);
  for (int i = 0; i < 6; ++i) {
    Rng child = rng.split(i);
    const int d = 2 + (i % 3);
    Channel ch = channels::random_channel(d, 1 + (i % d), child);
    Channel back = Channel::from_choi(ch.choi());
    CHECK(max_abs(back.choi().matrix() - ch.choi().matrix()) < 1e-8);
    DensityMatrix probe = random_density(d, child);
    CHECK(max_abs(back.apply(probe).matrix() - ch.apply(probe).matrix()) <
          1e-9);
  }
}

TEST_CASE("chi matrix in the Pauli and matrix-unit bases") {
  Channel id = channels::identity(2);
  OperatorBasis pauli = OperatorBasis::pauli_products(1);
  ChiMatrix chi = choi_to_chi(id.choi(), pauli);
  // Identity channel: only the II entry survives and equals 1.
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      const double want = (i == 0 && j == 0) ? 1.0 : 0.0;
      CHECK(std::abs(chi.matrix()(i, j) - want) < 1e-12);
    }

  // chi = d * rho_E entrywise in the matrix-unit basis.
  Rng rng(23);
  Channel ch = channels::random_channel(2, 3, rng);
  ChiMatrix units = choi_to_chi(ch.choi(), OperatorBasis::matrix_units(2));
  CHECK(max_abs(units.matrix() - 2.0 * ch.choi().matrix()) < 1e-9);

  // Reconstructing the action from chi reproduces apply.
  DensityMatrix probe = random_density(2, rng);
  Mat rebuilt = Mat::Zero(2, 2);
  ChiMatrix chi_p = choi_to_chi(ch.choi(), pauli);
  for (int m = 0; m < 4; ++m)
    for (int n = 0; n < 4; ++n)
      rebuilt += chi_p.matrix()(m, n) * pauli.operators()[m] * probe.matrix() *
                 pauli.operators()[n].adjoint();
  CHECK(max_abs(rebuilt - ch.apply(probe).matrix()) < 1e-9);

  // Round trip chi -> choi -> chi.
  ChoiState back = chi_to_choi(chi_p);
  CHECK(max_abs(back.matrix() - ch.choi().matrix()) < 1e-10);
  ChiMatrix again = choi_to_chi(back, pauli);
  CHECK(max_abs(again.matrix() - chi_p.matrix()) < 1e-10);
}

TEST_CASE("operator basis validation") {
  CHECK_THROWS_AS(OperatorBasis(OperatorBasis::Kind::MatrixUnits, 2,
                                {Mat::Identity(2, 2)}),
                  BadBasis);
  std::vector<Mat> not_orthonormal(4, Mat::Identity(2, 2));
  CHECK_THROWS_AS(OperatorBasis(OperatorBasis::Kind::MatrixUnits, 2,
                                std::move(not_orthonormal)),
                  BadBasis);
}

TEST_CASE("compose") {
  Channel x = Channel::from_unitary(UnitaryOperator(channels::pauli(1)));
  Channel xx = compose(x, x);
  Channel id = channels::identity(2);
  CHECK(max_abs(xx.choi().matrix() - id.choi().matrix()) < 1e-12);

  Channel depol = channels::depolarizing(2, 0.7);
  Channel same = compose(depol, id);
  CHECK(max_abs(same.choi().matrix() - depol.choi().matrix()) < 1e-12);
}

TEST_CASE("composition Choi identity with the transposed first stage") {
  Rng rng(29);
  for (int d : {2, 3, 4}) {
    Rng child = rng.split(d);
    Channel e = channels::random_channel(d, 2, child);
    Channel f = channels::random_channel(d, 2, child);
    Channel ef = compose(e, f);
    TransposedChannel ft = transpose_channel(f);
    std::vector<Mat> pairs;
    for (const Mat& fj : ft.elements)
      for (const Mat& ek : e.kraus().elements()) pairs.push_back(kron(fj, ek));
    Vec phi = maximally_entangled_vector(d);
    Mat rhs = apply_kraus_raw(pairs, phi * phi.adjoint());
    CHECK(max_abs(ef.choi().matrix() - rhs) < 1e-9);
  }
}

TEST_CASE("tensor products of channels") {
  Channel id2 = channels::identity(2);
  Channel id4 = channels::identity(4);
  CHECK(max_abs(tensor(id2, id2).choi().matrix() - id4.choi().matrix()) <
        1e-12);

  // Permutation identity against the Kraus route, random factors.
  Rng rng(37);
  Channel e = channels::random_channel(2, 3, rng);
  Channel f = channels::random_channel(3, 2, rng);
  Channel t = tensor(e, f);
  std::vector<Mat> pairs;
  for (const Mat& a : e.kraus().elements())
    for (const Mat& b : f.kraus().elements()) pairs.push_back(kron(a, b));
  Channel direct = Channel::from_kraus(KrausChannel(6, std::move(pairs)));
  CHECK(max_abs(t.choi().matrix() - direct.choi().matrix()) < 1e-9);

  // Unitary (x) unitary on a product state.
  UnitaryOperator u = channels::random_unitary(2, rng);
  UnitaryOperator v = channels::random_unitary(2, rng);
  Channel uv = tensor(Channel::from_unitary(u), Channel::from_unitary(v));
  DensityMatrix a = random_density(2, rng);
  DensityMatrix b = random_density(2, rng);
  Mat in = kron(a.matrix(), b.matrix());
  Mat want = kron(u.matrix() * a.matrix() * u.matrix().adjoint(),
                  v.matrix() * b.matrix() * v.matrix().adjoint());
  CHECK(max_abs(uv.apply(DensityMatrix::unchecked(in)).matrix() - want) <
        1e-12);
}

TEST_CASE("transpose_channel") {
  Rng rng(41);
  UnitaryOperator u = channels::random_unitary(2, rng);
  TransposedChannel ut = transpose_channel(Channel::from_unitary(u));
  CHECK(ut.trace_preserving);
  CHECK(max_abs(ut.elements[0] - u.matrix().transpose()) < 1e-14);

  // Depolarizing is closed under transposition.
  Channel depol = channels::depolarizing(2, 0.8);
  TransposedChannel dt = transpose_channel(depol);
  CHECK(dt.trace_preserving);
  REQUIRE(dt.channel.has_value());
  CHECK(max_abs(dt.channel->choi().matrix() - depol.choi().matrix()) < 1e-9);

  // Amplitude damping is not doubly stochastic: flagged, no channel.
  TransposedChannel at = transpose_channel(channels::amplitude_damping(0.4));
  CHECK_FALSE(at.trace_preserving);
  CHECK_FALSE(at.channel.has_value());
  Mat sum = Mat::Zero(2, 2);
  for (const Mat& e : at.elements) sum += e.adjoint() * e;
  CHECK(max_abs(sum - Mat::Identity(2, 2)) > 1e-3);
}

TEST_CASE("random channels are trace-preserving isometries") {
  Rng rng(43);
  Channel u = channels::random_channel(3, 1, rng);
  CHECK(u.kraus().elements().size() == 1);
  const Mat& m = u.kraus().elements()[0];
  CHECK(max_abs(m.adjoint() * m - Mat::Identity(3, 3)) < 1e-12);

  for (int i = 0; i < 100; ++i) {
    Rng child = rng.split(i);
    const int d = 2 + (i % 3);
    const int k = 1 + static_cast<int>(child.next_u64() % (d * d));
    KrausChannel kc = channels::random_kraus(d, k, child);
    Mat sum = Mat::Zero(d, d);
    for (const Mat& e : kc.elements()) sum += e.adjoint() * e;
    CHECK(max_abs(sum - Mat::Identity(d, d)) < 1e-10);
  }

  Rng r1(555), r2(555);
  Channel c1 = channels::random_channel(2, 2, r1);
  Channel c2 = channels::random_channel(2, 2, r2);
  CHECK(max_abs(c1.choi().matrix() - c2.choi().matrix()) == 0.0);
}

TEST_CASE("as_unitary recovers unitaries and rejects noise") {
  Rng rng(47);
  UnitaryOperator u = channels::random_unitary(4, rng);
  auto got = Channel::from_unitary(u).as_unitary();
  REQUIRE(got.has_value());
  // Same action (the representative can differ by a global phase).
  DensityMatrix probe = random_density(4, rng);
  Mat a = u.matrix() * probe.matrix() * u.matrix().adjoint();
  Mat b = got->matrix() * probe.matrix() * got->matrix().adjoint();
  CHECK(max_abs(a - b) < 1e-9);

  CHECK_FALSE(channels::depolarizing(2, 0.5).as_unitary().has_value());
}

TEST_CASE("channel invariant violations are rejected") {
  std::vector<Mat> not_tp{0.5 * Mat::Identity(2, 2)};
  CHECK_THROWS_AS(KrausChannel(2, std::move(not_tp)), Error);

  // A Choi state that is not trace-preserving on the ancilla side.
  Mat bad = Mat::Zero(4, 4);
  bad(0, 0) = 1.0;
  CHECK_THROWS_AS(ChoiState(2, DensityMatrix(bad)), InvalidChoi);
}
