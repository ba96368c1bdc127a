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

#include <optional>
#include <vector>

#include "qpdist/linalg.hpp"

namespace qpdist {

// Subsystem ordering convention: Choi states live on A (x) Q with the
// ancilla FIRST, i.e. rho_E = (I (x) E)(|Phi><Phi|) with
// |Phi> = sum_j |j>_A |j>_Q / sqrt(d).  Vector index on A (x) Q is
// a*d + q.

/// Trace-preserving operator-sum representation: a set of d x d elements
/// E_j with sum_j E_j^dag E_j = I (checked to 1e-9).
class KrausChannel {
 public:
  KrausChannel(int dim, std::vector<Mat> elements);
  int dim() const { return dim_; }
  const std::vector<Mat>& elements() const { return elements_; }

 private:
  int dim_;
  std::vector<Mat> elements_;
};

/// The Jamiolkowski state of a trace-preserving channel: a density matrix
/// on A (x) Q with tr_Q = I/d (checked to 1e-8).
class ChoiState {
 public:
  ChoiState(int dim, DensityMatrix state);
  int dim() const { return dim_; }
  const DensityMatrix& state() const { return state_; }
  const Mat& matrix() const { return state_.matrix(); }

 private:
  int dim_;
  DensityMatrix state_;
};

/// Orthonormal operator basis, either matrix units (Hilbert-Schmidt
/// orthonormal, tr(A_j^dag A_k) = delta_jk) or Pauli products
/// (tr(U_j^dag U_k) = d delta_jk, each unitary and Hermitian).
///
/// Orderings are fixed so chi-matrix indices are reproducible:
///  - matrix units: A_{alpha*d+beta} = |beta><alpha|, which makes
///    chi = d * rho_E hold entrywise in this basis;
///  - Pauli products: lexicographic in (I, X, Y, Z) per qubit, leftmost
///    qubit most significant.
class OperatorBasis {
 public:
  enum class Kind { MatrixUnits, PauliProducts };

  static OperatorBasis matrix_units(int dim);
  static OperatorBasis pauli_products(int n_qubits);
  /// Validates a caller-supplied basis against the named kind's
  /// orthonormality rules; raises BadBasis on failure.
  OperatorBasis(Kind kind, int dim, std::vector<Mat> operators);

  Kind kind() const { return kind_; }
  int dim() const { return dim_; }
  const std::vector<Mat>& operators() const { return ops_; }

 private:
  Kind kind_;
  int dim_;
  std::vector<Mat> ops_;
};

/// Process matrix chi in a fixed operator basis: E(rho) =
/// sum_{mn} chi_mn A_m rho A_n^dag.  Hermitian PSD; in the matrix-unit
/// basis chi = d * rho_E entrywise.
class ChiMatrix {
 public:
  ChiMatrix(OperatorBasis basis, Mat matrix);
  int dim() const { return basis_.dim(); }
  const OperatorBasis& basis() const { return basis_; }
  const Mat& matrix() const { return m_; }

 private:
  OperatorBasis basis_;
  Mat m_;
};

/// A quantum operation.  The Choi state is the authoritative form (it is
/// unique to the process); a Kraus decomposition is kept as an eagerly
/// computed cache for fast application.
class Channel {
 public:
  static Channel from_kraus(KrausChannel k);
  static Channel from_choi(ChoiState c);
  static Channel from_chi(const ChiMatrix& chi);
  static Channel from_unitary(const UnitaryOperator& u);

  int dim() const { return choi_->dim(); }
  const ChoiState& choi() const { return *choi_; }
  const KrausChannel& kraus() const { return *kraus_; }

  DensityMatrix apply(const DensityMatrix& rho) const;
  /// Linear extension of the operator sum to arbitrary operators.
  Mat apply_to_operator(const Mat& x) const;

  /// Extracts the unitary when the channel is one (pure Choi state);
  /// std::nullopt otherwise.
  std::optional<UnitaryOperator> as_unitary(double purity_tol = 1e-9) const;

 private:
  Channel() = default;
  std::optional<ChoiState> choi_;
  std::optional<KrausChannel> kraus_;
};

// -- Conversions -------------------------------------------------------------

ChoiState kraus_to_choi(const KrausChannel& k);
/// Kraus elements from the eigendecomposition of d * rho_E, one per
/// eigenvalue above 1e-10.
KrausChannel choi_to_kraus(const ChoiState& c);
ChiMatrix choi_to_chi(const ChoiState& c, const OperatorBasis& basis);
ChoiState chi_to_choi(const ChiMatrix& chi);

// -- Channel algebra ---------------------------------------------------------

/// Composition e2 after e1.
Channel compose(const Channel& e2, const Channel& e1);

/// Tensor product of two channels; the Choi state equals the permuted
/// tensor product of the factor Choi states (see tensor_choi_permutation).
Channel tensor(const Channel& a, const Channel& b);

/// Permutation p with Choi(a (x) b) = P (Choi(a) (x) Choi(b)) P^T, as the
/// index map source -> target on the A1 Q1 A2 Q2 -> A1 A2 Q1 Q2 reorder.
std::vector<int> tensor_choi_permutation(int dim_a, int dim_b);

/// Transpose map F^T(rho) = sum_j F_j^T rho F_j^*.  Trace-preserving iff
/// the input is doubly stochastic; otherwise `channel` is empty and
/// `trace_preserving` is false, with the raw elements still available.
struct TransposedChannel {
  std::vector<Mat> elements;
  bool trace_preserving;
  std::optional<Channel> channel;
};

TransposedChannel transpose_channel(const Channel& f);

/// Operator-sum application of raw (not necessarily trace-preserving)
/// elements to an arbitrary operator.
Mat apply_kraus_raw(const std::vector<Mat>& elements, const Mat& x);

// -- Generators --------------------------------------------------------------

namespace channels {

Channel identity(int dim);
Channel unitary(const UnitaryOperator& u);
/// E(rho) = (1-p) rho + p I/d.  p = 1 is the fully depolarizing channel.
Channel depolarizing(int dim, double p);
Channel bit_flip(double p);
Channel phase_flip(double p);
Channel amplitude_damping(double gamma);

Mat pauli(int k);  // 0: I, 1: X, 2: Y, 3: Z
Mat pauli_product(int n_qubits, int index);  // lexicographic, leftmost-major
Mat hadamard();
Mat cnot();

/// Haar-random isometry V: C^d -> C^(d*kraus_count) via QR of a complex
/// Gaussian with R-diagonal phase fixing; the Kraus elements are the d x d
/// blocks of V.
KrausChannel random_kraus(int dim, int kraus_count, Rng& rng);
Channel random_channel(int dim, int kraus_count, Rng& rng);
UnitaryOperator random_unitary(int dim, Rng& rng);

}  // namespace channels

/// The maximally entangled vector sum_j |j>|j> / sqrt(d) on A (x) Q.
Vec maximally_entangled_vector(int dim);

}  // namespace qpdist
