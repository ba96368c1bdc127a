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

#include <Eigen/Dense>
#include <complex>
#include <cstdint>

#include "qpdist/errors.hpp"
#include "qpdist/rng.hpp"

namespace qpdist {

using Cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;

namespace tol {
// Validation tolerances shared across the library.
inline constexpr double kHermitian = 1e-12;       // ||M - M^dag||_max
inline constexpr double kHermitianLoose = 1e-10;  // eigensolver input check
inline constexpr double kPsdDust = 1e-10;         // eigenvalues above this are clamped
inline constexpr double kPsdError = 1e-6;         // below this is IndefiniteInput
inline constexpr double kTrace = 1e-10;
inline constexpr double kUnitary = 1e-10;
inline constexpr double kStateNorm = 1e-12;
inline constexpr double kChoiTracePreserving = 1e-8;
inline constexpr double kRank = 1e-12;            // eigenvalue rank cutoff
inline constexpr double kKrausExtract = 1e-10;    // Choi eigenvalue -> Kraus element
}  // namespace tol

/// Max-norm of M - M^dagger.
double hermiticity_defect(const Mat& m);

/// A normalized state vector.  Norm is checked to 1e-12 at construction.
class PureState {
 public:
  explicit PureState(Vec amplitudes);
  static PureState basis_state(int dim, int index);

  int dim() const { return static_cast<int>(amps_.size()); }
  const Vec& amplitudes() const { return amps_; }

 private:
  Vec amps_;
};

/// Hermitian, positive semidefinite, unit-trace operator.
///
/// The public constructor validates all three invariants (Hermiticity to
/// 1e-12, smallest eigenvalue >= -1e-10, trace to 1e-10) and symmetrizes the
/// stored matrix.  `unchecked` is for internal paths that construct states
/// from sources already guaranteed valid.
class DensityMatrix {
 public:
  explicit DensityMatrix(Mat m);
  static DensityMatrix unchecked(Mat m);
  static DensityMatrix pure(const PureState& psi);
  static DensityMatrix maximally_mixed(int dim);

  int dim() const { return static_cast<int>(m_.rows()); }
  const Mat& matrix() const { return m_; }

 private:
  DensityMatrix() = default;
  Mat m_;
};

class UnitaryOperator {
 public:
  explicit UnitaryOperator(Mat m);
  int dim() const { return static_cast<int>(m_.rows()); }
  const Mat& matrix() const { return m_; }

 private:
  Mat m_;
};

/// Eigendecomposition of a Hermitian matrix: m = V diag(values) V^dag.
/// Eigenvalues are sorted descending.  Each eigenvector column is
/// phase-fixed so that its largest-magnitude entry (first such entry on
/// ties) is real and nonnegative.
struct HermitianEig {
  RVec values;   // descending
  Mat vectors;   // columns
};

HermitianEig hermitian_eig(const Mat& m, double herm_tol = tol::kHermitianLoose);

/// Hermitian PSD square root.  Eigenvalues in [-1e-6, 0) are clamped to 0;
/// anything below -1e-6 raises IndefiniteInput.
Mat psd_sqrt(const Mat& m);

/// Sum of singular values (trace norm); NonSquareInput on non-square input.
double trace_norm(const Mat& m);

/// Tensor (Kronecker) product.
Mat kron(const Mat& a, const Mat& b);

/// Which tensor factor to trace OUT of a bipartite operator on A (x) B.
enum class Subsystem { A, B };

/// Partial trace of a (dim_a*dim_b)-square matrix over the chosen factor.
Mat partial_trace(const Mat& m, Subsystem traced_out, int dim_a, int dim_b);

/// Canonical purification of rho on Q to a pure state on A (x) Q: the
/// ancilla index runs over eigenvalues of rho in descending order, so
/// psi = sum_i sqrt(lambda_i) |i>_A |v_i>_Q with (lambda_i, v_i) from
/// hermitian_eig.  ancilla_dim must be at least the rank of rho (eigenvalues
/// above 1e-12), or AncillaTooSmall is raised.
PureState purify(const DensityMatrix& rho, int ancilla_dim);

/// Haar-random pure state: complex standard-normal vector, normalized.
PureState haar_state(int dim, Rng& rng);
PureState haar_state(int dim, std::uint64_t seed);

namespace detail {
// Raw kernels shared by the hot paths; they skip type validation.
Vec purify_raw(const Mat& rho, int ancilla_dim);
Mat random_gaussian(int rows, int cols, Rng& rng);
}  // namespace detail

}  // namespace qpdist
