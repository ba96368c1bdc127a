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

#include "qpdist/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <vector>

namespace qpdist {

double hermiticity_defect(const Mat& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

// ---------------------------------------------------------------------------
// Types

PureState::PureState(Vec amplitudes) : amps_(std::move(amplitudes)) {
  if (amps_.size() == 0) throw DimensionMismatch("PureState: empty vector");
  const double n2 = amps_.squaredNorm();
  if (std::abs(n2 - 1.0) > 1e2 * tol::kStateNorm) {
    throw Error("PureState: norm^2 deviates from 1 by " +
                std::to_string(n2 - 1.0));
  }
}

PureState PureState::basis_state(int dim, int index) {
  Vec v = Vec::Zero(dim);
  v(index) = 1.0;
  return PureState(std::move(v));
}

DensityMatrix::DensityMatrix(Mat m) {
  if (m.rows() != m.cols()) throw NonSquareInput("DensityMatrix: not square");
  if (hermiticity_defect(m) > tol::kHermitian)
    throw NonHermitianInput("DensityMatrix: Hermiticity defect exceeds 1e-12");
  if (std::abs(m.trace().real() - 1.0) > tol::kTrace ||
      std::abs(m.trace().imag()) > tol::kTrace)
    throw Error("DensityMatrix: trace deviates from 1 beyond 1e-10");
  m_ = 0.5 * (m + m.adjoint().eval());
  Eigen::SelfAdjointEigenSolver<Mat> es(m_, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -tol::kPsdDust)
    throw IndefiniteInput("DensityMatrix: negative eigenvalue below -1e-10");
}

DensityMatrix DensityMatrix::unchecked(Mat m) {
  DensityMatrix rho;
  rho.m_ = std::move(m);
  return rho;
}

DensityMatrix DensityMatrix::pure(const PureState& psi) {
  const Vec& a = psi.amplitudes();
  return unchecked(a * a.adjoint());
}

DensityMatrix DensityMatrix::maximally_mixed(int dim) {
  return unchecked(Mat::Identity(dim, dim) / static_cast<double>(dim));
}

UnitaryOperator::UnitaryOperator(Mat m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols())
    throw NonSquareInput("UnitaryOperator: not square");
  Mat defect = m_.adjoint() * m_ - Mat::Identity(m_.rows(), m_.cols());
  if (defect.cwiseAbs().maxCoeff() > tol::kUnitary)
    throw Error("UnitaryOperator: U^dag U deviates from identity beyond 1e-10");
}

// ---------------------------------------------------------------------------
// Decompositions

HermitianEig hermitian_eig(const Mat& m, double herm_tol) {
  if (m.rows() != m.cols()) throw NonSquareInput("hermitian_eig: not square");
  if (hermiticity_defect(m) > herm_tol)
    throw NonHermitianInput("hermitian_eig: input not Hermitian");
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (m + m.adjoint().eval()));
  const int n = static_cast<int>(m.rows());
  HermitianEig out;
  out.values = RVec(n);
  out.vectors = Mat(n, n);
  // Eigen returns ascending order; stable-sort descending so ties keep the
  // solver's first-occurrence order.
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return es.eigenvalues()(a) > es.eigenvalues()(b);
  });
  for (int i = 0; i < n; ++i) {
    out.values(i) = es.eigenvalues()(order[i]);
    out.vectors.col(i) = es.eigenvectors().col(order[i]);
  }
  // Phase fix: largest-magnitude entry (first on ties) real nonnegative.
  for (int i = 0; i < n; ++i) {
    int arg = 0;
    double best = -1.0;
    for (int r = 0; r < n; ++r) {
      const double a = std::abs(out.vectors(r, i));
      if (a > best + 1e-15) {
        best = a;
        arg = r;
      }
    }
    const Cplx z = out.vectors(arg, i);
    if (std::abs(z) > 0) out.vectors.col(i) *= std::conj(z) / std::abs(z);
  }
  return out;
}

Mat psd_sqrt(const Mat& m) {
  HermitianEig eig = hermitian_eig(m);
  RVec vals = eig.values;
  for (int i = 0; i < vals.size(); ++i) {
    if (vals(i) < -tol::kPsdError)
      throw IndefiniteInput("psd_sqrt: eigenvalue below -1e-6");
    if (vals(i) < 0) vals(i) = 0;
  }
  Mat root = eig.vectors * vals.cwiseSqrt().asDiagonal() *
             eig.vectors.adjoint();
  return 0.5 * (root + root.adjoint().eval());
}

double trace_norm(const Mat& m) {
  if (m.rows() != m.cols()) throw NonSquareInput("trace_norm: not square");
  if (m.rows() == 0) return 0.0;
  Eigen::JacobiSVD<Mat> svd(m);
  return svd.singularValues().sum();
}

Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Mat partial_trace(const Mat& m, Subsystem traced_out, int dim_a, int dim_b) {
  if (m.rows() != m.cols() ||
      m.rows() != static_cast<Eigen::Index>(dim_a) * dim_b)
    throw DimensionMismatch("partial_trace: matrix size != dim_a*dim_b");
  if (traced_out == Subsystem::A) {
    Mat out = Mat::Zero(dim_b, dim_b);
    for (int a = 0; a < dim_a; ++a)
      out += m.block(a * dim_b, a * dim_b, dim_b, dim_b);
    return out;
  }
  Mat out = Mat::Zero(dim_a, dim_a);
  for (int i = 0; i < dim_a; ++i)
    for (int j = 0; j < dim_a; ++j) {
      Cplx s = 0;
      for (int b = 0; b < dim_b; ++b) s += m(i * dim_b + b, j * dim_b + b);
      out(i, j) = s;
    }
  return out;
}

namespace detail {

Vec purify_raw(const Mat& rho, int ancilla_dim) {
  const int d = static_cast<int>(rho.rows());
  HermitianEig eig = hermitian_eig(rho);
  int rank = 0;
  for (int i = 0; i < d; ++i)
    if (eig.values(i) > tol::kRank) ++rank;
  if (ancilla_dim < rank)
    throw AncillaTooSmall("purify: ancilla_dim " + std::to_string(ancilla_dim) +
                          " < rank " + std::to_string(rank));
  Vec psi = Vec::Zero(static_cast<Eigen::Index>(ancilla_dim) * d);
  const int terms = std::min(ancilla_dim, d);
  for (int i = 0; i < terms; ++i) {
    const double lam = std::max(eig.values(i), 0.0);
    if (lam == 0.0) continue;
    const double c = std::sqrt(lam);
    for (int q = 0; q < d; ++q) psi(i * d + q) += c * eig.vectors(q, i);
  }
  psi /= psi.norm();
  return psi;
}

Mat random_gaussian(int rows, int cols, Rng& rng) {
  Mat g(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) g(i, j) = Cplx(rng.normal(), rng.normal());
  return g;
}

}  // namespace detail

PureState purify(const DensityMatrix& rho, int ancilla_dim) {
  return PureState(detail::purify_raw(rho.matrix(), ancilla_dim));
}

PureState haar_state(int dim, Rng& rng) {
  Vec v(dim);
  for (int i = 0; i < dim; ++i) v(i) = Cplx(rng.normal(), rng.normal());
  v /= v.norm();
  return PureState(std::move(v));
}

PureState haar_state(int dim, std::uint64_t seed) {
  Rng rng(seed);
  return haar_state(dim, rng);
}

}  // namespace qpdist
