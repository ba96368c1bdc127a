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

#include "qpdist/channel.hpp"

#include <Eigen/QR>
#include <cmath>
#include <utility>

namespace qpdist {

// ---------------------------------------------------------------------------
// Representation types

KrausChannel::KrausChannel(int dim, std::vector<Mat> elements)
    : dim_(dim), elements_(std::move(elements)) {
  if (elements_.empty() ||
      elements_.size() > static_cast<std::size_t>(dim) * dim)
    throw Error("KrausChannel: element count must be in [1, d^2]");
  for (const Mat& e : elements_)
    if (e.rows() != dim || e.cols() != dim)
      throw DimensionMismatch("KrausChannel: element is not dim x dim");
  Mat sum = Mat::Zero(dim, dim);
  for (const Mat& e : elements_) sum += e.adjoint() * e;
  sum -= Mat::Identity(dim, dim);
  if (sum.cwiseAbs().maxCoeff() > 1e-9)
    throw Error("KrausChannel: sum E_j^dag E_j deviates from I beyond 1e-9");
}

ChoiState::ChoiState(int dim, DensityMatrix state)
    : dim_(dim), state_(std::move(state)) {
  if (state_.dim() != dim * dim)
    throw DimensionMismatch("ChoiState: state dimension is not d^2");
  Mat reduced = partial_trace(state_.matrix(), Subsystem::B, dim, dim);
  reduced -= Mat::Identity(dim, dim) / static_cast<double>(dim);
  if (reduced.cwiseAbs().maxCoeff() > tol::kChoiTracePreserving)
    throw InvalidChoi("ChoiState: tr_Q deviates from I/d beyond 1e-8");
}

OperatorBasis::OperatorBasis(Kind kind, int dim, std::vector<Mat> operators)
    : kind_(kind), dim_(dim), ops_(std::move(operators)) {
  const int d2 = dim * dim;
  if (static_cast<int>(ops_.size()) != d2)
    throw BadBasis("OperatorBasis: expected d^2 operators");
  for (const Mat& op : ops_)
    if (op.rows() != dim || op.cols() != dim)
      throw BadBasis("OperatorBasis: operator is not dim x dim");
  const double norm = (kind_ == Kind::MatrixUnits) ? 1.0 : dim;
  for (int j = 0; j < d2; ++j)
    for (int k = j; k < d2; ++k) {
      const Cplx ip = (ops_[j].adjoint() * ops_[k]).trace();
      const Cplx want = (j == k) ? Cplx(norm, 0) : Cplx(0, 0);
      if (std::abs(ip - want) > 1e-9)
        throw BadBasis("OperatorBasis: orthonormality violated");
    }
  if (kind_ == Kind::PauliProducts) {
    for (const Mat& op : ops_) {
      if (hermiticity_defect(op) > 1e-10)
        throw BadBasis("OperatorBasis: Pauli product not Hermitian");
      Mat uu = op.adjoint() * op - Mat::Identity(dim, dim);
      if (uu.cwiseAbs().maxCoeff() > 1e-10)
        throw BadBasis("OperatorBasis: Pauli product not unitary");
    }
  }
}

OperatorBasis OperatorBasis::matrix_units(int dim) {
  std::vector<Mat> ops;
  ops.reserve(dim * dim);
  // Index (alpha, beta) -> |beta><alpha|, column-major over the operator,
  // matching the ancilla-first Choi layout so chi = d * rho_E entrywise.
  for (int alpha = 0; alpha < dim; ++alpha)
    for (int beta = 0; beta < dim; ++beta) {
      Mat a = Mat::Zero(dim, dim);
      a(beta, alpha) = 1.0;
      ops.push_back(std::move(a));
    }
  return OperatorBasis(Kind::MatrixUnits, dim, std::move(ops));
}

OperatorBasis OperatorBasis::pauli_products(int n_qubits) {
  const int dim = 1 << n_qubits;
  std::vector<Mat> ops;
  ops.reserve(static_cast<std::size_t>(dim) * dim);
  for (int idx = 0; idx < dim * dim; ++idx)
    ops.push_back(channels::pauli_product(n_qubits, idx));
  return OperatorBasis(Kind::PauliProducts, dim, std::move(ops));
}

ChiMatrix::ChiMatrix(OperatorBasis basis, Mat matrix)
    : basis_(std::move(basis)), m_(std::move(matrix)) {
  const int d2 = basis_.dim() * basis_.dim();
  if (m_.rows() != d2 || m_.cols() != d2)
    throw DimensionMismatch("ChiMatrix: matrix is not d^2 x d^2");
  if (hermiticity_defect(m_) > 1e-9)
    throw NonHermitianInput("ChiMatrix: not Hermitian");
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (m_ + m_.adjoint().eval()),
                                        Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-8)
    throw IndefiniteInput("ChiMatrix: not positive semidefinite");
}

// ---------------------------------------------------------------------------
// Conversions

Vec maximally_entangled_vector(int dim) {
  Vec phi = Vec::Zero(static_cast<Eigen::Index>(dim) * dim);
  const double c = 1.0 / std::sqrt(static_cast<double>(dim));
  for (int j = 0; j < dim; ++j) phi(j * dim + j) = c;
  return phi;
}

ChoiState kraus_to_choi(const KrausChannel& k) {
  const int d = k.dim();
  Mat rho = Mat::Zero(d * d, d * d);
  // (I (x) E_k)|Phi> viewed as a vector v with v[a*d + q] = E_k(q, a)/sqrt(d).
  for (const Mat& e : k.elements()) {
    Vec v(static_cast<Eigen::Index>(d) * d);
    for (int a = 0; a < d; ++a)
      for (int q = 0; q < d; ++q) v(a * d + q) = e(q, a);
    v /= std::sqrt(static_cast<double>(d));
    rho += v * v.adjoint();
  }
  rho = 0.5 * (rho + rho.adjoint().eval());
  return ChoiState(d, DensityMatrix::unchecked(std::move(rho)));
}

KrausChannel choi_to_kraus(const ChoiState& c) {
  const int d = c.dim();
  HermitianEig eig = hermitian_eig(c.matrix());
  if (eig.values.minCoeff() < -tol::kPsdError)
    throw InvalidChoi("choi_to_kraus: Choi state not PSD");
  std::vector<Mat> elements;
  for (int i = 0; i < eig.values.size(); ++i) {
    const double lam = eig.values(i) * d;
    if (lam <= tol::kKrausExtract) continue;
    const double c0 = std::sqrt(lam);
    Mat e(d, d);
    for (int a = 0; a < d; ++a)
      for (int q = 0; q < d; ++q) e(q, a) = c0 * eig.vectors(a * d + q, i);
    elements.push_back(std::move(e));
  }
  return KrausChannel(d, std::move(elements));
}

// Change-of-basis core: chi^B = S chi^A S^dag with S_jm = tr(B_j^dag A_m) / n
// where n = tr(B_j^dag B_j) and {A_m} are the matrix units.  sqrt(n) * S is
// unitary, so the inverse is chi^A = n * S^dag chi^B S.
static Mat basis_transfer(const OperatorBasis& basis) {
  const int d = basis.dim();
  const int d2 = d * d;
  const OperatorBasis units = OperatorBasis::matrix_units(d);
  const double n = (basis.kind() == OperatorBasis::Kind::MatrixUnits)
                       ? 1.0
                       : static_cast<double>(d);
  Mat s(d2, d2);
  for (int j = 0; j < d2; ++j)
    for (int m = 0; m < d2; ++m)
      s(j, m) =
          (basis.operators()[j].adjoint() * units.operators()[m]).trace() / n;
  return s;
}

ChiMatrix choi_to_chi(const ChoiState& c, const OperatorBasis& basis) {
  if (basis.dim() != c.dim())
    throw DimensionMismatch("choi_to_chi: basis dimension mismatch");
  const double d = c.dim();
  Mat chi_units = d * c.matrix();
  if (basis.kind() == OperatorBasis::Kind::MatrixUnits)
    return ChiMatrix(basis, std::move(chi_units));
  Mat s = basis_transfer(basis);
  Mat chi = s * chi_units * s.adjoint();
  chi = 0.5 * (chi + chi.adjoint().eval());
  return ChiMatrix(basis, std::move(chi));
}

ChoiState chi_to_choi(const ChiMatrix& chi) {
  const int d = chi.dim();
  Mat chi_units;
  if (chi.basis().kind() == OperatorBasis::Kind::MatrixUnits) {
    chi_units = chi.matrix();
  } else {
    Mat s = basis_transfer(chi.basis());
    const double n = d;
    chi_units = n * n * s.adjoint() * chi.matrix() * s;
  }
  Mat rho = chi_units / static_cast<double>(d);
  rho = 0.5 * (rho + rho.adjoint().eval());
  return ChoiState(d, DensityMatrix(std::move(rho)));
}

// ---------------------------------------------------------------------------
// Channel

Channel Channel::from_kraus(KrausChannel k) {
  Channel ch;
  ch.choi_ = kraus_to_choi(k);
  ch.kraus_ = std::move(k);
  return ch;
}

Channel Channel::from_choi(ChoiState c) {
  Channel ch;
  ch.kraus_ = choi_to_kraus(c);
  ch.choi_ = std::move(c);
  return ch;
}

Channel Channel::from_chi(const ChiMatrix& chi) {
  return from_choi(chi_to_choi(chi));
}

Channel Channel::from_unitary(const UnitaryOperator& u) {
  std::vector<Mat> elements{u.matrix()};
  return from_kraus(KrausChannel(u.dim(), std::move(elements)));
}

Mat apply_kraus_raw(const std::vector<Mat>& elements, const Mat& x) {
  Mat out = Mat::Zero(x.rows(), x.cols());
  for (const Mat& e : elements) out += e * x * e.adjoint();
  return out;
}

DensityMatrix Channel::apply(const DensityMatrix& rho) const {
  if (rho.dim() != dim())
    throw DimensionMismatch("Channel::apply: dimension mismatch");
  Mat out = apply_kraus_raw(kraus_->elements(), rho.matrix());
  return DensityMatrix::unchecked(0.5 * (out + out.adjoint().eval()));
}

Mat Channel::apply_to_operator(const Mat& x) const {
  if (x.rows() != dim() || x.cols() != dim())
    throw DimensionMismatch("Channel::apply_to_operator: dimension mismatch");
  return apply_kraus_raw(kraus_->elements(), x);
}

std::optional<UnitaryOperator> Channel::as_unitary(double purity_tol) const {
  const Mat& rho = choi().matrix();
  const double purity = (rho * rho).trace().real();
  if (purity < 1.0 - purity_tol) return std::nullopt;
  // Pure trace-preserving Choi state => maximally entangled (I (x) V)|Phi>.
  HermitianEig eig = hermitian_eig(rho);
  const int d = dim();
  Mat v(d, d);
  for (int a = 0; a < d; ++a)
    for (int q = 0; q < d; ++q)
      v(q, a) = eig.vectors(a * d + q, 0) * std::sqrt(static_cast<double>(d));
  // Polish away the eigenvector's numerical drift from exact unitarity.
  Eigen::HouseholderQR<Mat> qr(v);
  Mat qm = qr.householderQ();
  Mat rm = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < d; ++i) {
    const Cplx rii = rm(i, i);
    if (std::abs(rii) > 0) qm.col(i) *= rii / std::abs(rii);
  }
  return UnitaryOperator(qm);
}

// ---------------------------------------------------------------------------
// Algebra

Channel compose(const Channel& e2, const Channel& e1) {
  if (e2.dim() != e1.dim())
    throw DimensionMismatch("compose: dimension mismatch");
  std::vector<Mat> products;
  products.reserve(e2.kraus().elements().size() *
                   e1.kraus().elements().size());
  for (const Mat& a : e2.kraus().elements())
    for (const Mat& b : e1.kraus().elements()) products.push_back(a * b);
  // The product set can exceed d^2 elements; canonicalize through the Choi
  // state (re-extraction keeps the cache small).
  const int d = e1.dim();
  Mat rho = Mat::Zero(d * d, d * d);
  for (const Mat& e : products) {
    Vec v(static_cast<Eigen::Index>(d) * d);
    for (int a = 0; a < d; ++a)
      for (int q = 0; q < d; ++q) v(a * d + q) = e(q, a);
    rho += v * v.adjoint();
  }
  rho /= static_cast<double>(d);
  rho = 0.5 * (rho + rho.adjoint().eval());
  return Channel::from_choi(
      ChoiState(d, DensityMatrix::unchecked(std::move(rho))));
}

std::vector<int> tensor_choi_permutation(int dim_a, int dim_b) {
  // Source index on (A1 Q1) (x) (A2 Q2); target on (A1 A2) (x) (Q1 Q2).
  const int n = dim_a * dim_a * dim_b * dim_b;
  std::vector<int> perm(n);
  for (int a1 = 0; a1 < dim_a; ++a1)
    for (int q1 = 0; q1 < dim_a; ++q1)
      for (int a2 = 0; a2 < dim_b; ++a2)
        for (int q2 = 0; q2 < dim_b; ++q2) {
          const int src = ((a1 * dim_a + q1) * dim_b + a2) * dim_b + q2;
          const int dst = ((a1 * dim_b + a2) * dim_a + q1) * dim_b + q2;
          perm[src] = dst;
        }
  return perm;
}

Channel tensor(const Channel& a, const Channel& b) {
  const int da = a.dim(), db = b.dim();
  const std::vector<int> perm = tensor_choi_permutation(da, db);
  const Mat& ra = a.choi().matrix();
  const Mat& rb = b.choi().matrix();
  Mat prod = kron(ra, rb);
  const int n = static_cast<int>(prod.rows());
  Mat out(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out(perm[i], perm[j]) = prod(i, j);
  return Channel::from_choi(
      ChoiState(da * db, DensityMatrix::unchecked(std::move(out))));
}

TransposedChannel transpose_channel(const Channel& f) {
  TransposedChannel out;
  const int d = f.dim();
  for (const Mat& e : f.kraus().elements())
    out.elements.push_back(e.transpose());
  Mat sum = Mat::Zero(d, d);
  for (const Mat& e : out.elements) sum += e.adjoint() * e;
  sum -= Mat::Identity(d, d);
  out.trace_preserving = sum.cwiseAbs().maxCoeff() <= 1e-9;
  if (out.trace_preserving)
    out.channel = Channel::from_kraus(KrausChannel(d, out.elements));
  return out;
}

// ---------------------------------------------------------------------------
// Generators

namespace channels {

Mat pauli(int k) {
  Mat m(2, 2);
  switch (k) {
    case 0: m << 1, 0, 0, 1; break;
    case 1: m << 0, 1, 1, 0; break;
    case 2: m << 0, Cplx(0, -1), Cplx(0, 1), 0; break;
    case 3: m << 1, 0, 0, -1; break;
    default: throw Error("pauli: index out of range");
  }
  return m;
}

Mat pauli_product(int n_qubits, int index) {
  Mat out = Mat::Identity(1, 1);
  // Leftmost qubit is the most significant base-4 digit.
  for (int q = 0; q < n_qubits; ++q) {
    const int shift = 2 * (n_qubits - 1 - q);
    out = kron(out, pauli((index >> shift) & 3));
  }
  return out;
}

Mat hadamard() {
  Mat h(2, 2);
  const double c = 1.0 / std::sqrt(2.0);
  h << c, c, c, -c;
  return h;
}

Mat cnot() {
  Mat m = Mat::Zero(4, 4);
  m(0, 0) = 1;
  m(1, 1) = 1;
  m(2, 3) = 1;
  m(3, 2) = 1;
  return m;
}

Channel identity(int dim) {
  return Channel::from_kraus(KrausChannel(dim, {Mat::Identity(dim, dim)}));
}

Channel unitary(const UnitaryOperator& u) { return Channel::from_unitary(u); }

Channel depolarizing(int dim, double p) {
  if (p < 0.0 || p > 1.0) throw Error("depolarizing: p outside [0, 1]");
  const int d2 = dim * dim;
  Vec phi = maximally_entangled_vector(dim);
  Mat rho = (1.0 - p) * (phi * phi.adjoint()) +
            p * Mat::Identity(d2, d2) / static_cast<double>(d2);
  return Channel::from_choi(ChoiState(dim, DensityMatrix::unchecked(rho)));
}

Channel bit_flip(double p) {
  if (p < 0.0 || p > 1.0) throw Error("bit_flip: p outside [0, 1]");
  std::vector<Mat> elements;
  if (p < 1.0) elements.push_back(std::sqrt(1.0 - p) * pauli(0));
  if (p > 0.0) elements.push_back(std::sqrt(p) * pauli(1));
  return Channel::from_kraus(KrausChannel(2, std::move(elements)));
}

Channel phase_flip(double p) {
  if (p < 0.0 || p > 1.0) throw Error("phase_flip: p outside [0, 1]");
  std::vector<Mat> elements;
  if (p < 1.0) elements.push_back(std::sqrt(1.0 - p) * pauli(0));
  if (p > 0.0) elements.push_back(std::sqrt(p) * pauli(3));
  return Channel::from_kraus(KrausChannel(2, std::move(elements)));
}

Channel amplitude_damping(double gamma) {
  if (gamma < 0.0 || gamma > 1.0)
    throw Error("amplitude_damping: gamma outside [0, 1]");
  Mat e0 = Mat::Zero(2, 2), e1 = Mat::Zero(2, 2);
  e0(0, 0) = 1.0;
  e0(1, 1) = std::sqrt(1.0 - gamma);
  e1(0, 1) = std::sqrt(gamma);
  return Channel::from_kraus(KrausChannel(2, {e0, e1}));
}

KrausChannel random_kraus(int dim, int kraus_count, Rng& rng) {
  if (kraus_count < 1 || kraus_count > dim * dim)
    throw Error("random_kraus: kraus_count outside [1, d^2]");
  Mat g = detail::random_gaussian(dim * kraus_count, dim, rng);
  Eigen::HouseholderQR<Mat> qr(g);
  Mat q = qr.householderQ() * Mat::Identity(dim * kraus_count, dim);
  Mat r = qr.matrixQR().topRows(dim).triangularView<Eigen::Upper>();
  for (int i = 0; i < dim; ++i) {
    const Cplx rii = r(i, i);
    if (std::abs(rii) > 0) q.col(i) *= rii / std::abs(rii);
  }
  std::vector<Mat> elements;
  elements.reserve(kraus_count);
  for (int k = 0; k < kraus_count; ++k)
    elements.push_back(q.block(k * dim, 0, dim, dim));
  return KrausChannel(dim, std::move(elements));
}

Channel random_channel(int dim, int kraus_count, Rng& rng) {
  return Channel::from_kraus(random_kraus(dim, kraus_count, rng));
}

UnitaryOperator random_unitary(int dim, Rng& rng) {
  KrausChannel k = random_kraus(dim, 1, rng);
  return UnitaryOperator(k.elements()[0]);
}

}  // namespace channels

}  // namespace qpdist
