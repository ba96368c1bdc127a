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

#include "qpdist/verify.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <nlohmann/json.hpp>
#include <sstream>

#include "qpdist/channel_io.hpp"
#include "qpdist/computation_bounds.hpp"
#include "qpdist/estimation.hpp"

namespace qpdist::verify {

using nlohmann::json;

namespace {

// --- instance helpers -------------------------------------------------------

struct Checker {
  InstanceOutcome outcome;

  // requires lhs <= rhs + slack
  void le(const std::string& what, double lhs, double rhs, double slack) {
    const double viol = lhs - rhs - slack;
    if (viol > 0) fail(what, lhs, rhs, viol);
  }
  // requires |a - b| <= tol
  void close(const std::string& what, double a, double b, double tol) {
    const double viol = std::abs(a - b) - tol;
    if (viol > 0) fail(what, a, b, viol);
  }
  void is_true(const std::string& what, bool cond) {
    if (!cond) fail(what, 0, 0, 1.0);
  }
  void fail(const std::string& what, double a, double b, double viol) {
    outcome.pass = false;
    if (viol > outcome.violation) {
      outcome.violation = viol;
      std::ostringstream os;
      os.precision(12);
      os << what << " (values " << a << ", " << b << ", violation " << viol
         << ")";
      outcome.message = os.str();
    }
  }
};

DensityMatrix random_density(int dim, Rng& rng) {
  Mat g = detail::random_gaussian(dim, dim, rng);
  Mat rho = g * g.adjoint();
  rho /= rho.trace().real();
  return DensityMatrix::unchecked(0.5 * (rho + rho.adjoint().eval()));
}

Mat random_hermitian(int dim, Rng& rng) {
  Mat g = detail::random_gaussian(dim, dim, rng);
  return 0.5 * (g + g.adjoint().eval());
}

Channel random_channel_for(int dim, Rng& rng, int max_kraus = 4) {
  const int k = 1 + static_cast<int>(rng.next_u64() %
                                     std::min(max_kraus, dim * dim));
  return channels::random_channel(dim, k, rng);
}

std::vector<int> random_permutation(int dim, Rng& rng) {
  std::vector<int> p(dim);
  for (int i = 0; i < dim; ++i) p[i] = i;
  for (int i = dim - 1; i > 0; --i) {
    const int j = static_cast<int>(rng.next_u64() % (i + 1));
    std::swap(p[i], p[j]);
  }
  return p;
}

void attach_channel(InstanceOutcome& out, const std::string& label,
                    const Channel& ch) {
  out.artifacts.emplace_back(label, channel_to_json(ch, "kraus").dump());
}

OptimizerConfig suite_optimizer(std::uint64_t seed, double gap_tol,
                                int restarts = 2, int max_iter = 300) {
  OptimizerConfig c;
  c.seed = seed;
  c.gap_tolerance = gap_tol;
  c.restarts = restarts;
  c.max_iterations = max_iter;
  return c;
}

// --- families ---------------------------------------------------------------

InstanceOutcome lin_core_instance(int dim, std::uint64_t seed) {
  Rng rng(seed);
  Checker ck;

  Mat h = random_hermitian(dim, rng);
  HermitianEig eig = hermitian_eig(h);
  Mat rebuilt = eig.vectors * eig.values.asDiagonal() * eig.vectors.adjoint();
  ck.le("eig round-trip", (rebuilt - h).cwiseAbs().maxCoeff(), 0.0, 1e-9);
  for (int i = 0; i + 1 < dim; ++i)
    ck.le("eig descending", eig.values(i + 1), eig.values(i), 1e-12);

  DensityMatrix rho = random_density(dim, rng);
  Mat root = psd_sqrt(rho.matrix());
  ck.le("psd_sqrt square", (root * root - rho.matrix()).cwiseAbs().maxCoeff(),
        0.0, 1e-9);

  Mat a = detail::random_gaussian(dim, dim, rng);
  Mat b = detail::random_gaussian(dim, dim, rng);
  ck.le("trace-norm triangle", trace_norm(a + b),
        trace_norm(a) + trace_norm(b), 1e-9);

  // Partial trace: linearity and trace preservation on a bipartite sample.
  Mat big = detail::random_gaussian(dim * 2, dim * 2, rng);
  Mat big2 = detail::random_gaussian(dim * 2, dim * 2, rng);
  Mat lin_lhs = partial_trace(big + 2.0 * big2, Subsystem::A, 2, dim);
  Mat lin_rhs = partial_trace(big, Subsystem::A, 2, dim) +
                2.0 * partial_trace(big2, Subsystem::A, 2, dim);
  ck.le("partial trace linearity", (lin_lhs - lin_rhs).cwiseAbs().maxCoeff(),
        0.0, 1e-12);
  ck.close("partial trace preserves trace",
           partial_trace(big, Subsystem::B, 2, dim).trace().real(),
           big.trace().real(), 1e-12);

  PureState psi = purify(rho, dim);
  Mat back = partial_trace(
      psi.amplitudes() * psi.amplitudes().adjoint(), Subsystem::A, dim, dim);
  ck.le("purify round-trip", (back - rho.matrix()).cwiseAbs().maxCoeff(), 0.0,
        1e-9);
  return ck.outcome;
}

InstanceOutcome channels_instance(int dim, std::uint64_t seed) {
  Rng rng(seed);
  Checker ck;
  InstanceOutcome* out = &ck.outcome;

  Channel e = random_channel_for(dim, rng);
  DensityMatrix probe = random_density(dim, rng);

  // Representation coherence: Kraus / Choi / chi agree on apply.
  Mat via_kraus = e.apply(probe).matrix();
  Channel via_choi = Channel::from_choi(e.choi());
  ChiMatrix chi = choi_to_chi(e.choi(), OperatorBasis::matrix_units(dim));
  Channel via_chi = Channel::from_chi(chi);
  ck.le("choi form agrees",
        (via_choi.apply(probe).matrix() - via_kraus).cwiseAbs().maxCoeff(),
        0.0, 1e-9);
  ck.le("chi form agrees",
        (via_chi.apply(probe).matrix() - via_kraus).cwiseAbs().maxCoeff(),
        0.0, 1e-9);

  // Trace preservation of the Choi state.
  Mat reduced = partial_trace(e.choi().matrix(), Subsystem::B, dim, dim);
  ck.le("choi trace preservation",
        (reduced - Mat::Identity(dim, dim) / dim).cwiseAbs().maxCoeff(), 0.0,
        1e-9);

  // Composition identity rho_{E o F} = (F^T (x) E)(Phi).
  Channel f = random_channel_for(dim, rng);
  Channel ef = compose(e, f);
  TransposedChannel ft = transpose_channel(f);
  std::vector<Mat> pair_elements;
  for (const Mat& fj : ft.elements)
    for (const Mat& ek : e.kraus().elements())
      pair_elements.push_back(kron(fj, ek));
  Vec phi = maximally_entangled_vector(dim);
  Mat rhs = apply_kraus_raw(pair_elements, phi * phi.adjoint());
  ck.le("composition transpose identity",
        (ef.choi().matrix() - rhs).cwiseAbs().maxCoeff(), 0.0, 1e-9);

  // Tensor identity against the Kraus-product route.
  Channel g = random_channel_for(2, rng);
  Channel tens = tensor(e, g);
  std::vector<Mat> kron_elements;
  for (const Mat& a : e.kraus().elements())
    for (const Mat& b : g.kraus().elements())
      kron_elements.push_back(kron(a, b));
  Channel tens_kraus = Channel::from_kraus(
      KrausChannel(dim * 2, std::move(kron_elements)));
  ck.le("tensor permutation identity",
        (tens.choi().matrix() - tens_kraus.choi().matrix())
            .cwiseAbs()
            .maxCoeff(),
        0.0, 1e-9);

  // Kraus non-uniqueness: isometric mixing leaves the Choi state fixed.
  const auto& elements = e.kraus().elements();
  const int k = static_cast<int>(elements.size());
  UnitaryOperator w = channels::random_unitary(k, rng);
  std::vector<Mat> mixed(k, Mat::Zero(dim, dim));
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) mixed[i] += w.matrix()(i, j) * elements[j];
  Channel e_mixed = Channel::from_kraus(KrausChannel(dim, std::move(mixed)));
  ck.le("kraus mixing uniqueness",
        (e_mixed.choi().matrix() - e.choi().matrix()).cwiseAbs().maxCoeff(),
        0.0, 1e-9);

  if (!out->pass) {
    attach_channel(*out, "e", e);
    attach_channel(*out, "f", f);
  }
  return *out;
}

InstanceOutcome state_metrics_instance(int dim, std::uint64_t seed) {
  Rng rng(seed);
  Checker ck;
  DensityMatrix rho = random_density(dim, rng);
  DensityMatrix sigma = random_density(dim, rng);
  DensityMatrix tau = random_density(dim, rng);

  struct M {
    const char* name;
    std::function<double(const DensityMatrix&, const DensityMatrix&)> fn;
  };
  const std::vector<M> metrics = {
      {"D", [](auto& a, auto& b) { return trace_distance(a, b); }},
      {"A", [](auto& a, auto& b) { return fidelity_angle(a, b); }},
      {"B", [](auto& a, auto& b) { return bures_metric(a, b); }},
      {"C", [](auto& a, auto& b) { return c_metric(a, b); }}};
  for (const M& m : metrics) {
    // Fidelity-derived metrics turn an eps fidelity error into sqrt(eps),
    // so their self-distance check is calibrated accordingly.
    const bool fid_based = m.name[0] != 'D';
    const double self_tol = fid_based ? 1e-6 : 1e-9;
    const double ab = m.fn(rho, sigma);
    ck.le(std::string(m.name) + " nonnegative", 0.0, ab, 1e-12);
    ck.le(std::string(m.name) + " self-distance", m.fn(rho, rho), 0.0,
          self_tol);
    ck.close(std::string(m.name) + " symmetric", ab, m.fn(sigma, rho), 1e-9);
    ck.le(std::string(m.name) + " triangle", m.fn(rho, tau),
          ab + m.fn(sigma, tau), 1e-9);
    if (ab < 1e-9) {
      ck.le(std::string(m.name) + " indiscernibles",
            (rho.matrix() - sigma.matrix()).cwiseAbs().maxCoeff(), 0.0, 1e-6);
    }
  }

  Channel e = random_channel_for(dim, rng);
  ck.le("contractivity", trace_distance(e.apply(rho), e.apply(sigma)),
        trace_distance(rho, sigma), 1e-9);
  ck.le("fidelity monotonicity", fidelity(rho, sigma),
        fidelity(e.apply(rho), e.apply(sigma)), 1e-9);

  // Double convexity of D and double concavity of sqrt(F).
  const double p = rng.uniform();
  DensityMatrix rho2 = random_density(dim, rng);
  DensityMatrix sigma2 = random_density(dim, rng);
  DensityMatrix mix_rho = DensityMatrix::unchecked(
      p * rho.matrix() + (1 - p) * rho2.matrix());
  DensityMatrix mix_sigma = DensityMatrix::unchecked(
      p * sigma.matrix() + (1 - p) * sigma2.matrix());
  ck.le("double convexity of D", trace_distance(mix_rho, mix_sigma),
        p * trace_distance(rho, sigma) + (1 - p) * trace_distance(rho2, sigma2),
        1e-9);
  ck.le("double concavity of sqrt F",
        p * std::sqrt(fidelity(rho, sigma)) +
            (1 - p) * std::sqrt(fidelity(rho2, sigma2)),
        std::sqrt(fidelity(mix_rho, mix_sigma)), 1e-9);

  // Stability under tensoring with a fixed state.
  DensityMatrix anc = random_density(2, rng);
  DensityMatrix rho_t =
      DensityMatrix::unchecked(kron(rho.matrix(), anc.matrix()));
  DensityMatrix sigma_t =
      DensityMatrix::unchecked(kron(sigma.matrix(), anc.matrix()));
  ck.close("D stability", trace_distance(rho_t, sigma_t),
           trace_distance(rho, sigma), 1e-9);
  ck.close("F stability", fidelity(rho_t, sigma_t), fidelity(rho, sigma),
           1e-9);
  return ck.outcome;
}

InstanceOutcome fvg_state_instance(int dim, std::uint64_t seed) {
  Rng rng(seed);
  Checker ck;
  DensityMatrix rho = random_density(dim, rng);
  DensityMatrix sigma = random_density(dim, rng);
  FvgCheck fvg = fuchs_van_de_graaf(rho, sigma);
  ck.is_true("sandwich holds (mixed)", fvg.holds);

  DensityMatrix psi = DensityMatrix::pure(haar_state(dim, rng));
  DensityMatrix phi = DensityMatrix::pure(haar_state(dim, rng));
  FvgCheck pure = fuchs_van_de_graaf(psi, phi);
  ck.is_true("sandwich holds (pure)", pure.holds);
  ck.close("pure upper saturation", pure.distance, pure.upper, 1e-9);
  return ck.outcome;
}

InstanceOutcome fvg_process_instance(int dim, std::uint64_t seed) {
  Rng rng(seed);
  Checker ck;
  InstanceOutcome* out = &ck.outcome;
  Channel e = random_channel_for(dim, rng);
  Channel f = random_channel_for(dim, rng);
  const double dp = j_distance(e, f);
  const double fp = j_fidelity(e, f);
  ck.le("process FvG lower", 1.0 - std::sqrt(fp), dp, 1e-9);
  ck.le("process FvG upper", dp, std::sqrt(1.0 - fp), 1e-9);

  // Unitary pairs have pure Choi states: the upper bound saturates.
  Channel u = Channel::from_unitary(channels::random_unitary(dim, rng));
  Channel v = Channel::from_unitary(channels::random_unitary(dim, rng));
  const double dpu = j_distance(u, v);
  const double fpu = j_fidelity(u, v);
  ck.close("pure-Choi saturation", dpu, std::sqrt(std::max(0.0, 1.0 - fpu)),
           1e-9);
  if (!out->pass) {
    attach_channel(*out, "e", e);
    attach_channel(*out, "f", f);
  }
  return *out;
}

InstanceOutcome process_axioms_instance(int dim, std::uint64_t seed) {
  Rng rng(seed);
  Checker ck;
  Channel e = random_channel_for(dim, rng);
  Channel f = random_channel_for(dim, rng);
  Channel g = random_channel_for(dim, rng);
  struct M {
    const char* name;
    std::function<double(const Channel&, const Channel&)> fn;
  };
  const std::vector<M> metrics = {
      {"D_pro", [](auto& a, auto& b) { return j_distance(a, b); }},
      {"A_pro",
       [](auto& a, auto& b) { return angle_from_fidelity(j_fidelity(a, b)); }},
      {"B_pro",
       [](auto& a, auto& b) { return bures_from_fidelity(j_fidelity(a, b)); }},
      {"C_pro",
       [](auto& a, auto& b) { return c_from_fidelity(j_fidelity(a, b)); }}};
  for (const M& m : metrics) {
    const bool fid_based = m.name[0] != 'D';
    const double self_tol = fid_based ? 1e-6 : 1e-9;
    const double ef = m.fn(e, f);
    ck.le(std::string(m.name) + " nonnegative", 0.0, ef, 1e-12);
    ck.le(std::string(m.name) + " self-distance", m.fn(e, e), 0.0, self_tol);
    ck.close(std::string(m.name) + " symmetric", ef, m.fn(f, e), 1e-9);
    ck.le(std::string(m.name) + " triangle", m.fn(e, g), ef + m.fn(f, g),
          1e-9);
  }
  return ck.outcome;
}

InstanceOutcome j_stability_instance(int dim, std::uint64_t seed) {
  Rng rng(seed);
  Checker ck;
  InstanceOutcome* out = &ck.outcome;
  Channel e = random_channel_for(dim, rng);
  Channel f = random_channel_for(dim, rng);
  Channel idc = channels::identity(2);
  Channel ie = tensor(idc, e);
  Channel if_ = tensor(idc, f);
  ck.close("D_pro stability", j_distance(ie, if_), j_distance(e, f), 1e-8);
  ck.close("F_pro stability", j_fidelity(ie, if_), j_fidelity(e, f), 1e-8);
  if (!out->pass) {
    attach_channel(*out, "e", e);
    attach_channel(*out, "f", f);
  }
  return *out;
}

InstanceOutcome chaining_instance(int dim, std::uint64_t seed) {
  Rng rng(seed);
  Checker ck;
  InstanceOutcome* out = &ck.outcome;
  Channel e1 = random_channel_for(dim, rng);
  Channel e2 = random_channel_for(dim, rng);
  Channel f1 = Channel::from_unitary(channels::random_unitary(dim, rng));
  Channel f2 = random_channel_for(dim, rng);
  ck.le("D_pro chaining (unitary first stage)",
        j_distance(compose(e2, e1), compose(f2, f1)),
        j_distance(e1, f1) + j_distance(e2, f2), 1e-8);
  if (!out->pass) {
    attach_channel(*out, "e1", e1);
    attach_channel(*out, "e2", e2);
    attach_channel(*out, "f2", f2);
  }
  return *out;
}

InstanceOutcome postprocessing_instance(int dim, std::uint64_t seed) {
  Rng rng(seed);
  Checker ck;
  Channel e = random_channel_for(dim, rng);
  Channel f = random_channel_for(dim, rng);
  Channel r = random_channel_for(dim, rng);
  ck.le("post-processing contractivity", j_distance(compose(r, e), compose(r, f)),
        j_distance(e, f), 1e-8);
  return ck.outcome;
}

InstanceOutcome unitary_invariance_j_instance(int dim, std::uint64_t seed) {
  Rng rng(seed);
  Checker ck;
  Channel e = random_channel_for(dim, rng);
  Channel f = random_channel_for(dim, rng);
  Channel u = Channel::from_unitary(channels::random_unitary(dim, rng));
  Channel v = Channel::from_unitary(channels::random_unitary(dim, rng));
  Channel e2 = compose(u, compose(e, v));
  Channel f2 = compose(u, compose(f, v));
  ck.close("D_pro unitary invariance", j_distance(e2, f2), j_distance(e, f),
           1e-8);
  ck.close("F_pro unitary invariance", j_fidelity(e2, f2), j_fidelity(e, f),
           1e-8);
  return ck.outcome;
}

InstanceOutcome unitary_invariance_stab_instance(int dim, std::uint64_t seed) {
  Rng rng(seed);
  Checker ck;
  InstanceOutcome* out = &ck.outcome;
  Channel e = random_channel_for(dim, rng, 3);
  Channel f = Channel::from_unitary(channels::random_unitary(dim, rng));
  Channel u = Channel::from_unitary(channels::random_unitary(dim, rng));
  Channel v = Channel::from_unitary(channels::random_unitary(dim, rng));
  Channel e2 = compose(u, compose(e, v));
  Channel f2 = compose(u, compose(f, v));
  for (Metric m : {Metric::TraceDistance, Metric::Fidelity}) {
    OptimizerConfig c1 = suite_optimizer(Rng(seed).split(10).seed(), 1e-9);
    OptimizerConfig c2 = suite_optimizer(Rng(seed).split(11).seed(), 1e-9);
    const double a = stabilized(e, f, m, c1).value;
    const double b = stabilized(e2, f2, m, c2).value;
    ck.close(m == Metric::TraceDistance ? "D_stab unitary invariance"
                                        : "F_stab unitary invariance",
             a, b, 1e-8);
  }
  if (!out->pass) {
    attach_channel(*out, "e", e);
    attach_channel(*out, "f", f);
    attach_channel(*out, "u", u);
    attach_channel(*out, "v", v);
  }
  return *out;
}

InstanceOutcome ancilla_independence_instance(int dim, std::uint64_t seed) {
  Rng rng(seed);
  Checker ck;
  InstanceOutcome* out = &ck.outcome;
  Channel e = random_channel_for(dim, rng, 3);
  Channel f = Channel::from_unitary(channels::random_unitary(dim, rng));
  for (Metric m : {Metric::TraceDistance, Metric::Fidelity}) {
    OptimizerConfig c1 = suite_optimizer(Rng(seed).split(20).seed(), 1e-8);
    OptimizerConfig c2 = suite_optimizer(Rng(seed).split(21).seed(), 1e-8);
    const double a = stabilized_with_ancilla(e, f, m, dim, c1).value;
    const double b = stabilized_with_ancilla(e, f, m, 2 * dim, c2).value;
    ck.close(m == Metric::TraceDistance ? "D_stab ancilla independence"
                                        : "F_stab ancilla independence",
             a, b, 1e-5);
  }
  if (!out->pass) {
    attach_channel(*out, "e", e);
    attach_channel(*out, "f", f);
  }
  return *out;
}

InstanceOutcome convexity_instance(int dim, std::uint64_t seed) {
  Rng rng(seed);
  Checker ck;
  Channel e = random_channel_for(dim, rng);
  Channel f = random_channel_for(dim, rng);
  DensityMatrix rho0 = random_density(dim, rng);
  DensityMatrix rho1 = random_density(dim, rng);
  const double g0 = stabilized_objective(e, f, Metric::Fidelity, rho0, dim);
  const double g1 = stabilized_objective(e, f, Metric::Fidelity, rho1, dim);
  for (double t : {0.25, 0.5, 0.75}) {
    DensityMatrix mid = DensityMatrix::unchecked(
        (1 - t) * rho0.matrix() + t * rho1.matrix());
    const double gm = stabilized_objective(e, f, Metric::Fidelity, mid, dim);
    ck.le("F_stab objective convex along segment", gm,
          (1 - t) * g0 + t * g1, 1e-8);
  }
  // The trace-distance objective is concave.
  const double d0 =
      stabilized_objective(e, f, Metric::TraceDistance, rho0, dim);
  const double d1 =
      stabilized_objective(e, f, Metric::TraceDistance, rho1, dim);
  for (double t : {0.25, 0.5, 0.75}) {
    DensityMatrix mid = DensityMatrix::unchecked(
        (1 - t) * rho0.matrix() + t * rho1.matrix());
    const double dm =
        stabilized_objective(e, f, Metric::TraceDistance, mid, dim);
    ck.le("D_stab objective concave along segment", (1 - t) * d0 + t * d1, dm,
          1e-8);
  }
  return ck.outcome;
}

InstanceOutcome bruteforce_instance(int dim, std::uint64_t seed) {
  Rng rng(seed);
  Checker ck;
  InstanceOutcome* out = &ck.outcome;
  Channel e = random_channel_for(dim, rng);
  const bool unitary_ref = (rng.next_u64() & 1) != 0;
  Channel f = unitary_ref
                  ? Channel::from_unitary(channels::random_unitary(dim, rng))
                  : random_channel_for(dim, rng);
  OptimizerConfig cfg = suite_optimizer(Rng(seed).split(30).seed(), 1e-8, 3);
  const double opt = stabilized(e, f, Metric::Fidelity, cfg).value;

  // Independent oracle: sample the stabilized objective at Haar-random
  // input states on the system.
  double brute = 2.0;
  Rng srng = rng.split(31);
  for (int i = 0; i < 100000; ++i) {
    PureState psi = haar_state(dim, srng);
    const double val = stabilized_objective(
        e, f, Metric::Fidelity, DensityMatrix::pure(psi), dim);
    brute = std::min(brute, val);
  }
  // Mixed inputs too (the optimum may be interior).
  for (int i = 0; i < 2000; ++i) {
    DensityMatrix rho = random_density(dim, srng);
    brute = std::min(brute,
                     stabilized_objective(e, f, Metric::Fidelity, rho, dim));
  }
  ck.le("optimizer dominates brute force", opt, brute, 1e-6);
  if (!out->pass) {
    attach_channel(*out, "e", e);
    attach_channel(*out, "f", f);
  }
  return *out;
}

InstanceOutcome estimation_oracle_instance(int dim, std::uint64_t seed) {
  Rng rng(seed);
  Checker ck;
  InstanceOutcome* out = &ck.outcome;
  Channel e = random_channel_for(dim, rng);
  UnitaryOperator u = channels::random_unitary(dim, rng);
  const double oracle = j_fidelity(e, Channel::from_unitary(u));

  ck.close("unitary-basis formula matches Choi overlap",
           f_pro_unitary_basis(e, u), oracle, 1e-9);

  int n = 0;
  while ((1 << n) < dim) ++n;
  EstimationPlan minimal = build_plan_pauli_minimal(u, n);
  ck.close("pauli-minimal plan matches",
           run_plan(minimal, e, ShotModel{}).estimate, oracle, 1e-8);
  ck.is_true("pauli-minimal uses d^2 settings",
             minimal.settings_count() == dim * dim);

  OperatorBasis units = OperatorBasis::matrix_units(dim);
  EstimationPlan general =
      build_plan_general(u, units.operators(), units.operators());
  ck.close("general plan matches", run_plan(general, e, ShotModel{}).estimate,
           oracle, 1e-8);
  ck.is_true("general plan within d^4 averages",
             general.nonzero_weight_count() <= dim * dim * dim * dim);

  // Reordering the input list must not change the estimate.
  std::vector<Mat> shuffled = units.operators();
  std::vector<int> perm = random_permutation(dim * dim, rng);
  for (int i = 0; i < dim * dim; ++i) shuffled[i] = units.operators()[perm[i]];
  EstimationPlan reordered =
      build_plan_general(u, shuffled, units.operators());
  ck.close("plan invariant under input reordering",
           run_plan(reordered, e, ShotModel{}).estimate, oracle, 1e-8);

  if (!out->pass) attach_channel(*out, "e", e);
  return *out;
}

InstanceOutcome bounds_instance(int dim, std::uint64_t seed) {
  Rng rng(seed);
  Checker ck;
  InstanceOutcome* out = &ck.outcome;
  FunctionSpec spec(dim, random_permutation(dim, rng));
  Channel ideal_unitary = Channel::from_unitary(spec.permutation_unitary());
  const int variant = static_cast<int>(rng.next_u64() % 3);
  Channel ideal = ideal_unitary;
  if (variant == 2) {
    // Ideal computation with intrinsic error: known noise folded in.
    ideal = compose(ideal_unitary, channels::depolarizing(dim, 0.05));
  }
  Channel real = (variant == 1)
                     ? random_channel_for(dim, rng)
                     : compose(random_channel_for(dim, rng, 2), ideal);

  const double d_pro = j_distance(real, ideal);
  const double f_pro = j_fidelity(real, ideal);
  OptimizerConfig c1 = suite_optimizer(Rng(seed).split(40).seed(), 1e-7);
  OptimizerConfig c2 = suite_optimizer(Rng(seed).split(41).seed(), 1e-7);
  const double d_stab =
      stabilized(real, ideal, Metric::TraceDistance, c1).value;
  const double f_stab = stabilized(real, ideal, Metric::Fidelity, c2).value;
  const double c_stab = std::sqrt(std::max(0.0, 1.0 - f_stab));

  BoundReport worst = verify_function_worst(real, ideal, spec, d_stab, c_stab);
  BoundReport avg = verify_function_average(real, ideal, spec, d_pro, f_pro);
  BoundReport sampling =
      verify_sampling(real, ideal, d_stab, f_stab, d_pro, f_pro);
  for (const BoundReport* rep : {&worst, &avg, &sampling})
    for (const BoundRow& row : rep->rows)
      if (row.applicable) ck.le(row.name, row.lhs, row.rhs, 1e-7);

  if (!out->pass) {
    attach_channel(*out, "ideal", ideal);
    attach_channel(*out, "real", real);
  }
  return *out;
}

InstanceOutcome fave_mc_instance(int dim, std::uint64_t seed) {
  Rng rng(seed);
  Checker ck;
  Channel e = random_channel_for(dim, rng);
  UnitaryOperator u = channels::random_unitary(dim, rng);
  const double formula = f_ave_formula(e, u);
  McEstimate mc = ave_measure_mc(e, Channel::from_unitary(u),
                                 Metric::Fidelity, 10000,
                                 Rng(seed).split(50).seed());
  ck.le("Monte Carlo F_ave matches the Horodecki relation",
        std::abs(mc.estimate - formula), 3.0 * mc.std_error, 1e-12);
  return ck.outcome;
}

InstanceOutcome stab_ave_limit_instance(int dim, std::uint64_t seed) {
  Rng rng(seed);
  Checker ck;
  Channel e = random_channel_for(dim, rng, 3);
  Channel f = random_channel_for(dim, rng, 3);
  const double d_pro = j_distance(e, f);
  double prev_err = -1.0, prev_se = 0.0;
  for (int mult : {1, 2, 4}) {
    const int anc = mult * dim;
    Channel ie = tensor(channels::identity(anc), e);
    Channel if_ = tensor(channels::identity(anc), f);
    McEstimate mc = ave_measure_mc(ie, if_, Metric::TraceDistance, 1200,
                                   Rng(seed).split(60 + mult).seed());
    const double err = std::abs(mc.estimate - d_pro);
    if (prev_err >= 0) {
      ck.le("stabilized-average estimate approaches D_pro", err,
            prev_err + 3.0 * (mc.std_error + prev_se), 0.0);
    }
    prev_err = err;
    prev_se = mc.std_error;
  }
  return ck.outcome;
}

// --- family table ------------------------------------------------------------

struct Family {
  std::string name;
  std::function<InstanceOutcome(int, std::uint64_t)> fn;
  // Restricts dims; empty = use options.dims as-is.
  std::vector<int> forced_dims;
  bool power_of_two_only = false;
};

const std::vector<Family>& families() {
  static const std::vector<Family> fams = {
      {"lin-core", lin_core_instance, {}, false},
      {"channels", channels_instance, {}, false},
      {"state-metrics", state_metrics_instance, {}, false},
      {"fvg-state", fvg_state_instance, {}, false},
      {"fvg-process", fvg_process_instance, {}, false},
      {"process-metric-axioms", process_axioms_instance, {}, false},
      {"j-stability", j_stability_instance, {}, false},
      {"chaining", chaining_instance, {}, false},
      {"postprocessing-contractivity", postprocessing_instance, {}, false},
      {"unitary-invariance-j", unitary_invariance_j_instance, {}, false},
      {"unitary-invariance-stab", unitary_invariance_stab_instance, {}, false},
      {"ancilla-independence", ancilla_independence_instance, {}, false},
      {"convexity-certificate", convexity_instance, {}, false},
      {"optimizer-vs-bruteforce", bruteforce_instance, {2}, false},
      {"estimation-oracle", estimation_oracle_instance, {}, true},
      {"computation-bounds", bounds_instance, {}, false},
      {"fave-mc-horodecki", fave_mc_instance, {}, false},
      {"stab-ave-limit", stab_ave_limit_instance, {2}, false}};
  return fams;
}

const Family& find_family(const std::string& name) {
  for (const Family& f : families())
    if (f.name == name) return f;
  throw Error("unknown verify family '" + name + "'");
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace

std::uint64_t instance_seed(std::uint64_t root_seed, const std::string& family,
                            int dim, int index) {
  return Rng(root_seed ^ fnv1a(family))
      .split(static_cast<std::uint64_t>(dim))
      .split(static_cast<std::uint64_t>(index))
      .seed();
}

const std::vector<std::string>& family_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const Family& f : families()) out.push_back(f.name);
    return out;
  }();
  return names;
}

InstanceOutcome run_instance(const std::string& family, int dim,
                             std::uint64_t seed) {
  return find_family(family).fn(dim, seed);
}

std::string write_dump(const std::string& dir, const std::string& family,
                       int dim, std::uint64_t seed,
                       const InstanceOutcome& outcome) {
  std::filesystem::create_directories(dir);
  json j;
  j["family"] = family;
  j["dim"] = dim;
  j["instance_seed"] = seed;
  j["pass"] = outcome.pass;
  j["violation"] = outcome.violation;
  j["message"] = outcome.message;
  json arts = json::object();
  for (const auto& [label, payload] : outcome.artifacts)
    arts[label] = json::parse(payload);
  j["channels"] = arts;
  const std::string path = dir + "/counterexample-" + family + "-d" +
                           std::to_string(dim) + "-" + std::to_string(seed) +
                           ".json";
  std::ofstream out(path);
  out << j.dump(2) << "\n";
  return path;
}

FamilyResult run_family(const std::string& name, const SuiteOptions& options) {
  const Family& fam = find_family(name);
  FamilyResult result;
  result.family = name;
  std::vector<int> dims = fam.forced_dims.empty() ? options.dims
                                                  : fam.forced_dims;
  if (fam.power_of_two_only) {
    std::vector<int> filtered;
    for (int d : dims)
      if (d >= 2 && (d & (d - 1)) == 0) filtered.push_back(d);
    dims = filtered;
  }
  const auto start = std::chrono::steady_clock::now();
  for (int dim : dims) {
    for (int i = 0; i < options.sweep; ++i) {
      const std::uint64_t seed = instance_seed(options.seed, name, dim, i);
      InstanceOutcome outcome = fam.fn(dim, seed);
      ++result.instances;
      if (!outcome.pass) {
        ++result.failures;
        result.worst_violation =
            std::max(result.worst_violation, outcome.violation);
        std::ostringstream os;
        os << name << " d=" << dim << " i=" << i << " seed=" << seed << ": "
           << outcome.message;
        result.messages.push_back(os.str());
        if (!options.dump_dir.empty())
          result.dump_paths.push_back(
              write_dump(options.dump_dir, name, dim, seed, outcome));
      }
    }
  }
  result.seconds = std::chrono::duration<double>(
                       std::chrono::steady_clock::now() - start)
                       .count();
  return result;
}

std::vector<FamilyResult> run_all(const SuiteOptions& options) {
  std::vector<FamilyResult> out;
  for (const Family& f : families()) out.push_back(run_family(f.name, options));
  return out;
}

ReplayResult replay_dump(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open dump file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& ex) {
    throw ParseError(std::string("invalid dump JSON: ") + ex.what());
  }
  for (const char* field : {"family", "dim", "instance_seed"})
    if (!j.contains(field))
      throw ParseError(std::string("dump missing field '") + field + "'");
  ReplayResult rep;
  rep.family = j["family"].get<std::string>();
  rep.dim = j["dim"].get<int>();
  rep.outcome = run_instance(rep.family, rep.dim,
                             j["instance_seed"].get<std::uint64_t>());
  rep.matches_dump = (rep.outcome.pass == j["pass"].get<bool>()) &&
                     (rep.outcome.message == j["message"].get<std::string>());
  return rep;
}

}  // namespace qpdist::verify
