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

#include "qpdist/process_metrics.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <functional>

namespace qpdist {

double j_distance(const Channel& e, const Channel& f) {
  if (e.dim() != f.dim())
    throw DimensionMismatch("j_distance: dimension mismatch");
  return detail::trace_distance_raw(e.choi().matrix(), f.choi().matrix());
}

double j_fidelity(const Channel& e, const Channel& f) {
  if (e.dim() != f.dim())
    throw DimensionMismatch("j_fidelity: dimension mismatch");
  return detail::fidelity_raw(f.choi().matrix(), e.choi().matrix());
}

double f_ave_formula(const Channel& e, const UnitaryOperator& u) {
  if (e.dim() != u.dim())
    throw DimensionMismatch("f_ave_formula: dimension mismatch");
  const double d = e.dim();
  const double fp = j_fidelity(e, Channel::from_unitary(u));
  return (fp * d + 1.0) / (d + 1.0);
}

double process_purity(const Channel& e) {
  const Mat& rho = e.choi().matrix();
  return (rho * rho).trace().real();
}

// ---------------------------------------------------------------------------
// Monte Carlo averages

namespace {

Mat apply_kraus_to_pure(const std::vector<Mat>& elements, const Vec& psi) {
  Mat out = Mat::Zero(psi.size(), psi.size());
  for (const Mat& e : elements) {
    Vec v = e * psi;
    out += v * v.adjoint();
  }
  return out;
}

}  // namespace

McEstimate ave_measure_mc(const Channel& e, const Channel& f, Metric metric,
                          long long samples, std::uint64_t seed) {
  if (e.dim() != f.dim())
    throw DimensionMismatch("ave_measure_mc: dimension mismatch");
  if (samples < 2) throw Error("ave_measure_mc: need at least 2 samples");
  const int d = e.dim();
  const auto& ke = e.kraus().elements();
  const auto& kf = f.kraus().elements();
  std::optional<UnitaryOperator> fu =
      (metric == Metric::Fidelity) ? f.as_unitary() : std::nullopt;

  Rng root(seed);
  double sum = 0.0, sum_sq = 0.0;
  for (long long i = 0; i < samples; ++i) {
    Rng rng = root.split(static_cast<std::uint64_t>(i));
    Vec psi = haar_state(d, rng).amplitudes();
    double x;
    if (metric == Metric::TraceDistance) {
      x = detail::trace_distance_raw(apply_kraus_to_pure(ke, psi),
                                     apply_kraus_to_pure(kf, psi));
    } else if (fu) {
      Vec target = fu->matrix() * psi;
      x = detail::fidelity_with_pure_raw(target, apply_kraus_to_pure(ke, psi));
    } else {
      x = detail::fidelity_raw(apply_kraus_to_pure(ke, psi),
                               apply_kraus_to_pure(kf, psi));
    }
    sum += x;
    sum_sq += x * x;
  }
  const double n = static_cast<double>(samples);
  const double mean = sum / n;
  const double var = std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0));
  McEstimate out;
  out.estimate = mean;
  out.std_error = std::sqrt(var / n);
  out.samples = samples;
  out.seed = seed;
  return out;
}

// ---------------------------------------------------------------------------
// Frank-Wolfe over density matrices

namespace {

std::vector<Mat> traceless_hermitian_basis(int d) {
  std::vector<Mat> basis;
  basis.reserve(d * d - 1);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (int j = 0; j < d; ++j)
    for (int k = j + 1; k < d; ++k) {
      Mat sym = Mat::Zero(d, d);
      sym(j, k) = inv_sqrt2;
      sym(k, j) = inv_sqrt2;
      basis.push_back(std::move(sym));
      Mat asym = Mat::Zero(d, d);
      asym(j, k) = Cplx(0, -inv_sqrt2);
      asym(k, j) = Cplx(0, inv_sqrt2);
      basis.push_back(std::move(asym));
    }
  for (int l = 1; l < d; ++l) {
    Mat diag = Mat::Zero(d, d);
    const double c = 1.0 / std::sqrt(static_cast<double>(l) * (l + 1));
    for (int j = 0; j < l; ++j) diag(j, j) = c;
    diag(l, l) = -c * l;
    basis.push_back(std::move(diag));
  }
  return basis;
}

Mat project_density_raw(const Mat& h) {
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (h + h.adjoint().eval()));
  RVec vals = es.eigenvalues().cwiseMax(0.0);
  const double tr = vals.sum();
  if (tr <= 0) {
    return Mat::Identity(h.rows(), h.cols()) / static_cast<double>(h.rows());
  }
  vals /= tr;
  return es.eigenvectors() * vals.asDiagonal() * es.eigenvectors().adjoint();
}

Mat random_density_raw(int d, Rng& rng) {
  Mat g = detail::random_gaussian(d, d, rng);
  Mat rho = g * g.adjoint();
  rho /= rho.trace().real();
  return rho;
}

Mat random_hermitian_unit(int d, Rng& rng) {
  Mat g = detail::random_gaussian(d, d, rng);
  Mat h = 0.5 * (g + g.adjoint().eval());
  return h / h.norm();
}

struct LinePoint {
  double t;
  double value;
};

// Golden-section search for the minimum of phi on [0, 1]; endpoints are
// always evaluated.  t_tol 1e-6 keeps the value error quadratic, ~1e-12.
LinePoint golden_section_min(const std::function<double(double)>& phi,
                             double t_tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = 0.0, b = 1.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = phi(c), fd = phi(d);
  while (b - a > t_tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = phi(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = phi(d);
    }
  }
  LinePoint best{(fc < fd) ? c : d, std::min(fc, fd)};
  const double f0 = phi(0.0), f1 = phi(1.0);
  if (f0 <= best.value) best = {0.0, f0};
  if (f1 < best.value) best = {1.0, f1};
  return best;
}

struct FwOutcome {
  double value = 0.0;
  Mat rho;
  int iterations = 0;
  double gap = 0.0;
  bool converged = false;
  double best_vertex_value = 0.0;
  Mat best_vertex;
};

// One Frank-Wolfe run.  `eval` must accept any Hermitian unit-trace matrix
// that is PSD up to fd_step-sized dust (it projects internally).  The
// iterate itself always stays an exact convex combination of density
// matrices.
//
// Plain conditional-gradient steps zigzag once the solution sits on a face
// of the spectrahedron, so when the line search along the oracle direction
// stalls we take a pairwise step instead: weight is moved from the worst
// eigen-atom of the iterate onto the oracle vertex.  The duality-gap
// stopping rule is unaffected.
FwOutcome frank_wolfe_run(const std::function<double(const Mat&)>& eval,
                          bool maximize, Mat start,
                          const std::vector<Mat>& basis, int max_iter,
                          double gap_tol, double fd_step, Rng rng) {
  const int d = static_cast<int>(start.rows());
  const double sign = maximize ? -1.0 : 1.0;  // work as minimization
  FwOutcome out;
  out.rho = std::move(start);
  double cur = sign * eval(out.rho);  // surrogate value (minimized)
  out.best_vertex_value = maximize ? -1.0 : 2.0;
  out.gap = std::numeric_limits<double>::infinity();

  for (int iter = 1; iter <= max_iter; ++iter) {
    out.iterations = iter;
    // Finite-difference gradient along the traceless Hermitian basis,
    // in the surrogate (minimization) orientation.
    Mat grad = Mat::Zero(d, d);
    for (const Mat& h : basis) {
      const double gp = eval(out.rho + fd_step * h);
      const double gm = eval(out.rho - fd_step * h);
      grad += (sign * (gp - gm) / (2.0 * fd_step)) * h;
    }
    if (grad.cwiseAbs().maxCoeff() < 1e-12) {
      Rng pert = rng.split(0xF00D + iter);
      grad += 1e-8 * random_hermitian_unit(d, pert);
    }
    // Linear minimization oracle: smallest-eigenvalue eigenvector.
    Eigen::SelfAdjointEigenSolver<Mat> es(grad);
    Vec v = es.eigenvectors().col(0);
    Mat vertex = v * v.adjoint();
    const double gap = (grad * (out.rho - vertex)).trace().real();
    out.gap = gap;
    if (gap <= gap_tol) {
      out.converged = true;
      break;
    }

    const double vertex_eval = eval(vertex);
    const bool vertex_better = maximize
                                   ? vertex_eval > out.best_vertex_value
                                   : vertex_eval < out.best_vertex_value;
    if (vertex_better) {
      out.best_vertex_value = vertex_eval;
      out.best_vertex = vertex;
    }

    // Frank-Wolfe step.
    Mat dir = vertex - out.rho;
    auto phi = [&](double t) { return sign * eval(out.rho + t * dir); };
    LinePoint lp = golden_section_min(phi, 1e-6);
    if (lp.value < cur - 1e-15) {
      out.rho += lp.t * dir;
      cur = lp.value;
      continue;
    }

    // Pairwise step: shift weight from the eigen-atom of the iterate with
    // the largest gradient inner product onto the oracle vertex.
    Eigen::SelfAdjointEigenSolver<Mat> rho_eig(out.rho);
    int away = -1;
    double away_score = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < d; ++i) {
      const double w = rho_eig.eigenvalues()(i);
      if (w < 1e-14) continue;
      const Vec a = rho_eig.eigenvectors().col(i);
      const double score = (a.adjoint() * grad * a).real()(0, 0);
      if (score > away_score) {
        away_score = score;
        away = i;
      }
    }
    bool advanced = false;
    if (away >= 0) {
      const double w_away = rho_eig.eigenvalues()(away);
      const Vec a = rho_eig.eigenvectors().col(away);
      Mat pair_dir = vertex - a * a.adjoint();
      auto phi_pair = [&](double t) {
        return sign * eval(out.rho + (t * w_away) * pair_dir);
      };
      LinePoint pp = golden_section_min(phi_pair, 1e-6);
      if (pp.value < cur - 1e-15) {
        out.rho += (pp.t * w_away) * pair_dir;
        cur = pp.value;
        advanced = true;
      }
    }
    if (!advanced) break;  // stationary for both step types
  }
  out.value = sign * cur;
  return out;
}

// Local polish on the density-matrix factorization rho = Y Y^dag / ||Y||^2.
// The objective is smooth in Y (the canonical-purification value has a
// sqrt(lambda) cusp at rank-deficient rho, which makes finite differences
// on rho itself useless near low-rank optima; the factored form has no
// such cusp).  Polak-Ribiere conjugate gradient with a golden-section line
// search and an adaptive step bracket.
struct PolishOutcome {
  double value = 0.0;
  Mat y;
  double grad_inf = 0.0;
  int iterations = 0;
};

PolishOutcome polish_cg(const std::function<double(const Mat&)>& eval_y,
                        Mat y, bool maximize, int max_iter) {
  const double sign = maximize ? -1.0 : 1.0;
  const Eigen::Index rows = y.rows(), cols = y.cols();
  const double fd = 1e-5;
  PolishOutcome out;
  out.y = std::move(y);
  if (out.y.norm() < 1e-12) out.y(0, 0) = 1.0;
  out.y /= out.y.norm();
  double cur = sign * eval_y(out.y);

  Mat grad_prev, dir;
  double step_hi = 0.25;
  int stall = 0;
  for (int iter = 1; iter <= max_iter; ++iter) {
    out.iterations = iter;
    Mat grad(rows, cols);
    for (Eigen::Index c = 0; c < cols; ++c)
      for (Eigen::Index r = 0; r < rows; ++r) {
        Mat yp = out.y, ym = out.y;
        yp(r, c) += fd;
        ym(r, c) -= fd;
        const double dre = sign * (eval_y(yp) - eval_y(ym)) / (2 * fd);
        yp = out.y;
        ym = out.y;
        yp(r, c) += Cplx(0, fd);
        ym(r, c) -= Cplx(0, fd);
        const double dim_ = sign * (eval_y(yp) - eval_y(ym)) / (2 * fd);
        grad(r, c) = Cplx(dre, dim_);
      }
    out.grad_inf = grad.cwiseAbs().maxCoeff();
    if (out.grad_inf < 1e-10) break;

    double beta = 0.0;
    if (grad_prev.size() > 0) {
      const double denom = grad_prev.squaredNorm();
      if (denom > 0)
        beta = std::max(
            0.0, (grad.array().conjugate() * (grad - grad_prev).array())
                     .sum()
                     .real() /
                     denom);
    }
    if (dir.size() == 0 || beta == 0.0 || iter % (2 * rows * cols) == 0) {
      dir = -grad;
    } else {
      dir = -grad + beta * dir;
    }
    grad_prev = grad;
    Mat dn = dir / dir.norm();

    auto phi = [&](double t) { return sign * eval_y(out.y + t * dn); };
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    const double lo_tol = std::max(step_hi * 1e-6, 1e-13);
    double a = 0.0, b = step_hi;
    double c = b - inv_phi * b, d = inv_phi * b;
    double fc = phi(c), fdv = phi(d);
    while (b - a > lo_tol) {
      if (fc < fdv) {
        b = d;
        d = c;
        fdv = fc;
        c = b - inv_phi * (b - a);
        fc = phi(c);
      } else {
        a = c;
        c = d;
        fc = fdv;
        d = a + inv_phi * (b - a);
        fdv = phi(d);
      }
    }
    double t_best = (fc < fdv) ? c : d;
    double f_best = std::min(fc, fdv);
    if (f_best >= cur - 1e-15) {
      // The bracketed search failed; probe a logarithmic step grid along
      // the steepest descent direction before giving up.
      Mat sd = -grad / grad.norm();
      for (double t = 0.5; t > 1e-9; t *= 0.1) {
        const double v = sign * eval_y(out.y + t * sd);
        if (v < f_best) {
          f_best = v;
          t_best = t;
          dn = sd;
        }
      }
    }
    if (f_best < cur - 1e-15) {
      out.y += t_best * dn;
      out.y /= out.y.norm();
      cur = f_best;
      stall = 0;
      if (t_best > 0.7 * step_hi) step_hi = std::min(4.0, step_hi * 2.0);
      else if (t_best < 0.05 * step_hi) step_hi = std::max(1e-8, step_hi * 0.3);
    } else {
      step_hi = std::max(1e-8, step_hi * 0.2);
      if (++stall >= 6) break;
      dir = Mat();  // restart CG
      grad_prev = Mat();
    }
  }
  out.value = sign * cur;
  return out;
}

// CG polish plus seeded perturbation escapes: rank-deficient factors can be
// saddle points of the factored objective, so a couple of jittered
// re-polishes guard against stopping on one.
PolishOutcome polish_factored(const std::function<double(const Mat&)>& eval_y,
                              Mat y0, bool maximize, int max_iter,
                              Rng rng, int escape_rounds) {
  PolishOutcome best = polish_cg(eval_y, std::move(y0), maximize, max_iter);
  for (int round = 0; round < escape_rounds; ++round) {
    Rng child = rng.split(0xE5CA9E + round);
    Mat jitter = detail::random_gaussian(static_cast<int>(best.y.rows()),
                                         static_cast<int>(best.y.cols()),
                                         child);
    Mat seed = best.y + 1e-3 * (jitter / jitter.norm());
    PolishOutcome trial = polish_cg(eval_y, std::move(seed), maximize,
                                    max_iter / 2);
    const bool better = maximize ? trial.value > best.value + 1e-14
                                 : trial.value < best.value - 1e-14;
    if (better) {
      trial.iterations += best.iterations;
      best = std::move(trial);
    } else {
      break;
    }
  }
  return best;
}

struct OptimizerProblem {
  std::function<double(const Mat&)> eval;
  // Same objective as a smooth function of the factor Y (rho = YY^dag
  // normalized).  Column count: dim for stabilized runs, 1 for worst-case
  // runs (their optimum is a pure state).
  std::function<double(const Mat&)> eval_y;
  int dim;           // dimension of the optimization variable rho_Q
  int polish_cols;   // columns of the factor used in the polish
  bool maximize;     // D measures maximize, F measures minimize
  bool round_to_vertex;  // worst-case problems report a pure extremal state
};

OptimizerResult run_optimizer(const OptimizerProblem& prob,
                              const OptimizerConfig& config) {
  const std::vector<Mat> basis = traceless_hermitian_basis(prob.dim);
  Rng root(config.seed);
  struct Candidate {
    double value;
    Mat rho;
    int iterations;
    double gap;
    bool converged;
  };
  std::optional<Candidate> best;

  for (int r = 0; r < std::max(1, config.restarts); ++r) {
    Rng rng = root.split(static_cast<std::uint64_t>(r));
    Mat start;
    if (r == 0) {
      start = Mat::Identity(prob.dim, prob.dim) / static_cast<double>(prob.dim);
    } else {
      start = random_density_raw(prob.dim, rng);
    }
    FwOutcome run = frank_wolfe_run(prob.eval, prob.maximize, std::move(start),
                                    basis, config.max_iterations,
                                    config.gap_tolerance, config.fd_step, rng);
    Candidate cand{run.value, project_density_raw(run.rho), run.iterations,
                   run.gap, run.converged};

    // Seed the polish from the iterate (stabilized) or the best pure
    // candidate (worst case).
    Mat y0;
    if (prob.polish_cols == 1) {
      Mat from = cand.rho;
      if (run.best_vertex.size() > 0) {
        const bool vertex_wins = prob.maximize
                                     ? run.best_vertex_value > cand.value
                                     : run.best_vertex_value < cand.value;
        if (vertex_wins) from = run.best_vertex;
      }
      Eigen::SelfAdjointEigenSolver<Mat> es(from);
      // Dominant eigenvector; ties are irrelevant for a polish seed.
      y0 = es.eigenvectors().col(prob.dim - 1);
      // Other eigen-atoms may be the better vertex; check them.
      double seed_val = prob.eval(y0 * y0.adjoint());
      for (int i = 0; i < prob.dim - 1; ++i) {
        if (es.eigenvalues()(i) < 1e-12) continue;
        Vec v = es.eigenvectors().col(i);
        const double val = prob.eval(v * v.adjoint());
        const bool better = prob.maximize ? val > seed_val : val < seed_val;
        if (better) {
          seed_val = val;
          y0 = v;
        }
      }
    } else {
      Eigen::SelfAdjointEigenSolver<Mat> es(cand.rho);
      RVec vals = es.eigenvalues().cwiseMax(0.0);
      y0 = es.eigenvectors() * vals.cwiseSqrt().asDiagonal();
    }
    PolishOutcome polish = polish_factored(prob.eval_y, y0, prob.maximize,
                                           400, rng.split(0xB11D), 2);
    const bool polish_wins = prob.maximize ? polish.value > cand.value
                                           : polish.value < cand.value;
    if (polish_wins || prob.polish_cols == 1) {
      cand.value = polish.value;
      Mat rho = polish.y * polish.y.adjoint();
      cand.rho = rho / rho.trace().real();
    }
    // Either certificate counts: the Frank-Wolfe duality gap or the polish
    // stationarity residual; final_gap reports the smaller one so that
    // converged implies final_gap <= gap_tolerance.
    cand.gap = std::min(cand.gap, polish.grad_inf);
    cand.converged = cand.gap <= config.gap_tolerance;

    const bool better =
        !best || (prob.maximize ? cand.value > best->value + 1e-15
                                : cand.value < best->value - 1e-15);
    if (better) best = std::move(cand);
  }

  OptimizerResult result;
  result.iterations = best->iterations;
  result.final_gap = best->gap;
  result.converged = best->converged;
  result.value = best->value;
  result.argmin_state = DensityMatrix::unchecked(std::move(best->rho));
  return result;
}

// Shared machinery for the two stabilized objectives.
struct StabilizedEval {
  int d = 0;
  int anc = 0;
  Metric metric = Metric::Fidelity;
  std::vector<Mat> ke;  // Kraus of I (x) E restricted to Q action
  std::vector<Mat> kf;
  std::optional<Mat> f_unitary;  // V when the reference is unitary
  std::optional<Mat> e_unitary;

  // Purification of rho (clamp + renormalize fused into the eigensolve):
  // Psi(a, q) = sqrt(lambda_a) v_a(q) for descending eigenvalues.
  Mat purification_matrix(const Mat& rho_raw) const {
    Eigen::SelfAdjointEigenSolver<Mat> es(rho_raw);
    RVec vals = es.eigenvalues().cwiseMax(0.0);
    vals /= vals.sum();
    Mat psi = Mat::Zero(anc, d);
    const int terms = std::min(anc, d);
    for (int i = 0; i < terms; ++i) {
      const int src = d - 1 - i;  // descending
      psi.row(i) =
          std::sqrt(vals(src)) * es.eigenvectors().col(src).transpose();
    }
    return psi;
  }

  // (I (x) K) psi as a vector on A (x) Q is the row-major flattening of
  // Psi K^T.
  static Vec branch_vector(const Mat& psi, const Mat& k) {
    Mat out = psi * k.transpose();
    Vec v(out.rows() * out.cols());
    for (int a = 0; a < out.rows(); ++a)
      for (int q = 0; q < out.cols(); ++q) v(a * out.cols() + q) = out(a, q);
    return v;
  }

  double operator()(const Mat& rho_raw) const {
    return value_from_psi(purification_matrix(rho_raw));
  }

  double value_from_psi(const Mat& psi) const {
    if (metric == Metric::Fidelity) {
      if (f_unitary) {
        const Vec target = branch_vector(psi, *f_unitary);
        double f = 0.0;
        for (const Mat& k : ke) {
          const Cplx ip = target.dot(branch_vector(psi, k));
          f += std::norm(ip);
        }
        return std::clamp(f, 0.0, 1.0);
      }
      if (e_unitary) {
        const Vec target = branch_vector(psi, *e_unitary);
        double f = 0.0;
        for (const Mat& k : kf) {
          const Cplx ip = target.dot(branch_vector(psi, k));
          f += std::norm(ip);
        }
        return std::clamp(f, 0.0, 1.0);
      }
      return detail::fidelity_raw(output(psi, ke), output(psi, kf));
    }
    return detail::trace_distance_raw(output(psi, ke), output(psi, kf));
  }

  static Mat output(const Mat& psi, const std::vector<Mat>& kraus) {
    const Eigen::Index n = psi.rows() * psi.cols();
    Mat out = Mat::Zero(n, n);
    for (const Mat& k : kraus) {
      Vec v = branch_vector(psi, k);
      out += v * v.adjoint();
    }
    return out;
  }
};

StabilizedEval make_stabilized_eval(const Channel& e, const Channel& f,
                                    Metric metric, int ancilla_dim) {
  StabilizedEval ev;
  ev.d = e.dim();
  ev.anc = ancilla_dim;
  ev.metric = metric;
  ev.ke = e.kraus().elements();
  ev.kf = f.kraus().elements();
  if (metric == Metric::Fidelity) {
    if (auto fu = f.as_unitary()) ev.f_unitary = fu->matrix();
    else if (auto eu = e.as_unitary()) ev.e_unitary = eu->matrix();
  }
  return ev;
}

}  // namespace

double stabilized_objective(const Channel& e, const Channel& f, Metric metric,
                            const DensityMatrix& rho_q, int ancilla_dim) {
  if (e.dim() != f.dim() || rho_q.dim() != e.dim())
    throw DimensionMismatch("stabilized_objective: dimension mismatch");
  StabilizedEval ev = make_stabilized_eval(e, f, metric, ancilla_dim);
  return ev(rho_q.matrix());
}

OptimizerResult stabilized_with_ancilla(const Channel& e, const Channel& f,
                                        Metric metric, int ancilla_dim,
                                        const OptimizerConfig& config) {
  if (e.dim() != f.dim())
    throw DimensionMismatch("stabilized: dimension mismatch");
  if (ancilla_dim < e.dim())
    throw AncillaTooSmall("stabilized: ancilla dimension below system dim");
  OptimizerProblem prob;
  const int d = e.dim();
  prob.dim = d;
  prob.polish_cols = d;
  prob.maximize = (metric == Metric::TraceDistance);
  prob.round_to_vertex = false;
  StabilizedEval ev = make_stabilized_eval(e, f, metric, ancilla_dim);
  prob.eval = [ev](const Mat& rho) { return ev(rho); };
  const int anc = ancilla_dim;
  prob.eval_y = [ev, d, anc](const Mat& y) {
    Mat psi = Mat::Zero(anc, d);
    psi.topRows(d) = y.transpose() / y.norm();
    return ev.value_from_psi(psi);
  };
  return run_optimizer(prob, config);
}

OptimizerResult stabilized(const Channel& e, const Channel& f, Metric metric,
                           const OptimizerConfig& config) {
  return stabilized_with_ancilla(e, f, metric, e.dim(), config);
}

OptimizerResult worst_case(const Channel& e, const Channel& f, Metric metric,
                           const OptimizerConfig& config) {
  if (e.dim() != f.dim())
    throw DimensionMismatch("worst_case: dimension mismatch");
  OptimizerProblem prob;
  prob.dim = e.dim();
  prob.polish_cols = 1;
  prob.maximize = (metric == Metric::TraceDistance);
  prob.round_to_vertex = true;
  const std::vector<Mat> ke = e.kraus().elements();
  const std::vector<Mat> kf = f.kraus().elements();
  auto value_at = [ke, kf, metric](const Mat& rho) {
    Mat a = apply_kraus_raw(ke, rho);
    Mat b = apply_kraus_raw(kf, rho);
    if (metric == Metric::TraceDistance)
      return detail::trace_distance_raw(a, b);
    return detail::fidelity_raw(a, b);
  };
  prob.eval = [value_at](const Mat& rho_raw) {
    return value_at(project_density_raw(rho_raw));
  };
  prob.eval_y = [value_at](const Mat& y) {
    Mat rho = y * y.adjoint();
    return value_at(rho / rho.trace().real());
  };
  return run_optimizer(prob, config);
}

// ---------------------------------------------------------------------------
// Full report

MeasureReport full_report(const Channel& e, const Channel& f,
                          const ReportConfig& config) {
  if (e.dim() != f.dim())
    throw DimensionMismatch("full_report: dimension mismatch");
  MeasureReport r;
  r.dim = e.dim();
  r.seed = config.seed;
  r.d_pro = j_distance(e, f);
  r.f_pro = j_fidelity(e, f);
  if (auto fu = f.as_unitary()) r.f_ave = f_ave_formula(e, *fu);

  Rng root(config.seed);
  r.d_ave_mc = ave_measure_mc(e, f, Metric::TraceDistance, config.mc.samples,
                              root.split(1).seed());
  r.f_ave_mc = ave_measure_mc(e, f, Metric::Fidelity, config.mc.samples,
                              root.split(2).seed());

  auto run = [&](Metric m, bool stab, std::uint64_t stream,
                 OptimizerDiagnostics& diag) {
    OptimizerConfig oc = config.optimizer;
    oc.seed = root.split(stream).seed();
    OptimizerResult res = stab ? stabilized(e, f, m, oc)
                               : worst_case(e, f, m, oc);
    diag.iterations = res.iterations;
    diag.final_gap = res.final_gap;
    diag.converged = res.converged;
    return res.value;
  };
  r.d_max = run(Metric::TraceDistance, false, 10, r.d_max_diag);
  r.f_min = run(Metric::Fidelity, false, 11, r.f_min_diag);
  r.d_stab = run(Metric::TraceDistance, true, 12, r.d_stab_diag);
  r.f_stab = run(Metric::Fidelity, true, 13, r.f_stab_diag);
  r.c_stab = std::sqrt(std::max(0.0, 1.0 - r.f_stab));
  r.process_purity = qpdist::process_purity(e);

  r.fvg_process_holds = (1.0 - std::sqrt(r.f_pro) <= r.d_pro + 1e-9) &&
                        (r.d_pro <= std::sqrt(1.0 - r.f_pro) + 1e-9);
  r.dmax_le_dstab = r.d_max <= r.d_stab + 1e-6;
  r.fmin_ge_fstab = r.f_min >= r.f_stab - 1e-6;
  r.all_converged = r.d_max_diag.converged && r.f_min_diag.converged &&
                    r.d_stab_diag.converged && r.f_stab_diag.converged;
  return r;
}

}  // namespace qpdist
