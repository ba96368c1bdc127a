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

#include "qpdist/channel_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>

namespace qpdist {

using nlohmann::json;

nlohmann::json matrix_to_json(const Mat& m) {
  json entries = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      entries.push_back({m(r, c).real(), m(r, c).imag()});
  return entries;
}

Mat matrix_from_json(const json& j, int rows, int cols,
                     const std::string& field) {
  if (!j.is_array() ||
      j.size() != static_cast<std::size_t>(rows) * cols)
    throw ParseError("field '" + field + "': expected " +
                     std::to_string(rows * cols) + " [re, im] entries");
  Mat m(rows, cols);
  std::size_t idx = 0;
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c, ++idx) {
      const json& entry = j[idx];
      if (!entry.is_array() || entry.size() != 2 ||
          !entry[0].is_number() || !entry[1].is_number())
        throw ParseError("field '" + field + "': entry " +
                         std::to_string(idx) + " is not an [re, im] pair");
      const double re = entry[0].get<double>();
      const double im = entry[1].get<double>();
      if (!std::isfinite(re) || !std::isfinite(im))
        throw ParseError("field '" + field + "': non-finite entry");
      m(r, c) = Cplx(re, im);
    }
  return m;
}

nlohmann::json channel_to_json(const Channel& ch, const std::string& form) {
  json j;
  j["dim"] = ch.dim();
  if (form == "kraus") {
    j["form"] = "kraus";
    json data = json::array();
    for (const Mat& e : ch.kraus().elements()) data.push_back(matrix_to_json(e));
    j["data"] = data;
  } else if (form == "choi") {
    j["form"] = "choi";
    j["data"] = matrix_to_json(ch.choi().matrix());
  } else if (form == "chi") {
    j["form"] = "chi";
    j["basis"] = "matrix-units";
    ChiMatrix chi = choi_to_chi(ch.choi(), OperatorBasis::matrix_units(ch.dim()));
    j["data"] = matrix_to_json(chi.matrix());
  } else if (form == "unitary") {
    auto u = ch.as_unitary();
    if (!u) throw NonUnitaryTarget("channel_to_json: channel is not unitary");
    j["form"] = "unitary";
    j["data"] = matrix_to_json(u->matrix());
  } else {
    throw ParseError("unknown channel form '" + form + "'");
  }
  return j;
}

Channel channel_from_json(const json& j) {
  if (!j.is_object()) throw ParseError("channel: expected a JSON object");
  if (!j.contains("dim") || !j["dim"].is_number_integer())
    throw ParseError("field 'dim': missing or not an integer");
  const int dim = j["dim"].get<int>();
  if (dim < 1 || dim > 64)
    throw ParseError("field 'dim': must be in [1, 64]");
  if (!j.contains("form") || !j["form"].is_string())
    throw ParseError("field 'form': missing or not a string");
  const std::string form = j["form"].get<std::string>();
  if (!j.contains("data"))
    throw ParseError("field 'data': missing");

  if (form == "kraus") {
    if (!j["data"].is_array() || j["data"].empty())
      throw ParseError("field 'data': expected a nonempty list of matrices");
    std::vector<Mat> elements;
    for (std::size_t i = 0; i < j["data"].size(); ++i)
      elements.push_back(matrix_from_json(
          j["data"][i], dim, dim, "data[" + std::to_string(i) + "]"));
    return Channel::from_kraus(KrausChannel(dim, std::move(elements)));
  }
  if (form == "unitary") {
    Mat u = matrix_from_json(j["data"], dim, dim, "data");
    return Channel::from_unitary(UnitaryOperator(std::move(u)));
  }
  if (form == "choi") {
    Mat m = matrix_from_json(j["data"], dim * dim, dim * dim, "data");
    return Channel::from_choi(ChoiState(dim, DensityMatrix(std::move(m))));
  }
  if (form == "chi") {
    if (!j.contains("basis") || !j["basis"].is_string())
      throw ParseError("field 'basis': required for chi form");
    const std::string basis_name = j["basis"].get<std::string>();
    Mat m = matrix_from_json(j["data"], dim * dim, dim * dim, "data");
    if (basis_name == "matrix-units") {
      return Channel::from_chi(
          ChiMatrix(OperatorBasis::matrix_units(dim), std::move(m)));
    }
    if (basis_name == "pauli") {
      int n = 0;
      while ((1 << n) < dim) ++n;
      if ((1 << n) != dim)
        throw ParseError("field 'basis': pauli basis needs dim = 2^n");
      return Channel::from_chi(
          ChiMatrix(OperatorBasis::pauli_products(n), std::move(m)));
    }
    throw ParseError("field 'basis': unknown basis '" + basis_name + "'");
  }
  throw ParseError("field 'form': unknown form '" + form + "'");
}

Channel load_channel(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open channel file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& ex) {
    throw ParseError("invalid JSON in '" + path + "': " + ex.what());
  }
  return channel_from_json(j);
}

void save_channel(const Channel& ch, const std::string& form,
                  const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write channel file '" + path + "'");
  out << channel_to_json(ch, form).dump(2) << "\n";
}

namespace {

json value_with_raw(double raw) {
  json j;
  j["raw"] = raw;
  j["value"] = std::clamp(raw, 0.0, 1.0);
  return j;
}

json mc_to_json(const McEstimate& mc) {
  json j = value_with_raw(mc.estimate);
  j["stderr"] = mc.std_error;
  j["samples"] = mc.samples;
  j["seed"] = mc.seed;
  return j;
}

json optimized_to_json(double raw, const OptimizerDiagnostics& diag) {
  json j = value_with_raw(raw);
  j["iterations"] = diag.iterations;
  j["final_gap"] = diag.final_gap;
  j["converged"] = diag.converged;
  return j;
}

}  // namespace

nlohmann::json report_to_json(const MeasureReport& r) {
  json j;
  j["dim"] = r.dim;
  j["seed"] = r.seed;
  json m;
  m["d_pro"] = value_with_raw(r.d_pro);
  m["f_pro"] = value_with_raw(r.f_pro);
  m["f_ave"] = r.f_ave ? value_with_raw(*r.f_ave) : json(nullptr);
  m["d_ave_mc"] = mc_to_json(r.d_ave_mc);
  m["f_ave_mc"] = mc_to_json(r.f_ave_mc);
  m["d_max"] = optimized_to_json(r.d_max, r.d_max_diag);
  m["f_min"] = optimized_to_json(r.f_min, r.f_min_diag);
  m["d_stab"] = optimized_to_json(r.d_stab, r.d_stab_diag);
  m["f_stab"] = optimized_to_json(r.f_stab, r.f_stab_diag);
  m["c_stab"] = value_with_raw(r.c_stab);
  m["process_purity"] = value_with_raw(r.process_purity);
  j["measures"] = m;
  json c;
  c["fvg_process"] = r.fvg_process_holds;
  c["dmax_le_dstab"] = r.dmax_le_dstab;
  c["fmin_ge_fstab"] = r.fmin_ge_fstab;
  c["all_converged"] = r.all_converged;
  j["consistency"] = c;
  return j;
}

nlohmann::json bound_report_to_json(const BoundReport& report) {
  json rows = json::array();
  for (const BoundRow& row : report.rows) {
    json r;
    r["name"] = row.name;
    r["lhs"] = row.lhs;
    r["rhs"] = row.rhs;
    r["slack"] = row.slack;
    r["holds"] = row.holds;
    r["applicable"] = row.applicable;
    rows.push_back(r);
  }
  json j;
  j["rows"] = rows;
  j["all_hold"] = report.all_hold();
  return j;
}

nlohmann::json plan_to_json(const EstimationPlan& plan) {
  json j;
  j["dim"] = plan.dim();
  j["scheme"] = plan.scheme() == PlanScheme::PauliMinimal ? "pauli-minimal"
                                                          : "general";
  j["target_unitary"] = matrix_to_json(plan.target().matrix());
  j["input_condition"] = plan.input_condition();
  j["observable_condition"] = plan.observable_condition();
  j["nonzero_weight_count"] = plan.nonzero_weight_count();
  j["settings_count"] = plan.settings_count();
  json settings = json::array();
  for (std::size_t k = 0; k < plan.input_states().size(); ++k)
    for (std::size_t l = 0; l < plan.observables().size(); ++l) {
      const Cplx w = plan.weights()(k, l);
      if (std::abs(w) < 1e-12) continue;
      json s;
      s["input_index"] = k;
      s["observable_index"] = l;
      s["input_state"] = matrix_to_json(plan.input_states()[k]);
      s["observable"] = matrix_to_json(plan.observables()[l]);
      s["weight"] = {w.real(), w.imag()};
      settings.push_back(std::move(s));
    }
  j["settings"] = settings;
  return j;
}

}  // namespace qpdist
