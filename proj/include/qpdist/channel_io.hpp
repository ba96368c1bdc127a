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

#include <nlohmann/json_fwd.hpp>
#include <string>

#include "qpdist/channel.hpp"
#include "qpdist/computation_bounds.hpp"
#include "qpdist/estimation.hpp"
#include "qpdist/process_metrics.hpp"

namespace qpdist {

// Channel file format:
//   {"dim": d, "form": "kraus"|"choi"|"chi"|"unitary", "data": ...}
// where data is a list of matrices (kraus) or a single matrix (others) and
// a matrix is a row-major list of [re, im] pairs.  chi additionally
// carries "basis": "matrix-units" | "pauli".  Parse failures raise
// ParseError (or the violated invariant's own error) naming the field.

nlohmann::json channel_to_json(const Channel& ch, const std::string& form);
Channel channel_from_json(const nlohmann::json& j);

Channel load_channel(const std::string& path);
void save_channel(const Channel& ch, const std::string& form,
                  const std::string& path);

nlohmann::json matrix_to_json(const Mat& m);
Mat matrix_from_json(const nlohmann::json& j, int rows, int cols,
                     const std::string& field);

/// MeasureReport as JSON.  Distances and fidelities are clamped to [0, 1]
/// for the "value" entry with the unclamped number kept under "raw".
nlohmann::json report_to_json(const MeasureReport& report);

nlohmann::json bound_report_to_json(const BoundReport& report);

/// Plan export: the settings an experiment would run (input state,
/// Hermitian observable, complex weight).
nlohmann::json plan_to_json(const EstimationPlan& plan);

}  // namespace qpdist
