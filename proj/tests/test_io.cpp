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

#include <cstdio>
#include <filesystem>
#include <nlohmann/json.hpp>

#include "qpdist/channel_io.hpp"
#include "qpdist/verify.hpp"

using namespace qpdist;
using nlohmann::json;

namespace {
double max_abs(const Mat& m) { return m.cwiseAbs().maxCoeff(); }
}  // namespace

TEST_CASE("channel JSON round-trips in every form") {
  Rng rng(3);
  Channel ch = channels::random_channel(2, 3, rng);
  for (const char* form : {"kraus", "choi", "chi"}) {
    json j = channel_to_json(ch, form);
    Channel back = channel_from_json(j);
    CHECK(max_abs(back.choi().matrix() - ch.choi().matrix()) < 1e-9);
  }
  UnitaryOperator u = channels::random_unitary(2, rng);
  Channel cu = Channel::from_unitary(u);
  Channel back = channel_from_json(channel_to_json(cu, "unitary"));
  CHECK(max_abs(back.choi().matrix() - cu.choi().matrix()) < 1e-9);
}

TEST_CASE("parse errors name the offending field") {
  CHECK_THROWS_WITH_AS(channel_from_json(json::parse("{}")),
                       doctest::Contains("dim"), ParseError);
  CHECK_THROWS_WITH_AS(channel_from_json(json::parse(R"({"dim": 2})")),
                       doctest::Contains("form"), ParseError);
  CHECK_THROWS_WITH_AS(
      channel_from_json(json::parse(R"({"dim": 2, "form": "kraus"})")),
      doctest::Contains("data"), ParseError);
  CHECK_THROWS_WITH_AS(
      channel_from_json(
          json::parse(R"({"dim": 2, "form": "nope", "data": []})")),
      doctest::Contains("form"), ParseError);
  // chi needs a basis tag.
  json chi = channel_to_json(channels::identity(2), "chi");
  chi.erase("basis");
  CHECK_THROWS_WITH_AS(channel_from_json(chi), doctest::Contains("basis"),
                       ParseError);
  // Wrong entry count.
  json bad = json::parse(R"({"dim": 2, "form": "unitary", "data": [[1, 0]]})");
  CHECK_THROWS_AS(channel_from_json(bad), ParseError);
}

TEST_CASE("parser rejects invariant violations") {
  // Non-trace-preserving Kraus set.
  json j;
  j["dim"] = 2;
  j["form"] = "kraus";
  j["data"] = json::array();
  j["data"].push_back(matrix_to_json(0.5 * Mat::Identity(2, 2)));
  CHECK_THROWS(channel_from_json(j));

  // A Choi matrix that is not a density matrix.
  json c;
  c["dim"] = 2;
  c["form"] = "choi";
  Mat m = Mat::Identity(4, 4);  // trace 4, not 1
  c["data"] = matrix_to_json(m);
  CHECK_THROWS(channel_from_json(c));
}

TEST_CASE("report JSON carries raw and clamped values with seeds") {
  ReportConfig config;
  config.seed = 12;
  config.mc.samples = 500;
  MeasureReport rep =
      full_report(channels::bit_flip(0.3), channels::identity(2), config);
  json j = report_to_json(rep);
  CHECK(j["seed"] == 12);
  CHECK(j["measures"]["d_pro"].contains("raw"));
  CHECK(j["measures"]["d_pro"].contains("value"));
  const double v = j["measures"]["d_pro"]["value"].get<double>();
  CHECK(v >= 0.0);
  CHECK(v <= 1.0);
  CHECK(j["measures"]["d_ave_mc"]["samples"] == 500);
  CHECK(j["measures"]["d_stab"].contains("converged"));
  CHECK(j["measures"]["f_ave"].is_object());
  CHECK(j["consistency"]["fvg_process"].get<bool>());
}

TEST_CASE("plan JSON lists one setting per nonzero weight") {
  UnitaryOperator uid(Mat::Identity(2, 2));
  EstimationPlan plan = build_plan_pauli_minimal(uid, 1);
  json j = plan_to_json(plan);
  CHECK(j["settings_count"] == 4);
  CHECK(j["scheme"] == "pauli-minimal");
  CHECK(j["settings"].size() == 4);
  CHECK(j["settings"][0].contains("input_state"));
  CHECK(j["settings"][0].contains("observable"));
}

TEST_CASE("counterexample dumps replay to the same outcome") {
  namespace fs = std::filesystem;
  const std::string dir = (fs::temp_directory_path() / "qpdist-dumps").string();
  const std::uint64_t seed = verify::instance_seed(5, "channels", 2, 0);
  verify::InstanceOutcome outcome = verify::run_instance("channels", 2, seed);
  const std::string path =
      verify::write_dump(dir, "channels", 2, seed, outcome);
  verify::ReplayResult rep = verify::replay_dump(path);
  CHECK(rep.matches_dump);
  CHECK(rep.family == "channels");
  CHECK(rep.outcome.pass == outcome.pass);
  fs::remove_all(dir);
}
