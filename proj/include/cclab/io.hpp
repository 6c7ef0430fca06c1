// Copyright 2026 The cclab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// JSON encodings.
//
//   matrix   {"rows": r, "cols": c, "data": [[re, im], ...]}   row-major
//   layout   [{"label": "A", "dim": 2}, ...]
//   state    {"layout": layout, "blocks": [{"omega", "prob", "matrix" | "vector"}]}
//   channel  {"labels", "dims", "kraus": [matrix...]} plus "out_labels", "out_dims"
//            when the output differs from the input
//   locc     {"alice": layout, "bob": layout, "rounds": [{"party", "labels",
//            "depends_on" (optional), "instruments": [[[matrix...] per outcome] ...]}]}
//
// Instance files carry "format" so the CLI can tell them apart.

#include <cclab/harness.hpp>

#include <json.hpp>

#include <fstream>

namespace cclab {

using Json = nlohmann::ordered_json;

inline constexpr const char* kInstanceFormat = "cclab-instance-v1";
inline constexpr const char* kKeyRunFormat = "cclab-keyrun-v1";
inline constexpr const char* kDistillerFormat = "cclab-distiller-v1";
inline constexpr const char* kTwoQuditFormat = "cclab-two-qudit-v1";

// Invalid input files, as opposed to failed certificates.
class InputError : public Error {
 public:
  using Error::Error;
};

namespace io_detail {

inline const Json& need(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw InputError(std::string("missing field '") + key + "'");
  return j.at(key);
}

template <class T>
T get(const Json& j, const char* key) {
  try {
    return need(j, key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("field '") + key + "': " + e.what());
  }
}

}  // namespace io_detail

inline Json to_json(const Matrix& m) {
  Json data = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) data.push_back({m(i, j).real(), m(i, j).imag()});
  }
  return Json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

inline Matrix matrix_from_json(const Json& j) {
  const auto rows = io_detail::get<long long>(j, "rows");
  const auto cols = io_detail::get<long long>(j, "cols");
  const Json& data = io_detail::need(j, "data");
  if (rows < 0 || cols < 0 || !data.is_array() || data.size() != static_cast<std::size_t>(rows * cols)) {
    throw InputError("matrix: data does not match rows x cols");
  }
  Matrix m(rows, cols);
  std::size_t k = 0;
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index jj = 0; jj < cols; ++jj, ++k) {
      const Json& z = data[k];
      if (!z.is_array() || z.size() != 2 || !z[0].is_number() || !z[1].is_number()) {
        throw InputError("matrix: entries must be [re, im] pairs");
      }
      m(i, jj) = Complex(z[0].get<double>(), z[1].get<double>());
    }
  }
  return m;
}

inline Json to_json(const Vector& v) { return to_json(Matrix(v)); }

inline Vector vector_from_json(const Json& j) {
  const Matrix m = matrix_from_json(j);
  if (m.cols() != 1) throw InputError("vector: expected a single column");
  return m.col(0);
}

inline Json to_json(const Layout& l) {
  Json a = Json::array();
  for (const auto& s : l.subsystems()) a.push_back({{"label", s.label}, {"dim", s.dim}});
  return a;
}

inline Layout layout_from_json(const Json& j) {
  if (!j.is_array()) throw InputError("layout: expected an array");
  std::vector<Subsystem> subs;
  for (const auto& s : j) {
    const auto dim = io_detail::get<long long>(s, "dim");
    if (dim < 1) throw InputError("layout: dims must be positive");
    subs.push_back({io_detail::get<std::string>(s, "label"), static_cast<std::size_t>(dim)});
  }
  try {
    return Layout(std::move(subs));
  } catch (const InputError&) {
    throw;
  } catch (const Error& e) {
    throw InputError(e.what());
  }
}

// Rethrows construction errors from the library as input errors.
template <class F>
auto as_input(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const InputError&) {
    throw;
  } catch (const Error& e) {
    throw InputError(e.what());
  }
}

inline Json to_json(const MixedBlocks& s) {
  Json blocks = Json::array();
  for (const auto& b : s.blocks()) blocks.push_back({{"omega", b.omega}, {"prob", b.prob}, {"matrix", to_json(b.state.matrix())}});
  return Json{{"layout", to_json(s.layout())}, {"blocks", std::move(blocks)}};
}

inline Json to_json(const PureBlocks& s) {
  Json blocks = Json::array();
  for (const auto& b : s.blocks()) {
    blocks.push_back({{"omega", b.omega}, {"prob", b.prob}, {"vector", to_json(b.state.amplitudes())}});
  }
  return Json{{"layout", to_json(s.layout())}, {"blocks", std::move(blocks)}};
}

inline Json to_json(const DensityOperator& rho) { return to_json(MixedBlocks({{0, 1.0, rho}})); }

// Either kind of state file; pure blocks are returned as such.
using AnyState = std::variant<MixedBlocks, PureBlocks>;

inline AnyState state_from_json(const Json& j) {
  const Layout layout = layout_from_json(io_detail::need(j, "layout"));
  const Json& blocks = io_detail::need(j, "blocks");
  if (!blocks.is_array() || blocks.empty()) throw InputError("state: blocks must be a non-empty array");
  const bool pure = blocks.front().contains("vector");
  return as_input([&]() -> AnyState {
    if (pure) {
      std::vector<Block<PureState>> out;
      for (const auto& b : blocks) {
        out.push_back({io_detail::get<int>(b, "omega"), io_detail::get<double>(b, "prob"),
                       PureState(layout, vector_from_json(io_detail::need(b, "vector")))});
      }
      return PureBlocks(std::move(out));
    }
    std::vector<Block<DensityOperator>> out;
    for (const auto& b : blocks) {
      out.push_back({io_detail::get<int>(b, "omega"), io_detail::get<double>(b, "prob"),
                     DensityOperator(layout, matrix_from_json(io_detail::need(b, "matrix")))});
    }
    return MixedBlocks(std::move(out));
  });
}

inline PureBlocks pure_state_from_json(const Json& j) {
  auto s = state_from_json(j);
  if (const auto* p = std::get_if<PureBlocks>(&s)) return *p;
  throw InputError("state: expected pure blocks (\"vector\")");
}

inline MixedBlocks mixed_state_from_json(const Json& j) {
  auto s = state_from_json(j);
  if (const auto* p = std::get_if<PureBlocks>(&s)) return to_mixed(*p);
  return std::get<MixedBlocks>(s);
}

namespace io_detail {

inline Json labels_dims(const Layout& l, Json& out, const char* lk, const char* dk) {
  Json labels = Json::array(), dims = Json::array();
  for (const auto& s : l.subsystems()) {
    labels.push_back(s.label);
    dims.push_back(s.dim);
  }
  out[lk] = std::move(labels);
  out[dk] = std::move(dims);
  return out;
}

inline Layout layout_from_lists(const Json& j, const char* lk, const char* dk) {
  const auto labels = get<std::vector<std::string>>(j, lk);
  const auto dims = get<std::vector<long long>>(j, dk);
  if (labels.size() != dims.size()) throw InputError("channel: labels and dims differ in length");
  std::vector<Subsystem> subs;
  for (std::size_t k = 0; k < labels.size(); ++k) {
    if (dims[k] < 1) throw InputError("channel: dims must be positive");
    subs.push_back({labels[k], static_cast<std::size_t>(dims[k])});
  }
  return as_input([&] { return Layout(std::move(subs)); });
}

}  // namespace io_detail

inline Json to_json(const KrausChannel& ch) {
  Json j = Json::object();
  io_detail::labels_dims(ch.input(), j, "labels", "dims");
  if (!ch.is_in_place()) io_detail::labels_dims(ch.output(), j, "out_labels", "out_dims");
  Json ks = Json::array();
  for (const auto& k : ch.kraus()) ks.push_back(to_json(k));
  j["kraus"] = std::move(ks);
  return j;
}

inline KrausChannel channel_from_json(const Json& j) {
  const Layout in = io_detail::layout_from_lists(j, "labels", "dims");
  const Layout out = j.contains("out_labels") ? io_detail::layout_from_lists(j, "out_labels", "out_dims") : in;
  std::vector<Matrix> ks;
  const Json& arr = io_detail::need(j, "kraus");
  if (!arr.is_array()) throw InputError("channel: kraus must be an array");
  for (const auto& k : arr) ks.push_back(matrix_from_json(k));
  return as_input([&] { return KrausChannel(in, out, std::move(ks)); });
}

inline Json to_json(const LoccProtocol& p) {
  Json rounds = Json::array();
  for (const auto& r : p.rounds) {
    Json round{{"party", party_name(r.party)}};
    io_detail::labels_dims(r.scope, round, "labels", "dims");
    if (r.depends_on) round["depends_on"] = *r.depends_on;
    Json insts = Json::array();
    for (const auto& inst : r.instruments) {
      Json outcomes = Json::array();
      for (const auto& ks : inst.outcomes) {
        Json kj = Json::array();
        for (const auto& k : ks) kj.push_back(to_json(k));
        outcomes.push_back(std::move(kj));
      }
      insts.push_back(std::move(outcomes));
    }
    round["instruments"] = std::move(insts);
    rounds.push_back(std::move(round));
  }
  return Json{{"alice", to_json(p.alice)}, {"bob", to_json(p.bob)}, {"rounds", std::move(rounds)}};
}

inline LoccProtocol locc_from_json(const Json& j) {
  LoccProtocol p{layout_from_json(io_detail::need(j, "alice")), layout_from_json(io_detail::need(j, "bob")), {}};
  const Json& rounds = io_detail::need(j, "rounds");
  if (!rounds.is_array()) throw InputError("locc: rounds must be an array");
  for (const auto& r : rounds) {
    LoccRound round;
    const auto party = io_detail::get<std::string>(r, "party");
    if (party == "alice") {
      round.party = Party::Alice;
    } else if (party == "bob") {
      round.party = Party::Bob;
    } else {
      throw InputError("locc: party must be 'alice' or 'bob'");
    }
    round.scope = io_detail::layout_from_lists(r, "labels", "dims");
    if (r.contains("depends_on") && !r.at("depends_on").is_null()) {
      round.depends_on = io_detail::get<std::size_t>(r, "depends_on");
    }
    for (const auto& inst : io_detail::need(r, "instruments")) {
      Instrument in;
      for (const auto& outcome : inst) {
        std::vector<Matrix> ks;
        for (const auto& k : outcome) ks.push_back(matrix_from_json(k));
        in.outcomes.push_back(std::move(ks));
      }
      round.instruments.push_back(std::move(in));
    }
    p.rounds.push_back(std::move(round));
  }
  as_input([&] {
    validate_locc(p);
    return 0;
  });
  return p;
}

inline Json to_json(const SecondaryProtocol& s) {
  if (const auto* k = std::get_if<KrausChannel>(&s)) return to_json(*k);
  return Json{{"locc", to_json(std::get<LoccProtocol>(s))}};
}

inline SecondaryProtocol secondary_from_json(const Json& j) {
  if (j.is_object() && j.contains("locc")) return locc_from_json(j.at("locc"));
  return channel_from_json(j);
}

inline Json to_json(const ControlInstance& inst) {
  Json j{{"format", kInstanceFormat},
         {"d", inst.d},
         {"key", inst.key_label},
         {"eve", inst.eve_labels},
         {"class", to_string(inst.extra_channel)},
         {"state", to_json(inst.post_comm)},
         {"bob_guess", to_json(inst.bob_guess)},
         {"secondary", to_json(inst.secondary)}};
  if (!inst.secondary_by_omega.empty()) {
    Json by = Json::array();
    for (const auto& [omega, p] : inst.secondary_by_omega) by.push_back({{"omega", omega}, {"secondary", to_json(p)}});
    j["secondary_by_omega"] = std::move(by);
  }
  return j;
}

inline ControlInstance instance_from_json(const Json& j) {
  if (io_detail::get<std::string>(j, "format") != kInstanceFormat) throw InputError("instance: unexpected format");
  const auto cls = io_detail::get<std::string>(j, "class");
  if (cls != "quantum" && cls != "classical") throw InputError("instance: class must be 'quantum' or 'classical'");
  const auto d = io_detail::get<long long>(j, "d");
  if (d < 2) throw InputError("instance: d must be at least 2");
  ControlInstance inst{pure_state_from_json(io_detail::need(j, "state")), channel_from_json(io_detail::need(j, "bob_guess")),
                       secondary_from_json(io_detail::need(j, "secondary")), {},
                       cls == "quantum" ? ExtraChannel::Quantum : ExtraChannel::Classical, static_cast<std::size_t>(d),
                       j.contains("key") ? io_detail::get<std::string>(j, "key") : "A",
                       j.contains("eve") ? io_detail::get<std::vector<std::string>>(j, "eve") : std::vector<std::string>{"E"}};
  if (j.contains("secondary_by_omega")) {
    for (const auto& e : j.at("secondary_by_omega")) {
      inst.secondary_by_omega.emplace(io_detail::get<int>(e, "omega"), secondary_from_json(io_detail::need(e, "secondary")));
    }
  }
  const auto diag = check_instance(inst);
  if (!diag.ok) throw InputError("instance: " + diag.problems.front());
  return inst;
}

inline Json to_json(const CoherentKeyRun& r) {
  return Json{{"format", kKeyRunFormat}, {"d", r.d}, {"alice", r.alice}, {"bob", r.bob}, {"eve", r.eve}, {"state", to_json(r.state)}};
}

inline CoherentKeyRun keyrun_from_json(const Json& j) {
  if (io_detail::get<std::string>(j, "format") != kKeyRunFormat) throw InputError("key run: unexpected format");
  return CoherentKeyRun{pure_state_from_json(io_detail::need(j, "state")), io_detail::get<std::size_t>(j, "d"),
                        io_detail::get<std::string>(j, "alice"), io_detail::get<std::string>(j, "bob"),
                        io_detail::get<std::vector<std::string>>(j, "eve")};
}

inline Json to_json(const DistillerCase& c) {
  const auto& p = c.primary;
  return Json{{"format", kDistillerFormat}, {"d", p.d},           {"alice", p.alice},
              {"bob", p.bob},               {"state", to_json(p.pre_state)}, {"v_alice", to_json(p.v_alice)},
              {"v_bob", to_json(p.v_bob)},  {"lambda", to_json(c.lambda)}};
}

inline DistillerCase distiller_from_json(const Json& j) {
  if (io_detail::get<std::string>(j, "format") != kDistillerFormat) throw InputError("distiller: unexpected format");
  CoherentPrimary p{mixed_state_from_json(io_detail::need(j, "state")), channel_from_json(io_detail::need(j, "v_alice")),
                    channel_from_json(io_detail::need(j, "v_bob")), io_detail::get<std::size_t>(j, "d"),
                    io_detail::get<std::string>(j, "alice"), io_detail::get<std::string>(j, "bob")};
  return {std::move(p), locc_from_json(io_detail::need(j, "lambda"))};
}

inline Json two_qudit_to_json(const DensityOperator& rho, std::size_t d) {
  return Json{{"format", kTwoQuditFormat}, {"d", d}, {"state", to_json(rho)}};
}

inline std::pair<DensityOperator, std::size_t> two_qudit_from_json(const Json& j) {
  if (io_detail::get<std::string>(j, "format") != kTwoQuditFormat) throw InputError("two-qudit: unexpected format");
  const auto s = mixed_state_from_json(io_detail::need(j, "state"));
  if (s.size() != 1) throw InputError("two-qudit: expected a single block");
  return {s.blocks().front().state, io_detail::get<std::size_t>(j, "d")};
}

// ---------------------------------------------------------------------------
// certificates and reports

inline Json to_json(const Check& c) {
  return Json{{"name", c.name},   {"achieved", c.achieved}, {"bound", c.bound}, {"slack", c.slack},
              {"tol", c.tol},     {"identity", c.identity}, {"ok", c.ok}};
}

inline Json to_json(const TheoremCertificate& c) {
  Json q = Json::object();
  for (const auto& [k, v] : c.quantities) q[k] = v;
  Json checks = Json::array();
  for (const auto& ch : c.checks) checks.push_back(to_json(ch));
  Json j{{"theorem", c.theorem}, {"d", c.d}, {"quantities", std::move(q)}, {"checks", std::move(checks)},
         {"ok", c.ok},           {"tol", c.tol}};
  j["seed"] = c.seed ? Json(*c.seed) : Json(nullptr);
  return j;
}

inline Json to_json(const SuiteConfig& c) {
  return Json{{"seed", c.seed}, {"trials", c.trials}, {"theorems", c.theorems}, {"d", c.d},
              {"dim_e", c.dim_e}, {"dim_aux", c.dim_aux}, {"tol", c.tol}};
}

inline Json to_json(const Report& r) {
  Json trials = Json::array();
  for (const auto& t : r.trials) {
    trials.push_back({{"trial", t.trial}, {"theorem", t.theorem}, {"family", t.family}, {"certificate", to_json(t.cert)}});
  }
  Json agg = Json::object();
  for (const auto& [th, a] : r.aggregate) {
    agg[std::to_string(th)] = {{"trials", a.trials}, {"failures", a.failures}, {"worst_slack", a.worst_slack}};
  }
  return Json{{"config", to_json(r.config)}, {"trials", std::move(trials)}, {"aggregate", std::move(agg)},
              {"failures", r.failures},      {"ok", r.ok()},                {"wall_time_s", r.wall_time_s}};
}

// ---------------------------------------------------------------------------
// files

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError("'" + path + "': " + e.what());
  }
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << text;
  if (!out) throw Error("write to '" + path + "' failed");
}

}  // namespace cclab
