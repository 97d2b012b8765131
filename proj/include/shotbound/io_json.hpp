#pragma once

// JSON encodings of matrices, ensembles, circuits, classifiers and solver
// results. Complex entries are [re, im]; plain numbers are read as real.

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "shotbound/circuit.hpp"
#include "shotbound/discrimination.hpp"
#include "shotbound/errors.hpp"
#include "shotbound/qcore.hpp"
#include "shotbound/singleshot.hpp"

namespace shotbound::io {

using Json = nlohmann::ordered_json;

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << text;
}

inline std::string dump(const Json& j) { return j.dump(2) + "\n"; }

namespace json_detail {

inline const Json& require(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) throw ParseError(where + ": missing key '" + key + "'");
  return j.at(key);
}

inline double number(const Json& j, const std::string& where) {
  if (!j.is_number()) throw ParseError(where + ": expected a number");
  return j.get<double>();
}

inline long integer(const Json& j, const std::string& where) {
  if (!j.is_number_integer()) throw ParseError(where + ": expected an integer");
  return j.get<long>();
}

}  // namespace json_detail

inline Complex complex_from_json(const Json& j, const std::string& where = "entry") {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  throw ParseError(where + ": expected a number or [re, im]");
}

inline ComplexMatrix matrix_from_json(const Json& j, const std::string& where = "matrix") {
  if (!j.is_array() || j.empty()) throw ParseError(where + ": expected a non-empty array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  if (!j[0].is_array() || j[0].empty()) throw ParseError(where + ": rows must be non-empty arrays");
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  ComplexMatrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
      throw ParseError(where + ": ragged row " + std::to_string(r));
    for (Eigen::Index c = 0; c < cols; ++c)
      m(r, c) = complex_from_json(row[static_cast<std::size_t>(c)], where);
  }
  return m;
}

inline Json to_json(const ComplexMatrix& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(Json::array({m(r, c).real(), m(r, c).imag()}));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Json to_json(const Povm& povm) {
  Json out = Json::array();
  for (const auto& e : povm.effects()) out.push_back(to_json(e));
  return out;
}

inline std::vector<ComplexMatrix> matrices_from_json(const Json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw ParseError(where + ": expected a non-empty array of matrices");
  std::vector<ComplexMatrix> out;
  for (std::size_t k = 0; k < j.size(); ++k) out.push_back(matrix_from_json(j[k], where + "[" + std::to_string(k) + "]"));
  return out;
}

// { "dim", "priors"?, "states": [matrix, ...] }
inline Ensemble ensemble_from_json(const Json& j) {
  using namespace json_detail;
  const auto mats = matrices_from_json(require(j, "states", "ensemble"), "ensemble.states");
  std::vector<DensityMatrix> states;
  for (const auto& m : mats) {
    if (m.rows() != m.cols()) throw ShapeError("ensemble: state matrix is not square");
    states.emplace_back(m);
  }
  if (j.contains("dim") && integer(j.at("dim"), "ensemble.dim") != states.front().dim())
    throw ShapeError("ensemble: 'dim' does not match the state matrices");
  std::optional<std::vector<double>> priors;
  if (j.contains("priors") && !j.at("priors").is_null()) {
    const auto& jp = j.at("priors");
    if (!jp.is_array()) throw ParseError("ensemble.priors: expected an array");
    priors.emplace();
    for (const auto& v : jp) priors->push_back(number(v, "ensemble.priors"));
  }
  return Ensemble(std::move(states), std::move(priors));
}

inline Json to_json(const Ensemble& ens) {
  Json out;
  out["dim"] = ens.dim();
  if (ens.has_priors()) out["priors"] = ens.priors();
  Json states = Json::array();
  for (const auto& s : ens.states()) states.push_back(to_json(s.matrix()));
  out["states"] = std::move(states);
  return out;
}

inline Json to_json(const DiscriminationResult& r) {
  Json out;
  out["error"] = r.error;
  out["duality_gap"] = r.duality_gap;
  out["lower_bound"] = r.lower_bound;
  out["iterations"] = r.iterations;
  out["converged"] = r.converged;
  out["method"] = r.method;
  if (!r.prior.empty()) out["least_favorable_prior"] = r.prior;
  out["povm"] = to_json(r.povm);
  return out;
}

inline GateSpec gate_from_json(const Json& j, const std::string& where) {
  using namespace json_detail;
  const auto kind = gate_kind_from_string(require(j, "kind", where).get<std::string>());
  std::vector<int> qubits;
  const auto& jq = require(j, "qubits", where);
  if (!jq.is_array()) throw ParseError(where + ".qubits: expected an array");
  for (const auto& q : jq) qubits.push_back(static_cast<int>(integer(q, where + ".qubits")));
  const int param = j.contains("param_index") ? static_cast<int>(integer(j.at("param_index"), where)) : -1;
  const double theta = j.contains("theta") ? number(j.at("theta"), where + ".theta") : 0.0;
  const std::string name = j.contains("named") ? j.at("named").get<std::string>() : std::string();
  if (kind == GateKind::encode && param < 0) throw StructureError(where + ": encode gate needs 'param_index'");
  if (!name.empty()) return GateSpec::named(kind, std::move(qubits), name, param, theta);
  if (kind == GateKind::fixed)
    return GateSpec::fixed(std::move(qubits), matrix_from_json(require(j, "unitary", where), where + ".unitary"));
  const auto g = matrix_from_json(require(j, "generator", where), where + ".generator");
  if (kind == GateKind::encode) return GateSpec::encode(std::move(qubits), g, param);
  return GateSpec::variational(std::move(qubits), g, theta);
}

inline Json to_json(const GateSpec& g) {
  Json out;
  out["kind"] = to_string(g.kind());
  out["qubits"] = g.qubits();
  out[g.kind() == GateKind::fixed ? "unitary" : "generator"] = to_json(g.matrix());
  if (g.kind() == GateKind::encode) out["param_index"] = g.param_index();
  if (g.kind() == GateKind::variational) out["theta"] = g.theta();
  return out;
}

inline NoiseSchedule noise_from_json(const Json& j) {
  using namespace json_detail;
  if (!j.contains("noise") || j.at("noise").is_null()) return NoiseSchedule::off();
  const auto& jn = j.at("noise");
  const double p = jn.contains("p") ? number(jn.at("p"), "noise.p") : 1.0;
  const bool enabled = jn.contains("enabled") ? jn.at("enabled").get<bool>() : true;
  return NoiseSchedule(p, enabled);
}

// { "n_qubits", "d", "ell", "initial_state"?, "layers": [[gate...]...], "noise"? }
inline CircuitSpec circuit_from_json(const Json& j) {
  using namespace json_detail;
  const int n = static_cast<int>(integer(require(j, "n_qubits", "circuit"), "circuit.n_qubits"));
  const int d = static_cast<int>(integer(require(j, "d", "circuit"), "circuit.d"));
  const int ell = j.contains("ell") ? static_cast<int>(integer(j.at("ell"), "circuit.ell")) : 0;
  const auto& jl = require(j, "layers", "circuit");
  if (!jl.is_array()) throw ParseError("circuit.layers: expected an array of layers");
  std::vector<CircuitSpec::Layer> layers;
  for (std::size_t l = 0; l < jl.size(); ++l) {
    if (!jl[l].is_array()) throw ParseError("circuit.layers[" + std::to_string(l) + "]: expected an array of gates");
    CircuitSpec::Layer layer;
    for (std::size_t g = 0; g < jl[l].size(); ++g)
      layer.push_back(gate_from_json(jl[l][g], "circuit.layers[" + std::to_string(l) + "][" + std::to_string(g) + "]"));
    layers.push_back(std::move(layer));
  }
  std::optional<DensityMatrix> init;
  if (j.contains("initial_state") && !j.at("initial_state").is_null())
    init.emplace(matrix_from_json(j.at("initial_state"), "circuit.initial_state"));
  return CircuitSpec(n, d, ell, std::move(layers), std::move(init));
}

inline Json to_json(const CircuitSpec& c, const NoiseSchedule& noise) {
  Json out;
  out["n_qubits"] = c.n_qubits();
  out["d"] = c.d();
  out["ell"] = c.ell();
  out["initial_state"] = to_json(c.initial_state().matrix());
  Json layers = Json::array();
  for (const auto& layer : c.layers()) {
    Json jl = Json::array();
    for (const auto& g : layer) jl.push_back(to_json(g));
    layers.push_back(std::move(jl));
  }
  out["layers"] = std::move(layers);
  out["noise"] = {{"p", noise.p}, {"enabled", noise.enabled}};
  return out;
}

// { "circuit": <circuit>, "povm": [matrix...], "labels"?: [...] }
inline Classifier classifier_from_json(const Json& j) {
  using namespace json_detail;
  const auto& jc = require(j, "circuit", "classifier");
  auto circuit = circuit_from_json(jc);
  auto noise = noise_from_json(jc);
  if (j.contains("noise")) noise = noise_from_json(j);
  Povm povm(matrices_from_json(require(j, "povm", "classifier"), "classifier.povm"));
  std::vector<std::string> labels;
  if (j.contains("labels")) {
    for (const auto& v : j.at("labels")) labels.push_back(v.is_string() ? v.get<std::string>() : v.dump());
  }
  return Classifier(std::move(circuit), noise, std::move(povm), std::move(labels));
}

inline Json to_json(const Classifier& c) {
  Json out;
  out["circuit"] = to_json(c.circuit(), c.noise());
  out["povm"] = to_json(c.povm());
  out["labels"] = c.labels();
  return out;
}

}  // namespace shotbound::io
