#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ergtower/coarsegrain.hpp"
#include "ergtower/erg.hpp"
#include "ergtower/errors.hpp"
#include "ergtower/groundstate.hpp"
#include "ergtower/lattice.hpp"
#include "ergtower/models.hpp"
#include "ergtower/pauli.hpp"

namespace ergtower::cli {

using json = nlohmann::ordered_json;

struct RunConfig {
  std::string format = "json";
  std::string circuit = "paper";
  int axis = 0;  // 1-based; 0 picks the last axis
  std::string sizes = "2..3";
  int L = 4;
  long long max_qubits = 8192;
  std::uint64_t max_configs = std::uint64_t{1} << 20;
};

struct CommandResult {
  json report;
  bool ok = true;
  // Name of an array field holding the table rows for CSV output; empty flattens the report.
  std::string table;
};

inline std::vector<int> parse_size_values(std::string_view text) {
  std::vector<int> out;
  const auto dots = text.find("..");
  if (dots != std::string_view::npos) {
    std::size_t pos = 0;
    const auto lo_text = text.substr(0, dots);
    const int lo = detail::parse_int(lo_text, pos, 0);
    if (pos != lo_text.size()) throw parse_error("bad range start", pos);
    const auto hi_text = text.substr(dots + 2);
    pos = 0;
    const int hi = detail::parse_int(hi_text, pos, dots + 2);
    if (pos != hi_text.size()) throw parse_error("bad range end", dots + 2 + pos);
    if (lo < 2 || hi < lo) throw parse_error("size range must satisfy 2 <= lo <= hi", 0);
    for (int v = lo; v <= hi; ++v) out.push_back(v);
    return out;
  }
  std::size_t pos = 0;
  while (true) {
    const int v = detail::parse_int(text, pos, 0);
    if (v < 2) throw parse_error("sizes must be at least 2", pos);
    out.push_back(v);
    if (pos == text.size()) break;
    if (text[pos] != ',') throw parse_error("expected ',' between sizes", pos);
    ++pos;
  }
  return out;
}

inline CircuitSource parse_circuit_source(const std::string& s) {
  if (s == "paper") return CircuitSource::paper;
  if (s == "general") return CircuitSource::general;
  throw parse_error("circuit source must be 'paper' or 'general'", 0);
}

inline json spec_json(const ModelSpec& s) { return s.to_string(); }

inline json generator_json(const Generator& g, const QubitIndexMap& q) {
  json j;
  j["tag"] = tag_name(g.tag);
  j["center"] = format_coord(g.center);
  if (g.subsystem) {
    std::string axes;
    for (int a = 0; a < 32; ++a) {
      if (g.subsystem >> a & 1u) axes += std::to_string(a + 1);
    }
    j["subsystem"] = axes;
  }
  j["weight"] = g.pauli.weight();
  j["pauli"] = to_text(g.pauli, q);
  return j;
}

inline bool all_commute(const StabilizerModel& m) {
  for (std::size_t i = 0; i < m.generators.size(); ++i) {
    for (std::size_t j = i + 1; j < m.generators.size(); ++j) {
      if (!commutes(m.generators[i].pauli, m.generators[j].pauli)) return false;
    }
  }
  return true;
}

inline ErgPlan plan_from(const ModelInstance& inst, const RunConfig& cfg) {
  if (!inst.lat.periodic()) throw std::domain_error("ERG plans need periodic boundaries");
  if (cfg.axis < 0 || cfg.axis > inst.spec.D) throw parse_error("--axis must be between 1 and D", 0);
  ErgPlan plan{inst.spec, inst.lat.dims, cfg.axis - 1, parse_circuit_source(cfg.circuit)};
  plan.validate();
  return plan;
}

inline CommandResult cmd_model_build(const std::string& instance, const RunConfig& cfg) {
  const auto inst = parse_model_instance(instance);
  check_qubit_cap(inst.spec, inst.lat, cfg.max_qubits);
  const auto m = build_model(inst.spec, inst.lat);
  CommandResult r;
  r.report["spec"] = spec_json(m.spec);
  r.report["lattice"] = m.lat.to_string();
  r.report["n_qubits"] = m.n_qubits();
  r.report["n_generators"] = m.generators.size();
  r.ok = all_commute(m);
  r.report["commute_ok"] = r.ok;
  r.report["generators"] = json::array();
  for (const auto& g : m.generators) r.report["generators"].push_back(generator_json(g, m.qubits));
  r.table = "generators";
  return r;
}

inline CommandResult cmd_model_gsd(const std::string& instance, const RunConfig& cfg) {
  const auto inst = parse_model_instance(instance);
  check_qubit_cap(inst.spec, inst.lat, cfg.max_qubits);
  const auto m = build_model(inst.spec, inst.lat);
  const auto g = log2_gsd(m);
  CommandResult r;
  r.report["spec"] = spec_json(inst.spec);
  r.report["dims"] = inst.lat.dims;
  r.report["n_qubits"] = m.n_qubits();
  r.report["rank"] = static_cast<long long>(m.n_qubits()) - g;
  r.report["log2_gsd"] = g;
  return r;
}

inline CommandResult cmd_model_dualize(const std::string& instance, const RunConfig& cfg) {
  const auto inst = parse_model_instance(instance);
  check_qubit_cap(inst.spec, inst.lat, cfg.max_qubits);
  const auto m = build_model(inst.spec, inst.lat);
  const auto dual = dualize(m);
  const auto g0 = log2_gsd(m);
  const auto g1 = log2_gsd(dual);
  CommandResult r;
  r.report["spec"] = spec_json(inst.spec);
  r.report["lattice"] = inst.lat.to_string();
  r.report["n_qubits"] = dual.n_qubits();
  r.report["qubit_dim"] = dual.qubits.cube_dimension();
  r.report["log2_gsd"] = g0;
  r.report["log2_gsd_dual"] = g1;
  r.ok = g0 == g1 && all_commute(dual);
  r.report["ok"] = r.ok;
  r.report["generators"] = json::array();
  for (const auto& g : dual.generators) r.report["generators"].push_back(generator_json(g, dual.qubits));
  r.table = "generators";
  return r;
}

inline CommandResult cmd_scan_fit(const std::string& spec_text, const RunConfig& cfg) {
  const auto spec = parse_model_spec(spec_text);
  const auto values = parse_size_values(cfg.sizes);
  const auto fit = gsd_scan_and_fit(spec, size_grid(spec.D, values), 2, cfg.max_qubits);
  CommandResult r;
  r.report["spec"] = spec_json(spec);
  r.report["sizes"] = values;
  json coeffs = json::object();
  for (std::size_t i = 0; i < fit.monomials.size(); ++i) coeffs[monomial_name(fit.monomials[i])] = fit.coefficients[i];
  r.report["coefficients"] = coeffs;
  r.report["symmetric"] = fit.symmetric;
  if (fit.symmetric) {
    r.report["c2"] = fit.c2;
    r.report["c1"] = fit.c1;
    r.report["c0"] = fit.c0;
  }
  long long max_res = 0;
  for (auto v : fit.residuals) max_res = std::max(max_res, v < 0 ? -v : v);
  r.report["max_abs_residual"] = max_res;
  r.report["exact"] = fit.exact;
  r.report["points"] = json::array();
  for (std::size_t i = 0; i < fit.points.size(); ++i) {
    const auto& p = fit.points[i];
    r.report["points"].push_back(
        {{"dims", p.dims}, {"n_qubits", p.n_qubits}, {"rank", p.rank}, {"log2_gsd", p.log2_gsd},
         {"residual", fit.residuals[i]}});
  }
  r.ok = fit.exact;
  r.table = "points";
  return r;
}

inline json conditions_json(const ConditionReport& c) {
  json j;
  j["well_formed"] = c.well_formed;
  j["condition1"] = c.condition1;
  j["condition2"] = c.condition2;
  j["condition3"] = c.condition3;
  j["two_controls"] = c.two_controls;
  j["violations"] = c.violations;
  return j;
}

inline CommandResult cmd_erg_verify(const std::string& instance, const RunConfig& cfg) {
  const auto plan = plan_from(parse_model_instance(instance), cfg);
  const auto fp = verify_fixed_point(plan, cfg.max_qubits);
  const auto conditions = validate_circuit_conditions(build_circuit(plan), plan);
  const auto mapping = check_mapping_claims(plan);
  CommandResult r;
  auto& j = r.report;
  j["spec"] = spec_json(fp.spec);
  j["dims_from"] = fp.dims_from;
  j["dims_to"] = fp.dims_to;
  j["axis"] = fp.axis + 1;
  j["circuit_source"] = circuit_source_name(fp.circuit_source);
  j["n_gates"] = fp.n_gates;
  j["h1_rank"] = fp.h1_rank;
  j["h2_rank"] = fp.h2_rank;
  j["h3_rank"] = fp.h3_rank;
  j["equal"] = fp.equal;
  j["gsd_from"] = fp.gsd_from;
  j["gsd_to"] = fp.gsd_to;
  j["inserted_gsd"] = fp.inserted_gsd;
  j["recursion_ok"] = fp.recursion_ok;
  j["conditions_ok"] = conditions.ok();
  j["mapping_ok"] = mapping.ok();
  if (!conditions.ok()) j["condition_violations"] = conditions.violations;
  if (!mapping.ok()) j["mapping_violations"] = mapping.violations;
  r.ok = fp.equal && fp.recursion_ok && conditions.ok() && mapping.ok();
  return r;
}

inline CommandResult cmd_erg_circuit(const std::string& instance, const RunConfig& cfg) {
  const auto plan = plan_from(parse_model_instance(instance), cfg);
  check_qubit_cap(plan.spec, plan.target_lattice(), cfg.max_qubits);
  const auto circuit = build_circuit(plan);
  const auto conditions = validate_circuit_conditions(circuit, plan);
  const QubitIndexMap q(plan.target_lattice(), plan.spec.ds);
  CommandResult r;
  r.report["spec"] = spec_json(plan.spec);
  r.report["dims_to"] = plan.target_lattice().dims;
  r.report["axis"] = plan.grow_axis() + 1;
  r.report["circuit_source"] = circuit_source_name(plan.circuit_source);
  r.report["n_gates"] = circuit.size();
  r.report["conditions"] = conditions_json(conditions);
  r.report["gates"] = json::array();
  for (const auto& g : circuit.gates()) {
    r.report["gates"].push_back({{"control", format_coord(q.coord(g.control))}, {"target", format_coord(q.coord(g.target))}});
  }
  r.ok = conditions.ok();
  r.table = "gates";
  return r;
}

inline CommandResult cmd_erg_classify(const std::string& instance, const RunConfig& cfg) {
  const auto plan = plan_from(parse_model_instance(instance), cfg);
  check_qubit_cap(plan.spec, plan.target_lattice(), cfg.max_qubits);
  const auto h1 = build_h1(plan);
  CommandResult r;
  r.report["spec"] = spec_json(plan.spec);
  r.report["dims_to"] = h1.lat.dims;
  r.report["axis"] = plan.grow_axis() + 1;
  std::map<std::string, std::size_t> counts;
  json terms = json::array();
  for (const auto& g : h1.generators) {
    if (!near_cut(plan, g)) continue;
    auto j = generator_json(g, h1.qubits);
    const auto cls = term_class_name(classify_term(g, plan, h1.qubits));
    ++counts[cls];
    j["class"] = cls;
    terms.push_back(std::move(j));
  }
  r.report["class_counts"] = counts;
  r.report["terms"] = std::move(terms);
  r.table = "terms";
  return r;
}

inline CommandResult cmd_coarse_verify(const RunConfig& cfg) {
  const auto rep = run_coarse_graining(cfg.L, cfg.max_configs);
  const bool inv = us_is_involution(UsTable::standard());
  CommandResult r;
  r.report["L"] = rep.L;
  r.report["n_configs"] = rep.n_configs;
  r.report["us_involution"] = inv;
  r.report["refined_ok"] = rep.refined_ok;
  r.report["ghz_ok"] = rep.ghz_ok;
  r.report["coarse_equal_ok"] = rep.coarse_equal_ok;
  r.report["coarse_size"] = rep.coarse_size;
  r.report["expected_size"] = rep.expected_size;
  r.ok = inv && rep.ok();
  return r;
}

// ---------------------------------------------------------------------------
// output

inline std::string csv_cell(const json& v) {
  std::string s = v.is_string() ? v.get<std::string>() : v.dump();
  if (s.find_first_of(",\"\n") != std::string::npos) {
    std::string q = "\"";
    for (char c : s) {
      if (c == '"') q += '"';
      q += c;
    }
    return q + "\"";
  }
  return s;
}

inline std::string to_csv(const CommandResult& r) {
  std::ostringstream out;
  auto write_rows = [&](const json& rows) {
    std::vector<std::string> keys;
    for (const auto& row : rows) {
      for (const auto& [k, v] : row.items()) {
        if (std::find(keys.begin(), keys.end(), k) == keys.end()) keys.push_back(k);
      }
    }
    for (std::size_t i = 0; i < keys.size(); ++i) out << (i ? "," : "") << keys[i];
    out << '\n';
    for (const auto& row : rows) {
      for (std::size_t i = 0; i < keys.size(); ++i) {
        out << (i ? "," : "");
        if (row.contains(keys[i])) out << csv_cell(row[keys[i]]);
      }
      out << '\n';
    }
  };
  if (!r.table.empty() && r.report.contains(r.table)) {
    write_rows(r.report[r.table]);
  } else {
    write_rows(json::array({r.report}));
  }
  return out.str();
}

inline std::string render(const CommandResult& r, const std::string& format) {
  if (format == "json") return r.report.dump(2) + "\n";
  if (format == "csv") return to_csv(r);
  throw parse_error("format must be 'json' or 'csv'", 0);
}

}  // namespace ergtower::cli
