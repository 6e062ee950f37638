#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "stlrob/disturbance.hpp"
#include "stlrob/dynamics.hpp"
#include "stlrob/error.hpp"
#include "stlrob/parse.hpp"
#include "stlrob/synthesis.hpp"

namespace stlrob {

/// Rectangle in physical units, one interval per output channel.
struct RegionSpec {
  std::string name;
  std::vector<AxisInterval> axes;
};

/// Everything needed to run synthesis and the disturbance experiment on one
/// case study, as read from a JSON problem document.
struct ProblemConfig {
  SynthesisProblem problem;
  OptimizerConfig optimizer;
  std::vector<RegionSpec> regions;
  std::string spec_text;
  std::vector<double> sigmas;
  int n_runs = 100;
  std::uint64_t disturbance_seed = 0;

  DisturbanceConfig disturbance(double sigma) const { return {sigma, n_runs, disturbance_seed}; }
};

namespace detail {

using nlohmann::json;

inline void check_keys(const json& j, const char* where, std::set<std::string> allowed) {
  if (!j.is_object()) throw FormatError(std::string(where) + " must be an object");
  for (const auto& [key, _] : j.items()) {
    if (!allowed.count(key)) {
      throw FormatError(std::string(where) + ": unknown key '" + key + "'");
    }
  }
}

inline const json& require(const json& j, const char* key, const char* where) {
  if (!j.contains(key)) throw FormatError(std::string(where) + ": missing '" + key + "'");
  return j.at(key);
}

inline Box read_box(const json& j, const char* where) {
  if (!j.is_array()) throw FormatError(std::string(where) + " must be an array of [min,max]");
  Box b;
  for (const auto& iv : j) {
    if (!iv.is_array() || iv.size() != 2 || !iv[0].is_number() || !iv[1].is_number()) {
      throw FormatError(std::string(where) + " entries must be [min,max]");
    }
    b.bounds.push_back({iv[0].get<double>(), iv[1].get<double>()});
  }
  return b;
}

inline Semantics read_semantics(const json& j) {
  std::string name;
  Semantics s;
  if (j.is_string()) {
    name = j.get<std::string>();
  } else {
    check_keys(j, "semantics", {"name", "beta", "scale"});
    name = require(j, "name", "semantics").get<std::string>();
    if (j.contains("beta")) s.smooth.beta = j.at("beta").get<double>();
    if (j.contains("scale")) {
      auto sc = j.at("scale").get<std::string>();
      if (sc == "half") s.scale = PredicateScale::Half;
      else if (sc == "unit") s.scale = PredicateScale::Unit;
      else throw FormatError("semantics.scale must be 'half' or 'unit'");
    }
  }
  if (name == "agm") s.kind = SemanticsKind::Agm;
  else if (name == "smooth") s.kind = SemanticsKind::Smooth;
  else if (name == "traditional") s.kind = SemanticsKind::Traditional;
  else throw FormatError("unknown semantics '" + name + "'");
  s.smooth.validate();
  return s;
}

}  // namespace detail

inline ProblemConfig parse_problem(const nlohmann::json& doc) {
  using detail::require;
  try {
    detail::check_keys(doc, "problem",
                       {"model", "regions", "spec", "horizon", "lambda", "semantics", "optimizer",
                        "disturbance", "description"});
    ProblemConfig cfg;

    const auto& m = require(doc, "model", "problem");
    detail::check_keys(m, "model",
                       {"name", "params", "q0", "state_box", "input_box", "output_map"});
    if (m.contains("params") && !(m.at("params").is_object() && m.at("params").empty())) {
      throw FormatError("model.params: the built-in models take no parameters");
    }
    std::vector<OutputChannel> outputs;
    for (const auto& o : require(m, "output_map", "model")) {
      detail::check_keys(o, "output_map entry", {"channel", "state"});
      outputs.push_back({require(o, "channel", "output_map").get<std::string>(),
                         require(o, "state", "output_map").get<std::size_t>()});
    }
    cfg.problem.model = make_model(require(m, "name", "model").get<std::string>(),
                                   require(m, "q0", "model").get<Vector>(),
                                   detail::read_box(require(m, "state_box", "model"), "state_box"),
                                   detail::read_box(require(m, "input_box", "model"), "input_box"),
                                   std::move(outputs));
    const NormalizationMap ranges = cfg.problem.model.normalization();

    AtomTable atoms;
    if (doc.contains("regions")) {
      const auto& regs = doc.at("regions");
      if (!regs.is_object()) throw FormatError("regions must be an object");
      for (const auto& [name, rect] : regs.items()) {
        if (!rect.is_object() || rect.empty()) {
          throw FormatError("region '" + name + "' must map channels to [min,max]");
        }
        RegionSpec spec{name, {}};
        std::vector<AxisInterval> normalized;
        for (const auto& [channel, iv] : rect.items()) {
          auto it = ranges.find(channel);
          if (it == ranges.end()) {
            throw FormatError("region '" + name + "' uses unknown channel '" + channel + "'");
          }
          if (!iv.is_array() || iv.size() != 2) {
            throw FormatError("region '" + name + "." + channel + "' must be [min,max]");
          }
          const double lo = iv[0].get<double>();
          const double hi = iv[1].get<double>();
          const Range& r = it->second;
          if (!(lo < hi) || lo < r.min || hi > r.max) {
            throw FormatError("region '" + name + "." + channel +
                              "' must be a non-empty interval inside the state box");
          }
          spec.axes.push_back({channel, lo, hi});
          normalized.push_back({channel, r.to_normalized(lo), r.to_normalized(hi)});
        }
        atoms.emplace(name, box_region(normalized));
        cfg.regions.push_back(std::move(spec));
      }
    }

    cfg.spec_text = require(doc, "spec", "problem").get<std::string>();
    cfg.problem.spec = parse(cfg.spec_text, atoms);
    cfg.problem.horizon = require(doc, "horizon", "problem").get<std::size_t>();
    if (doc.contains("lambda")) cfg.problem.lambda = doc.at("lambda").get<double>();
    if (doc.contains("semantics")) cfg.problem.semantics = detail::read_semantics(doc.at("semantics"));

    if (doc.contains("optimizer")) {
      const auto& o = doc.at("optimizer");
      detail::check_keys(o, "optimizer",
                         {"max_iters", "step0", "fd_step", "restarts", "seed", "stall_iters",
                          "stall_tol"});
      auto& oc = cfg.optimizer;
      if (o.contains("max_iters")) oc.max_iters = o.at("max_iters").get<int>();
      if (o.contains("step0")) oc.step0 = o.at("step0").get<double>();
      if (o.contains("fd_step")) oc.fd_step = o.at("fd_step").get<double>();
      if (o.contains("restarts")) oc.restarts = o.at("restarts").get<int>();
      if (o.contains("seed")) oc.seed = o.at("seed").get<std::uint64_t>();
      if (o.contains("stall_iters")) oc.stall_iters = o.at("stall_iters").get<int>();
      if (o.contains("stall_tol")) oc.stall_tol = o.at("stall_tol").get<double>();
      oc.validate();
    }

    double min_half_width = std::numeric_limits<double>::infinity();
    for (const auto& r : cfg.problem.model.input_box.bounds) {
      min_half_width = std::min(min_half_width, r.half_width());
    }
    cfg.sigmas = {0.05 * min_half_width, 0.1 * min_half_width, 0.2 * min_half_width};
    if (doc.contains("disturbance")) {
      const auto& d = doc.at("disturbance");
      detail::check_keys(d, "disturbance", {"sigmas", "n_runs", "seed"});
      if (d.contains("sigmas")) cfg.sigmas = d.at("sigmas").get<std::vector<double>>();
      if (d.contains("n_runs")) cfg.n_runs = d.at("n_runs").get<int>();
      if (d.contains("seed")) cfg.disturbance_seed = d.at("seed").get<std::uint64_t>();
      for (double s : cfg.sigmas) cfg.disturbance(s).validate();
    }

    cfg.problem.validate();
    return cfg;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("problem config: ") + e.what());
  } catch (const ParseError& e) {
    throw FormatError(std::string("problem spec: ") + e.what());
  } catch (const DomainError& e) {
    throw FormatError(std::string("problem config: ") + e.what());
  }
}

inline ProblemConfig load_problem(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open '" + path.string() + "'");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  return parse_problem(doc);
}

}  // namespace stlrob
