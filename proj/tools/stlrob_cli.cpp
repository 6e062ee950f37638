// Command-line front end: monitor, synth, disturb, compare.

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "CLI11.hpp"
#include "stlrob/config.hpp"
#include "stlrob/disturbance.hpp"
#include "stlrob/parse.hpp"
#include "stlrob/robustness.hpp"
#include "stlrob/signal.hpp"
#include "stlrob/synthesis.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace stlrob;

namespace {

constexpr int kExitError = 3;

// JSON has no infinities; spell them as strings.
json number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  return v;
}

/// Relative config paths fall back to $STLROB_CONFIG_DIR.
fs::path resolve_config(const std::string& arg) {
  fs::path p(arg);
  if (fs::exists(p) || p.is_absolute()) return p;
  if (const char* dir = std::getenv("STLROB_CONFIG_DIR")) {
    fs::path alt = fs::path(dir) / p;
    if (fs::exists(alt)) return alt;
  }
  return p;
}

Semantics semantics_from(const std::string& name, double beta, const std::string& scale) {
  Semantics s;
  if (name == "agm") s.kind = SemanticsKind::Agm;
  else if (name == "smooth") s.kind = SemanticsKind::Smooth;
  else if (name == "traditional") s.kind = SemanticsKind::Traditional;
  else throw FormatError("unknown semantics '" + name + "'");
  s.smooth.beta = beta;
  s.smooth.validate();
  if (scale == "half") s.scale = PredicateScale::Half;
  else if (scale == "unit") s.scale = PredicateScale::Unit;
  else throw FormatError("--scale must be half or unit");
  return s;
}

json semantics_json(const Semantics& s) {
  json j = {{"name", s.name()}};
  if (s.kind == SemanticsKind::Smooth) j["beta"] = s.smooth.beta;
  if (s.kind == SemanticsKind::Agm) j["scale"] = s.scale == PredicateScale::Half ? "half" : "unit";
  return j;
}

Trace inputs_as_trace(const SystemModel& model, const InputSequence& u) {
  std::vector<double> values;
  for (const auto& uk : u) values.insert(values.end(), uk.begin(), uk.end());
  return Trace(model.input_names, std::move(values));
}

InputSequence trace_as_inputs(const SystemModel& model, const Trace& t) {
  if (t.channels() != model.input_names) {
    std::string expected;
    for (const auto& n : model.input_names) expected += (expected.empty() ? "" : ",") + n;
    throw FormatError("policy columns must be t," + expected);
  }
  InputSequence u(t.length(), Vector(t.width()));
  for (std::size_t k = 0; k < t.length(); ++k) {
    for (std::size_t j = 0; j < t.width(); ++j) u[k][j] = t.at(k, j);
  }
  return u;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write '" + path.string() + "'");
  out << content;
}

json result_json(const ProblemConfig& cfg, const SynthesisResult& r, std::uint64_t seed) {
  return {{"spec", cfg.spec_text},
          {"semantics", semantics_json(cfg.problem.semantics)},
          {"seed", seed},
          {"feasible", r.feasible},
          {"score", number(r.score)},
          {"robustness", number(r.robustness)},
          {"iterations", r.iterations},
          {"restarts_used", r.restarts_used},
          {"infeasible_evaluations", r.infeasible_evaluations},
          {"u_star", r.u_star}};
}

// --- monitor ----------------------------------------------------------------

struct MonitorArgs {
  std::string trace;
  std::string formula;
  std::string semantics = "agm";
  double beta = 10.0;
  std::string scale = "half";
  std::size_t at = 0;
  double rho_top = std::numeric_limits<double>::infinity();
  std::string config;
  bool physical = false;
};

int run_monitor(const MonitorArgs& a) {
  Trace trace = load_trace(a.trace);
  AtomTable atoms;
  if (!a.config.empty()) {
    // Regions come pre-expanded through parse_problem; rebuild the atom table.
    const auto cfg = load_problem(resolve_config(a.config));
    const auto ranges = cfg.problem.model.normalization();
    for (const auto& reg : cfg.regions) {
      std::vector<AxisInterval> axes;
      for (const auto& ax : reg.axes) {
        const Range& r = ranges.at(ax.channel);
        axes.push_back({ax.channel, r.to_normalized(ax.lo), r.to_normalized(ax.hi)});
      }
      atoms.emplace(reg.name, box_region(axes));
    }
    if (a.physical) trace = normalize(trace, ranges);
  } else if (a.physical) {
    throw FormatError("--physical needs --config for the channel ranges");
  }
  Semantics sem = semantics_from(a.semantics, a.beta, a.scale);
  sem.top.rho_top = a.rho_top;
  const Formula phi = parse(a.formula, atoms);
  const Verdict v = evaluate(phi, trace, a.at, sem);
  json out = {{"score", number(v.score)},
              {"status", to_string(v.status)},
              {"semantics", semantics_json(sem)},
              {"t", a.at}};
  std::cout << out.dump(2) << '\n';
  switch (v.status) {
    case Status::Sat: return 0;
    case Status::Violated: return 1;
    case Status::Inconclusive: return 2;
  }
  return kExitError;
}

// --- synth ------------------------------------------------------------------

struct SynthArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string semantics;
  std::optional<double> beta;
  std::string out_dir = ".";
};

void apply_overrides(ProblemConfig& cfg, const std::string& semantics, std::optional<double> beta,
                     std::optional<std::uint64_t> seed) {
  if (!semantics.empty()) {
    const auto scale = cfg.problem.semantics.scale == PredicateScale::Half ? "half" : "unit";
    cfg.problem.semantics =
        semantics_from(semantics, beta.value_or(cfg.problem.semantics.smooth.beta), scale);
  } else if (beta) {
    cfg.problem.semantics.smooth.beta = *beta;
    cfg.problem.semantics.smooth.validate();
  }
  if (seed) cfg.optimizer.seed = *seed;
  cfg.problem.validate();
}

int run_synth(const SynthArgs& a) {
  ProblemConfig cfg = load_problem(resolve_config(a.config));
  apply_overrides(cfg, a.semantics, a.beta, a.seed);
  const SynthesisResult r = gradient_ascent(cfg.problem, cfg.optimizer);

  const fs::path dir(a.out_dir);
  fs::create_directories(dir);
  const json result = result_json(cfg, r, cfg.optimizer.seed);
  write_file(dir / "result.json", result.dump(2) + "\n");
  save_trace(dir / "trajectory.csv", trajectory_table(cfg.problem.model, r.trajectory));
  save_trace(dir / "policy.csv", inputs_as_trace(cfg.problem.model, r.u_star));

  std::string history = "iteration,best_score\n";
  for (std::size_t i = 0; i < r.score_history.size(); ++i) {
    history += std::to_string(i) + "," + Formula::format_number(r.score_history[i]) + "\n";
  }
  write_file(dir / "history.csv", history);

  std::string regions = "region,channel,min,max\n";
  for (const auto& reg : cfg.regions) {
    for (const auto& ax : reg.axes) {
      regions += reg.name + "," + ax.channel + "," + Formula::format_number(ax.lo) + "," +
                 Formula::format_number(ax.hi) + "\n";
    }
  }
  write_file(dir / "regions.csv", regions);

  std::cout << result.dump(2) << '\n';
  return r.feasible ? 0 : 1;
}

// --- disturb ----------------------------------------------------------------

struct DisturbArgs {
  std::string config;
  std::string policy;
  std::vector<double> sigmas;
  std::optional<int> runs;
  std::optional<std::uint64_t> seed;
  std::string out;
};

int run_disturb(const DisturbArgs& a) {
  ProblemConfig cfg = load_problem(resolve_config(a.config));
  const InputSequence u = trace_as_inputs(cfg.problem.model, load_trace(a.policy));
  if (!a.sigmas.empty()) cfg.sigmas = a.sigmas;
  if (a.runs) cfg.n_runs = *a.runs;
  if (a.seed) cfg.disturbance_seed = *a.seed;

  std::vector<FailureReport> reports;
  json summary = json::array();
  for (double s : cfg.sigmas) {
    reports.push_back(failure_rate(cfg.problem, u, cfg.disturbance(s)));
    summary.push_back({{"sigma", s}, {"rate", reports.back().rate}});
  }
  if (a.out.empty()) {
    write_failure_csv(std::cout, reports);
  } else {
    std::ofstream out(a.out);
    if (!out) throw FormatError("cannot write '" + a.out + "'");
    write_failure_csv(out, reports);
    std::cout << summary.dump(2) << '\n';
  }
  std::cerr << summary.dump() << '\n';
  return 0;
}

// --- compare ----------------------------------------------------------------

struct CompareArgs {
  std::string config;
  std::string policy;
  std::optional<std::uint64_t> seed;
  std::vector<double> betas{1.0, 10.0, 100.0};
};

int run_compare(const CompareArgs& a) {
  ProblemConfig cfg = load_problem(resolve_config(a.config));
  if (a.seed) cfg.optimizer.seed = *a.seed;
  InputSequence u;
  if (!a.policy.empty()) {
    u = trace_as_inputs(cfg.problem.model, load_trace(a.policy));
  } else {
    u = gradient_ascent(cfg.problem, cfg.optimizer).u_star;
  }
  const auto q = simulate(cfg.problem.model, u);
  const Trace trace = to_trace(cfg.problem.model, q);
  const double rho = traditional(cfg.problem.spec, trace).score;
  json smooth_scores = json::array();
  for (double beta : a.betas) {
    const double r = smooth(cfg.problem.spec, trace, 0, {beta}).score;
    smooth_scores.push_back(
        {{"beta", beta}, {"score", number(r)}, {"abs_error", number(std::abs(r - rho))}});
  }
  json out = {{"spec", cfg.spec_text},
              {"traditional", number(rho)},
              {"agm", number(agm(cfg.problem.spec, trace, 0, cfg.problem.semantics.scale).score)},
              {"smooth", smooth_scores}};
  std::cout << out.dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Signal temporal logic robustness: monitoring and control synthesis"};
  app.require_subcommand(1);

  MonitorArgs mon;
  auto* monitor = app.add_subcommand("monitor", "Score a trace against a formula");
  monitor->add_option("trace", mon.trace, "Trace CSV (t,<channels>...)")->required();
  monitor->add_option("formula", mon.formula, "Formula text")->required();
  monitor->add_option("--semantics", mon.semantics, "agm | traditional | smooth")
      ->check(CLI::IsMember({"agm", "traditional", "smooth"}));
  monitor->add_option("--beta", mon.beta, "Smooth semantics sharpness");
  monitor->add_option("--scale", mon.scale, "AGM predicate scale: half | unit")
      ->check(CLI::IsMember({"half", "unit"}));
  monitor->add_option("--at", mon.at, "Evaluation time step");
  monitor->add_option("--rho-top", mon.rho_top, "Score of 'true' (traditional/smooth)");
  monitor->add_option("--config", mon.config, "Problem config providing region atoms");
  monitor->add_flag("--physical", mon.physical, "Trace is in physical units; normalize it");

  SynthArgs syn;
  auto* synth = app.add_subcommand("synth", "Synthesize inputs by gradient ascent");
  synth->add_option("config", syn.config, "Problem config JSON")->required();
  synth->add_option("--seed", syn.seed, "Optimizer seed");
  synth->add_option("--semantics", syn.semantics, "Override the objective semantics")
      ->check(CLI::IsMember({"agm", "traditional", "smooth"}));
  synth->add_option("--beta", syn.beta, "Smooth semantics sharpness");
  synth->add_option("--out", syn.out_dir, "Output directory");

  DisturbArgs dis;
  auto* disturb = app.add_subcommand("disturb", "Monte-Carlo failure rate under input noise");
  disturb->add_option("config", dis.config, "Problem config JSON")->required();
  disturb->add_option("policy", dis.policy, "Policy CSV written by synth")->required();
  disturb->add_option("--sigma", dis.sigmas, "Noise standard deviation (repeatable)");
  disturb->add_option("--runs", dis.runs, "Runs per sigma");
  disturb->add_option("--seed", dis.seed, "Noise seed");
  disturb->add_option("--out", dis.out, "Write the results table here instead of stdout");

  CompareArgs cmp;
  auto* compare = app.add_subcommand("compare", "Score one trajectory under all semantics");
  compare->add_option("config", cmp.config, "Problem config JSON")->required();
  compare->add_option("--policy", cmp.policy, "Policy CSV; synthesized when omitted");
  compare->add_option("--seed", cmp.seed, "Optimizer seed when synthesizing");
  compare->add_option("--beta", cmp.betas, "Smooth sharpness values (repeatable)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitError;
  }

  try {
    if (*monitor) return run_monitor(mon);
    if (*synth) return run_synth(syn);
    if (*disturb) return run_disturb(dis);
    if (*compare) return run_compare(cmp);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}
