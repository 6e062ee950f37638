#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stlrob/error.hpp"
#include "stlrob/signal.hpp"

namespace stlrob {

using Vector = std::vector<double>;
using InputSequence = std::vector<Vector>;
using StateTrajectory = std::vector<Vector>;

/// Axis-aligned box, one closed interval per dimension.
struct Box {
  std::vector<Range> bounds;

  std::size_t dim() const noexcept { return bounds.size(); }

  /// Index of the first coordinate outside the box, if any.
  std::optional<std::size_t> first_violation(const Vector& v) const {
    for (std::size_t i = 0; i < bounds.size(); ++i) {
      if (!(v[i] >= bounds[i].min && v[i] <= bounds[i].max)) return i;
    }
    return std::nullopt;
  }

  bool contains(const Vector& v) const {
    return v.size() == dim() && !first_violation(v).has_value();
  }

  Vector project(Vector v) const {
    for (std::size_t i = 0; i < bounds.size(); ++i) {
      v[i] = std::clamp(v[i], bounds[i].min, bounds[i].max);
    }
    return v;
  }

  void validate(const char* what) const {
    for (const auto& r : bounds) {
      if (!(r.max > r.min)) throw DomainError(std::string(what) + " has an empty interval");
    }
  }
};

/// A trace channel that reads one state component.
struct OutputChannel {
  std::string name;
  std::size_t state_index = 0;
};

using StepFunction = std::function<Vector(const Vector& q, const Vector& u)>;

/// Deterministic discrete-time system q[k+1] = f(q[k], u[k]) with box
/// constraints on state and input.
struct SystemModel {
  std::string name;
  StepFunction step;
  std::size_t state_dim = 0;
  std::size_t input_dim = 0;
  Box state_box;
  Box input_box;
  Vector q0;
  std::vector<OutputChannel> outputs;
  std::vector<std::string> input_names;

  void validate() const {
    if (!step) throw DomainError("model '" + name + "' has no step function");
    if (state_box.dim() != state_dim) throw DomainError("state box dimension mismatch");
    if (input_box.dim() != input_dim) throw DomainError("input box dimension mismatch");
    if (q0.size() != state_dim) throw DomainError("initial state dimension mismatch");
    state_box.validate("state box");
    input_box.validate("input box");
    if (!state_box.contains(q0)) throw DomainError("initial state lies outside the state box");
    if (outputs.empty()) throw DomainError("output map is empty");
    for (std::size_t i = 0; i < outputs.size(); ++i) {
      if (outputs[i].state_index >= state_dim) {
        throw DomainError("output '" + outputs[i].name + "' reads a nonexistent state");
      }
      for (std::size_t j = 0; j < i; ++j) {
        if (outputs[i].name == outputs[j].name) {
          throw DomainError("duplicate output channel '" + outputs[i].name + "'");
        }
      }
    }
  }

  /// Ranges used to normalize each output channel: the state box of the
  /// component it reads.
  NormalizationMap normalization() const {
    NormalizationMap m;
    for (const auto& o : outputs) m[o.name] = state_box.bounds.at(o.state_index);
    return m;
  }
};

namespace models {

struct Dynamics {
  std::size_t state_dim;
  std::size_t input_dim;
  std::vector<std::string> input_names;
  StepFunction step;
};

/// x' = x + cos θ v, y' = y + sin θ v, θ' = θ + w.   q = [x, y, θ], u = [v, w]
inline Dynamics unicycle() {
  return {3, 2, {"v", "w"}, [](const Vector& q, const Vector& u) {
            return Vector{q[0] + std::cos(q[2]) * u[0], q[1] + std::sin(q[2]) * u[0],
                          q[2] + u[1]};
          }};
}

/// Unicycle whose turn rate scales with speed: θ' = θ + v w.
inline Dynamics curvature_unicycle() {
  return {3, 2, {"v", "w"}, [](const Vector& q, const Vector& u) {
            return Vector{q[0] + std::cos(q[2]) * u[0], q[1] + std::sin(q[2]) * u[0],
                          q[2] + u[0] * u[1]};
          }};
}

/// Planar double integrator. q = [x, y, vx, vy], u = [ux, uy].
inline Dynamics double_integrator() {
  return {4, 2, {"ux", "uy"}, [](const Vector& q, const Vector& u) {
            return Vector{q[0] + q[2], q[1] + q[3], q[2] + u[0], q[3] + u[1]};
          }};
}

/// x' = x + ux, y' = y + uy.
inline Dynamics planar_integrator() {
  return {2, 2, {"ux", "uy"}, [](const Vector& q, const Vector& u) {
            return Vector{q[0] + u[0], q[1] + u[1]};
          }};
}

inline Dynamics by_name(std::string_view name) {
  if (name == "unicycle") return unicycle();
  if (name == "curvature_unicycle") return curvature_unicycle();
  if (name == "double_integrator") return double_integrator();
  if (name == "planar_integrator") return planar_integrator();
  throw DomainError("unknown model '" + std::string(name) + "'");
}

}  // namespace models

/// Instantiates one of the built-in dynamics with its constraints.
inline SystemModel make_model(std::string_view name, Vector q0, Box state_box, Box input_box,
                              std::vector<OutputChannel> outputs) {
  auto dyn = models::by_name(name);
  SystemModel m{std::string(name),  std::move(dyn.step),     dyn.state_dim,
                dyn.input_dim,      std::move(state_box),    std::move(input_box),
                std::move(q0),      std::move(outputs),      std::move(dyn.input_names)};
  m.validate();
  return m;
}

/// Rolls the dynamics forward from q0. Returns T+1 states for T inputs, in
/// physical units. The state box is not enforced here; see to_trace.
inline StateTrajectory simulate(const SystemModel& model, const InputSequence& u) {
  StateTrajectory q;
  q.reserve(u.size() + 1);
  q.push_back(model.q0);
  for (std::size_t k = 0; k < u.size(); ++k) {
    if (u[k].size() != model.input_dim) {
      throw DomainError("input " + std::to_string(k) + " has dimension " +
                        std::to_string(u[k].size()) + ", expected " +
                        std::to_string(model.input_dim));
    }
    if (auto bad = model.input_box.first_violation(u[k])) {
      throw DomainError("input " + std::to_string(k) + " component " + std::to_string(*bad) +
                        " = " + Formula::format_number(u[k][*bad]) + " outside the input box");
    }
    q.push_back(model.step(q.back(), u[k]));
  }
  return q;
}

/// First (step, component) at which the trajectory leaves the state box.
inline std::optional<std::pair<std::size_t, std::size_t>> first_state_violation(
    const SystemModel& model, const StateTrajectory& q) {
  for (std::size_t k = 0; k < q.size(); ++k) {
    if (auto bad = model.state_box.first_violation(q[k])) return std::pair{k, *bad};
  }
  return std::nullopt;
}

/// Projects the trajectory through the output map and normalizes every
/// channel to [-1,1]. Leaving the state box is an error.
inline Trace to_trace(const SystemModel& model, const StateTrajectory& q) {
  if (auto bad = first_state_violation(model, q)) {
    throw DomainError("state component " + std::to_string(bad->second) + " at step " +
                      std::to_string(bad->first) + " = " +
                      Formula::format_number(q[bad->first][bad->second]) +
                      " outside the state box");
  }
  std::vector<std::string> names;
  for (const auto& o : model.outputs) names.push_back(o.name);
  std::vector<double> raw;
  raw.reserve(q.size() * names.size());
  for (const auto& state : q) {
    for (const auto& o : model.outputs) raw.push_back(state[o.state_index]);
  }
  return normalize(Trace(std::move(names), std::move(raw)), model.normalization());
}

/// Full trajectory in physical units with every state component as a channel
/// (named after the output map where one exists).
inline Trace trajectory_table(const SystemModel& model, const StateTrajectory& q) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < model.state_dim; ++i) {
    std::string n = "q" + std::to_string(i);
    for (const auto& o : model.outputs) {
      if (o.state_index == i) n = o.name;
    }
    names.push_back(n);
  }
  std::vector<double> raw;
  for (const auto& state : q) raw.insert(raw.end(), state.begin(), state.end());
  return Trace(std::move(names), std::move(raw));
}

}  // namespace stlrob
