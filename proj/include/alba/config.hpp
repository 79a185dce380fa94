#pragma once

#include <optional>
#include <string>
#include <variant>

#include "alba/ctmc.hpp"
#include "alba/experiments.hpp"
#include "alba/fluid.hpp"
#include "alba/scaling.hpp"

namespace alba {

struct RuleSpec {
  enum class Type { Blind, RateIdle, Eta, Prop4, ColdSurplus, Expr };
  Type type = Type::RateIdle;
  double theta = 0.0;  // Blind
  double eta = 0.0;    // Eta
  std::string expr;    // Expr

  bool operator==(const RuleSpec&) const = default;
};

struct InitialSpec {
  enum class Preset { MinimalDimensioning, AllCold, Optimal };
  /// Either a named preset or explicit coordinates.
  std::optional<Preset> preset;
  double x00 = 0.0;
  double x01 = 0.0;
  std::vector<double> x2;

  bool operator==(const InitialSpec&) const = default;
};

/// A fully validated run description, parsed from the strict JSON schema
/// (unknown keys rejected, invariants checked at load time).
struct RunConfig {
  Params params;
  RuleSpec rule;
  SimConfig sim;
  IntegratorConfig fluid;
  InitialSpec initial;

  ScalingRule make_rule() const;
  /// Initial fluid state on the params' truncation.
  FluidState initial_fluid() const;
  CountState initial_counts() const;
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
std::string serialize_config(const RunConfig& cfg);

bool operator==(const RunConfig& a, const RunConfig& b);

}  // namespace alba
