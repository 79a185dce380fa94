#include "alba/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace alba {

namespace {

using json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ValidationError(path + ": " + what);
}

void reject_unknown(const json& obj, const std::string& path,
                    std::initializer_list<const char*> known) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* k : known)
      if (it.key() == k) ok = true;
    if (!ok) fail(path + "." + it.key(), "unknown key");
  }
}

const json& require(const json& obj, const std::string& path,
                    const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) fail(path + "." + key, "missing required key");
  return *it;
}

double get_number(const json& obj, const std::string& path, const char* key) {
  const json& v = require(obj, path, key);
  if (!v.is_number()) fail(path + "." + key, "must be a number");
  return v.get<double>();
}

double opt_number(const json& obj, const std::string& path, const char* key,
                  double fallback) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_number()) fail(path + "." + key, "must be a number");
  return it->get<double>();
}

std::int64_t get_int(const json& obj, const std::string& path,
                     const char* key) {
  const json& v = require(obj, path, key);
  if (!v.is_number_integer()) fail(path + "." + key, "must be an integer");
  return v.get<std::int64_t>();
}

std::int64_t opt_int(const json& obj, const std::string& path, const char* key,
                     std::int64_t fallback) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_number_integer()) fail(path + "." + key, "must be an integer");
  return it->get<std::int64_t>();
}

Params parse_params(const json& j) {
  if (!j.is_object()) fail("params", "must be an object");
  reject_unknown(j, "params",
                 {"lambda", "alpha", "beta", "gamma", "d", "dispatch", "buffer"});
  const json& dv = require(j, "params", "dispatch");
  if (!dv.is_string() || (dv != "pod" && dv != "jbt"))
    fail("params.dispatch", "must be \"pod\" or \"jbt\"");
  const Dispatch dispatch =
      dv == "pod" ? Dispatch::PowerOfD : Dispatch::JBT;
  int buffer;
  const json& bv = require(j, "params", "buffer");
  if (bv.is_string()) {
    if (bv != "inf") fail("params.buffer", "must be an integer or \"inf\"");
    buffer = kInfiniteBuffer;
  } else if (bv.is_number_integer()) {
    buffer = bv.get<int>();
  } else {
    fail("params.buffer", "must be an integer or \"inf\"");
  }
  return Params(get_number(j, "params", "lambda"),
                get_number(j, "params", "alpha"),
                get_number(j, "params", "beta"),
                get_number(j, "params", "gamma"),
                static_cast<int>(get_int(j, "params", "d")), buffer, dispatch);
}

RuleSpec parse_rule(const json& j, const Params& p) {
  if (!j.is_object()) fail("rule", "must be an object");
  const json& tv = require(j, "rule", "type");
  if (!tv.is_string()) fail("rule.type", "must be a string");
  const std::string type = tv.get<std::string>();
  RuleSpec spec;
  if (type == "blind") {
    reject_unknown(j, "rule", {"type", "theta"});
    spec.type = RuleSpec::Type::Blind;
    spec.theta = get_number(j, "rule", "theta");
  } else if (type == "rate_idle") {
    reject_unknown(j, "rule", {"type"});
    spec.type = RuleSpec::Type::RateIdle;
  } else if (type == "eta") {
    reject_unknown(j, "rule", {"type", "eta"});
    spec.type = RuleSpec::Type::Eta;
    spec.eta = get_number(j, "rule", "eta");
  } else if (type == "prop4") {
    reject_unknown(j, "rule", {"type"});
    spec.type = RuleSpec::Type::Prop4;
  } else if (type == "cold_surplus") {
    reject_unknown(j, "rule", {"type"});
    spec.type = RuleSpec::Type::ColdSurplus;
  } else if (type == "expr") {
    reject_unknown(j, "rule", {"type", "expr"});
    spec.type = RuleSpec::Type::Expr;
    const json& ev = require(j, "rule", "expr");
    if (!ev.is_string()) fail("rule.expr", "must be a string");
    spec.expr = ev.get<std::string>();
  } else {
    fail("rule.type",
         "must be one of blind, rate_idle, eta, prop4, cold_surplus, expr");
  }
  // Construct once now so range errors surface at load time.
  RunConfig probe{p, spec, SimConfig{}, IntegratorConfig{}, InitialSpec{}};
  (void)probe.make_rule();
  return spec;
}

SimConfig parse_sim(const json& j) {
  if (!j.is_object()) fail("sim", "must be an object");
  reject_unknown(
      j, "sim",
      {"N", "seed", "horizon", "sample_dt", "replications", "max_events"});
  SimConfig cfg;
  cfg.N = get_int(j, "sim", "N");
  cfg.seed = static_cast<std::uint64_t>(opt_int(j, "sim", "seed", 0));
  cfg.horizon = get_number(j, "sim", "horizon");
  cfg.sample_dt = opt_number(j, "sim", "sample_dt", 1.0);
  cfg.replications = static_cast<int>(opt_int(j, "sim", "replications", 1));
  cfg.max_events =
      static_cast<std::uint64_t>(opt_int(j, "sim", "max_events", 0));
  cfg.validate();
  return cfg;
}

IntegratorConfig parse_fluid(const json& j) {
  if (!j.is_object()) fail("fluid", "must be an object");
  reject_unknown(j, "fluid", {"step", "horizon", "record_dt", "method"});
  IntegratorConfig cfg;
  cfg.step = opt_number(j, "fluid", "step", 1e-3);
  cfg.horizon = get_number(j, "fluid", "horizon");
  cfg.record_dt = opt_number(j, "fluid", "record_dt", 1.0);
  auto it = j.find("method");
  if (it != j.end()) {
    if (!it->is_string() || (*it != "euler" && *it != "rk4"))
      fail("fluid.method", "must be \"euler\" or \"rk4\"");
    cfg.method = *it == "euler" ? IntegrationMethod::Euler
                                : IntegrationMethod::Rk4FrozenRegime;
  }
  cfg.validate();
  return cfg;
}

InitialSpec parse_initial(const json& j) {
  if (!j.is_object()) fail("initial", "must be an object");
  InitialSpec spec;
  if (j.contains("preset")) {
    reject_unknown(j, "initial", {"preset"});
    const json& pv = j["preset"];
    if (pv == "minimal_dimensioning")
      spec.preset = InitialSpec::Preset::MinimalDimensioning;
    else if (pv == "all_cold")
      spec.preset = InitialSpec::Preset::AllCold;
    else if (pv == "optimal")
      spec.preset = InitialSpec::Preset::Optimal;
    else
      fail("initial.preset",
           "must be one of minimal_dimensioning, all_cold, optimal");
    return spec;
  }
  reject_unknown(j, "initial", {"x00", "x01", "x2"});
  spec.x00 = get_number(j, "initial", "x00");
  spec.x01 = opt_number(j, "initial", "x01", 0.0);
  const json& xv = require(j, "initial", "x2");
  if (!xv.is_array() || xv.empty()) fail("initial.x2", "must be a non-empty array");
  for (const json& v : xv) {
    if (!v.is_number()) fail("initial.x2", "entries must be numbers");
    spec.x2.push_back(v.get<double>());
  }
  return spec;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("config: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) fail("config", "top level must be an object");
  reject_unknown(j, "config", {"params", "rule", "sim", "fluid", "initial"});
  const Params params = parse_params(require(j, "config", "params"));
  RunConfig cfg{params,
                parse_rule(require(j, "config", "rule"), params),
                parse_sim(require(j, "config", "sim")),
                parse_fluid(require(j, "config", "fluid")),
                parse_initial(require(j, "config", "initial"))};
  (void)cfg.initial_fluid();  // validate coordinates at load time
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw ValidationError("config: cannot open file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

ScalingRule RunConfig::make_rule() const {
  switch (rule.type) {
    case RuleSpec::Type::Blind: return blind(rule.theta);
    case RuleSpec::Type::RateIdle: return rate_idle(params);
    case RuleSpec::Type::Eta: return eta_rule(rule.eta, params);
    case RuleSpec::Type::Prop4: return prop4_rule(params);
    case RuleSpec::Type::ColdSurplus: return cold_surplus_rule(params);
    case RuleSpec::Type::Expr: return expr_rule(rule.expr, params);
  }
  throw ValidationError("rule.type: unrecognized");
}

FluidState RunConfig::initial_fluid() const {
  const int top = params.infinite_buffer() ? std::max(64, params.d + 32)
                                           : params.buffer;
  if (initial.preset) {
    switch (*initial.preset) {
      case InitialSpec::Preset::MinimalDimensioning:
        return FluidState::minimal_dimensioning(params.lambda, top);
      case InitialSpec::Preset::AllCold: return FluidState::all_cold(top);
      case InitialSpec::Preset::Optimal:
        return FluidState::optimal(params.lambda, top);
    }
  }
  std::vector<double> warm = initial.x2;
  if (static_cast<int>(warm.size()) < top + 1) warm.resize(top + 1, 0.0);
  return FluidState(initial.x00, initial.x01, std::move(warm));
}

CountState RunConfig::initial_counts() const {
  return CountState::from_fractions(initial_fluid(), sim.N);
}

std::string serialize_config(const RunConfig& cfg) {
  json j;
  json& p = j["params"];
  p["lambda"] = cfg.params.lambda;
  p["alpha"] = cfg.params.alpha;
  p["beta"] = cfg.params.beta;
  p["gamma"] = cfg.params.gamma;
  p["d"] = cfg.params.d;
  p["dispatch"] = to_string(cfg.params.dispatch);
  if (cfg.params.infinite_buffer())
    p["buffer"] = "inf";
  else
    p["buffer"] = cfg.params.buffer;

  json& r = j["rule"];
  switch (cfg.rule.type) {
    case RuleSpec::Type::Blind:
      r["type"] = "blind";
      r["theta"] = cfg.rule.theta;
      break;
    case RuleSpec::Type::RateIdle: r["type"] = "rate_idle"; break;
    case RuleSpec::Type::Eta:
      r["type"] = "eta";
      r["eta"] = cfg.rule.eta;
      break;
    case RuleSpec::Type::Prop4: r["type"] = "prop4"; break;
    case RuleSpec::Type::ColdSurplus: r["type"] = "cold_surplus"; break;
    case RuleSpec::Type::Expr:
      r["type"] = "expr";
      r["expr"] = cfg.rule.expr;
      break;
  }

  json& s = j["sim"];
  s["N"] = cfg.sim.N;
  s["seed"] = cfg.sim.seed;
  s["horizon"] = cfg.sim.horizon;
  s["sample_dt"] = cfg.sim.sample_dt;
  s["replications"] = cfg.sim.replications;
  s["max_events"] = cfg.sim.max_events;

  json& f = j["fluid"];
  f["step"] = cfg.fluid.step;
  f["horizon"] = cfg.fluid.horizon;
  f["record_dt"] = cfg.fluid.record_dt;
  f["method"] =
      cfg.fluid.method == IntegrationMethod::Euler ? "euler" : "rk4";

  json& i = j["initial"];
  if (cfg.initial.preset) {
    switch (*cfg.initial.preset) {
      case InitialSpec::Preset::MinimalDimensioning:
        i["preset"] = "minimal_dimensioning";
        break;
      case InitialSpec::Preset::AllCold: i["preset"] = "all_cold"; break;
      case InitialSpec::Preset::Optimal: i["preset"] = "optimal"; break;
    }
  } else {
    i["x00"] = cfg.initial.x00;
    i["x01"] = cfg.initial.x01;
    i["x2"] = cfg.initial.x2;
  }
  return j.dump(2) + "\n";
}

bool operator==(const RunConfig& a, const RunConfig& b) {
  return a.params == b.params && a.rule == b.rule && a.sim == b.sim &&
         a.fluid == b.fluid && a.initial == b.initial;
}

}  // namespace alba
