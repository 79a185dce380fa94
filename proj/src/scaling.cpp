#include "alba/scaling.hpp"

#include "alba/dispatch.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <random>
#include <set>
#include <sstream>

namespace alba {

namespace {

/// Every rule must be strictly positive where all servers are cold.
void check_all_cold_positive(const std::string& name,
                             const std::function<double(const FluidState&)>& fn) {
  const FluidState cold = FluidState::all_cold(4);
  if (!(fn(cold) > 0.0))
    throw ValidationError("rule '" + name +
                          "': must be > 0 at the all-cold state");
}

}  // namespace

ScalingRule::ScalingRule(std::string name,
                         std::vector<std::string> declared_inputs,
                         std::function<double(const FluidState&)> fn)
    : name_(std::move(name)),
      inputs_(std::move(declared_inputs)),
      fn_(std::move(fn)) {
  check_all_cold_positive(name_, fn_);
}

ScalingRule blind(double theta) {
  if (!(theta > 0.0 && theta <= 1.0))
    throw ValidationError("blind: theta must lie in (0,1]");
  std::ostringstream name;
  name << "blind-" << theta;
  return ScalingRule(name.str(), {},
                     [theta](const FluidState&) { return theta; });
}

ScalingRule rate_idle(const Params& p) {
  const double lambda = p.lambda;
  const double beta = p.beta;
  return ScalingRule("rate-idle", {"x01", "x12"},
                     [lambda, beta](const FluidState& x) {
                       return std::max(lambda - beta * x.x01() - x.warm(1), 0.0) /
                              lambda;
                     });
}

ScalingRule eta_rule(double eta, const Params& p) {
  if (!(eta > 0.0)) throw ValidationError("eta_rule: eta must be > 0");
  const double lambda = p.lambda;
  const double beta = p.beta;
  std::ostringstream name;
  name << "eta-" << eta;
  // expm1 keeps the eta -> 0 limit (rate_idle) numerically exact.
  return ScalingRule(name.str(), {"x01", "x12"},
                     [eta, lambda, beta](const FluidState& x) {
                       const double deficit =
                           std::max(lambda - x.warm(1) - beta * x.x01(), 0.0);
                       return std::expm1(-eta / lambda * deficit) /
                              std::expm1(-eta);
                     });
}

ScalingRule prop4_rule(const Params& p) {
  const double lambda = p.lambda;
  return ScalingRule("prop4", {"x00"}, [lambda](const FluidState& x) {
    return std::max(x.x00() - 1.0 + lambda, 0.0) / lambda;
  });
}

ScalingRule cold_surplus_rule(const Params& p) {
  const double lambda = p.lambda;
  return ScalingRule("cold-surplus", {"x00"}, [lambda](const FluidState& x) {
    return std::max(x.x00() - 1.0 + lambda, 0.0);
  });
}

// ---------------------------------------------------------------------------
// Expression rules
//
// expr   := term (('+' | '-') term)*
// term   := unary (('*' | '/') unary)*
// unary  := '-' unary | primary
// primary:= number | ident | func '(' expr [',' expr] ')' | '(' expr ')'
// ident  := x00 | x01 | x02 | x12 | y0 | y1 | lambda | beta
// func   := exp | pos | min | max

namespace {

struct ExprNode;
using NodePtr = std::unique_ptr<ExprNode>;

enum class Op { Const, Var, Neg, Add, Sub, Mul, Div, Exp, Pos, Min, Max };

struct ExprNode {
  Op op;
  double value = 0.0;  // Const
  int var = 0;         // Var index
  NodePtr a, b;
};

enum VarIndex { kX00, kX01, kX02, kX12, kY0, kY1, kLambda, kBeta };

const char* kVarNames[] = {"x00", "x01", "x02", "x12",
                           "y0",  "y1",  "lambda", "beta"};

double eval_node(const ExprNode& n, const FluidState& x, double lambda,
                 double beta) {
  switch (n.op) {
    case Op::Const: return n.value;
    case Op::Var:
      switch (n.var) {
        case kX00: return x.x00();
        case kX01: return x.x01();
        case kX02: return x.warm(0);
        case kX12: return x.warm(1);
        case kY0: return x.y0();
        case kY1: return x.y1();
        case kLambda: return lambda;
        default: return beta;
      }
    case Op::Neg: return -eval_node(*n.a, x, lambda, beta);
    case Op::Add:
      return eval_node(*n.a, x, lambda, beta) + eval_node(*n.b, x, lambda, beta);
    case Op::Sub:
      return eval_node(*n.a, x, lambda, beta) - eval_node(*n.b, x, lambda, beta);
    case Op::Mul:
      return eval_node(*n.a, x, lambda, beta) * eval_node(*n.b, x, lambda, beta);
    case Op::Div:
      return eval_node(*n.a, x, lambda, beta) / eval_node(*n.b, x, lambda, beta);
    case Op::Exp: return std::exp(eval_node(*n.a, x, lambda, beta));
    case Op::Pos: return std::max(eval_node(*n.a, x, lambda, beta), 0.0);
    case Op::Min:
      return std::min(eval_node(*n.a, x, lambda, beta),
                      eval_node(*n.b, x, lambda, beta));
    default:
      return std::max(eval_node(*n.a, x, lambda, beta),
                      eval_node(*n.b, x, lambda, beta));
  }
}

class ExprParser {
 public:
  ExprParser(const std::string& text, std::set<std::string>& inputs)
      : text_(text), inputs_(inputs) {}

  NodePtr parse() {
    NodePtr e = expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) {
    throw ValidationError("rule.expr: " + what + " at offset " +
                          std::to_string(pos_));
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
  }

  bool eat(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (eat('+')) lhs = binary(Op::Add, std::move(lhs), term());
      else if (eat('-')) lhs = binary(Op::Sub, std::move(lhs), term());
      else return lhs;
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      if (eat('*')) lhs = binary(Op::Mul, std::move(lhs), unary());
      else if (eat('/')) lhs = binary(Op::Div, std::move(lhs), unary());
      else return lhs;
    }
  }

  NodePtr unary() {
    if (eat('-')) {
      auto n = std::make_unique<ExprNode>();
      n->op = Op::Neg;
      n->a = unary();
      return n;
    }
    return primary();
  }

  NodePtr primary() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of expression");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr e = expr();
      if (!eat(')')) fail("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return ident_or_call();
    fail(std::string("unexpected character '") + c + "'");
  }

  NodePtr number() {
    std::size_t used = 0;
    double v;
    try {
      v = std::stod(text_.substr(pos_), &used);
    } catch (const std::exception&) {
      fail("malformed number");
    }
    pos_ += used;
    auto n = std::make_unique<ExprNode>();
    n->op = Op::Const;
    n->value = v;
    return n;
  }

  NodePtr ident_or_call() {
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    const std::string word = text_.substr(start, pos_ - start);
    if (word == "exp" || word == "pos" || word == "min" || word == "max") {
      if (!eat('(')) fail("expected '(' after " + word);
      auto n = std::make_unique<ExprNode>();
      n->a = expr();
      if (word == "min" || word == "max") {
        if (!eat(',')) fail(word + " takes two arguments");
        n->b = expr();
        n->op = word == "min" ? Op::Min : Op::Max;
      } else {
        n->op = word == "exp" ? Op::Exp : Op::Pos;
      }
      if (!eat(')')) fail("expected ')'");
      return n;
    }
    for (int i = 0; i < 8; ++i) {
      if (word == kVarNames[i]) {
        inputs_.insert(word);
        auto n = std::make_unique<ExprNode>();
        n->op = Op::Var;
        n->var = i;
        return n;
      }
    }
    fail("unknown identifier '" + word + "'");
  }

  NodePtr binary(Op op, NodePtr a, NodePtr b) {
    auto n = std::make_unique<ExprNode>();
    n->op = op;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
  }

  const std::string& text_;
  std::set<std::string>& inputs_;
  std::size_t pos_ = 0;
};

}  // namespace

ScalingRule expr_rule(const std::string& expression, const Params& p) {
  std::set<std::string> inputs;
  ExprParser parser(expression, inputs);
  std::shared_ptr<ExprNode> root{parser.parse().release()};
  const double lambda = p.lambda;
  const double beta = p.beta;
  auto fn = [root, lambda, beta](const FluidState& x) {
    const double v = eval_node(*root, x, lambda, beta);
    if (std::isnan(v))
      throw NumericalError("expr rule evaluated to NaN");
    return std::clamp(v, 0.0, 1.0);
  };
  return ScalingRule("expr[" + expression + "]",
                     std::vector<std::string>(inputs.begin(), inputs.end()),
                     std::move(fn));
}

// ---------------------------------------------------------------------------
// Empirical checks

namespace {

/// Random point on the occupancy simplex with mass spread over
/// x00, x01 and warm classes 0..top.
FluidState random_state(Rng& rng, int top) {
  std::exponential_distribution<double> exp1(1.0);
  std::vector<double> parts(2 + top + 1);
  double sum = 0.0;
  for (double& v : parts) {
    v = exp1(rng);
    sum += v;
  }
  for (double& v : parts) v /= sum;
  std::vector<double> warm(parts.begin() + 2, parts.end());
  return FluidState(parts[0], parts[1], std::move(warm));
}

void zero_coordinate(std::vector<double>& parts, std::size_t idx) {
  const double freed = parts[idx];
  parts[idx] = 0.0;
  // Renormalize the remaining coordinates.
  double rest = 0.0;
  for (double v : parts) rest += v;
  if (rest <= 0.0) {
    parts[0] = 1.0;
    return;
  }
  for (double& v : parts) v *= 1.0 + freed / rest;
}

FluidState stratified_state(Rng& rng, int top, int stratum, double lambda,
                            double beta) {
  std::exponential_distribution<double> exp1(1.0);
  std::vector<double> parts(2 + top + 1);
  double sum = 0.0;
  for (double& v : parts) {
    v = exp1(rng);
    sum += v;
  }
  for (double& v : parts) v /= sum;
  switch (stratum % 5) {
    case 1: zero_coordinate(parts, 2); break;                      // x02 = 0
    case 2: zero_coordinate(parts, 0); break;                      // x00 = 0
    case 3: zero_coordinate(parts, 2); zero_coordinate(parts, 0); break;
    case 4: {
      // Deficit pinned to exactly zero: x12 = lambda - beta*x01.
      const double x12 = lambda - beta * parts[1];
      if (x12 >= 0.0 && x12 <= 1.0) {
        double other = 0.0;
        for (std::size_t i = 0; i < parts.size(); ++i)
          if (i != 3 && i != 1) other += parts[i];
        const double room = 1.0 - parts[1] - x12;
        if (room >= 0.0 && other > 0.0) {
          for (std::size_t i = 0; i < parts.size(); ++i)
            if (i != 3 && i != 1) parts[i] *= room / other;
          parts[3] = x12;
        }
      }
      break;
    }
    default: break;
  }
  std::vector<double> warm(parts.begin() + 2, parts.end());
  double mass = parts[0] + parts[1];
  for (double v : warm) mass += v;
  // Guard against pathological renormalizations.
  if (std::fabs(mass - 1.0) > 1e-12) {
    parts[0] += 1.0 - mass;
    if (parts[0] < 0.0) return random_state(rng, top);
    warm.assign(parts.begin() + 2, parts.end());
  }
  return FluidState(parts[0], parts[1], std::move(warm));
}

}  // namespace

OptimalityReport satisfies_optimality_condition(const ScalingRule& rule,
                                                const Params& p, int samples) {
  if (samples < 1)
    throw ValidationError("satisfies_optimality_condition: samples >= 1");
  OptimalityReport report;
  Rng rng(0xa1b2c3);
  const int top = 6;
  for (int s = 0; s < samples; ++s) {
    const FluidState x = stratified_state(rng, top, s, p.lambda, p.beta);
    const double deficit = p.lambda - x.warm(1) - p.beta * x.x01();
    const double g = rule(x);
    const bool g_zero = g <= 1e-12;
    const bool deficit_nonpos = deficit <= 0.0;
    ++report.checked;
    if (g_zero != deficit_nonpos) {
      report.pass = false;
      report.counterexample = x;
      std::ostringstream os;
      os << "g = " << g << " with deficit = " << deficit << " (x12 = "
         << x.warm(1) << ", x01 = " << x.x01() << ")";
      report.detail = os.str();
      return report;
    }
  }
  return report;
}

double lipschitz_estimate(const ScalingRule& rule, int samples,
                          std::uint64_t seed) {
  if (samples < 2)
    throw ValidationError("lipschitz_estimate: samples >= 2");
  Rng rng(seed);
  const int top = 8;
  double worst = 0.0;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int s = 0; s < samples; ++s) {
    const FluidState a = random_state(rng, top);
    FluidState b = random_state(rng, top);
    if (s % 2 == 1) {
      // Nearby pair: move mass epsilon between two coordinates of a.
      const double eps = std::pow(10.0, -1.0 - (s / 2) % 6);
      std::vector<double> parts{a.x00(), a.x01()};
      parts.insert(parts.end(), a.warm().begin(), a.warm().end());
      const std::size_t i = static_cast<std::size_t>(unit(rng) * parts.size());
      const std::size_t j = static_cast<std::size_t>(unit(rng) * parts.size());
      if (i == j || parts[i] < eps) continue;
      parts[i] -= eps;
      parts[j] += eps;
      std::vector<double> warm(parts.begin() + 2, parts.end());
      b = FluidState(parts[0], parts[1], std::move(warm));
    }
    const double dist = weighted_distance(a, b);
    if (dist <= 0.0) continue;
    worst = std::max(worst, std::fabs(rule(a) - rule(b)) / dist);
  }
  return worst;
}

}  // namespace alba
