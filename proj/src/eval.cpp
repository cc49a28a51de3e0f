#include "rerl/eval.hpp"

#include <cmath>

#include "rerl/error.hpp"

namespace rerl {

std::string label_to_string(const Label& label) {
  struct Visitor {
    std::string operator()(const TauLabel&) const { return "tau"; }
    std::string operator()(const SendLabel& l) const {
      return "send(" + l.dest.to_string() + ", " + l.payload.to_string() + ")";
    }
    std::string operator()(const RecLabel&) const { return "rec"; }
    std::string operator()(const SpawnLabel& l) const {
      std::string out = "spawn(" + l.fname.to_string() + ", [";
      for (std::size_t i = 0; i < l.args.size(); ++i) {
        if (i) out += ", ";
        out += l.args[i].to_string();
      }
      return out + "])";
    }
    std::string operator()(const SelfLabel&) const { return "self"; }
    std::string operator()(const CheckLabel&) const { return "check"; }
  };
  return std::visit(Visitor{}, label);
}

namespace {

[[noreturn]] void bad_args(const std::string& op, const std::vector<Value>& args) {
  std::string msg = "bad arguments to " + op + ":";
  for (const auto& a : args) msg += " " + a.to_string();
  throw RuntimeError(msg);
}

bool as_bool(const std::string& op, const std::vector<Value>& args, const Value& v) {
  if (v.is_atom("true")) return true;
  if (v.is_atom("false")) return false;
  bad_args(op, args);
}

Value arith(const std::string& op, const std::vector<Value>& args) {
  const Value& a = args[0];
  const Value& b = args[1];
  if (!a.is_number() || !b.is_number()) bad_args(op, args);
  bool ints = a.kind() == Value::Kind::Int && b.kind() == Value::Kind::Int;
  if (op == "/") {
    if (b.as_float() == 0.0) throw RuntimeError("division by zero");
    return Value::floating(a.as_float() / b.as_float());
  }
  if (op == "rem") {
    if (!ints) bad_args(op, args);
    if (b.as_int() == 0) throw RuntimeError("division by zero");
    if (b.as_int() == -1) return Value::integer(0);
    return Value::integer(a.as_int() % b.as_int());
  }
  if (ints) {
    std::int64_t r = 0;
    bool overflow = op == "+"   ? __builtin_add_overflow(a.as_int(), b.as_int(), &r)
                    : op == "-" ? __builtin_sub_overflow(a.as_int(), b.as_int(), &r)
                                : __builtin_mul_overflow(a.as_int(), b.as_int(), &r);
    if (overflow) throw RuntimeError("integer overflow in " + op);
    return Value::integer(r);
  }
  double x = a.as_float();
  double y = b.as_float();
  return Value::floating(op == "+" ? x + y : op == "-" ? x - y : x * y);
}

}  // namespace

Value eval_builtin(const std::string& op, const std::vector<Value>& args) {
  auto want = [&](std::size_t n) {
    if (args.size() != n)
      throw RuntimeError(op + " expects " + std::to_string(n) + " arguments, got " +
                         std::to_string(args.size()));
  };
  if (op == "-" && args.size() == 1) {
    const Value& a = args[0];
    if (a.kind() == Value::Kind::Int) {
      if (a.as_int() == INT64_MIN) throw RuntimeError("integer overflow in -");
      return Value::integer(-a.as_int());
    }
    if (a.kind() == Value::Kind::Float) return Value::floating(-a.as_float());
    bad_args(op, args);
  }
  if (op == "+" || op == "-" || op == "*" || op == "/" || op == "rem") {
    want(2);
    return arith(op, args);
  }
  if (op == "==" || op == "/=" || op == "<" || op == "=<" || op == ">" || op == ">=") {
    want(2);
    int c = compare_terms(args[0], args[1]);
    bool r = op == "==" ? c == 0 : op == "/=" ? c != 0 : op == "<" ? c < 0 : op == "=<" ? c <= 0
           : op == ">" ? c > 0 : c >= 0;
    return Value::boolean(r);
  }
  if (op == "and" || op == "or") {
    want(2);
    bool x = as_bool(op, args, args[0]);
    bool y = as_bool(op, args, args[1]);
    return Value::boolean(op == "and" ? (x && y) : (x || y));
  }
  if (op == "not") {
    want(1);
    return Value::boolean(!as_bool(op, args, args[0]));
  }
  throw RuntimeError("unknown built-in " + op);
}

namespace {

struct Stepper {
  const Module& module;

  static Stepped same(const Env& env, Label l, Expr e) { return {std::move(l), env, std::move(e)}; }

  // Steps the first non-value in `kids`; nullopt when all are values.
  std::optional<Stepped> step_kids(const Env& env, const std::vector<Expr>& kids,
                                   std::vector<Expr>& rebuilt) {
    for (std::size_t i = 0; i < kids.size(); ++i) {
      if (kids[i].is_value()) continue;
      Stepped s = step(env, kids[i], false);
      rebuilt = kids;
      rebuilt[i] = s.expr;
      return s;
    }
    return std::nullopt;
  }

  static std::vector<Value> values_of(const std::vector<Expr>& kids) {
    std::vector<Value> out;
    out.reserve(kids.size());
    for (const auto& k : kids) out.push_back(k.value());
    return out;
  }

  // `top`: expr is the whole body of the current function scope.
  Stepped step(const Env& env, const Expr& e, bool top) {
    std::vector<Expr> kids;
    switch (e.kind()) {
      case Expr::Kind::Var:
        return same(env, TauLabel{}, Expr::val(env.lookup(e.name())));
      case Expr::Kind::Val:
      case Expr::Kind::Hole:
        break;
      case Expr::Kind::Tuple:
        if (auto s = step_kids(env, e.kids(), kids)) {
          s->expr = Expr::tuple(std::move(kids));
          return *s;
        }
        break;
      case Expr::Kind::Cons:
        if (auto s = step_kids(env, e.kids(), kids)) {
          s->expr = Expr::cons(kids[0], kids[1]);
          return *s;
        }
        break;
      case Expr::Kind::Call:
        if (auto s = step_kids(env, e.kids(), kids)) {
          s->expr = Expr::call(e.name(), std::move(kids));
          return *s;
        }
        return same(env, TauLabel{}, Expr::val(eval_builtin(e.name(), values_of(e.kids()))));
      case Expr::Kind::Apply: {
        if (auto s = step_kids(env, e.kids(), kids)) {
          s->expr = Expr::apply(e.fname(), std::move(kids));
          return *s;
        }
        const FunDef* def = module.find(e.fname());
        if (!def) throw RuntimeError("undefined function " + e.fname().to_string());
        Env callee;
        for (std::size_t i = 0; i < def->params.size(); ++i) callee.set(def->params[i], e.kids()[i].value());
        if (top) return {TauLabel{}, std::move(callee), def->body};
        return same(env, TauLabel{}, Expr::frame(std::move(callee), def->body));
      }
      case Expr::Kind::Frame: {
        const Expr& body = e.kids()[0];
        if (body.is_value()) return same(env, TauLabel{}, body);
        Stepped inner = step(e.frame_env(), body, true);
        return same(env, std::move(inner.label), Expr::frame(std::move(inner.env), std::move(inner.expr)));
      }
      case Expr::Kind::Case: {
        const Expr& scrutinee = e.kids()[0];
        if (!scrutinee.is_value()) {
          Stepped s = step(env, scrutinee, false);
          s.expr = Expr::case_of(std::move(s.expr), e.clauses_ptr());
          return s;
        }
        auto m = match_case(module, scrutinee.value(), e.clauses(), env);
        if (!m) throw RuntimeError("no case clause matching " + scrutinee.value().to_string());
        return {TauLabel{}, subst_extend(env, m->bindings), std::move(m->body)};
      }
      case Expr::Kind::Let: {
        const Expr& bound = e.kids()[0];
        if (!bound.is_value()) {
          Stepped s = step(env, bound, false);
          s.expr = Expr::let(e.name(), std::move(s.expr), e.kids()[1]);
          return s;
        }
        return {TauLabel{}, env.bind(e.name(), bound.value()), e.kids()[1]};
      }
      case Expr::Kind::Send: {
        if (auto s = step_kids(env, e.kids(), kids)) {
          s->expr = Expr::send(kids[0], kids[1]);
          return *s;
        }
        const Value& dest = e.kids()[0].value();
        if (dest.kind() != Value::Kind::Pid) throw RuntimeError("send to non-pid " + dest.to_string());
        return same(env, SendLabel{dest, e.kids()[1].value()}, e.kids()[1]);
      }
      case Expr::Kind::Receive:
        return same(env, RecLabel{kHole, e.clauses_ptr(), env}, Expr::hole(kHole));
      case Expr::Kind::Spawn:
        return same(env, SpawnLabel{kHole, e.fname(), e.kids(), env}, Expr::hole(kHole));
      case Expr::Kind::Self:
        return same(env, SelfLabel{kHole}, Expr::hole(kHole));
      case Expr::Kind::Check:
        return same(env, CheckLabel{kHole}, Expr::hole(kHole));
    }
    throw InvariantViolation("step on irreducible expression " + e.to_string());
  }
};

}  // namespace

std::optional<Stepped> step_expr(const Module& module, const Env& env, const Expr& expr) {
  if (expr.is_value()) return std::nullopt;
  return Stepper{module}.step(env, expr, true);
}

Value eval_guard(const Module& module, const Env& env, const Expr& guard) {
  Env scope = env;
  Expr cur = guard;
  for (int i = 0; i < kGuardBudget; ++i) {
    if (cur.is_value()) return cur.value();
    auto s = step_expr(module, scope, cur);
    if (!std::holds_alternative<TauLabel>(s->label))
      throw RuntimeError("guard has side effects: " + guard.to_string());
    scope = std::move(s->env);
    cur = std::move(s->expr);
  }
  if (cur.is_value()) return cur.value();
  throw RuntimeError("guard step budget exhausted: " + guard.to_string());
}

std::optional<CaseMatch> match_case(const Module& module, const Value& value,
                                    const ClauseList& clauses, const Env& env) {
  for (const auto& c : clauses) {
    auto sigma = match_pattern(c.pattern, value);
    if (!sigma) continue;
    Value g = eval_guard(module, subst_extend(env, *sigma), c.guard);
    if (g.is_atom("true")) return CaseMatch{std::move(*sigma), c.body};
    if (!g.is_atom("false")) throw RuntimeError("guard evaluated to non-boolean " + g.to_string());
  }
  return std::nullopt;
}

namespace {

struct HoleFiller {
  const Expr& replacement;
  const Env& bindings;
  bool bound = false;  // bindings already placed in a frame

  // nullopt when e has no hole.
  std::optional<Expr> fill(const Expr& e) {
    switch (e.kind()) {
      case Expr::Kind::Hole:
        return replacement;
      case Expr::Kind::Val:
      case Expr::Kind::Var:
      case Expr::Kind::Receive:
      case Expr::Kind::Self:
      case Expr::Kind::Check:
        return std::nullopt;
      case Expr::Kind::Frame: {
        auto body = fill(e.kids()[0]);
        if (!body) return std::nullopt;
        Env fenv = e.frame_env();
        if (!bound) {
          fenv = subst_extend(fenv, bindings);
          bound = true;
        }
        return Expr::frame(std::move(fenv), std::move(*body));
      }
      default:
        break;
    }
    // Only the redex position can hold the hole, and everything after it is
    // untouched, so a left-to-right scan finds it.
    for (std::size_t i = 0; i < e.kids().size(); ++i) {
      auto k = fill(e.kids()[i]);
      if (!k) continue;
      std::vector<Expr> kids = e.kids();
      kids[i] = std::move(*k);
      return rebuild(e, std::move(kids));
    }
    return std::nullopt;
  }

  static Expr rebuild(const Expr& e, std::vector<Expr> kids) {
    switch (e.kind()) {
      case Expr::Kind::Tuple:
        return Expr::tuple(std::move(kids));
      case Expr::Kind::Cons:
        return Expr::cons(kids[0], kids[1]);
      case Expr::Kind::Call:
        return Expr::call(e.name(), std::move(kids));
      case Expr::Kind::Apply:
        return Expr::apply(e.fname(), std::move(kids));
      case Expr::Kind::Spawn:
        return Expr::spawn(e.fname(), std::move(kids));
      case Expr::Kind::Case:
        return Expr::case_of(kids[0], e.clauses_ptr());
      case Expr::Kind::Let:
        return Expr::let(e.name(), kids[0], kids[1]);
      case Expr::Kind::Send:
        return Expr::send(kids[0], kids[1]);
      default:
        throw InvariantViolation("cannot rebuild " + e.to_string());
    }
  }
};

}  // namespace

Filled fill_hole(const Env& env, const Expr& expr, const Expr& replacement, const Env& bindings) {
  HoleFiller f{replacement, bindings};
  auto filled = f.fill(expr);
  if (!filled) throw InvariantViolation("no hole in " + expr.to_string());
  return {f.bound ? env : subst_extend(env, bindings), std::move(*filled)};
}

}  // namespace rerl
