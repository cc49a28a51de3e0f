#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "rerl/syntax.hpp"

namespace rerl {

/// Every concurrent redex is replaced by this single hole. A process has at
/// most one pending hole, since the system fills it before stepping again.
inline constexpr std::uint64_t kHole = 1;

struct TauLabel {};

struct SendLabel {
  Value dest;
  Value payload;
};

// `scope_env` is the environment of the innermost function body around the
// redex. Receive guards see it, and spawned children inherit it.
struct RecLabel {
  std::uint64_t hole = kHole;
  std::shared_ptr<const ClauseList> clauses;
  Env scope_env;
};

struct SpawnLabel {
  std::uint64_t hole = kHole;
  FunName fname;
  std::vector<Expr> args;
  Env scope_env;
};

struct SelfLabel {
  std::uint64_t hole = kHole;
};

struct CheckLabel {
  std::uint64_t hole = kHole;
};

using Label = std::variant<TauLabel, SendLabel, RecLabel, SpawnLabel, SelfLabel, CheckLabel>;

std::string label_to_string(const Label& label);

struct Stepped {
  Label label;
  Env env;
  Expr expr;
};

/// One labelled step of (env, expr). Subterms are reduced left to right.
/// Returns nullopt when expr is already a value. A RecLabel step leaves the
/// mailbox alone: matching is the system's business.
///
/// Function calls in tail position replace the environment. Calls anywhere
/// else are wrapped in a Frame carrying the callee's own environment, which
/// collapses to its value once the body is done.
///
/// Throws RuntimeError (unbound variable, no matching case clause, bad
/// built-in application, undefined function).
std::optional<Stepped> step_expr(const Module& module, const Env& env, const Expr& expr);

/// Bindings and body of the first clause whose pattern matches `value` and
/// whose guard evaluates to `true` under env extended with the bindings.
struct CaseMatch {
  Env bindings;
  Expr body;
};
std::optional<CaseMatch> match_case(const Module& module, const Value& value,
                                    const ClauseList& clauses, const Env& env);

/// Strict built-ins: + - * / rem == /= < =< > >= and or not, plus unary -.
Value eval_builtin(const std::string& op, const std::vector<Value>& args);

/// Guard evaluation by repeated stepping; at most this many steps.
inline constexpr int kGuardBudget = 10000;
Value eval_guard(const Module& module, const Env& env, const Expr& guard);

/// Replaces the hole in (env, expr) with `replacement`. `bindings` (from a
/// receive clause) extend the environment of the innermost frame that
/// contains the hole, or `env` when no frame does.
struct Filled {
  Env env;
  Expr expr;
};
Filled fill_hole(const Env& env, const Expr& expr, const Expr& replacement,
                 const Env& bindings = Env());

}  // namespace rerl
