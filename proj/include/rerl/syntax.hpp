#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rerl/value.hpp"

namespace rerl {

/// Name of the anonymous variable. It never binds and never enters an Env.
inline constexpr std::string_view kAnonymous = "_";

/// A substitution from variables to values. Ordered by variable name so
/// that printing and hashing are deterministic.
class Env {
 public:
  Env() = default;
  Env(std::initializer_list<std::pair<const std::string, Value>> init) : bindings_(init) {}

  const Value* find(std::string_view name) const;
  /// Throws RuntimeError when `name` is unbound.
  const Value& lookup(std::string_view name) const;

  /// In-place update; binding `_` is a no-op.
  void set(const std::string& name, Value v);
  Env bind(const std::string& name, Value v) const;

  bool empty() const { return bindings_.empty(); }
  std::size_t size() const { return bindings_.size(); }
  const std::map<std::string, Value, std::less<>>& bindings() const { return bindings_; }

  std::string to_string() const;

  friend bool operator==(const Env& a, const Env& b) { return a.bindings_ == b.bindings_; }

 private:
  std::map<std::string, Value, std::less<>> bindings_;
};

/// Update of `env` with `bindings`: bindings win on overlap.
Env subst_extend(const Env& env, const Env& bindings);

/// a/n
struct FunName {
  std::string atom;
  std::uint32_t arity = 0;
  auto operator<=>(const FunName&) const = default;
  std::string to_string() const;
};

/// Patterns: variables, literals, list cells and tuples.
class Pat {
 public:
  enum class Kind { Var, Lit, Cons, Tuple };

  static Pat var(std::string name);
  static Pat lit(Value v);
  static Pat cons(Pat head, Pat tail);
  static Pat tuple(std::vector<Pat> elems);

  Kind kind() const;
  const std::string& var_name() const;
  const Value& literal() const;
  const std::vector<Pat>& kids() const;

  std::string to_string() const;
  friend bool operator==(const Pat& a, const Pat& b);

 private:
  struct Node;
  explicit Pat(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

struct ExprNode;
struct Clause;
using ClauseList = std::vector<Clause>;

/// Expressions. Immutable trees with shared structure; copying is O(1).
///
/// Constructors normalise: a tuple or list cell whose components are all
/// values is itself a Val node, so "is a value" is a single tag check.
/// Hole and Frame never come from source text. A Hole is the placeholder
/// a concurrent redex leaves behind for the system layer to fill; a Frame
/// evaluates a non-tail function body in its own environment.
class Expr {
 public:
  enum class Kind {
    Var, Val, Cons, Tuple, Call, Apply, Case, Let, Receive, Spawn, Send, Self, Check, Hole, Frame
  };

  Expr();  // Val([])

  static Expr var(std::string name);
  static Expr val(Value v);
  static Expr cons(Expr head, Expr tail);
  static Expr tuple(std::vector<Expr> elems);
  static Expr call(std::string op, std::vector<Expr> args);
  static Expr apply(FunName fname, std::vector<Expr> args);
  static Expr case_of(Expr scrutinee, std::shared_ptr<const ClauseList> clauses);
  static Expr let(std::string var, Expr bound, Expr body);
  static Expr receive(std::shared_ptr<const ClauseList> clauses);
  static Expr spawn(FunName fname, std::vector<Expr> args);
  static Expr send(Expr dest, Expr message);
  static Expr self_call();
  static Expr check();
  static Expr hole(std::uint64_t id);
  static Expr frame(Env env, Expr body);

  Kind kind() const;
  bool is_value() const { return kind() == Kind::Val; }

  const std::string& name() const;  // Var name, Let variable, Call operator
  const Value& value() const;       // Val
  const std::vector<Expr>& kids() const;
  const FunName& fname() const;     // Apply, Spawn
  const ClauseList& clauses() const;  // Case, Receive
  const std::shared_ptr<const ClauseList>& clauses_ptr() const;
  std::uint64_t hole_id() const;
  const Env& frame_env() const;

  /// Source-like rendering; parse_expr() reads it back for every
  /// expression that does not contain a Hole or a Frame.
  std::string to_string() const;

  friend bool operator==(const Expr& a, const Expr& b);

 private:
  explicit Expr(std::shared_ptr<const ExprNode> n) : node_(std::move(n)) {}
  std::shared_ptr<const ExprNode> node_;
};

/// `pattern when guard -> body`
struct Clause {
  Pat pattern;
  Expr guard;
  Expr body;
  friend bool operator==(const Clause&, const Clause&) = default;
};

struct ExprNode {
  Expr::Kind kind = Expr::Kind::Val;
  std::string name;
  Value value;
  std::vector<Expr> kids;
  FunName fname;
  std::shared_ptr<const ClauseList> clauses;
  std::uint64_t hole = 0;
  Env env;
};

struct FunDef {
  FunName name;
  std::vector<std::string> params;
  Expr body;
  friend bool operator==(const FunDef&, const FunDef&) = default;
};

/// A program: one module mapping function names to definitions.
struct Module {
  std::string name;
  std::map<FunName, FunDef> funs;

  const FunDef* find(const FunName& f) const;
  std::string to_string() const;
  friend bool operator==(const Module&, const Module&) = default;
};

/// The unique σ with pat·σ = value, or nullopt. Repeated variables must
/// bind exactly equal values; `_` matches anything without binding.
std::optional<Env> match_pattern(const Pat& pat, const Value& value);

/// Replaces free occurrences of variables bound in `env` by their values.
/// Let, Case and Receive binders shadow; Frames are closed and left alone.
Expr subst_apply(const Env& env, const Expr& expr);

Expr pattern_to_expr(const Pat& pat);

}  // namespace rerl
