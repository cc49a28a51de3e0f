#include "rerl/syntax.hpp"

#include <algorithm>
#include <cassert>
#include <set>

#include "rerl/error.hpp"

namespace rerl {

// ---------------------------------------------------------------- Env

const Value* Env::find(std::string_view name) const {
  auto it = bindings_.find(name);
  return it == bindings_.end() ? nullptr : &it->second;
}

const Value& Env::lookup(std::string_view name) const {
  if (const Value* v = find(name)) return *v;
  throw RuntimeError("unbound variable " + std::string(name));
}

void Env::set(const std::string& name, Value v) {
  if (name == kAnonymous) return;
  bindings_.insert_or_assign(name, std::move(v));
}

Env Env::bind(const std::string& name, Value v) const {
  Env out = *this;
  out.set(name, std::move(v));
  return out;
}

std::string Env::to_string() const {
  std::string out = "{";
  bool first = true;
  for (const auto& [k, v] : bindings_) {
    if (!first) out += ", ";
    first = false;
    out += k + " -> " + v.to_string();
  }
  return out + "}";
}

Env subst_extend(const Env& env, const Env& bindings) {
  Env out = env;
  for (const auto& [k, v] : bindings.bindings()) out.set(k, v);
  return out;
}

std::string FunName::to_string() const { return atom_to_string(atom) + "/" + std::to_string(arity); }

// ---------------------------------------------------------------- Pat

struct Pat::Node {
  Kind kind = Kind::Lit;
  std::string name;
  Value lit;
  std::vector<Pat> kids;
};

Pat Pat::var(std::string name) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Var;
  n->name = std::move(name);
  return Pat(std::move(n));
}

Pat Pat::lit(Value v) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Lit;
  n->lit = std::move(v);
  return Pat(std::move(n));
}

Pat Pat::cons(Pat head, Pat tail) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Cons;
  n->kids = {std::move(head), std::move(tail)};
  return Pat(std::move(n));
}

Pat Pat::tuple(std::vector<Pat> elems) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Tuple;
  n->kids = std::move(elems);
  return Pat(std::move(n));
}

Pat::Kind Pat::kind() const { return node_->kind; }
const std::string& Pat::var_name() const { return node_->name; }
const Value& Pat::literal() const { return node_->lit; }
const std::vector<Pat>& Pat::kids() const { return node_->kids; }

bool operator==(const Pat& a, const Pat& b) {
  if (a.node_ == b.node_) return true;
  return a.node_->kind == b.node_->kind && a.node_->name == b.node_->name &&
         a.node_->lit == b.node_->lit && a.node_->kids == b.node_->kids;
}

std::string Pat::to_string() const {
  switch (kind()) {
    case Kind::Var:
      return var_name();
    case Kind::Lit:
      return literal().to_string();
    case Kind::Tuple: {
      std::string out = "{";
      for (std::size_t i = 0; i < kids().size(); ++i) {
        if (i) out += ", ";
        out += kids()[i].to_string();
      }
      return out + "}";
    }
    case Kind::Cons: {
      std::string out = "[" + kids()[0].to_string();
      const Pat* tail = &kids()[1];
      while (tail->kind() == Kind::Cons) {
        out += ", " + tail->kids()[0].to_string();
        tail = &tail->kids()[1];
      }
      if (!(tail->kind() == Kind::Lit && tail->literal().kind() == Value::Kind::Nil))
        out += " | " + tail->to_string();
      return out + "]";
    }
  }
  return "?";
}

// ---------------------------------------------------------------- Expr

namespace {

std::shared_ptr<ExprNode> node(Expr::Kind k) {
  auto n = std::make_shared<ExprNode>();
  n->kind = k;
  return n;
}

}  // namespace

Expr::Expr() : Expr(val(Value())) {}

Expr Expr::var(std::string name) {
  auto n = node(Kind::Var);
  n->name = std::move(name);
  return Expr(std::move(n));
}

Expr Expr::val(Value v) {
  auto n = node(Kind::Val);
  n->value = std::move(v);
  return Expr(std::move(n));
}

Expr Expr::cons(Expr head, Expr tail) {
  if (head.is_value() && tail.is_value()) return val(Value::cons(head.value(), tail.value()));
  auto n = node(Kind::Cons);
  n->kids = {std::move(head), std::move(tail)};
  return Expr(std::move(n));
}

Expr Expr::tuple(std::vector<Expr> elems) {
  if (std::all_of(elems.begin(), elems.end(), [](const Expr& e) { return e.is_value(); })) {
    std::vector<Value> vs;
    vs.reserve(elems.size());
    for (const auto& e : elems) vs.push_back(e.value());
    return val(Value::tuple(std::move(vs)));
  }
  auto n = node(Kind::Tuple);
  n->kids = std::move(elems);
  return Expr(std::move(n));
}

Expr Expr::call(std::string op, std::vector<Expr> args) {
  auto n = node(Kind::Call);
  n->name = std::move(op);
  n->kids = std::move(args);
  return Expr(std::move(n));
}

Expr Expr::apply(FunName fname, std::vector<Expr> args) {
  auto n = node(Kind::Apply);
  n->fname = std::move(fname);
  n->kids = std::move(args);
  return Expr(std::move(n));
}

Expr Expr::case_of(Expr scrutinee, std::shared_ptr<const ClauseList> clauses) {
  auto n = node(Kind::Case);
  n->kids = {std::move(scrutinee)};
  n->clauses = std::move(clauses);
  return Expr(std::move(n));
}

Expr Expr::let(std::string var, Expr bound, Expr body) {
  auto n = node(Kind::Let);
  n->name = std::move(var);
  n->kids = {std::move(bound), std::move(body)};
  return Expr(std::move(n));
}

Expr Expr::receive(std::shared_ptr<const ClauseList> clauses) {
  auto n = node(Kind::Receive);
  n->clauses = std::move(clauses);
  return Expr(std::move(n));
}

Expr Expr::spawn(FunName fname, std::vector<Expr> args) {
  auto n = node(Kind::Spawn);
  n->fname = std::move(fname);
  n->kids = std::move(args);
  return Expr(std::move(n));
}

Expr Expr::send(Expr dest, Expr message) {
  auto n = node(Kind::Send);
  n->kids = {std::move(dest), std::move(message)};
  return Expr(std::move(n));
}

Expr Expr::self_call() {
  static const Expr e(node(Kind::Self));
  return e;
}

Expr Expr::check() {
  static const Expr e(node(Kind::Check));
  return e;
}

Expr Expr::hole(std::uint64_t id) {
  auto n = node(Kind::Hole);
  n->hole = id;
  return Expr(std::move(n));
}

Expr Expr::frame(Env env, Expr body) {
  auto n = node(Kind::Frame);
  n->env = std::move(env);
  n->kids = {std::move(body)};
  return Expr(std::move(n));
}

Expr::Kind Expr::kind() const { return node_->kind; }
const std::string& Expr::name() const { return node_->name; }
const Value& Expr::value() const { return node_->value; }
const std::vector<Expr>& Expr::kids() const { return node_->kids; }
const FunName& Expr::fname() const { return node_->fname; }
const ClauseList& Expr::clauses() const { return *node_->clauses; }
const std::shared_ptr<const ClauseList>& Expr::clauses_ptr() const { return node_->clauses; }
std::uint64_t Expr::hole_id() const { return node_->hole; }
const Env& Expr::frame_env() const { return node_->env; }

bool operator==(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return true;
  const ExprNode& x = *a.node_;
  const ExprNode& y = *b.node_;
  if (x.kind != y.kind || x.name != y.name || x.hole != y.hole) return false;
  if (!(x.value == y.value) || !(x.fname == y.fname) || !(x.env == y.env)) return false;
  if (x.kids != y.kids) return false;
  if (x.clauses != y.clauses) {
    if (!x.clauses || !y.clauses) return false;
    if (*x.clauses != *y.clauses) return false;
  }
  return true;
}

// ---------------------------------------------------------------- printing

namespace {

// Binding strength of the infix built-ins; higher binds tighter.
constexpr int kPrecSend = 0;
constexpr int kPrecUnary = 6;

int binary_precedence(std::string_view op) {
  if (op == "or") return 1;
  if (op == "and") return 2;
  if (op == "==" || op == "/=" || op == "<" || op == "=<" || op == ">" || op == ">=") return 3;
  if (op == "+" || op == "-") return 4;
  if (op == "*" || op == "/" || op == "rem") return 5;
  return -1;
}

void print_expr(const Expr& e, int ctx, std::string& out);

void print_args(const std::vector<Expr>& args, std::string& out) {
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i) out += ", ";
    print_expr(args[i], kPrecSend, out);
  }
}

void print_clauses(const ClauseList& clauses, std::string& out) {
  for (std::size_t i = 0; i < clauses.size(); ++i) {
    if (i) out += "; ";
    const Clause& c = clauses[i];
    out += c.pattern.to_string();
    if (!(c.guard.is_value() && c.guard.value().is_atom("true"))) {
      out += " when ";
      print_expr(c.guard, kPrecSend, out);
    }
    out += " -> ";
    print_expr(c.body, kPrecSend, out);
  }
}

void print_expr(const Expr& e, int ctx, std::string& out) {
  using K = Expr::Kind;
  switch (e.kind()) {
    case K::Var:
      out += e.name();
      return;
    case K::Val:
      out += e.value().to_string();
      return;
    case K::Tuple:
      out += "{";
      print_args(e.kids(), out);
      out += "}";
      return;
    case K::Cons: {
      out += "[";
      print_expr(e.kids()[0], kPrecSend, out);
      const Expr* tail = &e.kids()[1];
      while (tail->kind() == K::Cons) {
        out += ", ";
        print_expr(tail->kids()[0], kPrecSend, out);
        tail = &tail->kids()[1];
      }
      if (!(tail->is_value() && tail->value().kind() == Value::Kind::Nil)) {
        out += " | ";
        print_expr(*tail, kPrecSend, out);
      }
      out += "]";
      return;
    }
    case K::Call: {
      const auto& op = e.name();
      int p = binary_precedence(op);
      if (p > 0 && e.kids().size() == 2) {
        bool paren = ctx > p;
        if (paren) out += "(";
        bool non_assoc = p == 3;
        print_expr(e.kids()[0], non_assoc ? p + 1 : p, out);
        out += " " + op + " ";
        print_expr(e.kids()[1], p + 1, out);
        if (paren) out += ")";
        return;
      }
      if ((op == "not" || op == "-") && e.kids().size() == 1) {
        bool paren = ctx > kPrecUnary;
        if (paren) out += "(";
        out += op + " ";
        print_expr(e.kids()[0], kPrecUnary, out);
        if (paren) out += ")";
        return;
      }
      out += "call " + atom_to_string(op) + " (";
      print_args(e.kids(), out);
      out += ")";
      return;
    }
    case K::Apply:
      out += "apply " + e.fname().to_string() + " (";
      print_args(e.kids(), out);
      out += ")";
      return;
    case K::Case:
      out += "case ";
      print_expr(e.kids()[0], kPrecSend, out);
      out += " of ";
      print_clauses(e.clauses(), out);
      out += " end";
      return;
    case K::Let: {
      bool paren = ctx > kPrecSend;
      if (paren) out += "(";
      out += "let " + e.name() + " = ";
      print_expr(e.kids()[0], kPrecSend, out);
      out += " in ";
      print_expr(e.kids()[1], kPrecSend, out);
      if (paren) out += ")";
      return;
    }
    case K::Receive:
      out += "receive ";
      print_clauses(e.clauses(), out);
      out += " end";
      return;
    case K::Spawn:
      out += "spawn(" + e.fname().to_string() + ", [";
      print_args(e.kids(), out);
      out += "])";
      return;
    case K::Send: {
      bool paren = ctx > kPrecSend;
      if (paren) out += "(";
      print_expr(e.kids()[0], kPrecSend + 1, out);
      out += " ! ";
      print_expr(e.kids()[1], kPrecSend, out);
      if (paren) out += ")";
      return;
    }
    case K::Self:
      out += "self()";
      return;
    case K::Check:
      out += "check";
      return;
    case K::Hole:
      out += "<hole>";
      return;
    case K::Frame:
      out += "<frame " + e.frame_env().to_string() + " ";
      print_expr(e.kids()[0], kPrecSend, out);
      out += ">";
      return;
  }
}

}  // namespace

std::string Expr::to_string() const {
  std::string out;
  print_expr(*this, kPrecSend, out);
  return out;
}

const FunDef* Module::find(const FunName& f) const {
  auto it = funs.find(f);
  return it == funs.end() ? nullptr : &it->second;
}

std::string Module::to_string() const {
  std::string out = "module " + atom_to_string(name) + " =";
  bool first = true;
  for (const auto& [fname, def] : funs) {
    out += first ? "\n  " : ",\n  ";
    first = false;
    out += fname.to_string() + " = fun (";
    for (std::size_t i = 0; i < def.params.size(); ++i) {
      if (i) out += ", ";
      out += def.params[i];
    }
    out += ") -> " + def.body.to_string();
  }
  return out + "\n";
}

// ---------------------------------------------------------------- matching

namespace {

bool match_into(const Pat& pat, const Value& value, Env& sigma) {
  switch (pat.kind()) {
    case Pat::Kind::Var: {
      if (pat.var_name() == kAnonymous) return true;
      if (const Value* bound = sigma.find(pat.var_name())) return *bound == value;
      sigma.set(pat.var_name(), value);
      return true;
    }
    case Pat::Kind::Lit:
      return pat.literal() == value;
    case Pat::Kind::Cons:
      return value.kind() == Value::Kind::Cons && match_into(pat.kids()[0], value.head(), sigma) &&
             match_into(pat.kids()[1], value.tail(), sigma);
    case Pat::Kind::Tuple: {
      if (value.kind() != Value::Kind::Tuple) return false;
      const auto& elems = value.elements();
      if (elems.size() != pat.kids().size()) return false;
      for (std::size_t i = 0; i < elems.size(); ++i) {
        if (!match_into(pat.kids()[i], elems[i], sigma)) return false;
      }
      return true;
    }
  }
  return false;
}

void pattern_vars(const Pat& pat, std::set<std::string>& out) {
  if (pat.kind() == Pat::Kind::Var) {
    if (pat.var_name() != kAnonymous) out.insert(pat.var_name());
    return;
  }
  for (const auto& k : pat.kids()) pattern_vars(k, out);
}

Expr subst(const Env& env, const Expr& e, const std::set<std::string>& shadowed);

std::vector<Expr> subst_all(const Env& env, const std::vector<Expr>& es,
                            const std::set<std::string>& shadowed) {
  std::vector<Expr> out;
  out.reserve(es.size());
  for (const auto& e : es) out.push_back(subst(env, e, shadowed));
  return out;
}

std::shared_ptr<const ClauseList> subst_clauses(const Env& env, const ClauseList& clauses,
                                                const std::set<std::string>& shadowed) {
  auto out = std::make_shared<ClauseList>();
  for (const auto& c : clauses) {
    std::set<std::string> inner = shadowed;
    pattern_vars(c.pattern, inner);
    out->push_back(Clause{c.pattern, subst(env, c.guard, inner), subst(env, c.body, inner)});
  }
  return out;
}

Expr subst(const Env& env, const Expr& e, const std::set<std::string>& shadowed) {
  using K = Expr::Kind;
  switch (e.kind()) {
    case K::Var: {
      if (shadowed.count(e.name())) return e;
      if (const Value* v = env.find(e.name())) return Expr::val(*v);
      return e;
    }
    case K::Val:
    case K::Self:
    case K::Check:
    case K::Hole:
    case K::Frame:
      return e;
    case K::Cons:
      return Expr::cons(subst(env, e.kids()[0], shadowed), subst(env, e.kids()[1], shadowed));
    case K::Tuple:
      return Expr::tuple(subst_all(env, e.kids(), shadowed));
    case K::Call:
      return Expr::call(e.name(), subst_all(env, e.kids(), shadowed));
    case K::Apply:
      return Expr::apply(e.fname(), subst_all(env, e.kids(), shadowed));
    case K::Spawn:
      return Expr::spawn(e.fname(), subst_all(env, e.kids(), shadowed));
    case K::Send:
      return Expr::send(subst(env, e.kids()[0], shadowed), subst(env, e.kids()[1], shadowed));
    case K::Case:
      return Expr::case_of(subst(env, e.kids()[0], shadowed),
                           subst_clauses(env, e.clauses(), shadowed));
    case K::Receive:
      return Expr::receive(subst_clauses(env, e.clauses(), shadowed));
    case K::Let: {
      std::set<std::string> inner = shadowed;
      inner.insert(e.name());
      return Expr::let(e.name(), subst(env, e.kids()[0], shadowed), subst(env, e.kids()[1], inner));
    }
  }
  return e;
}

}  // namespace

std::optional<Env> match_pattern(const Pat& pat, const Value& value) {
  Env sigma;
  if (!match_into(pat, value, sigma)) return std::nullopt;
  return sigma;
}

Expr subst_apply(const Env& env, const Expr& expr) {
  if (env.empty()) return expr;
  return subst(env, expr, {});
}

Expr pattern_to_expr(const Pat& pat) {
  switch (pat.kind()) {
    case Pat::Kind::Var:
      return Expr::var(pat.var_name());
    case Pat::Kind::Lit:
      return Expr::val(pat.literal());
    case Pat::Kind::Cons:
      return Expr::cons(pattern_to_expr(pat.kids()[0]), pattern_to_expr(pat.kids()[1]));
    case Pat::Kind::Tuple: {
      std::vector<Expr> elems;
      for (const auto& k : pat.kids()) elems.push_back(pattern_to_expr(k));
      return Expr::tuple(std::move(elems));
    }
  }
  return Expr();
}

}  // namespace rerl
