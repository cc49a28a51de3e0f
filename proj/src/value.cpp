#include "rerl/value.hpp"

#include <array>
#include <cassert>
#include <cctype>
#include <charconv>
#include <cmath>
#include <stdexcept>

namespace rerl {

std::string to_string(Pid pid) { return "p" + std::to_string(pid.index); }
std::string to_string(UniqueId id) { return "t" + std::to_string(id.value); }

struct Value::Node {
  Kind kind = Kind::Nil;
  std::int64_t i = 0;
  double f = 0.0;
  std::uint64_t id = 0;
  std::string name;
  std::vector<Value> kids;
};

Value::Value() {
  static const auto nil = std::make_shared<const Node>();
  node_ = nil;
}
Value::Value(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

Value Value::integer(std::int64_t v) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Int;
  n->i = v;
  return Value(std::move(n));
}

Value Value::floating(double v) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Float;
  n->f = v;
  return Value(std::move(n));
}

Value Value::atom(std::string name) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Atom;
  n->name = std::move(name);
  return Value(std::move(n));
}

Value Value::boolean(bool b) {
  static const Value t = atom("true");
  static const Value f = atom("false");
  return b ? t : f;
}

Value Value::nil() { return Value(); }

Value Value::pid(Pid p) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Pid;
  n->id = p.index;
  return Value(std::move(n));
}

Value Value::ref(UniqueId id) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Ref;
  n->id = id.value;
  return Value(std::move(n));
}

Value Value::cons(Value head, Value tail) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Cons;
  n->kids = {std::move(head), std::move(tail)};
  return Value(std::move(n));
}

Value Value::tuple(std::vector<Value> elems) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Tuple;
  n->kids = std::move(elems);
  return Value(std::move(n));
}

Value Value::list(const std::vector<Value>& elems, Value tail) {
  Value out = std::move(tail);
  for (auto it = elems.rbegin(); it != elems.rend(); ++it) out = cons(*it, out);
  return out;
}

Value::Kind Value::kind() const { return node_->kind; }

bool Value::is_atom(std::string_view name) const {
  return node_->kind == Kind::Atom && node_->name == name;
}

std::int64_t Value::as_int() const {
  assert(kind() == Kind::Int);
  return node_->i;
}

double Value::as_float() const {
  return kind() == Kind::Int ? static_cast<double>(node_->i) : node_->f;
}

const std::string& Value::atom_name() const {
  assert(kind() == Kind::Atom);
  return node_->name;
}

Pid Value::as_pid() const {
  assert(kind() == Kind::Pid);
  return Pid{node_->id};
}

UniqueId Value::as_ref() const {
  assert(kind() == Kind::Ref);
  return UniqueId{node_->id};
}

const Value& Value::head() const {
  assert(kind() == Kind::Cons);
  return node_->kids[0];
}

const Value& Value::tail() const {
  assert(kind() == Kind::Cons);
  return node_->kids[1];
}

const std::vector<Value>& Value::elements() const {
  assert(kind() == Kind::Tuple);
  return node_->kids;
}

namespace {

std::string float_to_string(double d) {
  if (std::isnan(d)) return "nan";
  if (std::isinf(d)) return d > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), d);
  std::string s(buf.data(), end);
  if (s.find_first_of(".e") == std::string::npos) s += ".0";
  return s;
}

}  // namespace

bool is_keyword(std::string_view word) {
  static constexpr std::array<std::string_view, 18> kKeywords = {
      "module", "fun",   "let",   "in",   "case", "of",  "end", "receive", "when",
      "spawn",  "apply", "call",  "self", "check", "and", "or",  "not",    "rem"};
  for (auto k : kKeywords) {
    if (k == word) return true;
  }
  return false;
}

std::string atom_to_string(std::string_view name) {
  bool bare = !name.empty() && name[0] >= 'a' && name[0] <= 'z' && !is_keyword(name);
  for (char c : name) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '@')) bare = false;
  }
  if (bare) return std::string(name);
  std::string out = "'";
  for (char c : name) {
    if (c == '\'' || c == '\\') out += '\\';
    out += c;
  }
  out += '\'';
  return out;
}

std::string Value::to_string() const {
  switch (kind()) {
    case Kind::Int:
      return std::to_string(node_->i);
    case Kind::Float:
      return float_to_string(node_->f);
    case Kind::Atom:
      return atom_to_string(node_->name);
    case Kind::Ref:
      return "<" + rerl::to_string(UniqueId{node_->id}) + ">";
    case Kind::Pid:
      return "<" + rerl::to_string(Pid{node_->id}) + ">";
    case Kind::Nil:
      return "[]";
    case Kind::Tuple: {
      std::string out = "{";
      for (std::size_t i = 0; i < node_->kids.size(); ++i) {
        if (i) out += ", ";
        out += node_->kids[i].to_string();
      }
      return out + "}";
    }
    case Kind::Cons: {
      std::string out = "[";
      const Value* cur = this;
      bool first = true;
      while (cur->kind() == Kind::Cons) {
        if (!first) out += ", ";
        first = false;
        out += cur->head().to_string();
        cur = &cur->tail();
      }
      if (cur->kind() != Kind::Nil) out += " | " + cur->to_string();
      return out + "]";
    }
  }
  return "?";
}

bool operator==(const Value& a, const Value& b) {
  if (a.node_ == b.node_) return true;
  if (a.kind() != b.kind()) return false;
  const auto& x = *a.node_;
  const auto& y = *b.node_;
  switch (x.kind) {
    case Value::Kind::Int:
      return x.i == y.i;
    case Value::Kind::Float:
      return x.f == y.f;
    case Value::Kind::Atom:
      return x.name == y.name;
    case Value::Kind::Ref:
    case Value::Kind::Pid:
      return x.id == y.id;
    case Value::Kind::Nil:
      return true;
    case Value::Kind::Tuple:
    case Value::Kind::Cons:
      return x.kids == y.kids;
  }
  return false;
}

namespace {

int type_rank(Value::Kind k) {
  switch (k) {
    case Value::Kind::Int:
    case Value::Kind::Float:
      return 0;
    case Value::Kind::Atom:
      return 1;
    case Value::Kind::Ref:
      return 2;
    case Value::Kind::Pid:
      return 3;
    case Value::Kind::Tuple:
      return 4;
    case Value::Kind::Nil:
      return 5;
    case Value::Kind::Cons:
      return 6;
  }
  return 7;
}

template <class T>
int three_way(const T& a, const T& b) {
  return a < b ? -1 : (b < a ? 1 : 0);
}

}  // namespace

int compare_terms(const Value& a, const Value& b) {
  int ra = type_rank(a.kind());
  int rb = type_rank(b.kind());
  if (ra != rb) return three_way(ra, rb);
  switch (a.kind()) {
    case Value::Kind::Int:
    case Value::Kind::Float:
      if (a.kind() == Value::Kind::Int && b.kind() == Value::Kind::Int)
        return three_way(a.as_int(), b.as_int());
      return three_way(a.as_float(), b.as_float());
    case Value::Kind::Atom:
      return three_way(a.atom_name(), b.atom_name());
    case Value::Kind::Ref:
      return three_way(a.as_ref().value, b.as_ref().value);
    case Value::Kind::Pid:
      return three_way(a.as_pid().index, b.as_pid().index);
    case Value::Kind::Nil:
      return 0;
    case Value::Kind::Tuple: {
      const auto& xs = a.elements();
      const auto& ys = b.elements();
      if (xs.size() != ys.size()) return three_way(xs.size(), ys.size());
      for (std::size_t i = 0; i < xs.size(); ++i) {
        if (int c = compare_terms(xs[i], ys[i]); c != 0) return c;
      }
      return 0;
    }
    case Value::Kind::Cons: {
      if (int c = compare_terms(a.head(), b.head()); c != 0) return c;
      return compare_terms(a.tail(), b.tail());
    }
  }
  return 0;
}

bool equal_terms(const Value& a, const Value& b) { return compare_terms(a, b) == 0; }

}  // namespace rerl
