#pragma once

#include <compare>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace rerl {

/// Process identifier. Indices are handed out by a monotone per-system
/// counter, so ordering by index is ordering by creation.
struct Pid {
  std::uint64_t index = 0;
  auto operator<=>(const Pid&) const = default;
};

/// Fresh identifier drawn for checkpoints and message tags.
struct UniqueId {
  std::uint64_t value = 0;
  auto operator<=>(const UniqueId&) const = default;
};

std::string to_string(Pid pid);
std::string to_string(UniqueId id);

/// Ground data: literals, pids, refs, lists and tuples. Immutable and
/// cheap to copy (shared structure).
class Value {
 public:
  enum class Kind { Int, Float, Atom, Ref, Pid, Tuple, Nil, Cons };

  Value();  // []

  static Value integer(std::int64_t v);
  static Value floating(double v);
  static Value atom(std::string name);
  static Value boolean(bool b);
  static Value nil();
  static Value pid(Pid p);
  static Value ref(UniqueId id);
  static Value cons(Value head, Value tail);
  static Value tuple(std::vector<Value> elems);
  static Value list(const std::vector<Value>& elems, Value tail = Value());

  Kind kind() const;
  bool is_number() const { return kind() == Kind::Int || kind() == Kind::Float; }
  bool is_atom(std::string_view name) const;

  std::int64_t as_int() const;
  double as_float() const;  // numeric value of Int or Float
  const std::string& atom_name() const;
  Pid as_pid() const;
  UniqueId as_ref() const;
  const Value& head() const;
  const Value& tail() const;
  const std::vector<Value>& elements() const;

  std::string to_string() const;

  // Exact structural equality (1 and 1.0 differ), as used by matching.
  friend bool operator==(const Value& a, const Value& b);

 private:
  struct Node;
  explicit Value(std::shared_ptr<const Node> node);
  std::shared_ptr<const Node> node_;
};

/// Erlang-style total term order:
///   number < atom < ref < pid < tuple < [] < cons.
/// Numbers compare by numeric value; tuples by size, then elementwise;
/// lists lexicographically. Returns <0, 0 or >0.
int compare_terms(const Value& a, const Value& b);

/// Equality used by the `==` built-in: numeric across int/float,
/// structural everywhere else.
bool equal_terms(const Value& a, const Value& b);

/// Renders an atom, quoting it when it is not a bare identifier.
std::string atom_to_string(std::string_view name);
bool is_keyword(std::string_view word);

}  // namespace rerl
