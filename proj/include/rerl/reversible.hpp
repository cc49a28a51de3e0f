#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "rerl/system.hpp"

namespace rerl {

/// A message {t, v}. Matching looks at `value` only.
struct TaggedMessage {
  UniqueId id;
  Value value;
  friend bool operator==(const TaggedMessage&, const TaggedMessage&) = default;
  std::string to_string() const;
};

/// #ch^t (programmer), #alpha^t (message receipt), #sp^p (spawned child).
/// For Sp the id holds the child's pid index.
struct Checkpoint {
  enum class Kind { Ch, Alpha, Sp };
  Kind kind = Kind::Ch;
  std::uint64_t id = 0;

  static Checkpoint ch(UniqueId t) { return {Kind::Ch, t.value}; }
  static Checkpoint alpha(UniqueId t) { return {Kind::Alpha, t.value}; }
  static Checkpoint sp(Pid p) { return {Kind::Sp, p.index}; }

  std::string to_string() const;
  auto operator<=>(const Checkpoint&) const = default;
};

using CheckpointSet = std::set<Checkpoint>;
std::string to_string(const CheckpointSet& psi);

/// One entry of a process history. `env`/`expr` snapshot the control right
/// before the step that pushed the event.
struct HistoryEvent {
  enum class Kind { Tau, Check, Rec, Send, Spawn, Self, Alpha, Mark };
  Kind kind = Kind::Tau;
  Env env;
  Expr expr;
  std::vector<TaggedMessage> mailbox;  // Rec: mailbox before the receive
  Pid peer;                            // Send: receiver; Spawn: child; Alpha: sender
  UniqueId id;                         // Send, Alpha: message; Rec: consumed message; Mark: t
  Value value;                         // Alpha: payload

  std::string to_string() const;
  friend bool operator==(const HistoryEvent&, const HistoryEvent&) = default;
};

/// Persistent stack of events, newest on top. Copies share structure.
class History {
 public:
  bool empty() const { return !top_; }
  std::size_t size() const { return top_ ? top_->size : 0; }
  const HistoryEvent& top() const { return top_->event; }
  History push(HistoryEvent ev) const;
  History pop() const;

  // Newest first.
  std::vector<const HistoryEvent*> events() const;

  friend bool operator==(const History& a, const History& b);

 private:
  struct Cell {
    HistoryEvent event;
    std::shared_ptr<const Cell> next;
    std::size_t size;
  };
  std::shared_ptr<const Cell> top_;
};

struct RProcess {
  Pid pid;
  History history;
  Env env;
  Expr expr;
  std::vector<TaggedMessage> mailbox;  // oldest first
  std::optional<CheckpointSet> mark;   // present iff rolling back

  std::vector<Value> payloads() const;
  /// ids of the #ch marks in the history, newest first.
  std::vector<UniqueId> checkpoints() const;

  friend bool operator==(const RProcess&, const RProcess&) = default;
};

struct RSystem {
  std::shared_ptr<const Module> module;
  GlobalMailbox<TaggedMessage> gamma;
  std::map<Pid, RProcess> pool;
  std::uint64_t next_pid = 1;
  std::uint64_t next_id = 1;

  // Equality of states; counters and the module are not compared.
  friend bool operator==(const RSystem& a, const RSystem& b) {
    return a.gamma == b.gamma && a.pool == b.pool;
  }
};

RSystem make_initial_rsystem(std::shared_ptr<const Module> module, const FunName& entry);

/// One line of the execution log.
struct TraceEvent {
  std::string dir;  // "fwd" or "back"
  std::string rule;
  Pid pid;
  std::string label;
  std::optional<UniqueId> id;
  std::size_t history_len = 0;
};

/// Status of an unmarked process; marked processes report Running only
/// through the backward side.
ProcStatus rstatus(const RSystem& sys, Pid pid);

/// Forward choices: as in the standard semantics, restricted to unmarked
/// processes (a Deliver needs an unmarked receiver).
std::vector<StepChoice> enabled_forward(const RSystem& sys);

/// Forward reversible step. Throws NotEnabled.
RSystem fstep(const RSystem& sys, const StepChoice& choice, TraceEvent* trace = nullptr);

/// Forgets histories, tags and marks.
System project(const RSystem& sys);

}  // namespace rerl
