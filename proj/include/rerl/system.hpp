#pragma once

#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rerl/eval.hpp"
#include "rerl/syntax.hpp"

namespace rerl {

/// Per (sender, receiver) FIFO queues, oldest first. Empty queues are never
/// stored, so two mailboxes are equal iff their maps are.
template <class Msg>
class GlobalMailbox {
 public:
  using Key = std::pair<Pid, Pid>;

  void push_back(Pid from, Pid to, Msg m) { queues_[{from, to}].push_back(std::move(m)); }
  void push_front(Pid from, Pid to, Msg m) { queues_[{from, to}].push_front(std::move(m)); }

  Msg pop_front(Pid from, Pid to) {
    auto it = queues_.find({from, to});
    Msg m = std::move(it->second.front());
    it->second.pop_front();
    if (it->second.empty()) queues_.erase(it);
    return m;
  }

  // Removes the first element satisfying `pred`; false if none does.
  template <class Pred>
  bool remove_if_first(Pid from, Pid to, Pred pred) {
    auto it = queues_.find({from, to});
    if (it == queues_.end()) return false;
    for (auto m = it->second.begin(); m != it->second.end(); ++m) {
      if (pred(*m)) {
        it->second.erase(m);
        if (it->second.empty()) queues_.erase(it);
        return true;
      }
    }
    return false;
  }

  const std::deque<Msg>* find(Pid from, Pid to) const {
    auto it = queues_.find({from, to});
    return it == queues_.end() ? nullptr : &it->second;
  }

  bool empty() const { return queues_.empty(); }
  const std::map<Key, std::deque<Msg>>& queues() const { return queues_; }

  friend bool operator==(const GlobalMailbox&, const GlobalMailbox&) = default;

 private:
  std::map<Key, std::deque<Msg>> queues_;
};

/// Which rule instance to fire next. Local(p) fires the unique non-Sched
/// rule of p; Deliver(sender, receiver) moves the oldest message of that
/// queue into the receiver's mailbox.
struct StepChoice {
  enum class Kind { Local, Deliver };
  Kind kind = Kind::Local;
  Pid pid;     // Local: the process; Deliver: the receiver
  Pid sender;  // Deliver only

  static StepChoice local(Pid p) { return {Kind::Local, p, Pid{}}; }
  static StepChoice deliver(Pid from, Pid to) { return {Kind::Deliver, to, from}; }

  /// "local p1" / "deliver p1 p2" (sender first).
  std::string to_string() const;
  static StepChoice parse(const std::string& text);

  auto operator<=>(const StepChoice&) const = default;
};

enum class ProcStatus { Running, Suspended, Finished, Failed };
std::string to_string(ProcStatus s);

/// Receive over a mailbox: oldest message first, clauses in order for each.
struct RecMatch {
  Env bindings;
  Expr body;
  std::size_t index;  // position of the consumed message
};
std::optional<RecMatch> matchrec(const Module& module, const ClauseList& clauses,
                                 const std::vector<Value>& mailbox, const Env& env);

/// What a process would do if scheduled, without doing it.
struct Probe {
  ProcStatus status = ProcStatus::Finished;
  std::optional<Stepped> step;
  std::optional<RecMatch> rec;  // set when the step is a receive that can fire
  std::string error;            // Failed only
};
Probe probe_process(const Module& module, const Env& env, const Expr& expr,
                    const std::vector<Value>& mailbox);

struct Process {
  Pid pid;
  Env env;
  Expr expr;
  std::vector<Value> mailbox;  // oldest first
  friend bool operator==(const Process&, const Process&) = default;
};

/// Γ;Π with deterministic fresh-name counters. Pids and unique ids come
/// from separate counters so that pids agree between the standard and the
/// reversible semantics on the same choice sequence.
struct System {
  std::shared_ptr<const Module> module;
  GlobalMailbox<Value> gamma;
  std::map<Pid, Process> pool;
  std::uint64_t next_pid = 1;
  std::uint64_t next_id = 1;

  // Equality of states; counters and the module are not compared.
  friend bool operator==(const System& a, const System& b) {
    return a.gamma == b.gamma && a.pool == b.pool;
  }
};

System make_initial_system(std::shared_ptr<const Module> module, const FunName& entry);

ProcStatus status(const System& sys, Pid pid);
std::vector<StepChoice> enabled_standard(const System& sys);

/// Description of a fired step, for traces and instrumentation.
struct StepInfo {
  std::string rule;
  Pid pid;
  std::string label;
  std::optional<Pid> send_to;   // Send
  std::optional<Value> message; // Send, Sched
};

/// Fires one enabled rule. Throws NotEnabled when the choice is not enabled.
System step_system(const System& sys, const StepChoice& choice, StepInfo* info = nullptr);

}  // namespace rerl
