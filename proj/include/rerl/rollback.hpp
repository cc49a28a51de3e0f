#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "rerl/reversible.hpp"

namespace rerl {

/// Backward rules, one per case of the dispatch in bstep(). Send2 and Spawn
/// are split into a marking half (the peer gets an obligation, the history
/// is kept) and a popping half (fires once the peer has given the message
/// back or disappeared). Blocked: the peer already carries the obligation
/// and has not discharged it yet; bstep is then a no-op.
enum class BackwardRule {
  Stop1,
  Stop2,
  CheckMark,  // #ch^t on top and in Psi
  Discard,
  Internal,
  CheckEvent,  // check(theta, e) on top
  Receive,
  Send1,
  Send2Mark,
  Send2Pop,
  SpawnMark,
  SpawnPop,
  Self,
  Sched1,
  Sched2,
  Blocked,
};

/// Rule name as used in traces: Check for both check rules, Send2 and
/// Spawn for both halves.
std::string rule_name(BackwardRule r);

/// Deliberate defects for mutation testing of the checkers.
enum class Mutation { None, Sched1DropsOldest };

struct BackwardConfig {
  Mutation mutation = Mutation::None;
};

/// Undo1 / Undo2: adds #ch^t to the pending set of `pid`, marking it if
/// needed. Sets `*warning` when t is not a checkpoint in its history.
/// Throws std::out_of_range for an unknown pid.
RSystem request_rollback(const RSystem& sys, Pid pid, UniqueId t, std::string* warning = nullptr);

/// The rule bstep would apply to the marked process `pid`. Throws
/// NotEnabled when it is not marked and StuckRollback when its history is
/// exhausted with obligations other than its own #sp left.
BackwardRule backward_rule(const RSystem& sys, Pid pid);

/// One backward rule on the marked process `pid`.
RSystem bstep(const RSystem& sys, Pid pid, TraceEvent* trace = nullptr,
              const BackwardConfig& config = {});

/// bstep on marked processes, lowest pid first among those not blocked,
/// until none is marked. Throws StuckRollback when every marked process is
/// blocked or exceeds `max_steps`.
RSystem rollback_drive(const RSystem& sys, std::vector<TraceEvent>* trace = nullptr,
                       const BackwardConfig& config = {}, std::size_t max_steps = 1000000);

/// Undoes the most recent forward step of the unmarked process `pid` (for
/// a Deliver, the receiver's step): marks it with an empty pending set,
/// applies backward rules until that one event is gone, driving the peers
/// it has to wait for, then unmarks everything touched.
RSystem step_back(const RSystem& sys, Pid pid, std::vector<TraceEvent>* trace = nullptr,
                  const BackwardConfig& config = {});

}  // namespace rerl
