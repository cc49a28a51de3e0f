#include "rerl/rollback.hpp"

#include <algorithm>

#include "rerl/error.hpp"

namespace rerl {

std::string rule_name(BackwardRule r) {
  switch (r) {
    case BackwardRule::Stop1:
      return "Stop1";
    case BackwardRule::Stop2:
      return "Stop2";
    case BackwardRule::CheckMark:
    case BackwardRule::CheckEvent:
      return "Check";
    case BackwardRule::Discard:
      return "Discard";
    case BackwardRule::Internal:
      return "Internal";
    case BackwardRule::Receive:
      return "Receive";
    case BackwardRule::Send1:
      return "Send1";
    case BackwardRule::Send2Mark:
    case BackwardRule::Send2Pop:
      return "Send2";
    case BackwardRule::SpawnMark:
    case BackwardRule::SpawnPop:
      return "Spawn";
    case BackwardRule::Self:
      return "Self";
    case BackwardRule::Sched1:
      return "Sched1";
    case BackwardRule::Sched2:
      return "Sched2";
    case BackwardRule::Blocked:
      return "Blocked";
  }
  return "?";
}

RSystem request_rollback(const RSystem& sys, Pid pid, UniqueId t, std::string* warning) {
  RSystem next = sys;
  RProcess& p = next.pool.at(pid);
  auto cps = p.checkpoints();
  if (warning) {
    warning->clear();
    if (std::find(cps.begin(), cps.end(), t) == cps.end())
      *warning = Checkpoint::ch(t).to_string() + " does not occur in the history of " + to_string(pid);
  }
  if (!p.mark) p.mark.emplace();
  p.mark->insert(Checkpoint::ch(t));
  return next;
}

namespace {

bool message_in_gamma(const RSystem& sys, Pid from, Pid to, UniqueId t) {
  const auto* q = sys.gamma.find(from, to);
  if (!q) return false;
  return std::any_of(q->begin(), q->end(), [&](const TaggedMessage& m) { return m.id == t; });
}

bool has_alpha(const RProcess& p, UniqueId t) {
  for (const HistoryEvent* ev : p.history.events()) {
    if (ev->kind == HistoryEvent::Kind::Alpha && ev->id == t) return true;
  }
  return false;
}

bool has_obligation(const RProcess& p, const Checkpoint& c) { return p.mark && p.mark->count(c); }

// Dispatch on the pending set and the top of the history. With
// `ignore_stop1`, an empty pending set does not end the rollback.
BackwardRule select_rule(const RSystem& sys, const RProcess& p, bool ignore_stop1) {
  const CheckpointSet& psi = *p.mark;
  if (psi.empty() && !ignore_stop1) return BackwardRule::Stop1;
  if (p.history.empty()) {
    if (psi.size() == 1 && *psi.begin() == Checkpoint::sp(p.pid)) return BackwardRule::Stop2;
    throw StuckRollback(to_string(p.pid) + " has an empty history with pending " + to_string(psi));
  }
  const HistoryEvent& ev = p.history.top();
  using K = HistoryEvent::Kind;
  switch (ev.kind) {
    case K::Mark:
      return psi.count(Checkpoint::ch(ev.id)) ? BackwardRule::CheckMark : BackwardRule::Discard;
    case K::Tau:
      return BackwardRule::Internal;
    case K::Check:
      return BackwardRule::CheckEvent;
    case K::Self:
      return BackwardRule::Self;
    case K::Rec:
      return BackwardRule::Receive;
    case K::Send: {
      if (message_in_gamma(sys, p.pid, ev.peer, ev.id)) return BackwardRule::Send1;
      auto r = sys.pool.find(ev.peer);
      if (r != sys.pool.end() && has_alpha(r->second, ev.id)) {
        return has_obligation(r->second, Checkpoint::alpha(ev.id)) ? BackwardRule::Blocked
                                                                   : BackwardRule::Send2Mark;
      }
      return BackwardRule::Send2Pop;
    }
    case K::Spawn: {
      auto c = sys.pool.find(ev.peer);
      if (c == sys.pool.end()) return BackwardRule::SpawnPop;
      return has_obligation(c->second, Checkpoint::sp(ev.peer)) ? BackwardRule::Blocked
                                                                : BackwardRule::SpawnMark;
    }
    case K::Alpha:
      return psi.count(Checkpoint::alpha(ev.id)) ? BackwardRule::Sched1 : BackwardRule::Sched2;
  }
  throw InvariantViolation("unknown history event");
}

void add_obligation(RProcess& p, const Checkpoint& c) {
  if (!p.mark) p.mark.emplace();
  p.mark->insert(c);
}

void restore(RProcess& p, const HistoryEvent& ev) {
  p.env = ev.env;
  p.expr = ev.expr;
  if (ev.kind == HistoryEvent::Kind::Rec) p.mailbox = ev.mailbox;
}

TaggedMessage take_tail(RProcess& p, const HistoryEvent& ev, const BackwardConfig& config,
                        bool sched1) {
  if (p.mailbox.empty())
    throw InvariantViolation(to_string(p.pid) + ": undoing delivery of " + to_string(ev.id) +
                             " with an empty mailbox");
  if (sched1 && config.mutation == Mutation::Sched1DropsOldest) {
    TaggedMessage m = p.mailbox.front();
    p.mailbox.erase(p.mailbox.begin());
    return m;
  }
  if (p.mailbox.back().id != ev.id)
    throw InvariantViolation(to_string(p.pid) + ": newest message is " + p.mailbox.back().to_string() +
                             ", expected id " + to_string(ev.id));
  TaggedMessage m = p.mailbox.back();
  p.mailbox.pop_back();
  return m;
}

RSystem apply_rule(const RSystem& sys, Pid pid, BackwardRule rule, TraceEvent* trace,
                   const BackwardConfig& config) {
  RSystem next = sys;
  RProcess& p = next.pool.at(pid);
  TraceEvent out;
  out.dir = "back";
  out.rule = rule_name(rule);
  out.pid = pid;

  switch (rule) {
    case BackwardRule::Stop1:
      p.mark.reset();
      out.label = "resume";
      break;
    case BackwardRule::Stop2:
      out.label = "remove " + Value::pid(pid).to_string();
      next.pool.erase(pid);
      break;
    case BackwardRule::Blocked:
      out.label = "wait";
      break;
    default: {
      const HistoryEvent ev = p.history.top();
      out.label = ev.to_string();
      switch (rule) {
        case BackwardRule::CheckMark:
          p.mark->erase(Checkpoint::ch(ev.id));
          out.id = ev.id;
          p.history = p.history.pop();
          break;
        case BackwardRule::Discard:
          out.id = ev.id;
          p.history = p.history.pop();
          break;
        case BackwardRule::Internal:
        case BackwardRule::CheckEvent:
        case BackwardRule::Self:
        case BackwardRule::Receive:
        case BackwardRule::Send2Pop:
        case BackwardRule::SpawnPop:
          restore(p, ev);
          p.history = p.history.pop();
          if (ev.kind == HistoryEvent::Kind::Send) out.id = ev.id;
          break;
        case BackwardRule::Send1:
          next.gamma.remove_if_first(pid, ev.peer, [&](const TaggedMessage& m) { return m.id == ev.id; });
          restore(p, ev);
          p.history = p.history.pop();
          out.id = ev.id;
          break;
        case BackwardRule::Send2Mark:
          add_obligation(next.pool.at(ev.peer), Checkpoint::alpha(ev.id));
          out.label = "mark " + Value::pid(ev.peer).to_string() + " " + Checkpoint::alpha(ev.id).to_string();
          out.id = ev.id;
          break;
        case BackwardRule::SpawnMark:
          add_obligation(next.pool.at(ev.peer), Checkpoint::sp(ev.peer));
          out.label = "mark " + Value::pid(ev.peer).to_string() + " " + Checkpoint::sp(ev.peer).to_string();
          break;
        case BackwardRule::Sched1: {
          take_tail(p, ev, config, true);
          p.mark->erase(Checkpoint::alpha(ev.id));
          p.history = p.history.pop();
          out.id = ev.id;
          break;
        }
        case BackwardRule::Sched2: {
          TaggedMessage m = take_tail(p, ev, config, false);
          next.gamma.push_front(ev.peer, pid, std::move(m));
          p.history = p.history.pop();
          out.id = ev.id;
          break;
        }
        default:
          break;
      }
    }
  }
  auto it = next.pool.find(pid);
  out.history_len = it == next.pool.end() ? 0 : it->second.history.size();
  if (trace) *trace = std::move(out);
  return next;
}

const RProcess& marked(const RSystem& sys, Pid pid) {
  auto it = sys.pool.find(pid);
  if (it == sys.pool.end() || !it->second.mark)
    throw NotEnabled(to_string(pid) + " is not rolling back");
  return it->second;
}

// Lowest marked pid (other than `skip`) whose rule is not Blocked.
std::optional<std::pair<Pid, BackwardRule>> next_mover(const RSystem& sys, std::optional<Pid> skip) {
  for (const auto& [pid, p] : sys.pool) {
    if (!p.mark || (skip && *skip == pid)) continue;
    BackwardRule r = select_rule(sys, p, false);
    if (r != BackwardRule::Blocked) return std::make_pair(pid, r);
  }
  return std::nullopt;
}

bool any_marked(const RSystem& sys) {
  return std::any_of(sys.pool.begin(), sys.pool.end(), [](const auto& kv) { return kv.second.mark.has_value(); });
}

}  // namespace

BackwardRule backward_rule(const RSystem& sys, Pid pid) {
  return select_rule(sys, marked(sys, pid), false);
}

RSystem bstep(const RSystem& sys, Pid pid, TraceEvent* trace, const BackwardConfig& config) {
  BackwardRule r = backward_rule(sys, pid);
  return apply_rule(sys, pid, r, trace, config);
}

RSystem rollback_drive(const RSystem& sys, std::vector<TraceEvent>* trace, const BackwardConfig& config,
                       std::size_t max_steps) {
  RSystem cur = sys;
  for (std::size_t n = 0; any_marked(cur); ++n) {
    if (n >= max_steps) throw StuckRollback("rollback did not finish within " + std::to_string(max_steps) + " steps");
    auto mover = next_mover(cur, std::nullopt);
    if (!mover) throw StuckRollback("every rolling-back process is waiting on another");
    TraceEvent ev;
    cur = apply_rule(cur, mover->first, mover->second, &ev, config);
    if (trace) trace->push_back(std::move(ev));
  }
  return cur;
}

RSystem step_back(const RSystem& sys, Pid pid, std::vector<TraceEvent>* trace, const BackwardConfig& config) {
  auto it = sys.pool.find(pid);
  if (it == sys.pool.end()) throw NotEnabled("no process " + to_string(pid));
  if (it->second.mark) throw NotEnabled(to_string(pid) + " is already rolling back");
  if (it->second.history.empty()) throw NotEnabled(to_string(pid) + " has no history");
  std::size_t target = it->second.history.size() - 1;
  if (it->second.history.top().kind == HistoryEvent::Kind::Check) --target;

  RSystem cur = sys;
  cur.pool.at(pid).mark.emplace();
  auto record = [&](TraceEvent ev) {
    if (trace) trace->push_back(std::move(ev));
  };
  for (std::size_t guard = 0; cur.pool.at(pid).history.size() > target; ++guard) {
    if (guard > 1000000) throw StuckRollback("step back did not finish");
    BackwardRule r = select_rule(cur, cur.pool.at(pid), true);
    TraceEvent ev;
    if (r != BackwardRule::Blocked) {
      cur = apply_rule(cur, pid, r, &ev, config);
    } else {
      auto mover = next_mover(cur, pid);
      if (!mover) throw StuckRollback(to_string(pid) + " waits on a peer that cannot move");
      cur = apply_rule(cur, mover->first, mover->second, &ev, config);
    }
    record(std::move(ev));
  }
  RProcess& p = cur.pool.at(pid);
  if (!p.mark->empty())
    throw InvariantViolation(to_string(pid) + " picked up obligations " + to_string(*p.mark) + " while stepping back");
  TraceEvent stop;
  cur = apply_rule(cur, pid, BackwardRule::Stop1, &stop, config);
  record(std::move(stop));
  std::vector<TraceEvent> rest;
  cur = rollback_drive(cur, trace ? &rest : nullptr, config);
  for (auto& ev : rest) record(std::move(ev));
  return cur;
}

}  // namespace rerl
