#include "scenarios.hpp"

#include <chrono>
#include <map>
#include <random>
#include <set>

#include "gen.hpp"
#include "rerl/canonical.hpp"
#include "rerl/check.hpp"
#include "rerl/explore.hpp"
#include "rerl/parser.hpp"
#include "rerl/rollback.hpp"
#include "support.hpp"

namespace rerl::testing {

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

Value val(const std::string& text) {
  Expr e = parse_expr(text);
  if (!e.is_value()) throw std::invalid_argument("not a value: " + text);
  return e.value();
}

struct ProcSpec {
  std::uint64_t pid;
  std::vector<std::pair<std::string, std::string>> env;
  std::string expr;
  std::vector<std::string> mailbox;
};

struct QueueSpec {
  std::uint64_t from, to;
  std::vector<std::string> messages;
};

System make_state(const std::shared_ptr<const Module>& m, const std::vector<ProcSpec>& procs,
                  const std::vector<QueueSpec>& gamma = {}) {
  System s;
  s.module = m;
  for (const auto& p : procs) {
    Process proc;
    proc.pid = Pid{p.pid};
    for (const auto& [k, v] : p.env) proc.env.set(k, val(v));
    proc.expr = parse_expr(p.expr);
    for (const auto& v : p.mailbox) proc.mailbox.push_back(val(v));
    s.pool.emplace(proc.pid, proc);
  }
  for (const auto& q : gamma) {
    for (const auto& v : q.messages) s.gamma.push_back(Pid{q.from}, Pid{q.to}, val(v));
  }
  return s;
}

void append(std::vector<StepChoice>& out, StepChoice c, int times = 1) {
  for (int i = 0; i < times; ++i) out.push_back(c);
}

const char* kClient = "receive ack -> ok end";
const char* kServer = "receive {P, M} -> let _ = P ! ack in apply server/0 () end";

Outcome fail(Outcome o, std::string why) {
  o.ok = false;
  o.detail = std::move(why);
  return o;
}

std::vector<std::shared_ptr<const Module>> shipped_programs() {
  return {load_program("ex1.rl"), load_program("clientserver.rl"), load_program("clientserver_check.rl")};
}

}  // namespace

std::vector<StepChoice> client_server_script(bool with_check, bool to_end) {
  const Pid c1{1}, s{2}, c2{3};
  const int client_steps = with_check ? 8 : 6;  // apply (2), [check, let], S, self(), send, let
  std::vector<StepChoice> out;
  append(out, StepChoice::local(c1), 5);  // apply main/0, spawn, let S, spawn, let _
  append(out, StepChoice::local(s));      // apply server/0
  append(out, StepChoice::local(c2), client_steps);
  append(out, StepChoice::deliver(c2, s));
  append(out, StepChoice::local(s), 5);  // receive, P, send, let, apply server/0
  append(out, StepChoice::deliver(s, c2));
  append(out, StepChoice::local(c2));  // receive ack
  append(out, StepChoice::local(c1), client_steps);
  append(out, StepChoice::deliver(c1, s));
  append(out, StepChoice::local(s));  // receive
  if (to_end) {
    append(out, StepChoice::local(s), 4);
    append(out, StepChoice::deliver(s, c1));
    append(out, StepChoice::local(c1));
  }
  return out;
}

Outcome ex1_outcome_set() {
  Outcome o;
  auto t0 = Clock::now();
  StateGraph g = explore(make_initial_system(load_program("ex1.rl"), main0()), ExploreLimits{60, 200000});
  std::set<std::string> got;
  for (std::size_t t : g.terminals) {
    auto fv = final_values(g.states[t]);
    auto it = fv.find(Pid{3});
    got.insert(it == fv.end() ? "<not finished>" : it->second.to_string());
  }
  o.seconds = since(t0);
  const std::set<std::string> want = {"{hello, world}", "{world, hello}"};
  std::string list;
  for (const auto& v : got) list += (list.empty() ? "" : " ") + v;
  o.detail = std::to_string(g.canonical.size()) + " states, " + std::to_string(g.terminals.size()) +
             " terminal; P3 values: " + list;
  if (g.truncated) return fail(o, "exploration truncated; " + o.detail);
  if (got != want) return fail(o, o.detail);
  if (o.seconds >= 5.0) return fail(o, "too slow; " + o.detail);
  return o;
}

Outcome golden_forward_trace() {
  Outcome o;
  auto t0 = Clock::now();
  auto m = load_program("clientserver.rl");
  const std::vector<std::pair<std::string, std::string>> sigma = {{"S", "<p2>"}};
  const std::vector<std::pair<std::string, std::string>> theta2 = {{"P", "<p1>"}, {"M", "req"}};
  const std::string v2 = "{<p1>, req}";
  const std::string body = "let _ = P ! ack in apply server/0 ()";
  // The visible states of the reference trace. Where a state there cannot
  // occur under left-to-right evaluation (the destination still a variable
  // after self() was evaluated), the nearest reachable state is used; the
  // server's mailbox after its receive is empty.
  const std::vector<System> expected = {
      make_state(m, {{1, {}, "apply main/0 ()", {}}}),
      make_state(m, {{1, sigma, "let _ = <p2> ! {<p1>, req} in receive ack -> ok end", {}},
                     {2, {}, kServer, {}},
                     {3, sigma, "ok", {}}}),
      make_state(m, {{1, sigma, "let _ = {<p1>, req} in receive ack -> ok end", {}},
                     {2, {}, kServer, {}},
                     {3, sigma, "ok", {}}},
                 {{1, 2, {v2}}}),
      make_state(m, {{1, sigma, kClient, {}}, {2, {}, kServer, {}}, {3, sigma, "ok", {}}}, {{1, 2, {v2}}}),
      make_state(m, {{1, sigma, kClient, {}}, {2, {}, kServer, {v2}}, {3, sigma, "ok", {}}}),
      make_state(m, {{1, sigma, kClient, {}}, {2, theta2, body, {}}, {3, sigma, "ok", {}}}),
      make_state(m, {{1, sigma, kClient, {}}, {2, theta2, "let _ = ack in apply server/0 ()", {}}, {3, sigma, "ok", {}}},
                 {{2, 1, {"ack"}}}),
      make_state(m, {{1, sigma, kClient, {}}, {2, theta2, "apply server/0 ()", {}}, {3, sigma, "ok", {}}},
                 {{2, 1, {"ack"}}}),
      make_state(m, {{1, sigma, kClient, {}}, {2, {}, kServer, {}}, {3, sigma, "ok", {}}}, {{2, 1, {"ack"}}}),
      make_state(m, {{1, sigma, kClient, {"ack"}}, {2, {}, kServer, {}}, {3, sigma, "ok", {}}}),
      make_state(m, {{1, sigma, "ok", {}}, {2, {}, kServer, {}}, {3, sigma, "ok", {}}}),
  };

  System cur = make_initial_system(m, main0());
  std::vector<std::string> visited{canonicalize(cur)};
  for (const auto& c : client_server_script(false, true)) {
    try {
      cur = step_system(cur, c);
    } catch (const std::exception& e) {
      return fail(o, "script step " + c.to_string() + " failed: " + e.what());
    }
    visited.push_back(canonicalize(cur));
  }
  std::size_t at = 0;
  for (std::size_t i = 0; i < expected.size(); ++i) {
    std::string want = canonicalize(expected[i]);
    while (at < visited.size() && visited[at] != want) ++at;
    if (at == visited.size())
      return fail(o, "expected state " + std::to_string(i) + " not reached in order:\n" + render(expected[i]));
  }
  if (!cur.gamma.empty()) return fail(o, "messages left in flight at the end");
  o.seconds = since(t0);
  o.detail = std::to_string(expected.size()) + " reference states matched along " +
             std::to_string(visited.size() - 1) + " steps";
  return o;
}

Outcome golden_reversible_trace() {
  Outcome o;
  auto t0 = Clock::now();
  auto m = load_program("clientserver_check.rl");
  const Pid c1{1}, s{2}, c2{3};
  const Env sigma{{"S", Value::pid(s)}};
  const std::string rest = "let _ = S ! {self(), req} in receive ack -> ok end";

  RSystem cur = make_initial_rsystem(m, main0());
  auto script = client_server_script(true, false);
  std::vector<RSystem> states{cur};
  for (const auto& c : script) {
    cur = fstep(cur, c);
    states.push_back(cur);
  }

  // Locate main's checkpoint step: the first state where its history has a
  // check event on top.
  std::size_t check_at = 0;
  for (std::size_t i = 1; i < states.size(); ++i) {
    const auto& h = states[i].pool.at(c1).history;
    if (!h.empty() && h.top().kind == HistoryEvent::Kind::Check) {
      check_at = i;
      break;
    }
  }
  if (!check_at) return fail(o, "main never took its checkpoint");
  const RSystem& before = states[check_at - 1];
  const RSystem& after = states[check_at];
  const RProcess& p_before = before.pool.at(c1);
  const RProcess& p_after = after.pool.at(c1);
  const History pi_i = p_before.history;
  const History pi2_i = before.pool.at(s).history;
  const History pi3_i = before.pool.at(c2).history;

  // State before the checkpoint: main about to check, the server idle at its
  // receive, the second client done.
  if (!(p_before.env == sigma && p_before.expr == parse_expr("let _ = check in " + rest)))
    return fail(o, "main is not at its checkpoint:\n" + render(before));
  if (!(before.pool.at(s).env == Env() && before.pool.at(s).expr == parse_expr(kServer)))
    return fail(o, "server is not idle:\n" + render(before));
  if (!(before.pool.at(c2).expr == parse_expr("ok") && before.pool.at(c2).env == sigma))
    return fail(o, "second client has not finished:\n" + render(before));
  if (!before.gamma.empty()) return fail(o, "messages in flight before the checkpoint");

  // check(sigma, let _ = check in ...) : #ch^t1 : pi_i, control let _ = t1 in ...
  auto evs = p_after.history.events();
  if (evs.size() != pi_i.size() + 2 || evs[0]->kind != HistoryEvent::Kind::Check ||
      evs[1]->kind != HistoryEvent::Kind::Mark || !(p_after.history.pop().pop() == pi_i))
    return fail(o, "check did not push check : #ch on top of the previous history");
  const UniqueId t1 = evs[1]->id;
  if (!(evs[0]->env == sigma && evs[0]->expr == p_before.expr))
    return fail(o, "check event does not snapshot the control");
  if (!(p_after.expr == parse_expr("let _ = " + Value::ref(t1).to_string() + " in " + rest)))
    return fail(o, "checkpoint id not substituted: " + p_after.expr.to_string());
  if (p_after.checkpoints() != std::vector<UniqueId>{t1}) return fail(o, "checkpoint inventory wrong");

  // send(s, sigma, let _ = s ! {c1, req} in ..., t2) with {t2, v2} in flight.
  std::size_t send_at = 0;
  for (std::size_t i = check_at; i < states.size(); ++i) {
    const auto& h = states[i].pool.at(c1).history;
    if (h.top().kind == HistoryEvent::Kind::Send) {
      send_at = i;
      break;
    }
  }
  if (!send_at) return fail(o, "main never sent its request");
  const HistoryEvent send_ev = states[send_at].pool.at(c1).history.top();
  const UniqueId t2 = send_ev.id;
  const Value v2 = Value::tuple({Value::pid(c1), Value::atom("req")});
  if (!(send_ev.peer == s && send_ev.env == sigma &&
        send_ev.expr == parse_expr("let _ = <p2> ! {<p1>, req} in receive ack -> ok end") && t2 > t1))
    return fail(o, "send event wrong: " + send_ev.to_string());
  const auto* q = states[send_at].gamma.find(c1, s);
  if (!q || q->size() != 1 || !(q->front() == TaggedMessage{t2, v2}))
    return fail(o, "tagged message not in flight after the send");

  // alpha(c1, s, {t2, v2}) : pi'_i, then rec(id, receive ..., [{t2, v2}]).
  const RProcess& srv = cur.pool.at(s);
  auto sev = srv.history.events();
  if (sev.size() != pi2_i.size() + 2 || sev[1]->kind != HistoryEvent::Kind::Alpha || sev[1]->peer != c1 ||
      !(sev[1]->id == t2 && sev[1]->value == v2))
    return fail(o, "delivery not recorded on the server");
  if (sev[0]->kind != HistoryEvent::Kind::Rec || !(sev[0]->env == Env()) || !(sev[0]->expr == parse_expr(kServer)) ||
      !(sev[0]->mailbox == std::vector<TaggedMessage>{{t2, v2}}))
    return fail(o, "receive not recorded with the mailbox snapshot");
  if (!(srv.env == Env{{"P", Value::pid(c1)}, {"M", Value::atom("req")}}) ||
      !(srv.expr == parse_expr("let _ = P ! ack in apply server/0 ()")) || !srv.mailbox.empty())
    return fail(o, "server control after receive wrong:\n" + render(cur));
  if (!(cur.pool.at(c2).history == pi3_i)) return fail(o, "second client moved");

  // Rollback of main to #ch^t1.
  std::string warning;
  RSystem back = request_rollback(cur, c1, t1, &warning);
  if (!warning.empty()) return fail(o, warning);
  if (!(back.pool.at(c1).mark == CheckpointSet{Checkpoint::ch(t1)})) return fail(o, "mark not set");
  bool saw_both_marked = false, saw_restored_mailbox = false;
  std::vector<std::string> rules;
  for (int guard = 0; guard < 1000; ++guard) {
    std::optional<Pid> next;
    for (const auto& [pid, p] : back.pool) {
      if (p.mark && backward_rule(back, pid) != BackwardRule::Blocked) {
        next = pid;
        break;
      }
    }
    if (!next) break;
    TraceEvent ev;
    back = bstep(back, *next, &ev);
    rules.push_back(ev.rule + "@" + to_string(ev.pid));
    const auto& a = back.pool.at(c1);
    const auto& b = back.pool.at(s);
    if (a.mark == CheckpointSet{Checkpoint::ch(t1)} && b.mark == CheckpointSet{Checkpoint::alpha(t2)})
      saw_both_marked = true;
    if (b.mark && b.expr == parse_expr(kServer) && b.env == Env() &&
        b.mailbox == std::vector<TaggedMessage>{{t2, v2}} && b.history.top().kind == HistoryEvent::Kind::Alpha)
      saw_restored_mailbox = true;
  }
  std::string trail;
  for (const auto& r : rules) trail += (trail.empty() ? "" : " ") + r;
  if (!saw_both_marked) return fail(o, "server never marked with #alpha^t2 while main rolls back: " + trail);
  if (!saw_restored_mailbox) return fail(o, "server never restored its mailbox: " + trail);
  for (const auto& [pid, p] : back.pool)
    if (p.mark) return fail(o, "rollback left " + to_string(pid) + " marked: " + trail);

  const RProcess& fc1 = back.pool.at(c1);
  const RProcess& fs = back.pool.at(s);
  if (!(fc1.history == pi_i && fc1.env == sigma && fc1.expr == parse_expr("let _ = check in " + rest)))
    return fail(o, "main not back at its checkpoint:\n" + render(back));
  if (!(fs.history == pi2_i && fs.env == Env() && fs.expr == parse_expr(kServer) && fs.mailbox.empty()))
    return fail(o, "server not back at its receive:\n" + render(back));
  if (!back.gamma.empty()) return fail(o, "global mailbox not empty after rollback");
  if (!(back == before)) return fail(o, first_difference(render(before), render(back)));

  // Same result through the driver, and the result is forward-reachable.
  RSystem driven = rollback_drive(request_rollback(cur, c1, t1));
  if (!(driven == before)) return fail(o, "rollback_drive disagrees with stepwise rollback");
  StateGraph g = explore(project(make_initial_rsystem(m, main0())), ExploreLimits{60, 200000});
  if (!g.index.count(canonicalize(project(back)))) return fail(o, "final state not forward-reachable");

  o.seconds = since(t0);
  o.detail = "backward rules: " + trail;
  return o;
}

Outcome loop_property(std::size_t generated, std::uint64_t seed) {
  Outcome o;
  auto t0 = Clock::now();
  std::size_t checked = 0, programs = 0;
  auto run = [&](const std::shared_ptr<const Module>& m, const LoopLimits& limits, const std::string& name) {
    CheckReport r = check_loop(make_initial_rsystem(m, main0()), limits);
    checked += r.checked_states;
    ++programs;
    if (!r.violations.empty() && o.ok) {
      std::string moves;
      for (const auto& mv : r.violations.front().moves) moves += mv + "; ";
      o = fail(o, name + ": " + std::to_string(r.violations.size()) + " counterexamples, first after [" + moves +
                      "]\n" + r.violations.front().diff);
    }
  };
  for (const auto& m : shipped_programs()) run(m, LoopLimits{20, 50, seed}, m->name);
  Gen g(seed);
  for (std::size_t i = 0; i < generated; ++i) {
    std::string src = g.program();
    run(module_of(src), LoopLimits{3, 50, seed + i}, "generated #" + std::to_string(i) + "\n" + src);
  }
  o.seconds = since(t0);
  if (o.ok) o.detail = std::to_string(programs) + " programs, " + std::to_string(checked) + " undo checks, 0 counterexamples";
  if (o.ok && o.seconds >= 60.0) return fail(o, "too slow");
  return o;
}

Outcome soundness_property(std::size_t max_depth, std::size_t max_rollbacks, std::size_t max_states) {
  Outcome o;
  auto t0 = Clock::now();
  std::string detail;
  for (const auto& m : shipped_programs()) {
    CheckReport r = check_soundness(make_initial_rsystem(m, main0()),
                                    SoundnessLimits{max_depth, max_rollbacks, max_states});
    detail += (detail.empty() ? "" : "; ") + m->name + ": " + std::to_string(r.checked_states) + " mixed states vs " +
              std::to_string(r.reference_states) + " forward, " + std::to_string(r.violations.size()) +
              " violations" + (r.truncated ? " (truncated)" : "");
    if (!r.violations.empty() && o.ok) {
      std::string moves;
      for (const auto& mv : r.violations.front().moves) moves += mv + "; ";
      o = fail(o, m->name + ": after [" + moves + "]\n" + r.violations.front().diff);
    }
  }
  o.seconds = since(t0);
  if (o.ok) o.detail = detail;
  if (o.ok && o.seconds >= 300.0) return fail(o, "too slow; " + detail);
  return o;
}

Outcome fifo_property(std::size_t runs, std::uint64_t seed) {
  Outcome o;
  auto t0 = Clock::now();
  Gen g(seed);
  std::size_t deliveries = 0;
  const std::size_t per_program = 10;
  std::shared_ptr<const Module> m;
  for (std::size_t run = 0; run < runs; ++run) {
    if (run % per_program == 0) m = module_of(g.program());
    RandomPolicy policy(seed * 1000003 + run);
    System s = make_initial_system(m, main0());
    std::map<std::pair<Pid, Pid>, std::vector<Value>> sent, delivered;
    for (int step = 0; step < 300; ++step) {
      auto en = enabled_standard(s);
      if (en.empty()) break;
      StepChoice c = *policy.choose(en);
      StepInfo info;
      s = step_system(s, c, &info);
      if (info.rule == "Send") sent[{c.pid, *info.send_to}].push_back(*info.message);
      if (info.rule == "Sched") {
        delivered[{c.sender, c.pid}].push_back(*info.message);
        ++deliveries;
      }
    }
    for (const auto& [key, d] : delivered) {
      const auto& all = sent[key];
      if (d.size() > all.size() || !std::equal(d.begin(), d.end(), all.begin()))
        return fail(o, "run " + std::to_string(run) + ": pair " + to_string(key.first) + "->" +
                           to_string(key.second) + " delivered out of order");
    }
  }
  o.seconds = since(t0);
  o.detail = std::to_string(runs) + " runs, " + std::to_string(deliveries) + " deliveries, 0 violations";
  return o;
}

Outcome replay_determinism(std::size_t programs, std::uint64_t seed) {
  Outcome o;
  auto t0 = Clock::now();
  auto snapshots = [](const RSystem& init, Policy& policy, std::vector<StepChoice>* choices) {
    std::vector<std::string> snaps{canonicalize(init)};
    RSystem cur = init;
    for (std::size_t i = 0; i < 150; ++i) {
      auto en = enabled_forward(cur);
      if (en.empty()) break;
      auto c = policy.choose(en);
      if (!c) break;
      cur = fstep(cur, *c);
      if (choices) choices->push_back(*c);
      snaps.push_back(canonicalize(cur));
    }
    return snaps;
  };
  std::vector<std::shared_ptr<const Module>> mods = shipped_programs();
  Gen g(seed);
  for (std::size_t i = 0; i < programs; ++i) mods.push_back(module_of(g.program()));
  std::size_t steps = 0;
  for (std::size_t i = 0; i < mods.size(); ++i) {
    RSystem init = make_initial_rsystem(mods[i], main0());
    RandomPolicy random(seed + i);
    std::vector<StepChoice> recorded;
    auto original = snapshots(init, random, &recorded);
    auto script = parse_script(format_script(recorded));
    if (script != recorded) return fail(o, "script text does not round-trip for program " + std::to_string(i));
    for (int round = 0; round < 2; ++round) {
      ScriptPolicy replay(script);
      auto again = snapshots(init, replay, nullptr);
      if (again != original)
        return fail(o, "program " + std::to_string(i) + " replay " + std::to_string(round + 1) + " diverged");
    }
    steps += recorded.size();
  }
  o.seconds = since(t0);
  o.detail = std::to_string(mods.size()) + " recorded runs, " + std::to_string(steps) + " steps, replayed twice each";
  return o;
}

}  // namespace rerl::testing
