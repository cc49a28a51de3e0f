#include "rerl/system.hpp"

#include <sstream>

#include "rerl/error.hpp"

namespace rerl {

std::string StepChoice::to_string() const {
  if (kind == Kind::Local) return "local " + rerl::to_string(pid);
  return "deliver " + rerl::to_string(sender) + " " + rerl::to_string(pid);
}

namespace {

Pid parse_pid_token(const std::string& tok) {
  std::string t = tok;
  if (t.size() > 2 && t.front() == '<' && t.back() == '>') t = t.substr(1, t.size() - 2);
  if (t.size() < 2 || t[0] != 'p') throw std::invalid_argument("bad pid '" + tok + "'");
  std::size_t used = 0;
  unsigned long long n = std::stoull(t.substr(1), &used);
  if (used != t.size() - 1) throw std::invalid_argument("bad pid '" + tok + "'");
  return Pid{n};
}

}  // namespace

StepChoice StepChoice::parse(const std::string& text) {
  std::istringstream in(text);
  std::string verb, a, b, extra;
  in >> verb >> a >> b >> extra;
  if (verb == "local" && !a.empty() && b.empty()) return local(parse_pid_token(a));
  if (verb == "deliver" && !b.empty() && extra.empty())
    return deliver(parse_pid_token(a), parse_pid_token(b));
  throw std::invalid_argument("bad choice '" + text + "'");
}

std::string to_string(ProcStatus s) {
  switch (s) {
    case ProcStatus::Running:
      return "running";
    case ProcStatus::Suspended:
      return "suspended";
    case ProcStatus::Finished:
      return "finished";
    case ProcStatus::Failed:
      return "failed";
  }
  return "?";
}

std::optional<RecMatch> matchrec(const Module& module, const ClauseList& clauses,
                                 const std::vector<Value>& mailbox, const Env& env) {
  for (std::size_t i = 0; i < mailbox.size(); ++i) {
    if (auto m = match_case(module, mailbox[i], clauses, env))
      return RecMatch{std::move(m->bindings), std::move(m->body), i};
  }
  return std::nullopt;
}

Probe probe_process(const Module& module, const Env& env, const Expr& expr,
                    const std::vector<Value>& mailbox) {
  Probe p;
  try {
    p.step = step_expr(module, env, expr);
    if (!p.step) {
      p.status = ProcStatus::Finished;
      return p;
    }
    if (const auto* rec = std::get_if<RecLabel>(&p.step->label)) {
      p.rec = matchrec(module, *rec->clauses, mailbox, rec->scope_env);
      p.status = p.rec ? ProcStatus::Running : ProcStatus::Suspended;
      return p;
    }
    p.status = ProcStatus::Running;
  } catch (const RuntimeError& e) {
    p.status = ProcStatus::Failed;
    p.step.reset();
    p.error = e.what();
  }
  return p;
}

System make_initial_system(std::shared_ptr<const Module> module, const FunName& entry) {
  if (entry.arity != 0) throw std::invalid_argument("entry function must have arity 0");
  if (!module->find(entry)) throw std::invalid_argument("undefined entry " + entry.to_string());
  System sys;
  sys.module = std::move(module);
  Pid root{sys.next_pid++};
  sys.pool.emplace(root, Process{root, Env(), Expr::apply(entry, {}), {}});
  return sys;
}

ProcStatus status(const System& sys, Pid pid) {
  const Process& p = sys.pool.at(pid);
  return probe_process(*sys.module, p.env, p.expr, p.mailbox).status;
}

std::vector<StepChoice> enabled_standard(const System& sys) {
  std::vector<StepChoice> out;
  for (const auto& [pid, proc] : sys.pool) {
    if (probe_process(*sys.module, proc.env, proc.expr, proc.mailbox).status == ProcStatus::Running)
      out.push_back(StepChoice::local(pid));
  }
  for (const auto& [key, queue] : sys.gamma.queues()) {
    if (sys.pool.count(key.second)) out.push_back(StepChoice::deliver(key.first, key.second));
  }
  return out;
}

System step_system(const System& sys, const StepChoice& choice, StepInfo* info) {
  System next = sys;
  StepInfo local_info;
  StepInfo& out = info ? *info : local_info;
  out = StepInfo{};
  out.pid = choice.pid;

  if (choice.kind == StepChoice::Kind::Deliver) {
    auto it = next.pool.find(choice.pid);
    if (it == next.pool.end() || !next.gamma.find(choice.sender, choice.pid))
      throw NotEnabled(choice.to_string());
    Value m = next.gamma.pop_front(choice.sender, choice.pid);
    out.rule = "Sched";
    out.label = "sched(" + rerl::to_string(choice.sender) + ", " + m.to_string() + ")";
    out.message = m;
    it->second.mailbox.push_back(std::move(m));
    return next;
  }

  auto it = next.pool.find(choice.pid);
  if (it == next.pool.end()) throw NotEnabled(choice.to_string());
  Process& proc = it->second;
  Probe pr = probe_process(*next.module, proc.env, proc.expr, proc.mailbox);
  if (pr.status != ProcStatus::Running) throw NotEnabled(choice.to_string());
  Stepped& s = *pr.step;
  out.label = label_to_string(s.label);

  if (std::holds_alternative<TauLabel>(s.label)) {
    out.rule = "Exp";
    proc.env = std::move(s.env);
    proc.expr = std::move(s.expr);
  } else if (auto* send = std::get_if<SendLabel>(&s.label)) {
    out.rule = "Send";
    out.send_to = send->dest.as_pid();
    out.message = send->payload;
    next.gamma.push_back(proc.pid, send->dest.as_pid(), send->payload);
    // Messages carry no tag here, but the id is still consumed so that
    // checkpoint refs line up with the reversible run.
    ++next.next_id;
    proc.env = std::move(s.env);
    proc.expr = std::move(s.expr);
  } else if (std::holds_alternative<RecLabel>(s.label)) {
    out.rule = "Receive";
    RecMatch& m = *pr.rec;
    out.message = proc.mailbox[m.index];
    proc.mailbox.erase(proc.mailbox.begin() + static_cast<std::ptrdiff_t>(m.index));
    Filled f = fill_hole(s.env, s.expr, m.body, m.bindings);
    proc.env = std::move(f.env);
    proc.expr = std::move(f.expr);
  } else if (auto* sp = std::get_if<SpawnLabel>(&s.label)) {
    out.rule = "Spawn";
    Pid child{next.next_pid++};
    next.pool.emplace(child, Process{child, sp->scope_env, Expr::apply(sp->fname, sp->args), {}});
    Filled f = fill_hole(s.env, s.expr, Expr::val(Value::pid(child)));
    proc.env = std::move(f.env);
    proc.expr = std::move(f.expr);
    out.label += " = " + Value::pid(child).to_string();
  } else if (std::holds_alternative<SelfLabel>(s.label)) {
    out.rule = "Self";
    Filled f = fill_hole(s.env, s.expr, Expr::val(Value::pid(proc.pid)));
    proc.env = std::move(f.env);
    proc.expr = std::move(f.expr);
  } else {
    out.rule = "Check";
    UniqueId t{next.next_id++};
    Filled f = fill_hole(s.env, s.expr, Expr::val(Value::ref(t)));
    proc.env = std::move(f.env);
    proc.expr = std::move(f.expr);
    out.label += " = " + Value::ref(t).to_string();
  }
  return next;
}

}  // namespace rerl
