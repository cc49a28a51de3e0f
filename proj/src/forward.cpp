#include "rerl/reversible.hpp"

#include "rerl/error.hpp"

namespace rerl {

std::string TaggedMessage::to_string() const {
  return "{" + Value::ref(id).to_string() + ", " + value.to_string() + "}";
}

std::string Checkpoint::to_string() const {
  switch (kind) {
    case Kind::Ch:
      return "#ch^" + rerl::to_string(UniqueId{id});
    case Kind::Alpha:
      return "#alpha^" + rerl::to_string(UniqueId{id});
    case Kind::Sp:
      return "#sp^" + rerl::to_string(Pid{id});
  }
  return "?";
}

std::string to_string(const CheckpointSet& psi) {
  std::string out = "{";
  bool first = true;
  for (const auto& c : psi) {
    if (!first) out += ", ";
    first = false;
    out += c.to_string();
  }
  return out + "}";
}

namespace {

std::string mailbox_to_string(const std::vector<TaggedMessage>& q) {
  std::string out = "[";
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (i) out += ", ";
    out += q[i].to_string();
  }
  return out + "]";
}

}  // namespace

std::string HistoryEvent::to_string() const {
  std::string control = env.to_string() + ", " + expr.to_string();
  switch (kind) {
    case Kind::Tau:
      return "tau(" + control + ")";
    case Kind::Check:
      return "check(" + control + ")";
    case Kind::Rec:
      return "rec(" + control + ", " + mailbox_to_string(mailbox) + ")";
    case Kind::Send:
      return "send(" + Value::pid(peer).to_string() + ", " + control + ", " +
             Value::ref(id).to_string() + ")";
    case Kind::Spawn:
      return "spawn(" + control + ", " + Value::pid(peer).to_string() + ")";
    case Kind::Self:
      return "self(" + control + ")";
    case Kind::Alpha:
      return "alpha(" + Value::pid(peer).to_string() + ", " + TaggedMessage{id, value}.to_string() + ")";
    case Kind::Mark:
      return "#ch^" + Value::ref(id).to_string();
  }
  return "?";
}

History History::push(HistoryEvent ev) const {
  History h;
  h.top_ = std::make_shared<const Cell>(Cell{std::move(ev), top_, size() + 1});
  return h;
}

History History::pop() const {
  if (!top_) throw InvariantViolation("pop of empty history");
  History h;
  h.top_ = top_->next;
  return h;
}

std::vector<const HistoryEvent*> History::events() const {
  std::vector<const HistoryEvent*> out;
  out.reserve(size());
  for (const Cell* c = top_.get(); c; c = c->next.get()) out.push_back(&c->event);
  return out;
}

bool operator==(const History& a, const History& b) {
  if (a.size() != b.size()) return false;
  const History::Cell* x = a.top_.get();
  const History::Cell* y = b.top_.get();
  while (x != y) {
    if (!(x->event == y->event)) return false;
    x = x->next.get();
    y = y->next.get();
  }
  return true;
}

std::vector<Value> RProcess::payloads() const {
  std::vector<Value> out;
  out.reserve(mailbox.size());
  for (const auto& m : mailbox) out.push_back(m.value);
  return out;
}

std::vector<UniqueId> RProcess::checkpoints() const {
  std::vector<UniqueId> out;
  for (const HistoryEvent* ev : history.events()) {
    if (ev->kind == HistoryEvent::Kind::Mark) out.push_back(ev->id);
  }
  return out;
}

RSystem make_initial_rsystem(std::shared_ptr<const Module> module, const FunName& entry) {
  System base = make_initial_system(std::move(module), entry);
  RSystem sys;
  sys.module = base.module;
  sys.next_pid = base.next_pid;
  sys.next_id = base.next_id;
  for (const auto& [pid, p] : base.pool) sys.pool.emplace(pid, RProcess{pid, History(), p.env, p.expr, {}, std::nullopt});
  return sys;
}

ProcStatus rstatus(const RSystem& sys, Pid pid) {
  const RProcess& p = sys.pool.at(pid);
  return probe_process(*sys.module, p.env, p.expr, p.payloads()).status;
}

std::vector<StepChoice> enabled_forward(const RSystem& sys) {
  std::vector<StepChoice> out;
  for (const auto& [pid, proc] : sys.pool) {
    if (proc.mark) continue;
    if (probe_process(*sys.module, proc.env, proc.expr, proc.payloads()).status == ProcStatus::Running)
      out.push_back(StepChoice::local(pid));
  }
  for (const auto& [key, queue] : sys.gamma.queues()) {
    auto it = sys.pool.find(key.second);
    if (it != sys.pool.end() && !it->second.mark) out.push_back(StepChoice::deliver(key.first, key.second));
  }
  return out;
}

namespace {

HistoryEvent snapshot(HistoryEvent::Kind kind, const RProcess& p) {
  HistoryEvent ev;
  ev.kind = kind;
  ev.env = p.env;
  ev.expr = p.expr;
  return ev;
}

}  // namespace

RSystem fstep(const RSystem& sys, const StepChoice& choice, TraceEvent* trace) {
  RSystem next = sys;
  TraceEvent local_trace;
  TraceEvent& out = trace ? *trace : local_trace;
  out = TraceEvent{};
  out.dir = "fwd";
  out.pid = choice.pid;

  auto it = next.pool.find(choice.pid);
  if (it == next.pool.end() || it->second.mark) throw NotEnabled(choice.to_string());
  RProcess& proc = it->second;

  if (choice.kind == StepChoice::Kind::Deliver) {
    if (!next.gamma.find(choice.sender, choice.pid)) throw NotEnabled(choice.to_string());
    TaggedMessage m = next.gamma.pop_front(choice.sender, choice.pid);
    HistoryEvent ev;
    ev.kind = HistoryEvent::Kind::Alpha;
    ev.peer = choice.sender;
    ev.id = m.id;
    ev.value = m.value;
    proc.history = proc.history.push(std::move(ev));
    out.rule = "Sched";
    out.label = "sched(" + rerl::to_string(choice.sender) + ", " + m.to_string() + ")";
    out.id = m.id;
    proc.mailbox.push_back(std::move(m));
    out.history_len = proc.history.size();
    return next;
  }

  Probe pr = probe_process(*next.module, proc.env, proc.expr, proc.payloads());
  if (pr.status != ProcStatus::Running) throw NotEnabled(choice.to_string());
  Stepped& s = *pr.step;
  out.label = label_to_string(s.label);

  if (std::holds_alternative<TauLabel>(s.label)) {
    out.rule = "Internal";
    proc.history = proc.history.push(snapshot(HistoryEvent::Kind::Tau, proc));
    proc.env = std::move(s.env);
    proc.expr = std::move(s.expr);
  } else if (auto* send = std::get_if<SendLabel>(&s.label)) {
    out.rule = "Send";
    UniqueId t{next.next_id++};
    HistoryEvent ev = snapshot(HistoryEvent::Kind::Send, proc);
    ev.peer = send->dest.as_pid();
    ev.id = t;
    proc.history = proc.history.push(std::move(ev));
    next.gamma.push_back(proc.pid, send->dest.as_pid(), TaggedMessage{t, send->payload});
    proc.env = std::move(s.env);
    proc.expr = std::move(s.expr);
    out.id = t;
  } else if (std::holds_alternative<RecLabel>(s.label)) {
    out.rule = "Receive";
    RecMatch& m = *pr.rec;
    HistoryEvent ev = snapshot(HistoryEvent::Kind::Rec, proc);
    ev.mailbox = proc.mailbox;
    ev.id = proc.mailbox[m.index].id;
    out.id = ev.id;
    proc.history = proc.history.push(std::move(ev));
    proc.mailbox.erase(proc.mailbox.begin() + static_cast<std::ptrdiff_t>(m.index));
    Filled f = fill_hole(s.env, s.expr, m.body, m.bindings);
    proc.env = std::move(f.env);
    proc.expr = std::move(f.expr);
  } else if (auto* sp = std::get_if<SpawnLabel>(&s.label)) {
    out.rule = "Spawn";
    Pid child{next.next_pid++};
    HistoryEvent ev = snapshot(HistoryEvent::Kind::Spawn, proc);
    ev.peer = child;
    proc.history = proc.history.push(std::move(ev));
    Filled f = fill_hole(s.env, s.expr, Expr::val(Value::pid(child)));
    proc.env = std::move(f.env);
    proc.expr = std::move(f.expr);
    next.pool.emplace(child, RProcess{child, History(), sp->scope_env,
                                      Expr::apply(sp->fname, sp->args), {}, std::nullopt});
    out.label += " = " + Value::pid(child).to_string();
  } else if (std::holds_alternative<SelfLabel>(s.label)) {
    out.rule = "Self";
    proc.history = proc.history.push(snapshot(HistoryEvent::Kind::Self, proc));
    Filled f = fill_hole(s.env, s.expr, Expr::val(Value::pid(proc.pid)));
    proc.env = std::move(f.env);
    proc.expr = std::move(f.expr);
  } else {
    out.rule = "Check";
    UniqueId t{next.next_id++};
    HistoryEvent mark;
    mark.kind = HistoryEvent::Kind::Mark;
    mark.id = t;
    proc.history = proc.history.push(std::move(mark)).push(snapshot(HistoryEvent::Kind::Check, proc));
    Filled f = fill_hole(s.env, s.expr, Expr::val(Value::ref(t)));
    proc.env = std::move(f.env);
    proc.expr = std::move(f.expr);
    out.id = t;
  }
  out.history_len = next.pool.at(choice.pid).history.size();
  return next;
}

System project(const RSystem& sys) {
  System out;
  out.module = sys.module;
  out.next_pid = sys.next_pid;
  out.next_id = sys.next_id;
  for (const auto& [key, queue] : sys.gamma.queues()) {
    for (const auto& m : queue) out.gamma.push_back(key.first, key.second, m.value);
  }
  for (const auto& [pid, p] : sys.pool) out.pool.emplace(pid, Process{pid, p.env, p.expr, p.payloads()});
  return out;
}

}  // namespace rerl
