#include "rerl/json_io.hpp"

#include <stdexcept>

namespace rerl {

namespace {

Json message_json(const TaggedMessage& m) { return Json{{"id", to_string(m.id)}, {"value", m.value.to_string()}}; }

std::uint64_t parse_index(const Json& j, char prefix, const char* what) {
  if (j.is_number_integer() && j.get<std::int64_t>() >= 0) return j.get<std::uint64_t>();
  if (!j.is_string()) throw std::invalid_argument(std::string("expected a ") + what);
  std::string t = j.get<std::string>();
  if (t.size() > 2 && t.front() == '<' && t.back() == '>') t = t.substr(1, t.size() - 2);
  if (t.size() < 2 || t[0] != prefix) throw std::invalid_argument(std::string("bad ") + what + " '" + t + "'");
  for (std::size_t i = 1; i < t.size(); ++i)
    if (t[i] < '0' || t[i] > '9') throw std::invalid_argument(std::string("bad ") + what + " '" + t + "'");
  return std::stoull(t.substr(1));
}

}  // namespace

Json snapshot_json(const RSystem& sys, bool with_history) {
  Json gamma = Json::array();
  for (const auto& [key, queue] : sys.gamma.queues()) {
    Json msgs = Json::array();
    for (const auto& m : queue) msgs.push_back(message_json(m));
    gamma.push_back({{"from", to_string(key.first)}, {"to", to_string(key.second)}, {"messages", msgs}});
  }
  Json procs = Json::array();
  for (const auto& [pid, p] : sys.pool) {
    Json j;
    j["pid"] = to_string(pid);
    j["env"] = p.env.to_string();
    j["expr"] = p.expr.to_string();
    Json mb = Json::array();
    for (const auto& m : p.mailbox) mb.push_back(message_json(m));
    j["mailbox"] = mb;
    if (p.mark) {
      j["status"] = "rolling-back";
      Json psi = Json::array();
      for (const auto& c : *p.mark) psi.push_back(c.to_string());
      j["mark"] = psi;
    } else {
      Probe pr = probe_process(*sys.module, p.env, p.expr, p.payloads());
      j["status"] = to_string(pr.status);
      if (pr.status == ProcStatus::Failed) j["error"] = pr.error;
      j["mark"] = nullptr;
    }
    j["history_len"] = p.history.size();
    Json cps = Json::array();
    for (UniqueId t : p.checkpoints()) cps.push_back(to_string(t));
    j["checkpoints"] = cps;
    if (with_history) {
      Json h = Json::array();
      for (const HistoryEvent* ev : p.history.events()) h.push_back(ev->to_string());
      j["history"] = h;
    }
    procs.push_back(std::move(j));
  }
  return Json{{"gamma", gamma}, {"processes", procs}};
}

Json trace_json(const TraceEvent& ev, std::size_t step) {
  Json j{{"step", step}, {"dir", ev.dir}, {"rule", ev.rule}, {"pid", to_string(ev.pid)}, {"label", ev.label}};
  if (ev.id) j["id"] = to_string(*ev.id);
  j["history_len"] = ev.history_len;
  return j;
}

Json choice_json(const RSystem& sys, const StepChoice& c) {
  Json j{{"choice", c.to_string()}};
  if (c.kind == StepChoice::Kind::Local) {
    j["kind"] = "local";
    j["pid"] = to_string(c.pid);
  } else {
    j["kind"] = "deliver";
    j["sender"] = to_string(c.sender);
    j["pid"] = to_string(c.pid);
    if (const auto* q = sys.gamma.find(c.sender, c.pid)) j["message"] = message_json(q->front());
  }
  return j;
}

StepChoice choice_from_json(const Json& j) {
  if (j.is_string()) return StepChoice::parse(j.get<std::string>());
  if (j.is_object() && j.contains("choice") && j.at("choice").is_string())
    return StepChoice::parse(j.at("choice").get<std::string>());
  if (!j.is_object() || !j.contains("kind") || !j.contains("pid")) throw std::invalid_argument("bad choice");
  const Json& kind = j.at("kind");
  if (kind == "local") return StepChoice::local(pid_from_json(j.at("pid")));
  if (kind == "deliver" && j.contains("sender"))
    return StepChoice::deliver(pid_from_json(j.at("sender")), pid_from_json(j.at("pid")));
  throw std::invalid_argument("bad choice");
}

UniqueId unique_id_from_json(const Json& j) { return UniqueId{parse_index(j, 't', "checkpoint")}; }

Pid pid_from_json(const Json& j) { return Pid{parse_index(j, 'p', "pid")}; }

Json report_json(const CheckReport& r) {
  Json vs = Json::array();
  for (const auto& v : r.violations) vs.push_back({{"choice_seq", v.moves}, {"diff", v.diff}});
  return Json{{"checked_states", r.checked_states}, {"violations", vs}, {"truncated", r.truncated}};
}

}  // namespace rerl
