#include "rerl/session.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "rerl/error.hpp"
#include "rerl/parser.hpp"
#include "rerl/rollback.hpp"

namespace rerl {

namespace {

Response error(int status, const std::string& message) { return Response{status, Json{{"error", message}}}; }

std::vector<std::string> split_path(const std::string& path) {
  std::vector<std::string> out;
  std::string cur;
  std::string p = path.substr(0, path.find('?'));
  for (char c : p) {
    if (c == '/') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

Json parse_body(const std::string& body) {
  if (body.empty()) return Json::object();
  Json j = Json::parse(body);
  if (!j.is_object()) throw std::invalid_argument("body must be a JSON object");
  return j;
}

const Json& field(const Json& body, const char* name) {
  if (!body.contains(name)) throw std::invalid_argument(std::string("missing field '") + name + "'");
  return body.at(name);
}

Pid known_pid(const RSystem& sys, const Json& j) {
  Pid p = pid_from_json(j);
  if (!sys.pool.count(p)) throw std::invalid_argument("no process " + to_string(p));
  return p;
}

}  // namespace

Json session_state(const RSystem& sys) { return snapshot_json(sys, true); }

Json session_choices(const RSystem& sys) {
  Json fwd = Json::array();
  for (const auto& c : enabled_forward(sys)) fwd.push_back(choice_json(sys, c));
  Json back = Json::array();
  for (const auto& [pid, p] : sys.pool) {
    if (!p.mark) continue;
    std::string rule;
    try {
      rule = rule_name(backward_rule(sys, pid));
    } catch (const StuckRollback&) {
      rule = "Stuck";
    }
    back.push_back({{"pid", to_string(pid)}, {"rule", rule}, {"enabled", rule != "Blocked" && rule != "Stuck"}});
  }
  return Json{{"forward", fwd}, {"backward", back}};
}

SessionService::SessionService(std::optional<std::string> persist_dir) : persist_dir_(std::move(persist_dir)) {}

Response SessionService::handle(const std::string& method, const std::string& path, const std::string& body) {
  auto parts = split_path(path);
  if (parts.size() < 2 || parts[0] != "v1" || parts[1] != "sessions") return error(404, "no such route");
  if (parts.size() == 2) {
    if (method != "POST") return error(405, "method not allowed");
    return create(body);
  }
  if (parts.size() > 4) return error(404, "no such route");
  const std::string& id = parts[2];
  std::shared_ptr<Session> s;
  {
    std::lock_guard lock(mu_);
    auto it = sessions_.find(id);
    if (it == sessions_.end()) return error(404, "unknown session " + id);
    s = it->second;
    if (parts.size() == 3 && method == "DELETE") {
      sessions_.erase(it);
      return Response{204, nullptr};
    }
  }
  std::lock_guard lock(s->mu);
  return on_session(*s, id, method, parts.size() == 4 ? parts[3] : "state", body);
}

Response SessionService::create(const std::string& body) {
  try {
    Json j = parse_body(body);
    std::string source = field(j, "source").get<std::string>();
    FunName entry = parse_fun_name(j.value("entry", std::string("main/0")));
    auto module = std::make_shared<const Module>(parse_module(source));
    auto s = std::make_shared<Session>();
    s->source = source;
    s->sys = make_initial_rsystem(module, entry);
    std::string id;
    {
      std::lock_guard lock(mu_);
      id = "s" + std::to_string(next_id_++);
      sessions_[id] = s;
    }
    std::lock_guard lock(s->mu);
    persist(id, *s);
    return Response{201, Json{{"id", id}, {"state", session_state(s->sys)}}};
  } catch (const SyntaxError& e) {
    return Response{422, Json{{"error", e.what()}, {"line", e.line()}, {"column", e.column()}}};
  } catch (const std::exception& e) {
    return error(422, e.what());
  }
}

Response SessionService::on_session(Session& s, const std::string& id, const std::string& method,
                                    const std::string& action, const std::string& body) {
  const bool get = method == "GET";
  const bool post = method == "POST";
  try {
    if (action == "state" && get) return Response{200, session_state(s.sys)};
    if (action == "choices" && get) return Response{200, session_choices(s.sys)};
    if (!post) return error(405, "method not allowed");

    Json j = parse_body(body);
    RSystem next;
    Json out;
    if (action == "step") {
      StepChoice c = choice_from_json(field(j, "choice"));
      TraceEvent ev;
      next = fstep(s.sys, c, &ev);
      out["event"] = trace_json(ev, ++s.step);
    } else if (action == "rollback") {
      Pid pid = known_pid(s.sys, field(j, "pid"));
      UniqueId t = unique_id_from_json(field(j, "checkpoint"));
      std::string warning;
      next = request_rollback(s.sys, pid, t, &warning);
      if (!warning.empty()) out["warning"] = warning;
    } else if (action == "bstep") {
      Pid pid = known_pid(s.sys, field(j, "pid"));
      TraceEvent ev;
      next = bstep(s.sys, pid, &ev);
      out["event"] = trace_json(ev, ++s.step);
    } else if (action == "drive" || action == "back") {
      std::vector<TraceEvent> trace;
      next = action == "drive" ? rollback_drive(s.sys, &trace) : step_back(s.sys, known_pid(s.sys, field(j, "pid")), &trace);
      Json evs = Json::array();
      for (const auto& ev : trace) evs.push_back(trace_json(ev, ++s.step));
      out["events"] = evs;
    } else if (action == "revert") {
      if (s.undo.empty()) return error(409, "nothing to revert");
      s.sys = s.undo.back();
      s.undo.pop_back();
      persist(id, s);
      return Response{200, Json{{"state", session_state(s.sys)}}};
    } else {
      return error(404, "no such route");
    }
    s.undo.push_back(s.sys);
    s.sys = std::move(next);
    persist(id, s);
    out["state"] = session_state(s.sys);
    return Response{200, out};
  } catch (const NotEnabled& e) {
    return error(409, e.what());
  } catch (const StuckRollback& e) {
    return error(500, e.what());
  } catch (const Json::exception& e) {
    return error(422, e.what());
  } catch (const std::invalid_argument& e) {
    return error(422, e.what());
  } catch (const std::exception& e) {
    return error(500, e.what());
  }
}

void SessionService::persist(const std::string& id, Session& s) {
  if (!persist_dir_) return;
  namespace fs = std::filesystem;
  fs::path dir = fs::path(*persist_dir_) / id;
  fs::create_directories(dir);
  if (s.saved == 0) std::ofstream(dir / "source.rl") << s.source;
  std::ostringstream name;
  name << std::setw(6) << std::setfill('0') << s.saved++ << ".json";
  std::ofstream(dir / name.str()) << session_state(s.sys).dump(2) << "\n";
}

}  // namespace rerl
