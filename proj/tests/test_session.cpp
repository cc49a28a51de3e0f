#include <doctest.h>

#include <httplib.h>

#include <atomic>
#include <filesystem>
#include <random>
#include <thread>

#include "gen.hpp"
#include "rerl/rollback.hpp"
#include "rerl/server.hpp"
#include "rerl/session.hpp"
#include "scenarios.hpp"
#include "support.hpp"

using namespace rerl;
using namespace rerl::testing;

namespace {

std::string create_body(const std::string& source) { return Json{{"source", source}, {"entry", "main/0"}}.dump(); }

std::string create(SessionService& svc, const std::string& source) {
  Response r = svc.handle("POST", "/v1/sessions", create_body(source));
  REQUIRE(r.status == 201);
  return r.body["id"].get<std::string>();
}

Response step(SessionService& svc, const std::string& id, const StepChoice& c) {
  return svc.handle("POST", "/v1/sessions/" + id + "/step", Json{{"choice", c.to_string()}}.dump());
}

}  // namespace

TEST_CASE("session: creating from the client-server source shows one process at its entry call") {
  SessionService svc;
  Response r = svc.handle("POST", "/v1/sessions", create_body(read_file(program_path("clientserver_check.rl"))));
  REQUIRE(r.status == 201);
  const Json& procs = r.body["state"]["processes"];
  REQUIRE(procs.size() == 1);
  CHECK(procs[0]["pid"] == "p1");
  CHECK(procs[0]["expr"] == "apply main/0 ()");
  CHECK(r.body["state"]["gamma"].empty());
  std::string id = r.body["id"];
  CHECK(svc.handle("GET", "/v1/sessions/" + id + "/state", "").body == r.body["state"]);
  CHECK(svc.handle("GET", "/v1/sessions/" + id, "").body == r.body["state"]);
}

TEST_CASE("session: stepping the only enabled choice grows the history") {
  SessionService svc;
  std::string id = create(svc, "module m = main/0 = fun () -> let X = check in {X, X}");
  for (int i = 0;; ++i) {
    REQUIRE(i < 20);
    Json choices = svc.handle("GET", "/v1/sessions/" + id + "/choices", "").body;
    if (choices["forward"].empty()) break;
    REQUIRE(choices["forward"].size() == 1);
    Json before = svc.handle("GET", "/v1/sessions/" + id + "/state", "").body;
    Response r = svc.handle("POST", "/v1/sessions/" + id + "/step", Json{{"choice", choices["forward"][0]}}.dump());
    REQUIRE(r.status == 200);
    CHECK(r.body["state"]["processes"][0]["history_len"].get<std::size_t>() >=
          before["processes"][0]["history_len"].get<std::size_t>() + 1);
    CHECK(r.body["event"]["step"] == i + 1);
    CHECK(r.body["event"]["dir"] == "fwd");
  }
  CHECK(svc.handle("GET", "/v1/sessions/" + id + "/state", "").body["processes"][0]["status"] == "finished");
}

TEST_CASE("session: error statuses") {
  SessionService svc;
  CHECK(svc.handle("GET", "/v1/sessions/nope/state", "").status == 404);
  CHECK(svc.handle("GET", "/v2/sessions", "").status == 404);
  CHECK(svc.handle("POST", "/v1/sessions", "{not json").status == 422);
  CHECK(svc.handle("POST", "/v1/sessions", "{}").status == 422);
  Response bad = svc.handle("POST", "/v1/sessions", create_body("module m =\n  main/0 = fun () -> let in"));
  CHECK(bad.status == 422);
  CHECK(bad.body["line"] == 2);
  CHECK(svc.handle("POST", "/v1/sessions", Json{{"source", "module m = main/0 = fun () -> ok"}, {"entry", "go/0"}}.dump())
            .status == 422);

  std::string id = create(svc, "module m = main/0 = fun () -> let _ = check in ok");
  CHECK(step(svc, id, StepChoice::local(Pid{2})).status == 409);
  CHECK(step(svc, id, StepChoice::deliver(Pid{1}, Pid{1})).status == 409);
  CHECK(svc.handle("POST", "/v1/sessions/" + id + "/step", "{}").status == 422);
  CHECK(svc.handle("POST", "/v1/sessions/" + id + "/step", R"({"choice":"fly p1"})").status == 422);
  CHECK(svc.handle("POST", "/v1/sessions/" + id + "/bstep", R"({"pid":"p1"})").status == 409);
  CHECK(svc.handle("POST", "/v1/sessions/" + id + "/rollback", R"({"pid":"p9","checkpoint":"t1"})").status == 422);
  CHECK(svc.handle("POST", "/v1/sessions/" + id + "/frobnicate", "{}").status == 404);
  CHECK(svc.handle("PUT", "/v1/sessions/" + id + "/step", "{}").status == 405);
  CHECK(svc.handle("POST", "/v1/sessions/" + id + "/revert", "").status == 409);

  // A checkpoint that is not in the history leaves the rollback stuck.
  while (!svc.handle("GET", "/v1/sessions/" + id + "/choices", "").body["forward"].empty())
    REQUIRE(step(svc, id, StepChoice::local(Pid{1})).status == 200);
  Response warn = svc.handle("POST", "/v1/sessions/" + id + "/rollback", R"({"pid":"p1","checkpoint":"t42"})");
  CHECK(warn.status == 200);
  CHECK(warn.body.contains("warning"));
  Json choices = svc.handle("GET", "/v1/sessions/" + id + "/choices", "").body;
  REQUIRE(choices["backward"].size() == 1);
  Response stuck = svc.handle("POST", "/v1/sessions/" + id + "/drive", "");
  CHECK(stuck.status == 500);
  CHECK(stuck.body["error"].get<std::string>().size() > 0);

  CHECK(svc.handle("DELETE", "/v1/sessions/" + id, "").status == 204);
  CHECK(svc.handle("GET", "/v1/sessions/" + id + "/state", "").status == 404);
}

TEST_CASE("session: rollback of the first client then drive restores the state before its checkpoint") {
  std::string source = read_file(program_path("clientserver_check.rl"));
  SessionService svc;
  std::string id = create(svc, source);
  RSystem lib = make_initial_rsystem(module_of(source), main0());
  RSystem before_check;
  for (const auto& c : client_server_script(true, false)) {
    if (c == StepChoice::local(Pid{1}) && lib.pool.at(Pid{1}).checkpoints().empty() &&
        !fstep(lib, c).pool.at(Pid{1}).checkpoints().empty())
      before_check = lib;
    REQUIRE(step(svc, id, c).status == 200);
    lib = fstep(lib, c);
  }
  CHECK(svc.handle("GET", "/v1/sessions/" + id + "/state", "").body == session_state(lib));

  UniqueId t = lib.pool.at(Pid{1}).checkpoints().at(0);
  CHECK(to_string(t) == "t4");
  Response r = svc.handle("POST", "/v1/sessions/" + id + "/rollback", Json{{"pid", "p1"}, {"checkpoint", "t4"}}.dump());
  REQUIRE(r.status == 200);
  CHECK(r.body["state"]["processes"][0]["mark"] == Json::array({"#ch^t4"}));
  Json choices = svc.handle("GET", "/v1/sessions/" + id + "/choices", "").body;
  CHECK(choices["forward"].size() == enabled_forward(request_rollback(lib, Pid{1}, t)).size());

  Response d = svc.handle("POST", "/v1/sessions/" + id + "/drive", "");
  REQUIRE(d.status == 200);
  CHECK(d.body["events"].size() > 0);
  for (const auto& ev : d.body["events"]) CHECK(ev["dir"] == "back");
  CHECK(d.body["state"] == session_state(before_check));
  CHECK(d.body["state"] == session_state(rollback_drive(request_rollback(lib, Pid{1}, t))));

  // Revert goes back to the marked state, then to the one before the request.
  CHECK(svc.handle("POST", "/v1/sessions/" + id + "/revert", "").body["state"] == r.body["state"]);
  CHECK(svc.handle("POST", "/v1/sessions/" + id + "/revert", "").body["state"] == session_state(lib));
}

TEST_CASE("session: bstep and back follow the library") {
  std::string source = read_file(program_path("clientserver_check.rl"));
  SessionService svc;
  std::string id = create(svc, source);
  RSystem lib = make_initial_rsystem(module_of(source), main0());
  for (const auto& c : client_server_script(true, true)) {
    REQUIRE(step(svc, id, c).status == 200);
    lib = fstep(lib, c);
  }
  Response b = svc.handle("POST", "/v1/sessions/" + id + "/back", R"({"pid":"p1"})");
  REQUIRE(b.status == 200);
  lib = step_back(lib, Pid{1});
  CHECK(b.body["state"] == session_state(lib));

  svc.handle("POST", "/v1/sessions/" + id + "/rollback", R"({"pid":"p3","checkpoint":"t1"})");
  lib = request_rollback(lib, Pid{3}, UniqueId{1});
  for (int i = 0; i < 500; ++i) {
    Json choices = svc.handle("GET", "/v1/sessions/" + id + "/choices", "").body;
    if (choices["backward"].empty()) break;
    Json pick;
    for (const auto& e : choices["backward"])
      if (e["enabled"] && pick.is_null()) pick = e;
    REQUIRE_FALSE(pick.is_null());
    Response r = svc.handle("POST", "/v1/sessions/" + id + "/bstep", Json{{"pid", pick["pid"]}}.dump());
    REQUIRE(r.status == 200);
    CHECK(r.body["event"]["rule"] == pick["rule"]);
    lib = bstep(lib, pid_from_json(pick["pid"]));
    CHECK(r.body["state"] == session_state(lib));
  }
  for (const auto& [pid, p] : lib.pool) CHECK_FALSE(p.mark);
}

TEST_CASE("property: listed choices are the enabled forward steps plus backward rules of marked processes") {
  Gen g(101);
  for (int prog = 0; prog < 25; ++prog) {
    std::string src = g.program();
    SessionService svc;
    std::string id = create(svc, src);
    RSystem lib = make_initial_rsystem(module_of(src), main0());
    std::mt19937_64 rng(prog);
    for (int i = 0; i < 60; ++i) {
      Json choices = svc.handle("GET", "/v1/sessions/" + id + "/choices", "").body;
      auto en = enabled_forward(lib);
      REQUIRE(choices["forward"].size() == en.size());
      for (std::size_t k = 0; k < en.size(); ++k) CHECK(choice_from_json(choices["forward"][k]) == en[k]);
      std::vector<Pid> marked;
      for (const auto& [pid, p] : lib.pool)
        if (p.mark) marked.push_back(pid);
      REQUIRE(choices["backward"].size() == marked.size());
      for (std::size_t k = 0; k < marked.size(); ++k) {
        CHECK(pid_from_json(choices["backward"][k]["pid"]) == marked[k]);
        CHECK(choices["backward"][k]["rule"] == rule_name(backward_rule(lib, marked[k])));
      }
      // Mostly forward steps, sometimes a rollback request or a backward step.
      unsigned roll = rng() % 10;
      if (!marked.empty() && roll < 5) {
        Pid p = marked[rng() % marked.size()];
        if (backward_rule(lib, p) == BackwardRule::Blocked) continue;
        REQUIRE(svc.handle("POST", "/v1/sessions/" + id + "/bstep", Json{{"pid", to_string(p)}}.dump()).status == 200);
        lib = bstep(lib, p);
      } else if (roll == 5) {
        std::vector<std::pair<Pid, UniqueId>> targets;
        for (const auto& [pid, p] : lib.pool)
          for (UniqueId t : p.checkpoints()) targets.push_back({pid, t});
        if (targets.empty()) continue;
        auto [p, t] = targets[rng() % targets.size()];
        REQUIRE(svc.handle("POST", "/v1/sessions/" + id + "/rollback",
                           Json{{"pid", to_string(p)}, {"checkpoint", to_string(t)}}.dump())
                    .status == 200);
        lib = request_rollback(lib, p, t);
      } else if (!en.empty()) {
        StepChoice c = en[rng() % en.size()];
        REQUIRE(step(svc, id, c).status == 200);
        lib = fstep(lib, c);
      }
      CHECK(svc.handle("GET", "/v1/sessions/" + id + "/state", "").body == session_state(lib));
    }
  }
}

TEST_CASE("session: requests on one session are serialized") {
  SessionService svc;
  std::string id = create(svc,
                          "module m =\n"
                          "  main/0 = fun () -> apply loop/1 (0),\n"
                          "  loop/1 = fun (N) -> case N < 1000 of true -> apply loop/1 (N + 1); false -> N end");
  std::atomic<int> ok{0};
  std::vector<std::thread> threads;
  for (int t = 0; t < 4; ++t) {
    threads.emplace_back([&] {
      for (int i = 0; i < 25; ++i) {
        if (step(svc, id, StepChoice::local(Pid{1})).status == 200) ++ok;
        svc.handle("GET", "/v1/sessions/" + id + "/choices", "");
      }
    });
  }
  for (auto& th : threads) th.join();
  CHECK(ok == 100);
  Json state = svc.handle("GET", "/v1/sessions/" + id + "/state", "").body;
  CHECK(state["processes"][0]["history_len"] == 100);
}

TEST_CASE("session: --persist writes the source and one snapshot per state") {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / ("rerl_persist_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  {
    SessionService svc(dir.string());
    std::string id = create(svc, "module m = main/0 = fun () -> let X = 1 in X");
    step(svc, id, StepChoice::local(Pid{1}));
    step(svc, id, StepChoice::local(Pid{1}));
    CHECK(fs::exists(dir / id / "source.rl"));
    CHECK(fs::exists(dir / id / "000000.json"));
    CHECK(fs::exists(dir / id / "000002.json"));
    CHECK_FALSE(fs::exists(dir / id / "000003.json"));
    Json last = Json::parse(read_file((dir / id / "000002.json").string()));
    CHECK(last == svc.handle("GET", "/v1/sessions/" + id + "/state", "").body);
  }
  fs::remove_all(dir);
}

TEST_CASE("http: a real localhost round trip with CORS headers") {
  SessionService svc;
  HttpServer server(svc);
  int port = server.bind("127.0.0.1", 0);
  REQUIRE(port > 0);
  std::thread th([&] { server.listen(); });
  struct Stop {
    HttpServer& s;
    std::thread& t;
    ~Stop() {
      s.stop();
      t.join();
    }
  } stop{server, th};
  httplib::Client cli("127.0.0.1", port);
  cli.set_connection_timeout(5);

  auto created = cli.Post("/v1/sessions", create_body(read_file(program_path("ex1.rl"))), "application/json");
  REQUIRE(created);
  CHECK(created->status == 201);
  CHECK(created->get_header_value("Content-Type") == "application/json");
  CHECK(created->get_header_value("Access-Control-Allow-Origin") == "*");
  std::string id = Json::parse(created->body)["id"];

  auto choices = cli.Get("/v1/sessions/" + id + "/choices");
  REQUIRE(choices);
  CHECK(Json::parse(choices->body)["forward"][0]["choice"] == "local p1");
  auto stepped = cli.Post("/v1/sessions/" + id + "/step", R"({"choice":"local p1"})", "application/json");
  REQUIRE(stepped);
  CHECK(stepped->status == 200);
  CHECK(Json::parse(stepped->body)["event"]["rule"] == "Internal");

  auto pre = cli.Options("/v1/sessions/" + id + "/step");
  REQUIRE(pre);
  CHECK(pre->status == 204);
  CHECK(pre->get_header_value("Access-Control-Allow-Methods").find("POST") != std::string::npos);

  auto missing = cli.Get("/v1/sessions/zzz/state");
  REQUIRE(missing);
  CHECK(missing->status == 404);
  auto del = cli.Delete("/v1/sessions/" + id);
  REQUIRE(del);
  CHECK(del->status == 204);
}
