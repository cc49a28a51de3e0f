#include "rerl/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "rerl/canonical.hpp"
#include "rerl/check.hpp"
#include "rerl/error.hpp"
#include "rerl/explore.hpp"
#include "rerl/json_io.hpp"
#include "rerl/parser.hpp"
#include "rerl/policy.hpp"
#include "rerl/rollback.hpp"
#include "rerl/server.hpp"

namespace rerl {

namespace {

struct Options {
  std::string file;
  std::string entry = "main/0";
  std::string policy = "roundrobin";
  std::uint64_t seed = 1;
  std::string script;
  std::string record;
  std::size_t max_steps = 1000;
  std::size_t max_depth = 60;
  std::size_t max_states = 200000;
  std::size_t runs = 20;
  std::size_t max_rollbacks = 2;
  std::string property = "loop";
  std::string mutation = "none";
  bool final_values = false;
  bool dump_history = false;
  std::string dot;
  int port = 8080;
  std::string host = "127.0.0.1";
  std::string persist;
};

std::string read_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

RSystem load(const Options& o) {
  auto module = std::make_shared<const Module>(parse_module(read_text(o.file)));
  return make_initial_rsystem(module, parse_fun_name(o.entry));
}

int failed_processes(const RSystem& sys, std::ostream& err) {
  int n = 0;
  for (const auto& [pid, p] : sys.pool) {
    if (p.mark) continue;
    Probe pr = probe_process(*sys.module, p.env, p.expr, p.payloads());
    if (pr.status == ProcStatus::Failed) {
      err << "runtime error in " << to_string(pid) << ": " << pr.error << "\n";
      ++n;
    }
  }
  return n;
}

int cmd_run(const Options& o, std::ostream& out, std::ostream& err) {
  RSystem init = load(o);
  std::unique_ptr<Policy> policy;
  if (o.policy == "roundrobin") {
    policy = std::make_unique<RoundRobinPolicy>();
  } else if (o.policy == "random") {
    policy = std::make_unique<RandomPolicy>(o.seed);
  } else {
    if (o.script.empty()) throw std::invalid_argument("--policy script needs --script FILE");
    policy = std::make_unique<ScriptPolicy>(parse_script(read_text(o.script)));
  }
  RunResult r = run_policy(init, *policy, o.max_steps);
  for (std::size_t i = 0; i < r.trace.size(); ++i) out << trace_json(r.trace[i], i + 1).dump() << "\n";
  out << Json{{"snapshot", snapshot_json(r.final_state, o.dump_history)}}.dump() << "\n";
  err << "stopped: " << r.stop_reason << " after " << r.choices.size() << " steps\n";
  if (!o.record.empty()) {
    std::ofstream rec(o.record);
    if (!rec) throw std::runtime_error("cannot write " + o.record);
    rec << format_script(r.choices);
  }
  return failed_processes(r.final_state, err) ? 1 : 0;
}

int cmd_explore(const Options& o, std::ostream& out) {
  System init = project(load(o));
  StateGraph g = explore(init, ExploreLimits{o.max_depth, o.max_states});
  out << "states " << g.canonical.size() << "\n";
  out << "edges " << g.edges.size() << "\n";
  out << "terminals " << g.terminals.size() << "\n";
  out << "truncated " << (g.truncated ? "true" : "false") << "\n";
  if (o.final_values) {
    std::set<std::string> lines;
    for (std::size_t t : g.terminals) {
      std::string line;
      for (const auto& [pid, v] : final_values(g.states[t]))
        line += (line.empty() ? "" : ", ") + to_string(pid) + " = " + v.to_string();
      lines.insert(rename_identifiers(line));
    }
    for (const auto& l : lines) out << "final " << l << "\n";
  }
  if (!o.dot.empty()) {
    std::ofstream d(o.dot);
    if (!d) throw std::runtime_error("cannot write " + o.dot);
    d << to_dot(g);
  }
  return 0;
}

int cmd_check(const Options& o, std::ostream& out) {
  RSystem init = load(o);
  CheckReport r;
  BackwardConfig config;
  if (o.mutation == "sched1-drops-oldest") config.mutation = Mutation::Sched1DropsOldest;
  if (o.property == "loop") {
    r = check_loop(init, LoopLimits{o.runs, o.max_depth, o.seed}, config);
  } else if (o.property == "soundness") {
    r = check_soundness(init, SoundnessLimits{o.max_depth, o.max_rollbacks, o.max_states}, config);
  } else {
    throw std::invalid_argument("unknown property " + o.property);
  }
  out << report_json(r).dump(2) << "\n";
  return r.violations.empty() ? 0 : 2;
}

class Repl {
 public:
  Repl(RSystem sys, std::ostream& out) : sys_(std::move(sys)), out_(out) {}

  void run(std::istream& in) {
    out_ << "commands: choices, step [n|choice], back <pid>, rollback <pid> <ckpt>, request <pid> <ckpt>,\n"
            "          bstep <pid>, drive, state, json, history <pid>, quit\n";
    std::string line;
    for (;;) {
      out_ << "rerl> " << std::flush;
      if (!std::getline(in, line)) break;
      std::istringstream words(line);
      std::string cmd;
      words >> cmd;
      if (cmd.empty()) continue;
      if (cmd == "quit" || cmd == "exit") break;
      std::vector<std::string> args;
      for (std::string w; words >> w;) args.push_back(w);
      try {
        command(cmd, args);
      } catch (const std::exception& e) {
        out_ << "error: " << e.what() << "\n";
      }
    }
  }

 private:
  void command(const std::string& cmd, const std::vector<std::string>& args) {
    if (cmd == "choices") {
      choices();
    } else if (cmd == "step") {
      auto en = enabled_forward(sys_);
      StepChoice c;
      if (args.empty() || (args.size() == 1 && std::isdigit(static_cast<unsigned char>(args[0][0])))) {
        std::size_t n = args.empty() ? 1 : std::stoul(args[0]);
        if (n == 0 || n > en.size()) throw NotEnabled("no choice " + std::to_string(n));
        c = en[n - 1];
      } else {
        std::string text;
        for (const auto& a : args) text += (text.empty() ? "" : " ") + a;
        c = StepChoice::parse(text);
      }
      TraceEvent ev;
      sys_ = fstep(sys_, c, &ev);
      print(ev);
    } else if (cmd == "back") {
      std::vector<TraceEvent> trace;
      sys_ = step_back(sys_, pid(args, 0), &trace);
      for (const auto& ev : trace) print(ev);
    } else if (cmd == "rollback" || cmd == "request") {
      std::string warning;
      sys_ = request_rollback(sys_, pid(args, 0), unique_id_from_json(Json(arg(args, 1))), &warning);
      if (!warning.empty()) out_ << "warning: " << warning << "\n";
      if (cmd == "rollback") drive();
    } else if (cmd == "bstep") {
      TraceEvent ev;
      sys_ = bstep(sys_, pid(args, 0), &ev);
      print(ev);
    } else if (cmd == "drive") {
      drive();
    } else if (cmd == "state") {
      out_ << render(sys_);
    } else if (cmd == "json") {
      out_ << snapshot_json(sys_, true).dump(2) << "\n";
    } else if (cmd == "history") {
      const RProcess& p = sys_.pool.at(pid(args, 0));
      auto evs = p.history.events();
      for (std::size_t i = 0; i < evs.size(); ++i) out_ << "  " << i << ": " << evs[i]->to_string() << "\n";
      out_ << "checkpoints:";
      for (UniqueId t : p.checkpoints()) out_ << " " << to_string(t);
      out_ << "\n";
    } else {
      out_ << "unknown command " << cmd << "\n";
    }
  }

  void choices() {
    auto en = enabled_forward(sys_);
    for (std::size_t i = 0; i < en.size(); ++i) {
      out_ << "  " << i + 1 << ") " << en[i].to_string();
      if (en[i].kind == StepChoice::Kind::Deliver)
        out_ << "  " << sys_.gamma.find(en[i].sender, en[i].pid)->front().to_string();
      out_ << "\n";
    }
    for (const auto& [p, proc] : sys_.pool) {
      if (!proc.mark) continue;
      std::string rule;
      try {
        rule = rule_name(backward_rule(sys_, p));
      } catch (const StuckRollback&) {
        rule = "Stuck";
      }
      out_ << "  bstep " << to_string(p) << ": " << rule << "\n";
    }
    if (en.empty() && sys_.pool.size() > 0) out_ << "  (no forward choices)\n";
  }

  void drive() {
    std::vector<TraceEvent> trace;
    sys_ = rollback_drive(sys_, &trace);
    for (const auto& ev : trace) print(ev);
  }

  void print(const TraceEvent& ev) { out_ << trace_json(ev, ++step_).dump() << "\n"; }

  static const std::string& arg(const std::vector<std::string>& args, std::size_t i) {
    if (i >= args.size()) throw std::invalid_argument("missing argument");
    return args[i];
  }

  Pid pid(const std::vector<std::string>& args, std::size_t i) {
    Pid p = pid_from_json(Json(arg(args, i)));
    if (!sys_.pool.count(p)) throw std::invalid_argument("no process " + to_string(p));
    return p;
  }

  RSystem sys_;
  std::ostream& out_;
  std::size_t step_ = 0;
};

int cmd_serve(const Options& o, std::ostream& out, std::ostream& err) {
  SessionService service(o.persist.empty() ? std::nullopt : std::optional<std::string>(o.persist));
  HttpServer server(service);
  int port = server.bind(o.host, o.port);
  if (port < 0) {
    err << "error: cannot bind " << o.host << ":" << o.port << "\n";
    return 1;
  }
  out << "listening on http://" << o.host << ":" << port << "/v1/sessions" << std::endl;
  return server.listen() ? 0 : 1;
}

}  // namespace

int execute_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Reversible interpreter and debugger for a small actor language", "rerl"};
  app.require_subcommand(1);
  Options o;

  auto file = [&](CLI::App* sub) { sub->add_option("file", o.file, "Program source")->required(); };
  auto entry = [&](CLI::App* sub) { sub->add_option("--entry", o.entry, "Entry function name/arity"); };

  CLI::App* run = app.add_subcommand("run", "Run under a scheduling policy, printing a JSON trace");
  file(run);
  entry(run);
  run->add_option("--policy", o.policy)->check(CLI::IsMember({"roundrobin", "random", "script"}));
  run->add_option("--seed", o.seed);
  run->add_option("--script", o.script, "Choice script to replay");
  run->add_option("--record", o.record, "Write the choices taken as a script");
  run->add_option("--max-steps", o.max_steps);
  run->add_flag("--dump-history", o.dump_history);

  CLI::App* exp = app.add_subcommand("explore", "Explore all interleavings");
  file(exp);
  entry(exp);
  exp->add_option("--max-depth", o.max_depth);
  exp->add_option("--max-states", o.max_states);
  exp->add_flag("--final-values", o.final_values);
  exp->add_option("--dot", o.dot, "Write the state graph in DOT format");

  CLI::App* chk = app.add_subcommand("check", "Check reversibility properties");
  file(chk);
  entry(chk);
  chk->add_option("--property", o.property)->check(CLI::IsMember({"loop", "soundness"}));
  chk->add_option("--max-depth", o.max_depth);
  chk->add_option("--max-states", o.max_states);
  chk->add_option("--max-rollbacks", o.max_rollbacks);
  chk->add_option("--runs", o.runs);
  chk->add_option("--seed", o.seed);
  chk->add_option("--mutation", o.mutation, "Run against a deliberately broken backward rule")
      ->check(CLI::IsMember({"none", "sched1-drops-oldest"}));

  CLI::App* dbg = app.add_subcommand("debug", "Interactive reversible debugger");
  file(dbg);
  entry(dbg);

  CLI::App* srv = app.add_subcommand("serve", "Serve the session API over HTTP");
  srv->add_option("--port", o.port);
  srv->add_option("--host", o.host);
  srv->add_option("--persist", o.persist, "Directory for per-step state snapshots");

  std::vector<const char*> argv{"rerl"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*run) return cmd_run(o, out, err);
    if (*exp) return cmd_explore(o, out);
    if (*chk) return cmd_check(o, out);
    if (*dbg) {
      Repl(load(o), out).run(in);
      return 0;
    }
    return cmd_serve(o, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace rerl
