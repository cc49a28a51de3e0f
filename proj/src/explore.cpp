#include "rerl/explore.hpp"

#include <deque>

#include "rerl/canonical.hpp"

namespace rerl {

std::string StateGraph::digest(std::size_t node) const { return rerl::digest(canonical[node]); }

StateGraph explore(const System& init, const ExploreLimits& limits) {
  StateGraph g;
  auto add = [&](const System& s, std::size_t depth) -> std::pair<std::size_t, bool> {
    std::string c = canonicalize(s);
    auto [it, fresh] = g.index.emplace(c, g.canonical.size());
    if (fresh) {
      g.canonical.push_back(std::move(c));
      g.states.push_back(s);
      g.depth.push_back(depth);
    }
    return {it->second, fresh};
  };
  add(init, 0);
  std::deque<std::size_t> frontier{0};
  while (!frontier.empty()) {
    std::size_t node = frontier.front();
    frontier.pop_front();
    System cur = g.states[node];
    auto enabled = enabled_standard(cur);
    if (enabled.empty()) {
      g.terminals.push_back(node);
      continue;
    }
    if (g.depth[node] >= limits.max_depth) {
      g.truncated = true;
      continue;
    }
    for (const auto& c : enabled) {
      System next = step_system(cur, c);
      if (g.canonical.size() >= limits.max_states && !g.index.count(canonicalize(next))) {
        g.truncated = true;
        continue;
      }
      auto [to, fresh] = add(next, g.depth[node] + 1);
      g.edges.push_back({node, c, to});
      if (fresh) frontier.push_back(to);
    }
  }
  return g;
}

std::map<Pid, Value> final_values(const System& sys) {
  std::map<Pid, Value> out;
  for (const auto& [pid, p] : sys.pool) {
    if (p.expr.is_value()) out.emplace(pid, p.expr.value());
  }
  return out;
}

namespace {

std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

}  // namespace

std::string to_dot(const StateGraph& g) {
  std::string out = "digraph states {\n";
  for (std::size_t i = 0; i < g.canonical.size(); ++i) {
    out += "  n" + std::to_string(i) + " [label=\"" + g.digest(i).substr(0, 8) + "\"";
    if (i == 0) out += ", shape=box";
    out += "];\n";
  }
  for (std::size_t t : g.terminals) out += "  n" + std::to_string(t) + " [peripheries=2];\n";
  for (const auto& e : g.edges) {
    out += "  n" + std::to_string(e.from) + " -> n" + std::to_string(e.to) + " [label=\"" +
           dot_escape(e.choice.to_string()) + "\"];\n";
  }
  return out + "}\n";
}

}  // namespace rerl
