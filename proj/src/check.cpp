#include "rerl/check.hpp"

#include <deque>
#include <functional>
#include <random>
#include <unordered_set>

#include "rerl/canonical.hpp"
#include "rerl/error.hpp"
#include "rerl/explore.hpp"

namespace rerl {

namespace {

constexpr std::size_t kMaxReported = 20;

std::vector<std::string> moves_of(const std::vector<StepChoice>& choices) {
  std::vector<std::string> out;
  for (const auto& c : choices) out.push_back(c.to_string());
  return out;
}

// Did `sender`'s newest event put the head of the sender -> receiver queue
// there? Self-sends are excluded: undoing the delivery is then the sender's
// own newest step, which the plain check already covers.
bool head_sent_last(const RSystem& s, Pid sender, Pid receiver) {
  if (sender == receiver) return false;
  auto it = s.pool.find(sender);
  if (it == s.pool.end() || it->second.mark || it->second.history.empty()) return false;
  const HistoryEvent& top = it->second.history.top();
  const auto* q = s.gamma.find(sender, receiver);
  return top.kind == HistoryEvent::Kind::Send && top.peer == receiver && q && q->front().id == top.id;
}

}  // namespace

CheckReport check_loop(const RSystem& init, const LoopLimits& limits, const BackwardConfig& config) {
  CheckReport report;
  std::mt19937_64 rng(limits.seed);
  auto fail = [&](std::vector<StepChoice> moves, std::string diff) {
    if (report.violations.size() < kMaxReported) report.violations.push_back({moves_of(moves), std::move(diff)});
  };
  auto expect_equal = [&](const std::vector<StepChoice>& moves, const std::function<RSystem()>& expected,
                          const std::function<RSystem()>& actual) {
    try {
      RSystem want = expected();
      RSystem got = actual();
      if (!(want == got)) fail(moves, first_difference(render(want), render(got)));
    } catch (const std::exception& e) {
      fail(moves, std::string("exception: ") + e.what());
    }
  };

  for (std::size_t run = 0; run < limits.runs; ++run) {
    RSystem cur = init;
    std::vector<StepChoice> moves;
    for (std::size_t step = 0; step < limits.max_steps; ++step) {
      auto enabled = enabled_forward(cur);
      if (enabled.empty()) break;
      for (const auto& c : enabled) {
        ++report.checked_states;
        std::vector<StepChoice> here = moves;
        here.push_back(c);
        RSystem after = fstep(cur, c);
        expect_equal(here, [&] { return cur; }, [&] { return step_back(after, c.pid, nullptr, config); });
        if (c.kind == StepChoice::Kind::Deliver && head_sent_last(cur, c.sender, c.pid)) {
          ++report.checked_states;
          expect_equal(here, [&] { return step_back(cur, c.sender, nullptr, config); },
                       [&] { return step_back(after, c.sender, nullptr, config); });
        }
      }
      const StepChoice& pick = enabled[rng() % enabled.size()];
      cur = fstep(cur, pick);
      moves.push_back(pick);
    }
  }
  return report;
}

namespace {

struct Key {
  std::uint64_t a;
  std::size_t b;
  bool operator==(const Key&) const = default;
};

struct KeyHash {
  std::size_t operator()(const Key& k) const { return static_cast<std::size_t>(k.a) ^ (k.b * 0x9e3779b97f4a7c15ULL); }
};

std::uint64_t fnv(const std::string& s) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

struct Node {
  RSystem sys;
  std::size_t rollbacks;
  std::size_t depth;
  std::size_t parent;
  std::string move;
};

}  // namespace

CheckReport check_soundness(const RSystem& init, const SoundnessLimits& limits, const BackwardConfig& config) {
  CheckReport report;
  ExploreLimits fwd_limits{limits.max_depth, limits.max_states};
  StateGraph forward = explore(project(init), fwd_limits);
  report.reference_states = forward.canonical.size();
  if (forward.truncated && forward.canonical.size() >= limits.max_states) report.truncated = true;

  std::vector<Node> nodes;
  std::unordered_set<Key, KeyHash> seen;
  std::deque<std::size_t> frontier;

  auto path_to = [&](std::size_t i) {
    std::vector<std::string> path;
    for (; i != 0; i = nodes[i].parent) path.push_back(nodes[i].move);
    return std::vector<std::string>(path.rbegin(), path.rend());
  };
  auto fail = [&](std::size_t node, std::string diff) {
    if (report.violations.size() < kMaxReported) report.violations.push_back({path_to(node), std::move(diff)});
  };
  auto add = [&](RSystem sys, std::size_t rollbacks, std::size_t parent, std::string move) {
    std::string c = canonicalize(sys);
    Key k{fnv(c), std::hash<std::string>{}(c) + rollbacks};
    if (!seen.insert(k).second) return;
    if (nodes.size() >= limits.max_states) {
      report.truncated = true;
      return;
    }
    std::size_t depth = nodes.empty() ? 0 : nodes[parent].depth + 1;
    nodes.push_back({std::move(sys), rollbacks, depth, parent, std::move(move)});
    frontier.push_back(nodes.size() - 1);
  };

  add(init, 0, 0, "");
  while (!frontier.empty()) {
    std::size_t i = frontier.front();
    frontier.pop_front();
    const RSystem cur = nodes[i].sys;
    const std::size_t rollbacks = nodes[i].rollbacks;
    ++report.checked_states;

    bool any_mark = false;
    for (const auto& [pid, p] : cur.pool) any_mark = any_mark || p.mark.has_value();
    if (!any_mark && !forward.index.count(canonicalize(project(cur))))
      fail(i, "not forward-reachable:\n" + render(project(cur)));

    std::vector<std::pair<RSystem, std::string>> succ;
    bool moved_back = false;
    try {
      for (const auto& c : enabled_forward(cur)) succ.emplace_back(fstep(cur, c), c.to_string());
      for (const auto& [pid, p] : cur.pool) {
        if (!p.mark) continue;
        if (backward_rule(cur, pid) == BackwardRule::Blocked) continue;
        succ.emplace_back(bstep(cur, pid, nullptr, config), "bstep " + to_string(pid));
        moved_back = true;
      }
      if (any_mark && !moved_back) fail(i, "every rolling-back process is blocked");
    } catch (const std::exception& e) {
      fail(i, std::string("exception: ") + e.what());
      continue;
    }
    std::vector<std::pair<RSystem, std::string>> requests;
    if (rollbacks < limits.max_rollbacks) {
      for (const auto& [pid, p] : cur.pool) {
        for (UniqueId t : p.checkpoints()) {
          if (p.mark && p.mark->count(Checkpoint::ch(t))) continue;
          requests.emplace_back(request_rollback(cur, pid, t),
                                "rollback " + to_string(pid) + " " + to_string(t));
        }
      }
    }
    if (nodes[i].depth >= limits.max_depth) {
      if (!succ.empty() || !requests.empty()) report.truncated = true;
      continue;
    }
    for (auto& [s, m] : succ) add(std::move(s), rollbacks, i, std::move(m));
    for (auto& [s, m] : requests) add(std::move(s), rollbacks + 1, i, std::move(m));
  }
  return report;
}

}  // namespace rerl
