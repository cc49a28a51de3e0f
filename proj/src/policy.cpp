#include "rerl/policy.hpp"

#include <algorithm>
#include <sstream>

#include "rerl/error.hpp"

namespace rerl {

std::optional<StepChoice> RoundRobinPolicy::choose(const std::vector<StepChoice>& enabled) {
  if (enabled.empty()) return std::nullopt;
  std::vector<StepChoice> sorted = enabled;
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const StepChoice& a, const StepChoice& b) { return a.pid < b.pid; });
  const StepChoice* pick = &sorted.front();
  if (last_) {
    auto it = std::find_if(sorted.begin(), sorted.end(), [&](const StepChoice& c) { return c.pid > *last_; });
    if (it != sorted.end()) pick = &*it;
  }
  last_ = pick->pid;
  return *pick;
}

std::optional<StepChoice> RandomPolicy::choose(const std::vector<StepChoice>& enabled) {
  if (enabled.empty()) return std::nullopt;
  return enabled[rng_() % enabled.size()];
}

std::optional<StepChoice> ScriptPolicy::choose(const std::vector<StepChoice>& enabled) {
  if (next_ >= script_.size()) return std::nullopt;
  const StepChoice& c = script_[next_];
  if (std::find(enabled.begin(), enabled.end(), c) == enabled.end())
    throw NotEnabled("script line " + std::to_string(next_ + 1) + ": " + c.to_string() + " is not enabled");
  ++next_;
  return c;
}

std::vector<StepChoice> parse_script(const std::string& text) {
  std::vector<StepChoice> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    out.push_back(StepChoice::parse(line));
  }
  return out;
}

std::string format_script(const std::vector<StepChoice>& script) {
  std::string out;
  for (const auto& c : script) out += c.to_string() + "\n";
  return out;
}

RunResult run_policy(const RSystem& init, Policy& policy, std::size_t max_steps) {
  RunResult r{init, {}, {}, "terminal"};
  for (;;) {
    auto enabled = enabled_forward(r.final_state);
    if (enabled.empty()) {
      r.stop_reason = "terminal";
      return r;
    }
    if (r.choices.size() >= max_steps) {
      r.stop_reason = "max-steps";
      return r;
    }
    auto c = policy.choose(enabled);
    if (!c) {
      r.stop_reason = "policy";
      return r;
    }
    TraceEvent ev;
    r.final_state = fstep(r.final_state, *c, &ev);
    r.choices.push_back(*c);
    r.trace.push_back(std::move(ev));
  }
}

}  // namespace rerl
