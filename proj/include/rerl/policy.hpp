#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "rerl/reversible.hpp"

namespace rerl {

/// Picks the next step among the enabled ones (which arrive sorted: Local
/// choices by pid, then Deliver choices by sender and receiver). nullopt
/// stops the run.
class Policy {
 public:
  virtual ~Policy() = default;
  virtual std::optional<StepChoice> choose(const std::vector<StepChoice>& enabled) = 0;
};

/// Cycles over processes: the first choice owned by a pid after the one
/// served last, wrapping around. A Deliver is owned by its receiver.
class RoundRobinPolicy : public Policy {
 public:
  std::optional<StepChoice> choose(const std::vector<StepChoice>& enabled) override;

 private:
  std::optional<Pid> last_;
};

/// Uniform choice from a 64-bit Mersenne Twister seeded with `seed`.
class RandomPolicy : public Policy {
 public:
  explicit RandomPolicy(std::uint64_t seed) : rng_(seed) {}
  std::optional<StepChoice> choose(const std::vector<StepChoice>& enabled) override;

 private:
  std::mt19937_64 rng_;
};

/// Replays a fixed sequence. Throws NotEnabled when the next scripted step
/// is not enabled; stops when the script runs out.
class ScriptPolicy : public Policy {
 public:
  explicit ScriptPolicy(std::vector<StepChoice> script) : script_(std::move(script)) {}
  std::optional<StepChoice> choose(const std::vector<StepChoice>& enabled) override;

 private:
  std::vector<StepChoice> script_;
  std::size_t next_ = 0;
};

/// One choice per line; blank lines and `#` comments are skipped.
std::vector<StepChoice> parse_script(const std::string& text);
std::string format_script(const std::vector<StepChoice>& script);

struct RunResult {
  RSystem final_state;
  std::vector<StepChoice> choices;
  std::vector<TraceEvent> trace;
  std::string stop_reason;  // "terminal", "max-steps" or "policy"
};

/// Forward reversible run from `init` under `policy`.
RunResult run_policy(const RSystem& init, Policy& policy, std::size_t max_steps);

}  // namespace rerl
