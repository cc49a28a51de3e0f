#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "rerl/reversible.hpp"
#include "rerl/rollback.hpp"

namespace rerl {

struct Violation {
  std::vector<std::string> moves;  // how the offending state was reached
  std::string diff;
};

struct CheckReport {
  std::size_t checked_states = 0;
  std::vector<Violation> violations;
  bool truncated = false;
  std::size_t reference_states = 0;  // soundness: forward-reachable set size
};

struct LoopLimits {
  std::size_t runs = 20;
  std::size_t max_steps = 50;
  std::uint64_t seed = 1;
};

/// Every forward step can be undone. Along `runs` random forward runs, at
/// each visited state S and for each enabled choice c on process p (the
/// receiver for a Deliver): step_back(fstep(S, c), p) must equal S exactly.
/// When p's newest event sent the message at the head of a queue, delivering
/// it and then stepping the sender back must equal stepping the sender back
/// right away; this exercises the receiver-side undo of the delivery.
CheckReport check_loop(const RSystem& init, const LoopLimits& limits, const BackwardConfig& config = {});

struct SoundnessLimits {
  std::size_t max_depth = 30;
  std::size_t max_rollbacks = 2;
  std::size_t max_states = 300000;
};

/// States reached by mixing forward steps, rollback requests to programmer
/// checkpoints and backward steps are, once no process is rolling back,
/// reachable by forward steps alone. Compared after forgetting histories,
/// tags and marks, modulo renaming of identifiers.
CheckReport check_soundness(const RSystem& init, const SoundnessLimits& limits,
                            const BackwardConfig& config = {});

}  // namespace rerl
