#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "rerl/system.hpp"

namespace rerl {

struct ExploreLimits {
  std::size_t max_depth = 60;
  std::size_t max_states = 200000;
};

/// Reachability graph of the standard semantics. Nodes are canonical
/// states; node 0 is the initial one.
struct StateGraph {
  struct Edge {
    std::size_t from;
    StepChoice choice;
    std::size_t to;
  };
  std::vector<std::string> canonical;  // per node
  std::vector<System> states;          // per node, a representative
  std::vector<std::size_t> depth;      // per node, BFS depth
  std::vector<Edge> edges;
  std::vector<std::size_t> terminals;  // nodes with no enabled step
  std::unordered_map<std::string, std::size_t> index;
  bool truncated = false;  // state cap hit, or depth cap cut off successors

  std::string digest(std::size_t node) const;
};

/// Breadth-first search over enabled_standard() from `init`, merging
/// states with equal canonical forms.
StateGraph explore(const System& init, const ExploreLimits& limits);

/// Values of the finished processes of a state.
std::map<Pid, Value> final_values(const System& sys);

std::string to_dot(const StateGraph& g);

}  // namespace rerl
