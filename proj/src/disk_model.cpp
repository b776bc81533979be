#include "raidph/disk_model.hpp"

#include <cmath>
#include <queue>
#include <stdexcept>

namespace raidph {

void DiskLocalModel::validate() const {
  if (states.empty()) {
    throw std::invalid_argument("DiskLocalModel: no states");
  }
  if (initial_state < 0 || static_cast<std::size_t>(initial_state) >= size()) {
    throw std::invalid_argument("DiskLocalModel: initial state out of range");
  }
  const LocalStateLabel& init = states[initial_state];
  if (!init.operational || init.latent_defect || init.rebuild_stage >= 0 ||
      init.scrub_stage >= 0) {
    throw std::invalid_argument(
        "DiskLocalModel: initial state must be operational, clean and not "
        "rebuilding");
  }
  for (const LocalTransition& t : transitions) {
    if (t.from < 0 || t.to < 0 || static_cast<std::size_t>(t.from) >= size() ||
        static_cast<std::size_t>(t.to) >= size()) {
      throw std::invalid_argument("DiskLocalModel: transition out of range");
    }
    if (t.from == t.to) {
      throw std::invalid_argument("DiskLocalModel: self-loop");
    }
    if (!(t.rate > 0.0) || !std::isfinite(t.rate)) {
      throw std::invalid_argument("DiskLocalModel: rate must be > 0");
    }
    if (t.is_failure != (states[t.from].operational && states[t.to].failed)) {
      throw std::invalid_argument("DiskLocalModel: mislabeled failure flag");
    }
  }
  for (const LocalStateLabel& s : states) {
    if (s.operational == s.failed) {
      throw std::invalid_argument(
          "DiskLocalModel: each state is either operational or failed");
    }
  }
  // every failed state must reach an operational state
  const std::size_t n = size();
  std::vector<std::vector<int>> adj(n);
  for (const LocalTransition& t : transitions) adj[t.from].push_back(t.to);
  for (std::size_t s = 0; s < n; ++s) {
    if (!states[s].failed) continue;
    std::vector<bool> seen(n, false);
    std::queue<int> frontier;
    frontier.push(static_cast<int>(s));
    seen[s] = true;
    bool reaches = false;
    while (!frontier.empty() && !reaches) {
      const int cur = frontier.front();
      frontier.pop();
      for (int nxt : adj[cur]) {
        if (states[nxt].operational) {
          reaches = true;
          break;
        }
        if (!seen[nxt]) {
          seen[nxt] = true;
          frontier.push(nxt);
        }
      }
    }
    if (!reaches) {
      throw std::invalid_argument(
          "DiskLocalModel: failed state " + states[s].name +
          " has no rebuild path back to an operational state");
    }
  }
}

}  // namespace raidph
