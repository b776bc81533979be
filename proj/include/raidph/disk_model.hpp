#ifndef RAIDPH_DISK_MODEL_HPP
#define RAIDPH_DISK_MODEL_HPP

#include <string>
#include <vector>

namespace raidph {

// One local state of a single disk.
struct LocalStateLabel {
  bool operational = false;
  bool failed = false;
  bool latent_defect = false;
  bool burn_in = false;
  int failure_phase = -1;  // index into the failure chain, -1 when failed
  int rebuild_stage = -1;  // -1 unless failed
  int scrub_stage = -1;    // -1 unless a defect is being scrubbed
  std::string name;
};

struct LocalTransition {
  int from = 0;
  int to = 0;
  double rate = 0.0;        // per hour
  bool is_failure = false;  // operational -> failed
};

// Labeled per-disk CTMC. Composed into system chains by lumping.
struct DiskLocalModel {
  std::vector<LocalStateLabel> states;
  std::vector<LocalTransition> transitions;
  int initial_state = 0;

  std::size_t size() const { return states.size(); }

  // Checks the structural invariants: a single initial state that is
  // operational, clean and unrebuilt; positive rates; no self-loops;
  // a rebuild path from every failed state back to an operational one.
  void validate() const;
};

}  // namespace raidph

#endif
