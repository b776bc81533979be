#ifndef RAIDPH_LUMPED_CHAIN_HPP
#define RAIDPH_LUMPED_CHAIN_HPP

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <vector>

#include "raidph/disk_model.hpp"

namespace raidph {

// Sparse generator in CSR layout. Row sums are zero; absorbing rows are
// empty.
struct CsrMatrix {
  std::size_t rows = 0;
  std::vector<std::size_t> row_ptr;  // rows + 1 entries
  std::vector<std::uint32_t> col;
  std::vector<double> val;
};

// Data-loss condition as a function of label-class counts. Symmetric in
// disk identity by construction: only the number of failed disks and the
// number of operational disks carrying a latent defect matter.
struct LossPredicate {
  int fault_tolerance = 1;  // m

  bool operator()(int failed_count, int defect_count) const {
    return failed_count > fault_tolerance ||
           (failed_count == fault_tolerance && defect_count >= 1);
  }
};

struct StateCapExceeded : std::runtime_error {
  explicit StateCapExceeded(std::size_t cap);
  std::size_t cap;
};

// Symmetry-reduced system chain over occupancy vectors (count of disks in
// each local state) plus one absorbing LOSS state.
struct LumpedChain {
  DiskLocalModel disk;
  int n_disks = 0;
  std::vector<std::vector<std::uint16_t>> states;  // occupancy per state
  CsrMatrix generator;  // (states + LOSS) square, LOSS row empty
  std::size_t initial = 0;
  std::size_t loss = 0;

  std::size_t size() const { return generator.rows; }
};

// Exchangeable-disk lumping: breadth-first exploration of reachable
// occupancy vectors starting from all disks in the initial local state.
// Loss accounting happens on failure transitions: a failure arc whose
// successor occupancy satisfies the predicate is redirected to LOSS.
LumpedChain build_lumped_chain(const DiskLocalModel& disk, int n_disks,
                               const LossPredicate& loss,
                               std::size_t state_cap = 5'000'000);

// Classic m-fault-tolerant birth-death chain: state i counts failed disks,
// failures arrive at (n - i) * lambda, one repair at a time at rate mu.
// h splits the m-th failure arc: a fraction h of it goes straight to LOSS
// (a latent sector error surfacing in critical mode), the rest enters the
// critical state. h = 0 recovers the plain chain.
LumpedChain build_naive_chain(int fault_tolerance, int n_disks, double lambda,
                              double mu, double h);

// Sparse triplet dump (row, col, rate per line; '#' comments).
void export_triplets(const LumpedChain& chain, std::ostream& out);

}  // namespace raidph

#endif
