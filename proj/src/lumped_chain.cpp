#include "raidph/lumped_chain.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>
#include <unordered_map>

namespace raidph {

StateCapExceeded::StateCapExceeded(std::size_t cap_)
    : std::runtime_error("state-space cap of " + std::to_string(cap_) +
                         " states exceeded during chain construction"),
      cap(cap_) {}

namespace {

struct OccupancyHash {
  std::size_t operator()(const std::vector<std::uint16_t>& v) const {
    std::size_t h = 1469598103934665603ULL;  // FNV-1a
    for (std::uint16_t x : v) {
      h ^= static_cast<std::size_t>(x);
      h *= 1099511628211ULL;
    }
    return h;
  }
};

}  // namespace

LumpedChain build_lumped_chain(const DiskLocalModel& disk, int n_disks,
                               const LossPredicate& loss,
                               std::size_t state_cap) {
  disk.validate();
  if (n_disks < 1) {
    throw std::invalid_argument("build_lumped_chain: n_disks must be >= 1");
  }
  const std::size_t n_local = disk.size();

  std::vector<char> is_failed(n_local), is_defect(n_local);
  for (std::size_t i = 0; i < n_local; ++i) {
    is_failed[i] = disk.states[i].failed ? 1 : 0;
    is_defect[i] =
        (disk.states[i].operational && disk.states[i].latent_defect) ? 1 : 0;
  }
  const auto lossy = [&](const std::vector<std::uint16_t>& occ) {
    int failed = 0, defect = 0;
    for (std::size_t i = 0; i < n_local; ++i) {
      if (is_failed[i]) failed += occ[i];
      if (is_defect[i]) defect += occ[i];
    }
    return loss(failed, defect);
  };

  std::vector<std::vector<std::pair<int, const LocalTransition*>>> by_src(
      n_local);
  for (const LocalTransition& t : disk.transitions) {
    by_src[t.from].push_back({t.to, &t});
  }

  LumpedChain chain;
  chain.disk = disk;
  chain.n_disks = n_disks;

  std::vector<std::uint16_t> occ0(n_local, 0);
  occ0[disk.initial_state] = static_cast<std::uint16_t>(n_disks);

  std::unordered_map<std::vector<std::uint16_t>, std::size_t, OccupancyHash>
      index;
  index.emplace(occ0, 0);
  chain.states.push_back(occ0);

  CsrMatrix& gen = chain.generator;
  gen.row_ptr.push_back(0);

  constexpr std::uint32_t kLossCol = 0xffffffffu;
  std::vector<std::pair<std::uint32_t, double>> row_acc;

  // The queue is the state list itself; states are processed in index
  // order, so CSR rows are emitted in order too.
  for (std::size_t head = 0; head < chain.states.size(); ++head) {
    const std::vector<std::uint16_t> occ = chain.states[head];
    row_acc.clear();
    double loss_rate = 0.0;
    for (std::size_t i = 0; i < n_local; ++i) {
      if (occ[i] == 0) continue;
      for (const auto& [to, tr] : by_src[i]) {
        const double rate = occ[i] * tr->rate;
        std::vector<std::uint16_t> succ(occ);
        succ[i] -= 1;
        succ[static_cast<std::size_t>(to)] += 1;
        if (tr->is_failure && lossy(succ)) {
          loss_rate += rate;
          continue;
        }
        auto [it, inserted] = index.try_emplace(succ, chain.states.size());
        if (inserted) {
          if (chain.states.size() >= state_cap) {
            throw StateCapExceeded(state_cap);
          }
          chain.states.push_back(std::move(succ));
        }
        row_acc.push_back({static_cast<std::uint32_t>(it->second), rate});
      }
    }
    if (loss_rate > 0.0) row_acc.push_back({kLossCol, loss_rate});
    // merge duplicate columns (parallel local arcs between the same pair)
    std::sort(row_acc.begin(), row_acc.end());
    std::size_t w = 0;
    for (std::size_t r = 0; r < row_acc.size(); ++r) {
      if (w > 0 && row_acc[w - 1].first == row_acc[r].first) {
        row_acc[w - 1].second += row_acc[r].second;
      } else {
        row_acc[w++] = row_acc[r];
      }
    }
    row_acc.resize(w);
    double diag = 0.0;
    for (const auto& [c, v] : row_acc) diag += v;
    gen.col.push_back(static_cast<std::uint32_t>(head));
    gen.val.push_back(-diag);
    for (const auto& [c, v] : row_acc) {
      gen.col.push_back(c);
      gen.val.push_back(v);
    }
    gen.row_ptr.push_back(gen.col.size());
  }

  const std::size_t n_states = chain.states.size();
  chain.initial = 0;
  chain.loss = n_states;
  gen.rows = n_states + 1;
  gen.row_ptr.push_back(gen.col.size());  // empty LOSS row
  for (auto& c : gen.col) {
    if (c == kLossCol) c = static_cast<std::uint32_t>(n_states);
  }
  return chain;
}

LumpedChain build_naive_chain(int fault_tolerance, int n_disks, double lambda,
                              double mu, double h) {
  const int m = fault_tolerance;
  const int n = n_disks;
  if (m < 1 || m >= n) {
    throw std::invalid_argument("build_naive_chain: need 1 <= m < n");
  }
  if (!(lambda > 0.0) || mu < 0.0 || h < 0.0 || h > 1.0) {
    throw std::invalid_argument("build_naive_chain: bad rates");
  }

  LumpedChain chain;
  chain.n_disks = n;
  // two-local-state disk (up, down) so occupancy labels stay meaningful
  DiskLocalModel disk;
  disk.states.resize(2);
  disk.states[0].operational = true;
  disk.states[0].name = "up";
  disk.states[1].failed = true;
  disk.states[1].rebuild_stage = 0;
  disk.states[1].name = "down";
  disk.transitions.push_back({0, 1, lambda, true});
  disk.transitions.push_back({1, 0, mu > 0.0 ? mu : 1.0, false});
  disk.initial_state = 0;
  chain.disk = disk;

  // states 0..m plus LOSS; i = number of failed disks
  const std::size_t n_states = static_cast<std::size_t>(m) + 1;
  chain.initial = 0;
  chain.loss = n_states;
  CsrMatrix& gen = chain.generator;
  gen.rows = n_states + 1;
  gen.row_ptr.push_back(0);
  for (int i = 0; i <= m; ++i) {
    chain.states.push_back(
        {static_cast<std::uint16_t>(n - i), static_cast<std::uint16_t>(i)});
    const double fail_rate = (n - i) * lambda;
    const double repair_rate = (i > 0) ? mu : 0.0;
    double to_next = 0.0, to_loss = 0.0;
    if (i < m) {
      if (i == m - 1 && h > 0.0) {
        to_next = fail_rate * (1.0 - h);
        to_loss = fail_rate * h;
      } else {
        to_next = fail_rate;
      }
    } else {
      to_loss = fail_rate;  // failure in critical mode
    }
    const double diag = -(to_next + to_loss + repair_rate);
    if (repair_rate > 0.0) {
      gen.col.push_back(static_cast<std::uint32_t>(i - 1));
      gen.val.push_back(repair_rate);
    }
    gen.col.push_back(static_cast<std::uint32_t>(i));
    gen.val.push_back(diag);
    if (to_next > 0.0) {
      gen.col.push_back(static_cast<std::uint32_t>(i + 1));
      gen.val.push_back(to_next);
    }
    if (to_loss > 0.0) {
      gen.col.push_back(static_cast<std::uint32_t>(n_states));
      gen.val.push_back(to_loss);
    }
    gen.row_ptr.push_back(gen.col.size());
  }
  gen.row_ptr.push_back(gen.col.size());  // LOSS row
  return chain;
}

void export_triplets(const LumpedChain& chain, std::ostream& out) {
  out << "# lumped CTMC generator, " << chain.size()
      << " states (last state is LOSS)\n";
  out << "# row col rate_per_hour\n";
  const CsrMatrix& g = chain.generator;
  for (std::size_t r = 0; r < g.rows; ++r) {
    for (std::size_t k = g.row_ptr[r]; k < g.row_ptr[r + 1]; ++k) {
      out << r << ' ' << g.col[k] << ' ' << g.val[k] << '\n';
    }
  }
}

}  // namespace raidph
