#include <cmath>
#include <sstream>

#include "doctest.h"
#include "raidph/raid.hpp"
#include "raidph/rng.hpp"
#include "raidph/uniformization.hpp"
#include "test_helpers.hpp"

using namespace raidph;

namespace {

DiskLocalModel up_down_disk(double lambda, double mu) {
  DiskLocalModel disk;
  disk.states.resize(2);
  disk.states[0].operational = true;
  disk.states[0].name = "up";
  disk.states[1].failed = true;
  disk.states[1].rebuild_stage = 0;
  disk.states[1].name = "down";
  disk.transitions.push_back({0, 1, lambda, true});
  disk.transitions.push_back({1, 0, mu, false});
  disk.initial_state = 0;
  return disk;
}

SystemConfig small_config() {
  SystemConfig cfg;
  cfg.n = 6;
  cfg.k = 5;
  cfg.ttop = {1.12, 461386.0, 0.0};
  cfg.ttld = WeibullSpec{1.0, 9259.0, 0.0};
  cfg.ttr = {2.0, 12.0, 6.0};
  cfg.ttscr = WeibullSpec{3.0, 168.0, 6.0};
  return cfg;
}

// a reduced disk model, small enough for the explicit product oracle
DiskLocalModel reduced_disk() {
  SystemConfig cfg;
  cfg.n = 2;
  cfg.k = 1;
  cfg.ttop = {1.0, 2000.0, 0.0};
  cfg.ttop_fit = {FitMethod::erlang, 2};  // two failure phases
  cfg.ttld = WeibullSpec{1.0, 800.0, 0.0};
  cfg.ttr = {1.0, 30.0, 0.0};
  cfg.ttr_fit = {FitMethod::erlang, 2};
  cfg.ttscr = WeibullSpec{1.0, 90.0, 0.0};
  cfg.ttscr_fit = {FitMethod::erlang, 1};
  return build_disk_model(cfg);  // 2 x (1+1) + 2 = 6 local states
}

double row_sum_error(const CsrMatrix& gen, std::size_t row) {
  double s = 0.0;
  for (std::size_t k = gen.row_ptr[row]; k < gen.row_ptr[row + 1]; ++k) {
    s += gen.val[k];
  }
  return std::fabs(s);
}

}  // namespace

TEST_CASE("lumping a single disk is the identity") {
  const DiskLocalModel disk = reduced_disk();
  const LumpedChain chain = build_lumped_chain(disk, 1, LossPredicate{1});
  CHECK(chain.states.size() <= disk.size());
  CHECK(chain.size() == chain.states.size() + 1);
}

TEST_CASE("two up/down disks lump into three states plus LOSS") {
  const DiskLocalModel disk = up_down_disk(1e-4, 0.1);
  const LumpedChain chain = build_lumped_chain(disk, 2, LossPredicate{1});
  // {2,0}, {1,1} and LOSS; {0,2} satisfies the predicate and is diverted
  CHECK(chain.states.size() == 2);
  CHECK(chain.size() == 3);
}

TEST_CASE("full disk model stays in the expected state-count range") {
  const LumpedChain chain =
      build_lumped_chain(build_disk_model(small_config()), 6, LossPredicate{1});
  CHECK(chain.size() >= 1000);
  CHECK(chain.size() <= 100000);
}

TEST_CASE("occupancies sum to the disk count in every non-LOSS state") {
  const LumpedChain chain =
      build_lumped_chain(reduced_disk(), 3, LossPredicate{1});
  for (const auto& occ : chain.states) {
    int total = 0;
    for (std::uint16_t c : occ) total += c;
    CHECK(total == 3);
  }
}

TEST_CASE("generator rows sum to zero with nonnegative off-diagonals") {
  const LumpedChain chain =
      build_lumped_chain(reduced_disk(), 3, LossPredicate{1});
  for (std::size_t r = 0; r < chain.generator.rows; ++r) {
    CHECK(row_sum_error(chain.generator, r) <= 1e-12);
    for (std::size_t k = chain.generator.row_ptr[r];
         k < chain.generator.row_ptr[r + 1]; ++k) {
      if (chain.generator.col[k] != r) {
        CHECK(chain.generator.val[k] >= 0.0);
      }
    }
  }
  // LOSS row is empty
  CHECK(chain.generator.row_ptr[chain.loss] ==
        chain.generator.row_ptr[chain.loss + 1]);
}

TEST_CASE("state cap aborts construction with the cap in the message") {
  const DiskLocalModel disk = build_disk_model(small_config());
  try {
    build_lumped_chain(disk, 6, LossPredicate{1}, 10);
    FAIL("expected StateCapExceeded");
  } catch (const StateCapExceeded& e) {
    CHECK(e.cap == 10);
    CHECK(std::string(e.what()).find("10") != std::string::npos);
  }
}

TEST_CASE("uniformize at t = 0 returns the initial distribution") {
  const LumpedChain chain =
      build_lumped_chain(up_down_disk(1e-3, 0.05), 2, LossPredicate{1});
  const TransientResult r = uniformize(chain, 0.0, 1e-9);
  CHECK(r.distributions[0][chain.initial] == 1.0);
  CHECK(r.loss_probability[0] == 0.0);
}

TEST_CASE("two-state pure-death chain matches 1 - exp(-lambda t)") {
  CsrMatrix gen;
  gen.rows = 2;
  gen.row_ptr = {0, 2, 2};
  gen.col = {0, 1};
  gen.val = {-1e-3, 1e-3};
  const std::vector<double> pi =
      transient_vector(gen, {1.0, 0.0}, 1000.0, 1e-12);
  CHECK(pi[1] == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-10));
}

TEST_CASE("uniformization matches the dense matrix exponential oracle") {
  RngStream rng(20240601);
  for (int seed_case = 0; seed_case < 20; ++seed_case) {
    const std::size_t n = 10;
    // random sparse generator
    std::vector<std::vector<double>> dense(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
      double out = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j) continue;
        if (rng.uniform01() < 0.4) {
          dense[i][j] = rng.uniform01();
          out += dense[i][j];
        }
      }
      dense[i][i] = -out;
    }
    CsrMatrix gen;
    gen.rows = n;
    gen.row_ptr.push_back(0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (dense[i][j] != 0.0) {
          gen.col.push_back(static_cast<std::uint32_t>(j));
          gen.val.push_back(dense[i][j]);
        }
      }
      gen.row_ptr.push_back(gen.col.size());
    }
    std::vector<double> pi0(n, 0.0);
    pi0[seed_case % n] = 1.0;
    const double t = 0.5 + 3.0 * rng.uniform01();
    const std::vector<double> fast = transient_vector(gen, pi0, t, 1e-10);
    const std::vector<double> oracle = test_oracle::transient_oracle(gen, pi0, t);
    double l1 = 0.0;
    for (std::size_t i = 0; i < n; ++i) l1 += std::fabs(fast[i] - oracle[i]);
    CHECK(l1 <= 1e-8);
  }
}

TEST_CASE("probability vectors stay normalized and LOSS is monotone") {
  const LumpedChain chain =
      build_lumped_chain(reduced_disk(), 2, LossPredicate{1});
  const std::vector<double> grid = {100.0, 1000.0, 5000.0, 20000.0, 87600.0};
  const TransientResult r = uniformize_grid(chain, grid, 1e-9, true);
  double prev = 0.0;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    double total = 0.0;
    for (double v : r.distributions[g]) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0 + 1e-12);
      total += v;
    }
    CHECK(std::fabs(total - 1.0) <= 1e-9);
    CHECK(r.loss_probability[g] >= prev - 1e-15);
    prev = r.loss_probability[g];
  }
}

TEST_CASE("halving epsilon moves results by less than the larger epsilon") {
  const LumpedChain chain =
      build_lumped_chain(reduced_disk(), 2, LossPredicate{1});
  const std::vector<double> grid = {8760.0, 43800.0, 87600.0};
  const TransientResult coarse = uniformize_grid(chain, grid, 1e-4, false);
  const TransientResult fine = uniformize_grid(chain, grid, 5e-5, false);
  for (std::size_t g = 0; g < grid.size(); ++g) {
    CHECK(std::fabs(coarse.loss_probability[g] - fine.loss_probability[g]) <=
          1e-4);
  }
}

TEST_CASE("overflow guard rejects huge q*t products") {
  CsrMatrix gen;
  gen.rows = 2;
  gen.row_ptr = {0, 2, 2};
  gen.col = {0, 1};
  gen.val = {-1e6, 1e6};
  CHECK_THROWS_AS(transient_vector(gen, {1.0, 0.0}, 1e5, 1e-9),
                  UniformizationOverflow);
}

TEST_CASE("naive chain with no repair equals the max-of-two-exponentials law") {
  const double lambda = 1e-4;
  const LumpedChain chain = build_naive_chain(1, 2, lambda, 0.0, 0.0);
  for (double t : {1000.0, 10000.0, 40000.0}) {
    const double grid[1] = {t};
    const DdfSeries s = loss_probability(chain, grid, 1.0, 1e-12);
    const double exact = std::pow(1.0 - std::exp(-lambda * t), 2.0);
    CHECK(s.value[0] == doctest::Approx(exact).epsilon(1e-9));
  }
}

TEST_CASE("h = 0 removes the critical-mode bypass exactly") {
  const LumpedChain with = build_naive_chain(2, 6, 1e-5, 0.02, 0.0);
  // no arc from state m-1 = 1 to LOSS
  const CsrMatrix& gen = with.generator;
  for (std::size_t k = gen.row_ptr[1]; k < gen.row_ptr[2]; ++k) {
    CHECK(gen.col[k] != with.loss);
  }
  // and a positive h splits the same total failure rate
  const LumpedChain bypass = build_naive_chain(2, 6, 1e-5, 0.02, 0.3);
  double total_with = 0.0, total_bypass = 0.0;
  for (std::size_t k = gen.row_ptr[1]; k < gen.row_ptr[2]; ++k) {
    if (gen.col[k] == 2) total_with += gen.val[k];
  }
  const CsrMatrix& gb = bypass.generator;
  for (std::size_t k = gb.row_ptr[1]; k < gb.row_ptr[2]; ++k) {
    if (gb.col[k] == 2 || gb.col[k] == bypass.loss) {
      total_bypass += gb.val[k];
    }
  }
  CHECK(total_with == doctest::Approx(total_bypass).epsilon(1e-14));
}

TEST_CASE("naive chain parameter validation") {
  CHECK_THROWS_AS(build_naive_chain(0, 2, 1e-4, 0.1, 0.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(build_naive_chain(2, 2, 1e-4, 0.1, 0.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(build_naive_chain(1, 2, 1e-4, 0.1, 1.5),
                  std::invalid_argument);
}

TEST_CASE("lumped chain agrees with the explicit product chain") {
  const DiskLocalModel disk = reduced_disk();
  const std::vector<double> grid = {500.0, 2000.0, 8760.0, 30000.0, 87600.0};
  for (int n : {2, 3}) {
    const LossPredicate loss{1};
    const LumpedChain lumped = build_lumped_chain(disk, n, loss);
    const test_oracle::ProductChain product =
        test_oracle::build_product_chain(disk, n, loss);
    std::vector<double> p_lumped(lumped.size(), 0.0);
    p_lumped[lumped.initial] = 1.0;
    std::vector<double> p_product(product.generator.rows, 0.0);
    p_product[product.initial] = 1.0;
    double prev_t = 0.0;
    for (double t : grid) {
      p_lumped = transient_vector(lumped.generator, std::move(p_lumped),
                                  t - prev_t, 1e-12);
      p_product = transient_vector(product.generator, std::move(p_product),
                                   t - prev_t, 1e-12);
      prev_t = t;
      CHECK(std::fabs(p_lumped[lumped.loss] - p_product[product.loss]) <=
            1e-9);
    }
  }
}

TEST_CASE("full disk model: lumped equals product at n = 2") {
  const DiskLocalModel disk = build_disk_model(small_config());
  const LossPredicate loss{1};
  const LumpedChain lumped = build_lumped_chain(disk, 2, loss);
  const test_oracle::ProductChain product =
      test_oracle::build_product_chain(disk, 2, loss);
  for (double t : {8760.0, 87600.0}) {
    const double grid[1] = {t};
    const DdfSeries s = loss_probability(lumped, grid, 1.0, 1e-12);
    std::vector<double> pi0(product.generator.rows, 0.0);
    pi0[product.initial] = 1.0;
    const std::vector<double> pp =
        transient_vector(product.generator, pi0, t, 1e-12);
    CHECK(std::fabs(s.value[0] - pp[product.loss]) <= 1e-9);
  }
}

TEST_CASE("triplet export emits every generator entry") {
  const LumpedChain chain =
      build_lumped_chain(up_down_disk(1e-3, 0.05), 2, LossPredicate{1});
  std::ostringstream out;
  export_triplets(chain, out);
  std::istringstream in(out.str());
  std::string line;
  std::size_t entries = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream row(line);
    std::size_t r, c;
    double v;
    REQUIRE((row >> r >> c >> v));
    CHECK(r < chain.size());
    CHECK(c < chain.size());
    entries += 1;
  }
  CHECK(entries == chain.generator.val.size());
}
