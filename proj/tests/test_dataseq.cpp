#include <doctest.h>

#include <cmath>
#include <sstream>

#include "dynlf/dataseq.hpp"
#include "dynlf/rng.hpp"
#include "oracles.hpp"

using namespace dynlf;
using oracle::thrown_code;

namespace {

MatrixSequence make_seq(Dims dims, std::vector<Observation> entries) {
  return MatrixSequence::from_entries(dims, std::move(entries));
}

/// Deterministic filler: K distinct keys, weight 1.
MatrixSequence filled_seq(int nodes, int slots, std::size_t known) {
  std::vector<Observation> entries;
  entries.reserve(known);
  std::size_t k = 0;
  for (int j = 1; j <= nodes && k < known; ++j)
    for (int i = 1; i <= nodes && k < known; ++i)
      for (int t = 1; t <= slots && k < known; ++t, ++k)
        entries.push_back(Observation{t, i, j, 1.0});
  return make_seq(Dims{nodes, slots}, std::move(entries));
}

MatrixSequence random_seq(Rng& rng, int nodes, int slots, double density) {
  std::vector<Observation> entries;
  for (int t = 1; t <= slots; ++t)
    for (int i = 1; i <= nodes; ++i)
      for (int j = 1; j <= nodes; ++j)
        if (rng.bernoulli(density))
          entries.push_back(Observation{t, i, j, 2.0 * rng.unit() - 1.0});
  return make_seq(Dims{nodes, slots}, std::move(entries));
}

}  // namespace

TEST_CASE("parse maps fields directly") {
  std::istringstream in("1\t3\t7\t0.25\n");
  const auto seq = parse_sequence(in, Dims{10, 5});
  REQUIRE(seq.size() == 1);
  CHECK(seq.entries()[0] == Observation{1, 3, 7, 0.25});
}

TEST_CASE("parse skips comments and blank lines") {
  std::istringstream in("# comment\n\n   \n# another\n");
  const auto seq = parse_sequence(in, Dims{10, 5});
  CHECK(seq.size() == 0);
}

TEST_CASE("parse accepts commas, spaces, and a dims header") {
  std::istringstream in("dims 10 5\n1,3,7,0.25\n2 4 8 1.5\n");
  const auto seq = parse_sequence(in);
  REQUIRE(seq.size() == 2);
  CHECK(seq.dims() == Dims{10, 5});
}

TEST_CASE("parse rejects bad input with line context") {
  auto code = [](const std::string& text, std::optional<Dims> dims = Dims{10, 5}) {
    return thrown_code([&] {
      std::istringstream in(text);
      parse_sequence(in, dims);
    });
  };
  CHECK(code("0\t3\t7\t0.25\n") == Errc::index_out_of_range);  // t is 1-based
  CHECK(code("6\t3\t7\t0.25\n") == Errc::index_out_of_range);
  CHECK(code("1\t11\t7\t0.25\n") == Errc::index_out_of_range);
  CHECK(code("1\t3\t0.25\n") == Errc::malformed_line);
  CHECK(code("1\t3\t7\tx\n") == Errc::malformed_line);
  CHECK(code("1\t3\t7\tnan\n") == Errc::non_finite_weight);
  CHECK(code("1\t3\t7\tinf\n") == Errc::non_finite_weight);
  CHECK(code("1 3 7 1\n1 3 7 2\n") == Errc::duplicate_key);
  CHECK(code("1 1 1 1\n", std::nullopt) == Errc::invalid_config);  // no dims anywhere
  CHECK(code("dims 9 5\n") == Errc::invalid_config);               // header vs declared
  CHECK(code("dims 10\n") == Errc::malformed_line);

  try {
    std::istringstream in("1 1 1 1\nbroken line here\n");
    parse_sequence(in, Dims{4, 4});
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
}

TEST_CASE("from_entries validates weights") {
  CHECK(thrown_code([] {
          make_seq(Dims{4, 4}, {Observation{1, 1, 1, std::nan("")}});
        }) == Errc::non_finite_weight);
}

TEST_CASE("serialize then parse is the identity") {
  Rng rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    auto seq = random_seq(rng, 6, 4, 0.3);
    std::ostringstream out;
    serialize(seq, out);
    std::istringstream in(out.str());
    const auto back = parse_sequence(in);
    CHECK(back.dims() == seq.dims());
    CHECK(back.entries() == seq.entries());
  }
  // awkward weights keep full precision
  auto seq = make_seq(Dims{3, 2}, {Observation{1, 1, 2, 0.1 + 0.2},
                                   Observation{2, 3, 1, -1e-300},
                                   Observation{1, 2, 2, 12345.678912345678}});
  std::ostringstream out;
  serialize(seq, out);
  std::istringstream in(out.str());
  CHECK(parse_sequence(in).entries() == seq.entries());
}

TEST_CASE("stats reports density") {
  const auto d1 = stats(filled_seq(499, 1148, 29632));
  CHECK(d1.density == doctest::Approx(1.0366e-4).epsilon(1e-4));
  CHECK(d1.known == 29632);

  const auto d2 = stats(filled_seq(1894, 149, 29528));
  CHECK(d2.density == doctest::Approx(5.524e-5).epsilon(1e-4));

  const auto full = stats(filled_seq(10, 1, 100));
  CHECK(full.density == 1.0);

  // density * M * M * T recovers the exact count
  const double total = 499.0 * 499.0 * 1148.0;
  CHECK(std::llround(d1.density * total) == 29632);
}

TEST_CASE("split sizes follow the fractions") {
  const auto seq = filled_seq(10, 2, 100);
  {
    const auto parts = split(seq, SplitSpec{0.1, 0.1, 0.8, 5});
    CHECK(parts.train.size() == 10);
    CHECK(parts.val.size() == 10);
    CHECK(parts.test.size() == 80);
  }
  {
    const auto parts = split(seq, SplitSpec{0.3, 0.1, 0.6, 5});
    CHECK(parts.train.size() == 30);
    CHECK(parts.val.size() == 10);
    CHECK(parts.test.size() == 60);
  }
}

TEST_CASE("split is a deterministic partition") {
  Rng rng(33);
  for (int trial = 0; trial < 8; ++trial) {
    const auto seq = random_seq(rng, 7, 3, 0.4);
    if (seq.empty()) continue;
    const SplitSpec spec{0.2, 0.1, 0.7, 100 + static_cast<std::uint64_t>(trial)};
    const auto a = split(seq, spec);
    const auto b = split(seq, spec);
    CHECK(a.train.entries() == b.train.entries());
    CHECK(a.val.entries() == b.val.entries());
    CHECK(a.test.entries() == b.test.entries());

    // disjoint union equals the input
    std::vector<Observation> merged;
    for (const auto* part : {&a.train, &a.val, &a.test})
      merged.insert(merged.end(), part->entries().begin(), part->entries().end());
    CHECK(merged.size() == seq.size());
    std::sort(merged.begin(), merged.end(), [](const auto& x, const auto& y) {
      return std::tie(x.t, x.i, x.j) < std::tie(y.t, y.i, y.j);
    });
    CHECK(merged == seq.entries());
  }
}

TEST_CASE("split validates its spec and input") {
  const auto seq = filled_seq(4, 2, 10);
  CHECK(thrown_code([&] { split(seq, SplitSpec{0.5, 0.1, 0.1, 1}); }) == Errc::invalid_config);
  CHECK(thrown_code([&] { split(seq, SplitSpec{-0.1, 0.5, 0.6, 1}); }) == Errc::invalid_config);
  const MatrixSequence empty(Dims{4, 2});
  CHECK(thrown_code([&] { split(empty, SplitSpec{}); }) == Errc::empty_sequence);
}

TEST_CASE("synthetic generator hits the target density") {
  SyntheticConfig cfg;
  cfg.nodes = 50;
  cfg.slots = 30;
  cfg.rank = 4;
  cfg.density = 0.02;
  cfg.seed = 9;
  const auto [seq, truth] = generate_synthetic(cfg);
  const double n = 50.0 * 50.0 * 30.0;
  const double expected = n * cfg.density;
  const double sigma = std::sqrt(n * cfg.density * (1 - cfg.density));
  CHECK(std::abs(static_cast<double>(seq.size()) - expected) <= 4.0 * sigma);
  CHECK(truth.temporal.size() == 30);
  CHECK(truth.consistent.rows() == 50);
}

TEST_CASE("noiseless dense generator reproduces inner products exactly") {
  SyntheticConfig cfg;
  cfg.nodes = 2;
  cfg.slots = 1;
  cfg.rank = 1;
  cfg.density = 1.0;
  cfg.noise_sigma = 0.0;
  cfg.seed = 4;
  const auto [seq, truth] = generate_synthetic(cfg);
  REQUIRE(seq.size() == 4);
  for (const auto& e : seq.entries()) {
    const double expect = truth.temporal[static_cast<std::size_t>(e.t - 1)]
                              .row(e.i - 1)
                              .dot(truth.consistent.row(e.j - 1));
    CHECK(e.w == expect);
  }
}

TEST_CASE("synthetic generator is bitwise deterministic") {
  SyntheticConfig cfg;
  cfg.nodes = 12;
  cfg.slots = 5;
  cfg.rank = 3;
  cfg.density = 0.3;
  cfg.seed = 77;
  const auto [seq_a, truth_a] = generate_synthetic(cfg);
  const auto [seq_b, truth_b] = generate_synthetic(cfg);
  CHECK(seq_a.entries() == seq_b.entries());
  CHECK(oracle::bitwise_equal(truth_a.consistent, truth_b.consistent));
  for (std::size_t t = 0; t < truth_a.temporal.size(); ++t)
    CHECK(oracle::bitwise_equal(truth_a.temporal[t], truth_b.temporal[t]));
}

TEST_CASE("synthetic generator validates its config") {
  SyntheticConfig cfg;
  cfg.density = 0.0;
  CHECK(thrown_code([&] { generate_synthetic(cfg); }) == Errc::invalid_config);
  cfg.density = 0.5;
  cfg.rank = 0;
  CHECK(thrown_code([&] { generate_synthetic(cfg); }) == Errc::invalid_config);
  cfg.rank = 1;
  cfg.noise_sigma = -1;
  CHECK(thrown_code([&] { generate_synthetic(cfg); }) == Errc::invalid_config);
}

TEST_CASE("node-at view filters and sorts") {
  const auto seq = make_seq(Dims{6, 3}, {Observation{1, 2, 5, 0.3}, Observation{1, 2, 1, 0.7}});
  const auto view = seq.observations_of_node_at(1, 2);
  REQUIRE(view.size() == 2);
  CHECK(view[0] == std::pair<int, double>{1, 0.7});
  CHECK(view[1] == std::pair<int, double>{5, 0.3});

  CHECK(seq.observations_of_node_at(2, 2).empty());
  CHECK(seq.observations_of_node_at(1, 3).empty());

  const auto other = make_seq(Dims{6, 3}, {Observation{2, 2, 5, 0.3}});
  CHECK(other.observations_of_node_at(1, 2).empty());

  CHECK(thrown_code([&] { seq.observations_of_node_at(0, 2); }) == Errc::index_out_of_range);
  CHECK(thrown_code([&] { seq.observations_of_node_at(1, 7); }) == Errc::index_out_of_range);
}

TEST_CASE("column view filters and sorts") {
  const auto seq = make_seq(Dims{6, 3}, {Observation{1, 2, 5, 0.3}, Observation{2, 4, 5, 0.9},
                                         Observation{1, 2, 1, 0.7}});
  const auto view = seq.observations_of_column(5);
  REQUIRE(view.size() == 2);
  CHECK(view[0] == std::tuple<int, int, double>{1, 2, 0.3});
  CHECK(view[1] == std::tuple<int, int, double>{2, 4, 0.9});
  CHECK(seq.observations_of_column(3).empty());
  CHECK(thrown_code([&] { seq.observations_of_column(0); }) == Errc::index_out_of_range);
}

TEST_CASE("row and column views partition the entries") {
  Rng rng(55);
  const auto seq = random_seq(rng, 8, 4, 0.35);
  std::size_t by_cols = 0;
  for (int j = 1; j <= seq.nodes(); ++j) by_cols += seq.observations_of_column(j).size();
  std::size_t by_rows = 0;
  for (int t = 1; t <= seq.slots(); ++t)
    for (int i = 1; i <= seq.nodes(); ++i) by_rows += seq.observations_of_node_at(t, i).size();
  CHECK(by_cols == seq.size());
  CHECK(by_rows == seq.size());
}
