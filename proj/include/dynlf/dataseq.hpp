#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "dynlf/errors.hpp"
#include "dynlf/types.hpp"

namespace dynlf {

inline constexpr std::uint64_t kDefaultSeed = 1729;  // fixed so unseeded runs reproduce

/// One observed edge weight: slot t, source i, target j (all 1-based).
struct Observation {
  int t = 0;
  int i = 0;
  int j = 0;
  double w = 0.0;
  friend bool operator==(const Observation&, const Observation&) = default;
};

struct DatasetStats {
  int nodes = 0;
  int slots = 0;
  std::size_t known = 0;
  double density = 0.0;  // known / (nodes^2 * slots)
};

struct SplitSpec {
  double train_frac = 0.1;
  double val_frac = 0.1;
  double test_frac = 0.8;
  std::uint64_t seed = kDefaultSeed;
  void validate() const;
};

struct SyntheticConfig {
  int nodes = 50;
  int slots = 30;
  int rank = 4;
  double density = 0.02;     // per-entry keep probability
  double drift_scale = 0.05; // std-dev of the per-slot latent random walk
  double noise_sigma = 0.05; // std-dev of observation noise
  double alpha = 0.01;       // activation slope of the latent walk
  std::uint64_t seed = kDefaultSeed;
  void validate() const;
};

/// Sparse view of an incomplete matrix sequence. Immutable after
/// construction; entries are unique in (t, i, j) and kept sorted by it.
class MatrixSequence {
 public:
  explicit MatrixSequence(Dims dims);
  static MatrixSequence from_entries(Dims dims, std::vector<Observation> entries);

  const Dims& dims() const { return dims_; }
  int nodes() const { return dims_.nodes; }
  int slots() const { return dims_.slots; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const std::vector<Observation>& entries() const { return entries_; }

  /// Observed out-edges (j, w) of node i at slot t, ascending in j.
  std::vector<std::pair<int, double>> observations_of_node_at(int t, int i) const;

  /// All observations (t, i, w) targeting column j, ascending in (t, i).
  std::vector<std::tuple<int, int, double>> observations_of_column(int j) const;

 private:
  Dims dims_;
  std::vector<Observation> entries_;                   // sorted by (t, i, j)
  std::vector<std::vector<std::uint32_t>> by_column_;  // entry indices per target column
};

/// Reads "t i j w" lines (tab/comma/space separated, '#' comments, 1-based
/// indices). A "dims M T" header line may declare extents; otherwise they
/// must be passed in. When both are present they must agree.
MatrixSequence parse_sequence(std::istream& in, std::optional<Dims> declared = std::nullopt);
MatrixSequence read_sequence_file(const std::string& path, std::optional<Dims> declared = std::nullopt);

/// Writes the same format back, "dims M T" header first, entries sorted,
/// weights in full round-trip precision.
void serialize(const MatrixSequence& seq, std::ostream& out);
void write_sequence_file(const MatrixSequence& seq, const std::string& path);

DatasetStats stats(const MatrixSequence& seq);

struct SplitResult {
  MatrixSequence train;
  MatrixSequence val;
  MatrixSequence test;
};

/// Disjoint partition of the entries; train and val take floor(frac * K),
/// the remainder goes to test. The permutation is a pure function of seed.
SplitResult split(const MatrixSequence& seq, const SplitSpec& spec);

/// Draws a ground-truth factor pair (initial factors uniform on (0, 0.1],
/// per-slot activation-warped random walk on the node side), keeps each
/// potential entry with probability `density`, and observes the inner
/// product plus Gaussian noise. Bitwise deterministic under seed.
std::pair<MatrixSequence, FactorSet> generate_synthetic(const SyntheticConfig& cfg);

}  // namespace dynlf
