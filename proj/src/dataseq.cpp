#include "dynlf/dataseq.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "dynlf/activation.hpp"
#include "dynlf/rng.hpp"
#include "dynlf/text.hpp"

namespace dynlf {

namespace {

constexpr bool key_less(const Observation& a, const Observation& b) {
  if (a.t != b.t) return a.t < b.t;
  if (a.i != b.i) return a.i < b.i;
  return a.j < b.j;
}

void require_dims(const Dims& dims) {
  if (dims.nodes < 1 || dims.slots < 1)
    fail(Errc::invalid_config, "dims must be at least 1x1, got nodes=" +
                                   std::to_string(dims.nodes) +
                                   " slots=" + std::to_string(dims.slots));
}

std::string key_str(int t, int i, int j) {
  return "(" + std::to_string(t) + "," + std::to_string(i) + "," + std::to_string(j) + ")";
}

std::vector<std::string_view> tokenize(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  auto is_sep = [](char c) { return c == '\t' || c == ',' || c == ' ' || c == '\r'; };
  while (pos < line.size()) {
    while (pos < line.size() && is_sep(line[pos])) ++pos;
    std::size_t start = pos;
    while (pos < line.size() && !is_sep(line[pos])) ++pos;
    if (pos > start) out.push_back(line.substr(start, pos - start));
  }
  return out;
}

}  // namespace

void SplitSpec::validate() const {
  if (train_frac < 0 || val_frac < 0 || test_frac < 0)
    fail(Errc::invalid_config, "split fractions must be non-negative");
  const double sum = train_frac + val_frac + test_frac;
  if (std::abs(sum - 1.0) > 1e-12)
    fail(Errc::invalid_config, "split fractions must sum to 1, got " + format_double(sum));
}

void SyntheticConfig::validate() const {
  if (nodes < 1 || slots < 1) fail(Errc::invalid_config, "synthetic nodes/slots must be >= 1");
  if (rank < 1) fail(Errc::invalid_config, "synthetic rank must be >= 1");
  if (!(density > 0.0 && density <= 1.0))
    fail(Errc::invalid_config, "density must be in (0,1], got " + format_double(density));
  if (!(noise_sigma >= 0.0)) fail(Errc::invalid_config, "noise_sigma must be >= 0");
  if (!(drift_scale >= 0.0)) fail(Errc::invalid_config, "drift_scale must be >= 0");
  if (!(alpha > 0.0)) fail(Errc::invalid_config, "alpha must be > 0");
}

MatrixSequence::MatrixSequence(Dims dims) : dims_(dims) {
  require_dims(dims_);
  by_column_.resize(static_cast<std::size_t>(dims_.nodes));
}

MatrixSequence MatrixSequence::from_entries(Dims dims, std::vector<Observation> entries) {
  MatrixSequence seq(dims);
  for (const auto& e : entries) {
    if (e.t < 1 || e.t > dims.slots)
      fail(Errc::index_out_of_range,
           "slot " + std::to_string(e.t) + " outside [1," + std::to_string(dims.slots) + "]");
    if (e.i < 1 || e.i > dims.nodes || e.j < 1 || e.j > dims.nodes)
      fail(Errc::index_out_of_range, "node index " + key_str(e.t, e.i, e.j) + " outside [1," +
                                         std::to_string(dims.nodes) + "]");
    if (!std::isfinite(e.w))
      fail(Errc::non_finite_weight, "weight at " + key_str(e.t, e.i, e.j) + " is not finite");
  }
  std::sort(entries.begin(), entries.end(), key_less);
  for (std::size_t k = 1; k < entries.size(); ++k) {
    const auto& a = entries[k - 1];
    const auto& b = entries[k];
    if (a.t == b.t && a.i == b.i && a.j == b.j)
      fail(Errc::duplicate_key, "duplicate entry " + key_str(a.t, a.i, a.j));
  }
  seq.entries_ = std::move(entries);
  for (std::size_t k = 0; k < seq.entries_.size(); ++k)
    seq.by_column_[static_cast<std::size_t>(seq.entries_[k].j - 1)].push_back(
        static_cast<std::uint32_t>(k));
  return seq;
}

std::vector<std::pair<int, double>> MatrixSequence::observations_of_node_at(int t, int i) const {
  if (t < 1 || t > dims_.slots || i < 1 || i > dims_.nodes)
    fail(Errc::index_out_of_range, "query (t=" + std::to_string(t) + ", i=" + std::to_string(i) +
                                       ") outside sequence dims");
  const Observation lo{t, i, 0, 0.0};
  const Observation hi{t, i + 1, 0, 0.0};
  auto first = std::lower_bound(entries_.begin(), entries_.end(), lo, key_less);
  auto last = std::lower_bound(entries_.begin(), entries_.end(), hi, key_less);
  std::vector<std::pair<int, double>> out;
  out.reserve(static_cast<std::size_t>(last - first));
  for (auto it = first; it != last; ++it) out.emplace_back(it->j, it->w);
  return out;  // j ascending, inherited from the (t,i,j) sort
}

std::vector<std::tuple<int, int, double>> MatrixSequence::observations_of_column(int j) const {
  if (j < 1 || j > dims_.nodes)
    fail(Errc::index_out_of_range, "column " + std::to_string(j) + " outside sequence dims");
  const auto& idx = by_column_[static_cast<std::size_t>(j - 1)];
  std::vector<std::tuple<int, int, double>> out;
  out.reserve(idx.size());
  for (auto k : idx) {
    const auto& e = entries_[k];
    out.emplace_back(e.t, e.i, e.w);
  }
  return out;  // (t,i) ascending, inherited from the (t,i,j) sort
}

MatrixSequence parse_sequence(std::istream& in, std::optional<Dims> declared) {
  std::optional<Dims> dims = declared;  // header takes effect once validated against declared
  bool saw_header = false;
  bool saw_data = false;
  std::vector<Observation> entries;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto tokens = tokenize(line);
    if (tokens.empty()) continue;
    if (tokens[0].front() == '#') continue;
    const std::string where = "line " + std::to_string(line_no);
    if (tokens[0] == "dims") {
      if (tokens.size() != 3) fail(Errc::malformed_line, where + ": dims header needs 'dims M T'");
      if (saw_data) fail(Errc::malformed_line, where + ": dims header must precede data");
      if (saw_header) fail(Errc::malformed_line, where + ": repeated dims header");
      Dims header;
      try {
        header = Dims{static_cast<int>(parse_int(tokens[1])),
                      static_cast<int>(parse_int(tokens[2]))};
      } catch (const Error& e) {
        fail(Errc::malformed_line, where + ": " + e.what());
      }
      if (declared && !(header == *declared))
        fail(Errc::invalid_config, where + ": file dims " + std::to_string(header.nodes) + "x" +
                                       std::to_string(header.slots) + " disagree with declared " +
                                       std::to_string(declared->nodes) + "x" +
                                       std::to_string(declared->slots));
      require_dims(header);
      dims = header;
      saw_header = true;
      continue;
    }
    if (tokens.size() != 4)
      fail(Errc::malformed_line,
           where + ": expected 4 fields 't i j w', got " + std::to_string(tokens.size()));
    if (!dims)
      fail(Errc::invalid_config,
           where + ": no dims known; add a 'dims M T' header or declare them");
    Observation obs;
    try {
      obs.t = static_cast<int>(parse_int(tokens[0]));
      obs.i = static_cast<int>(parse_int(tokens[1]));
      obs.j = static_cast<int>(parse_int(tokens[2]));
      obs.w = parse_double(tokens[3]);
    } catch (const Error& e) {
      fail(Errc::malformed_line, where + ": " + e.what());
    }
    if (!std::isfinite(obs.w)) fail(Errc::non_finite_weight, where + ": weight is not finite");
    if (obs.t < 1 || obs.t > dims->slots || obs.i < 1 || obs.i > dims->nodes || obs.j < 1 ||
        obs.j > dims->nodes)
      fail(Errc::index_out_of_range, where + ": entry " + key_str(obs.t, obs.i, obs.j) +
                                         " outside dims " + std::to_string(dims->nodes) + "x" +
                                         std::to_string(dims->slots));
    entries.push_back(obs);
    saw_data = true;
  }
  if (!dims) fail(Errc::invalid_config, "no dims: neither a 'dims M T' header nor declared dims");
  require_dims(*dims);
  return MatrixSequence::from_entries(*dims, std::move(entries));
}

MatrixSequence read_sequence_file(const std::string& path, std::optional<Dims> declared) {
  std::ifstream in(path);
  if (!in) fail(Errc::io_error, "cannot open " + path);
  try {
    return parse_sequence(in, declared);
  } catch (const Error& e) {
    fail(e.code(), path + ": " + e.what());
  }
}

void serialize(const MatrixSequence& seq, std::ostream& out) {
  out << "dims " << seq.nodes() << ' ' << seq.slots() << '\n';
  for (const auto& e : seq.entries())
    out << e.t << '\t' << e.i << '\t' << e.j << '\t' << format_double(e.w) << '\n';
}

void write_sequence_file(const MatrixSequence& seq, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(Errc::io_error, "cannot write " + path);
  serialize(seq, out);
  out.flush();
  if (!out) fail(Errc::io_error, "write failed for " + path);
}

DatasetStats stats(const MatrixSequence& seq) {
  DatasetStats s;
  s.nodes = seq.nodes();
  s.slots = seq.slots();
  s.known = seq.size();
  const double total = static_cast<double>(seq.nodes()) * static_cast<double>(seq.nodes()) *
                       static_cast<double>(seq.slots());
  s.density = static_cast<double>(s.known) / total;
  return s;
}

SplitResult split(const MatrixSequence& seq, const SplitSpec& spec) {
  spec.validate();
  if (seq.empty()) fail(Errc::empty_sequence, "cannot split an empty sequence");
  const std::size_t count = seq.size();
  std::vector<std::uint32_t> order(count);
  std::iota(order.begin(), order.end(), 0u);
  Rng rng(spec.seed);
  for (std::size_t k = count - 1; k > 0; --k)
    std::swap(order[k], order[rng.below(k + 1)]);

  // The 1e-9 slack absorbs decimal-fraction roundoff: floor(0.3 * 100) must
  // count as 30 even though 0.3*100 < 30 in binary.
  const auto take = [count](double frac) {
    return static_cast<std::size_t>(std::floor(frac * static_cast<double>(count) + 1e-9));
  };
  const std::size_t n_train = take(spec.train_frac);
  const std::size_t n_val = take(spec.val_frac);

  const auto& all = seq.entries();
  auto gather = [&](std::size_t begin, std::size_t end) {
    std::vector<Observation> part;
    part.reserve(end - begin);
    for (std::size_t k = begin; k < end; ++k) part.push_back(all[order[k]]);
    return MatrixSequence::from_entries(seq.dims(), std::move(part));
  };
  return SplitResult{gather(0, n_train), gather(n_train, n_train + n_val),
                     gather(n_train + n_val, count)};
}

std::pair<MatrixSequence, FactorSet> generate_synthetic(const SyntheticConfig& cfg) {
  cfg.validate();
  const int m = cfg.nodes;
  const int t_count = cfg.slots;
  const int f = cfg.rank;
  Rng rng(cfg.seed);
  const Activation act = Activation::leaky_relu(cfg.alpha);

  // Draw order is pinned: initial node factors, per-slot drifts, target
  // factors, then one keep coin per potential entry plus noise for kept ones.
  std::vector<Matrix> temporal(static_cast<std::size_t>(t_count));
  Matrix current(m, f);
  for (int i = 0; i < m; ++i)
    for (int b = 0; b < f; ++b) current(i, b) = rng.factor_init();
  temporal[0] = current;
  for (int t = 2; t <= t_count; ++t) {
    Matrix drift(m, f);
    for (int i = 0; i < m; ++i)
      for (int b = 0; b < f; ++b) drift(i, b) = rng.normal(cfg.drift_scale);
    current = activation_apply(act, current + drift);
    temporal[static_cast<std::size_t>(t - 1)] = current;
  }
  Matrix consistent(m, f);
  for (int i = 0; i < m; ++i)
    for (int b = 0; b < f; ++b) consistent(i, b) = rng.factor_init();

  std::vector<Observation> entries;
  for (int t = 1; t <= t_count; ++t) {
    const Matrix& slot = temporal[static_cast<std::size_t>(t - 1)];
    for (int i = 1; i <= m; ++i) {
      for (int j = 1; j <= m; ++j) {
        if (!rng.bernoulli(cfg.density)) continue;
        const double w =
            slot.row(i - 1).dot(consistent.row(j - 1)) + rng.normal(cfg.noise_sigma);
        entries.push_back(Observation{t, i, j, w});
      }
    }
  }
  auto seq = MatrixSequence::from_entries(Dims{m, t_count}, std::move(entries));
  return {std::move(seq), FactorSet{std::move(temporal), std::move(consistent)}};
}

}  // namespace dynlf
