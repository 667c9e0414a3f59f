#include "dgc/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <string_view>

#include <json.hpp>

#include "dgc/error.hpp"
#include "dgc/oracle.hpp"

namespace dgc {

namespace fs = std::filesystem;

namespace {

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    out.push_back(line.substr(start, tab == std::string_view::npos ? std::string_view::npos
                                                                    : tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  return out;
}

template <class T>
T parse_number(std::string_view s, const fs::path& file, std::size_t line_no) {
  T value{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error(Errc::SchemaViolation, file.filename().string() + ":" + std::to_string(line_no) +
                                           ": cannot parse '" + std::string(s) + "'");
  }
  return value;
}

// Calls fn(fields, line_no) for each non-empty line.
template <class Fn>
void for_each_row(const fs::path& file, Fn fn) {
  std::ifstream is(file);
  if (!is) throw Error(Errc::MissingFile, "missing " + file.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    fn(split_tabs(line), line_no);
  }
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::size_t meta_count(const nlohmann::json& meta, const char* key) {
  if (!meta.contains(key) || !meta[key].is_number_unsigned()) {
    throw Error(Errc::SchemaViolation, std::string("meta.json: '") + key +
                                           "' must be a non-negative integer");
  }
  return meta[key].get<std::size_t>();
}

FeatureMatrix read_features_bin(const fs::path& file, std::size_t n, std::size_t d) {
  std::ifstream is(file, std::ios::binary);
  if (!is) throw Error(Errc::MissingFile, "missing " + file.string());
  is.seekg(0, std::ios::end);
  const auto bytes = static_cast<std::uint64_t>(is.tellg());
  if (bytes != static_cast<std::uint64_t>(n) * d * 4) {
    throw Error(Errc::SchemaViolation, "features.bin holds " + std::to_string(bytes) +
                                           " bytes, expected n*d*4");
  }
  is.seekg(0);
  FeatureMatrix x(n, d);
  std::vector<unsigned char> buf(bytes);
  is.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(bytes));
  for (std::size_t k = 0; k < n * d; ++k) {
    const std::uint32_t bits = static_cast<std::uint32_t>(buf[4 * k]) |
                               (static_cast<std::uint32_t>(buf[4 * k + 1]) << 8) |
                               (static_cast<std::uint32_t>(buf[4 * k + 2]) << 16) |
                               (static_cast<std::uint32_t>(buf[4 * k + 3]) << 24);
    x.data()[k] = static_cast<double>(std::bit_cast<float>(bits));
  }
  return x;
}

FeatureMatrix read_features_tsv(const fs::path& file, std::size_t n, std::size_t d) {
  FeatureMatrix x(n, d);
  std::size_t row = 0;
  for_each_row(file, [&](const std::vector<std::string_view>& f, std::size_t line_no) {
    if (row >= n) throw Error(Errc::SchemaViolation, "features.tsv has more than n rows");
    if (f.size() != d) {
      throw Error(Errc::SchemaViolation, "features.tsv:" + std::to_string(line_no) + ": expected " +
                                             std::to_string(d) + " columns");
    }
    for (std::size_t j = 0; j < d; ++j) x(row, j) = parse_number<double>(f[j], file, line_no);
    ++row;
  });
  if (row != n) throw Error(Errc::SchemaViolation, "features.tsv has fewer than n rows");
  return x;
}

std::ofstream open_out(const fs::path& file) {
  std::ofstream os(file, std::ios::binary | std::ios::trunc);
  if (!os) throw Error(Errc::Io, "cannot write " + file.string());
  return os;
}

// Appends every pair (i, j), i < j, with i, j drawn from the given index
// ranges, each independently with probability p. Uses geometric skips so
// sparse graphs cost O(edges) rather than O(pairs).
void sample_block_pairs(std::size_t a0, std::size_t a1, std::size_t b0, std::size_t b1, double p,
                        bool same_block, std::mt19937_64& rng, std::vector<Edge>& out) {
  if (p <= 0.0) return;
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const double log_q = std::log1p(-std::min(p, 1.0 - 1e-16));
  for (std::size_t i = a0; i < a1; ++i) {
    std::size_t j = same_block ? i + 1 : b0;
    while (true) {
      if (p < 1.0) {
        const double u = 1.0 - uni(rng);  // (0, 1]
        const double skip = std::floor(std::log(u) / log_q);
        if (skip >= static_cast<double>(b1 - j)) break;
        j += static_cast<std::size_t>(skip);
      }
      if (j >= b1) break;
      out.push_back({i, j, 1.0});
      ++j;
    }
  }
}

}  // namespace

void validate(const LabeledDataset& ds) {
  const std::size_t n = ds.graph.num_nodes();
  if (ds.features.rows() != n || ds.labels.size() != n || ds.train_mask.size() != n ||
      ds.val_mask.size() != n || ds.test_mask.size() != n) {
    throw Error(Errc::SchemaViolation, "dataset components disagree on the node count");
  }
  if (ds.num_classes == 0) throw Error(Errc::SchemaViolation, "num_classes must be positive");
  for (std::size_t i = 0; i < n; ++i) {
    const int owners = ds.train_mask[i] + ds.val_mask[i] + ds.test_mask[i];
    if (owners > 1) throw Error(Errc::MaskOverlap, "node " + std::to_string(i) + " in two splits");
    if (ds.labels[i] < 0 || static_cast<std::size_t>(ds.labels[i]) >= ds.num_classes) {
      throw Error(Errc::LabelOutOfRange, "node " + std::to_string(i) + " has label " +
                                             std::to_string(ds.labels[i]));
    }
  }
}

LabeledDataset load_bundle(const fs::path& dir, LoadOptions opts) {
  if (!fs::is_directory(dir)) throw Error(Errc::MissingFile, "no bundle directory at " + dir.string());

  nlohmann::json meta;
  {
    std::ifstream is(dir / "meta.json");
    if (!is) throw Error(Errc::MissingFile, "missing " + (dir / "meta.json").string());
    try {
      is >> meta;
    } catch (const nlohmann::json::exception& e) {
      throw Error(Errc::SchemaViolation, std::string("meta.json: ") + e.what());
    }
  }
  const std::size_t n = meta_count(meta, "num_nodes");
  const std::size_t d = meta_count(meta, "num_features");
  const std::size_t c = meta_count(meta, "num_classes");
  if (n == 0 || c == 0) throw Error(Errc::SchemaViolation, "meta.json: empty graph or no classes");

  LabeledDataset ds;
  ds.num_classes = c;
  ds.row_normalize = meta.value("row_normalize", false);
  const std::string fmt = meta.value("features_format", std::string("bin"));
  if (fmt == "bin") {
    ds.features_format = FeatureFormat::Bin;
  } else if (fmt == "tsv") {
    ds.features_format = FeatureFormat::Tsv;
  } else {
    throw Error(Errc::SchemaViolation, "meta.json: features_format must be bin or tsv");
  }

  std::vector<Edge> edges;
  const fs::path edges_file = dir / "edges.tsv";
  for_each_row(edges_file, [&](const std::vector<std::string_view>& f, std::size_t line_no) {
    if (f.size() != 2 && f.size() != 3) {
      throw Error(Errc::SchemaViolation, "edges.tsv:" + std::to_string(line_no) +
                                             ": expected src, dst[, weight]");
    }
    Edge e;
    e.src = parse_number<std::size_t>(f[0], edges_file, line_no);
    e.dst = parse_number<std::size_t>(f[1], edges_file, line_no);
    if (f.size() == 3) e.weight = parse_number<double>(f[2], edges_file, line_no);
    edges.push_back(e);
  });
  ds.graph = build_graph(edges, n);

  ds.features = ds.features_format == FeatureFormat::Bin
                    ? read_features_bin(dir / "features.bin", n, d)
                    : read_features_tsv(dir / "features.tsv", n, d);

  ds.labels.assign(n, -1);
  const fs::path labels_file = dir / "labels.tsv";
  for_each_row(labels_file, [&](const std::vector<std::string_view>& f, std::size_t line_no) {
    if (f.size() != 2) throw Error(Errc::SchemaViolation, "labels.tsv: expected node, class");
    const auto node = parse_number<std::size_t>(f[0], labels_file, line_no);
    const auto cls = parse_number<std::int64_t>(f[1], labels_file, line_no);
    if (node >= n) throw Error(Errc::SchemaViolation, "labels.tsv: node id out of range");
    if (cls < 0 || static_cast<std::size_t>(cls) >= c) {
      throw Error(Errc::SchemaViolation, "labels.tsv: class id out of range");
    }
    if (ds.labels[node] != -1) throw Error(Errc::SchemaViolation, "labels.tsv: node listed twice");
    ds.labels[node] = static_cast<std::int32_t>(cls);
  });
  if (std::find(ds.labels.begin(), ds.labels.end(), -1) != ds.labels.end()) {
    throw Error(Errc::SchemaViolation, "labels.tsv: every node needs a label");
  }

  ds.train_mask.assign(n, false);
  ds.val_mask.assign(n, false);
  ds.test_mask.assign(n, false);
  const fs::path splits_file = dir / "splits.tsv";
  for_each_row(splits_file, [&](const std::vector<std::string_view>& f, std::size_t line_no) {
    if (f.size() != 2) throw Error(Errc::SchemaViolation, "splits.tsv: expected node, split");
    const auto node = parse_number<std::size_t>(f[0], splits_file, line_no);
    if (node >= n) throw Error(Errc::SchemaViolation, "splits.tsv: node id out of range");
    NodeMask* mask = nullptr;
    if (f[1] == "train") mask = &ds.train_mask;
    else if (f[1] == "val") mask = &ds.val_mask;
    else if (f[1] == "test") mask = &ds.test_mask;
    else throw Error(Errc::SchemaViolation, "splits.tsv: unknown split '" + std::string(f[1]) + "'");
    if (ds.train_mask[node] || ds.val_mask[node] || ds.test_mask[node]) {
      throw Error(Errc::MaskOverlap, "node " + std::to_string(node) + " appears in two splits");
    }
    (*mask)[node] = true;
  });

  if (ds.row_normalize && opts.honor_row_normalize) ds.features = row_normalize(ds.features);
  validate(ds);
  return ds;
}

void write_bundle(const LabeledDataset& ds, const fs::path& dir) {
  validate(ds);
  fs::create_directories(dir);
  const std::size_t n = ds.num_nodes();

  nlohmann::json meta = {{"num_nodes", n},
                         {"num_features", ds.features.cols()},
                         {"num_classes", ds.num_classes},
                         {"row_normalize", ds.row_normalize},
                         {"features_format", ds.features_format == FeatureFormat::Bin ? "bin" : "tsv"}};
  open_out(dir / "meta.json") << meta.dump(2) << '\n';

  {
    auto os = open_out(dir / "edges.tsv");
    for (const Edge& e : ds.graph.edge_list()) {
      os << e.src << '\t' << e.dst;
      if (e.weight != 1.0) os << '\t' << format_double(e.weight);
      os << '\n';
    }
  }

  if (ds.features_format == FeatureFormat::Bin) {
    auto os = open_out(dir / "features.bin");
    std::vector<unsigned char> buf(ds.features.size() * 4);
    for (std::size_t k = 0; k < ds.features.size(); ++k) {
      const auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(ds.features.data()[k]));
      for (int b = 0; b < 4; ++b) buf[4 * k + b] = static_cast<unsigned char>(bits >> (8 * b));
    }
    os.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  } else {
    auto os = open_out(dir / "features.tsv");
    for (std::size_t i = 0; i < n; ++i) {
      auto row = ds.features.row(i);
      for (std::size_t j = 0; j < row.size(); ++j) os << (j ? "\t" : "") << format_double(row[j]);
      os << '\n';
    }
  }

  {
    auto os = open_out(dir / "labels.tsv");
    for (std::size_t i = 0; i < n; ++i) os << i << '\t' << ds.labels[i] << '\n';
  }
  {
    auto os = open_out(dir / "splits.tsv");
    for (std::size_t i = 0; i < n; ++i) {
      if (ds.train_mask[i]) os << i << "\ttrain\n";
      else if (ds.val_mask[i]) os << i << "\tval\n";
      else if (ds.test_mask[i]) os << i << "\ttest\n";
    }
  }
}

FeatureMatrix row_normalize(const FeatureMatrix& x) {
  FeatureMatrix out = x;
  for (std::size_t i = 0; i < out.rows(); ++i) {
    auto row = out.row(i);
    double l1 = 0.0;
    for (double v : row) l1 += std::abs(v);
    if (l1 == 0.0) continue;
    for (double& v : row) v /= l1;
  }
  return out;
}

FeatureMatrix add_feature_noise(const FeatureMatrix& x, double sigma, std::uint64_t seed) {
  if (!(sigma >= 0.0)) throw Error(Errc::InvalidArgument, "noise sigma must be >= 0");
  FeatureMatrix out = x;
  if (sigma == 0.0) return out;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (double& v : out.values()) v += sigma * gauss(rng);
  return out;
}

SbmDataset generate_sbm(const SbmConfig& cfg) {
  if (cfg.blocks == 0 || cfg.nodes_per_block == 0) {
    throw Error(Errc::InvalidArgument, "SBM needs at least one block and one node per block");
  }
  if (!(0.0 <= cfg.p_out && cfg.p_out <= cfg.p_in && cfg.p_in <= 1.0)) {
    throw Error(Errc::InvalidArgument, "SBM requires 0 <= p_out <= p_in <= 1");
  }
  if (!(cfg.t_star >= 0.0)) throw Error(Errc::InvalidArgument, "t_star must be >= 0");
  const std::size_t n = cfg.blocks * cfg.nodes_per_block;
  if (cfg.t_star > 0.0 && n > oracle::kDefaultDenseLimit) {
    throw Error(Errc::OracleLimitExceeded, "corrupted SBM limited to " +
                                               std::to_string(oracle::kDefaultDenseLimit) + " nodes");
  }

  std::mt19937_64 rng(cfg.seed);
  std::vector<Edge> edges;
  for (std::size_t a = 0; a < cfg.blocks; ++a) {
    for (std::size_t b = a; b < cfg.blocks; ++b) {
      const std::size_t a0 = a * cfg.nodes_per_block;
      const std::size_t b0 = b * cfg.nodes_per_block;
      sample_block_pairs(a0, a0 + cfg.nodes_per_block, b0, b0 + cfg.nodes_per_block,
                         a == b ? cfg.p_in : cfg.p_out, a == b, rng, edges);
    }
  }
  std::sort(edges.begin(), edges.end(), [](const Edge& x, const Edge& y) {
    return x.src != y.src ? x.src < y.src : x.dst < y.dst;
  });

  SbmDataset out;
  LabeledDataset& ds = out.dataset;
  ds.graph = build_graph(edges, n);
  ds.num_classes = cfg.blocks;
  ds.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) ds.labels[i] = static_cast<std::int32_t>(i / cfg.nodes_per_block);

  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix means(cfg.blocks, cfg.feature_dim);
  for (double& v : means.values()) v = cfg.class_sep * gauss(rng);
  out.clean_features = FeatureMatrix(n, cfg.feature_dim);
  for (std::size_t i = 0; i < n; ++i) {
    auto mu = means.row(static_cast<std::size_t>(ds.labels[i]));
    auto row = out.clean_features.row(i);
    for (std::size_t j = 0; j < cfg.feature_dim; ++j) row[j] = mu[j] + cfg.noise_sigma * gauss(rng);
  }

  if (cfg.t_star > 0.0) {
    const auto eig = oracle::eigendecompose(oracle::dense_laplacian(ds.graph, Variant::Aug));
    ds.features = oracle::inverse_diffusion(eig, cfg.t_star, out.clean_features);
  } else {
    ds.features = out.clean_features;
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);
  ds.train_mask.assign(n, false);
  ds.val_mask.assign(n, false);
  ds.test_mask.assign(n, false);
  const std::size_t n_train = n * 6 / 10;
  const std::size_t n_val = n * 2 / 10;
  for (std::size_t k = 0; k < n; ++k) {
    if (k < n_train) ds.train_mask[order[k]] = true;
    else if (k < n_train + n_val) ds.val_mask[order[k]] = true;
    else ds.test_mask[order[k]] = true;
  }
  ds.features_format = FeatureFormat::Bin;
  validate(ds);
  return out;
}

}  // namespace dgc
