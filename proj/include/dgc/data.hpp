#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "dgc/classifier.hpp"
#include "dgc/graph.hpp"
#include "dgc/matrix.hpp"

namespace dgc {

enum class FeatureFormat { Bin, Tsv };

struct LabeledDataset {
  SparseGraph graph;
  FeatureMatrix features;
  Labels labels;
  NodeMask train_mask;
  NodeMask val_mask;
  NodeMask test_mask;
  std::size_t num_classes = 0;

  // Bundle metadata, kept so that a loaded bundle can be written back as-is.
  bool row_normalize = false;
  FeatureFormat features_format = FeatureFormat::Bin;

  std::size_t num_nodes() const noexcept { return graph.num_nodes(); }
};

/// Checks the dataset invariants (shapes, label range, disjoint masks).
void validate(const LabeledDataset& ds);

struct LoadOptions {
  /// Apply L1 row normalization when meta.json asks for it.
  bool honor_row_normalize = true;
};

/// Reads a graph-bundle directory:
///   meta.json   {"num_nodes", "num_features", "num_classes", "row_normalize",
///                "features_format": "bin"|"tsv"}
///   edges.tsv   src \t dst [\t weight], each undirected pair once
///   features.bin (n*d f32 LE) or features.tsv (n rows of d values)
///   labels.tsv  node \t class, one line per node
///   splits.tsv  node \t train|val|test
LabeledDataset load_bundle(const std::filesystem::path& dir, LoadOptions opts = {});

/// Writes the bundle files in canonical form (features as stored in ds).
void write_bundle(const LabeledDataset& ds, const std::filesystem::path& dir);

/// Scales each row to unit L1 norm; all-zero rows stay zero.
FeatureMatrix row_normalize(const FeatureMatrix& x);

/// x + sigma * G with G i.i.d. standard normal from a seeded generator.
FeatureMatrix add_feature_noise(const FeatureMatrix& x, double sigma, std::uint64_t seed);

struct SbmConfig {
  std::size_t blocks = 3;
  std::size_t nodes_per_block = 60;
  double p_in = 0.2;
  double p_out = 0.02;
  std::size_t feature_dim = 16;
  double class_sep = 1.0;
  double noise_sigma = 0.1;
  double t_star = 0.0;
  std::uint64_t seed = 7;
};

struct SbmDataset {
  LabeledDataset dataset;       // observed (corrupted) features
  FeatureMatrix clean_features;
};

/// Planted-partition graph, Gaussian class-mean features, then backward
/// diffusion for time t_star on the augmented Laplacian (dense oracle).
/// Labels are block ids; the split is a seeded 60/20/20 shuffle.
SbmDataset generate_sbm(const SbmConfig& cfg);

}  // namespace dgc
