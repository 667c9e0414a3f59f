#pragma once

#include <filesystem>

#include "dgc/diffusion.hpp"
#include "dgc/matrix.hpp"

namespace dgc {

// Propagated-feature cache ("DGCF"), all integers and floats little-endian:
//   magic "DGCF" | version u32 | n u64 | d u64 |
//   scheme u8 | variant u8 | T f64 | K u64 | n*d f64 row-major
inline constexpr std::uint32_t kFeatureCacheVersion = 1;

struct FeatureCache {
  DiffusionConfig config;
  FeatureMatrix features;
};

void write_feature_cache(const std::filesystem::path& path, const FeatureMatrix& features,
                         const DiffusionConfig& cfg);
FeatureCache read_feature_cache(const std::filesystem::path& path);

}  // namespace dgc
