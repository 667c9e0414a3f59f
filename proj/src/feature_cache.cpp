#include "dgc/feature_cache.hpp"

#include <fstream>

#include "dgc/binary_io.hpp"
#include "dgc/error.hpp"

namespace dgc {

void write_feature_cache(const std::filesystem::path& path, const FeatureMatrix& features,
                         const DiffusionConfig& cfg) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw Error(Errc::Io, "cannot open " + path.string() + " for writing");
  binary::put_magic(os, "DGCF");
  binary::put<std::uint32_t>(os, kFeatureCacheVersion);
  binary::put<std::uint64_t>(os, features.rows());
  binary::put<std::uint64_t>(os, features.cols());
  binary::put<std::uint8_t>(os, static_cast<std::uint8_t>(cfg.scheme));
  binary::put<std::uint8_t>(os, cfg.variant == Variant::Aug ? 0 : 1);
  binary::put<double>(os, cfg.terminal_time);
  binary::put<std::uint64_t>(os, cfg.steps);
  for (double v : features.values()) binary::put<double>(os, v);
  if (!os) throw Error(Errc::Io, "write failed for " + path.string());
}

FeatureCache read_feature_cache(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(Errc::MissingFile, "cannot open " + path.string());
  binary::expect_magic(is, "DGCF");
  const auto version = binary::get<std::uint32_t>(is);
  if (version != kFeatureCacheVersion) {
    throw Error(Errc::SchemaViolation, "unsupported cache version " + std::to_string(version));
  }
  const auto n = binary::get<std::uint64_t>(is);
  const auto d = binary::get<std::uint64_t>(is);
  FeatureCache cache;
  const auto scheme = binary::get<std::uint8_t>(is);
  if (scheme > 2) throw Error(Errc::SchemaViolation, "bad scheme byte in cache");
  cache.config.scheme = static_cast<Scheme>(scheme);
  const auto variant = binary::get<std::uint8_t>(is);
  if (variant > 1) throw Error(Errc::SchemaViolation, "bad variant byte in cache");
  cache.config.variant = variant == 0 ? Variant::Aug : Variant::Sym;
  cache.config.terminal_time = binary::get<double>(is);
  cache.config.steps = binary::get<std::uint64_t>(is);

  const auto start = is.tellg();
  is.seekg(0, std::ios::end);
  const auto remaining = static_cast<std::uint64_t>(is.tellg() - start);
  if (d != 0 && n > remaining / 8 / d) {
    throw Error(Errc::SchemaViolation, "cache payload shorter than n*d values");
  }
  if (remaining != n * d * 8) throw Error(Errc::SchemaViolation, "cache payload size mismatch");
  is.seekg(start);
  cache.features = FeatureMatrix(n, d);
  for (double& v : cache.features.values()) v = binary::get<double>(is);
  return cache;
}

}  // namespace dgc
