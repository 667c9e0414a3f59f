#pragma once

#include <cstdint>
#include <string>

#include "dgc/graph.hpp"
#include "dgc/matrix.hpp"

namespace dgc {

enum class Scheme : std::uint8_t { Sgc = 0, Euler = 1, Rk4 = 2 };

const char* to_string(Scheme s);
Scheme parse_scheme(const std::string& s);

/// Propagation settings. For Sgc the step size is fixed at 1, so T must
/// equal K; Euler and Rk4 take any T >= 0 with step size T / K.
struct DiffusionConfig {
  Scheme scheme = Scheme::Euler;
  Variant variant = Variant::Aug;
  double terminal_time = 5.3;
  std::uint64_t steps = 250;

  /// The coupled SGC configuration (T = K).
  static DiffusionConfig sgc(std::uint64_t k, Variant v = Variant::Aug) {
    return {Scheme::Sgc, v, static_cast<double>(k), k};
  }

  double step_size() const { return steps == 0 ? 0.0 : terminal_time / static_cast<double>(steps); }
  bool operator==(const DiffusionConfig&) const = default;
};

/// Throws InvalidArgument / UnstableStepSize when the configuration is unusable.
void validate(const DiffusionConfig& cfg);

/// S^k x.
FeatureMatrix sgc_propagate(const FeatureMatrix& x, const PropagationMatrix& s, std::uint64_t k);

/// k forward Euler steps of dX/dt = -L X with step T / k, i.e.
/// [(1 - T/k) I + (T/k) S]^k x.
FeatureMatrix euler_propagate(const FeatureMatrix& x, const PropagationMatrix& s, double T,
                              std::uint64_t k);

/// k classical RK4 steps of dX/dt = -L X with step T / k.
FeatureMatrix rk4_propagate(const FeatureMatrix& x, const PropagationMatrix& s, double T,
                            std::uint64_t k);

/// Dispatch on cfg.scheme. cfg.variant must match s.kind.
FeatureMatrix propagate(const FeatureMatrix& x, const PropagationMatrix& s,
                        const DiffusionConfig& cfg);

}  // namespace dgc
