#include "dgc/diffusion.hpp"

#include <cmath>
#include <utility>

#include "dgc/error.hpp"
#include "dgc/kernels.hpp"

namespace dgc {

const char* to_string(Scheme s) {
  switch (s) {
    case Scheme::Sgc: return "sgc";
    case Scheme::Euler: return "euler";
    case Scheme::Rk4: return "rk4";
  }
  return "?";
}

Scheme parse_scheme(const std::string& s) {
  if (s == "sgc") return Scheme::Sgc;
  if (s == "euler") return Scheme::Euler;
  if (s == "rk4") return Scheme::Rk4;
  throw Error(Errc::InvalidArgument, "unknown scheme '" + s + "' (expected sgc|euler|rk4)");
}

namespace {

void check_input(const FeatureMatrix& x, const PropagationMatrix& s) {
  if (x.rows() != s.num_nodes()) {
    throw Error(Errc::DimensionMismatch, "feature rows (" + std::to_string(x.rows()) +
                                             ") != graph nodes (" +
                                             std::to_string(s.num_nodes()) + ")");
  }
  if (!all_finite(x)) throw Error(Errc::InvalidArgument, "features contain NaN or Inf");
}

void check_time(double T, std::uint64_t k, Variant variant) {
  if (!(T >= 0.0) || !std::isfinite(T)) {
    throw Error(Errc::InvalidArgument, "terminal time must be finite and non-negative");
  }
  if (T > 0.0 && k == 0) {
    throw Error(Errc::InvalidArgument, "K = 0 is only allowed with T = 0");
  }
  if (variant == Variant::Sym && k > 0 && T / static_cast<double>(k) > 1.0) {
    throw Error(Errc::UnstableStepSize,
                "step size T/K = " + std::to_string(T / static_cast<double>(k)) +
                    " exceeds 1 for the sym Laplacian");
  }
}

template <class Step>
FeatureMatrix iterate(const FeatureMatrix& x, std::uint64_t k, Step step) {
  FeatureMatrix cur = x;
  if (k == 0) return cur;
  FeatureMatrix next(x.rows(), x.cols());
  for (std::uint64_t i = 0; i < k; ++i) {
    step(cur, next);
    std::swap(cur, next);
  }
  if (!all_finite(cur)) {
    throw Error(Errc::UnstableStepSize, "propagation produced non-finite values");
  }
  return cur;
}

}  // namespace

void validate(const DiffusionConfig& cfg) {
  if (cfg.scheme == Scheme::Sgc) {
    if (cfg.terminal_time != static_cast<double>(cfg.steps)) {
      throw Error(Errc::InvalidArgument, "sgc couples T and K: T must equal K");
    }
    return;
  }
  check_time(cfg.terminal_time, cfg.steps, cfg.variant);
}

FeatureMatrix sgc_propagate(const FeatureMatrix& x, const PropagationMatrix& s, std::uint64_t k) {
  check_input(x, s);
  return iterate(x, k, [&](const Matrix& in, Matrix& out) {
    kernels::parallel::spmm(s.matrix, in, out);
  });
}

FeatureMatrix euler_propagate(const FeatureMatrix& x, const PropagationMatrix& s, double T,
                              std::uint64_t k) {
  check_input(x, s);
  check_time(T, k, s.kind);
  if (T == 0.0) return x;
  const double dt = T / static_cast<double>(k);
  return iterate(x, k, [&](const Matrix& in, Matrix& out) {
    kernels::parallel::euler_step(s.matrix, in, dt, out);
  });
}

FeatureMatrix rk4_propagate(const FeatureMatrix& x, const PropagationMatrix& s, double T,
                            std::uint64_t k) {
  check_input(x, s);
  check_time(T, k, s.kind);
  if (T == 0.0) return x;
  const double dt = T / static_cast<double>(k);
  return iterate(x, k, [&](const Matrix& in, Matrix& out) {
    kernels::parallel::rk4_step(s.matrix, in, dt, out);
  });
}

FeatureMatrix propagate(const FeatureMatrix& x, const PropagationMatrix& s,
                        const DiffusionConfig& cfg) {
  if (cfg.variant != s.kind) {
    throw Error(Errc::InvalidArgument, "config variant does not match the propagation matrix");
  }
  validate(cfg);
  switch (cfg.scheme) {
    case Scheme::Sgc: return sgc_propagate(x, s, cfg.steps);
    case Scheme::Euler: return euler_propagate(x, s, cfg.terminal_time, cfg.steps);
    case Scheme::Rk4: return rk4_propagate(x, s, cfg.terminal_time, cfg.steps);
  }
  throw Error(Errc::InvalidArgument, "unknown scheme");
}

}  // namespace dgc
