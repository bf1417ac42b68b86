#pragma once

#include <span>

#include "fpqmc/rng.hpp"
#include "fpqmc/sobol.hpp"

namespace fpqmc {

/// Provider of uniform points in [0,1)^3, consumed one point at a time.
class PointSource {
 public:
  virtual ~PointSource() = default;
  virtual void next(std::span<double, 3> u) = 0;
};

class PseudoPointSource final : public PointSource {
 public:
  explicit PseudoPointSource(PseudoStream stream) : stream_(std::move(stream)) {}
  void next(std::span<double, 3> u) override {
    for (double& x : u) x = stream_.uniform();
  }

 private:
  PseudoStream stream_;
};

/// Consecutive points of a (possibly shifted) 3-D Sobol' generator.
class SobolPointSource final : public PointSource {
 public:
  explicit SobolPointSource(SobolGenerator gen) : gen_(std::move(gen)) {}
  void next(std::span<double, 3> u) override { gen_.next(u); }
  const SobolGenerator& generator() const { return gen_; }

 private:
  SobolGenerator gen_;
};

}  // namespace fpqmc
