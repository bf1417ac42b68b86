#include "fpqmc/rng.hpp"

#include "fpqmc/normal.hpp"

namespace fpqmc {

double PseudoStream::normal() { return inverse_normal_cdf(uniform()); }

void PseudoStream::normal_block(std::span<double> out) {
  for (double& x : out) x = normal();
}

std::vector<double> pseudo_normal_block(PseudoStream& stream, std::size_t n) {
  std::vector<double> out(n);
  stream.normal_block(out);
  return out;
}

}  // namespace fpqmc
