#include "pointkin/noise.hpp"

#include <cmath>

namespace pointkin {

double NoiseSource::exponential(double rate) {
  // 1 - u lies in (0, 1], so the log is finite.
  return -std::log1p(-uniform()) / rate;
}

void NoiseSource::fill_normal(DenseVector& out) {
  for (Eigen::Index k = 0; k < out.size(); ++k) out(k) = normal_(engine_);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace pointkin
