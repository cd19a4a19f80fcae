#pragma once

#include "dht/hypothesis.hpp"
#include "dht/rng.hpp"

namespace dht::testing {

// Full-support random pmf with entries floored away from zero.
inline Pmf random_pmf(CounterRng& rng, std::size_t dim, double floor = 0.02) {
  std::vector<double> v(dim);
  double sum = 0.0;
  for (double& x : v) {
    x = floor + rng.uniform01();
    sum += x;
  }
  for (double& x : v) x /= sum;
  return Pmf(std::move(v));
}

inline Channel random_channel(CounterRng& rng, std::size_t in, std::size_t out,
                              double floor = 0.02) {
  std::vector<std::vector<double>> rows;
  for (std::size_t x = 0; x < in; ++x) rows.push_back(random_pmf(rng, out, floor).probs());
  return Channel(std::move(rows));
}

inline HypothesisPair random_pair(CounterRng& rng, std::size_t nx, std::size_t ny,
                                  double floor = 0.02) {
  return HypothesisPair::from_channels(random_pmf(rng, nx, floor),
                                       random_channel(rng, nx, ny, floor),
                                       random_pmf(rng, nx, floor),
                                       random_channel(rng, nx, ny, floor));
}

}  // namespace dht::testing
