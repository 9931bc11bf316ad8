#pragma once

#include <cstdint>
#include <vector>

#include "cpsep/density_matrix.hpp"
#include "cpsep/random_stream.hpp"

namespace cpsep {

// A seeded random family of pure product states, standing in for a
// covering net of the separable set: certification against it is sound
// for points of the net's (doubled) hull and heuristic for the full set,
// so reports always carry the generation descriptor.
struct ProductNet {
  int local_dim = 0;
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;
  std::vector<PureProductState> states;

  std::size_t size() const { return states.size(); }
};

/// count i.i.d. Haar-uniform product states in C^d (x) C^d.
ProductNet build_product_net(int d, int count, RandomStream& rng);

}  // namespace cpsep
