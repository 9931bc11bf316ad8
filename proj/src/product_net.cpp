#include "cpsep/product_net.hpp"

#include <stdexcept>

#include "cpsep/haar.hpp"

namespace cpsep {

ProductNet build_product_net(int d, int count, RandomStream& rng) {
  if (d < 1) throw std::invalid_argument("build_product_net: d must be >= 1");
  if (count < 1) throw std::invalid_argument("build_product_net: count must be >= 1");
  ProductNet net;
  net.local_dim = d;
  net.seed = rng.seed();
  net.stream_id = rng.stream_id();
  net.states.reserve(static_cast<std::size_t>(count));
  for (int s = 0; s < count; ++s) {
    RandomStream stream = rng.substream(RandomStream::label_of("product-net/state", s));
    CVector left = random_unit_vector(d, stream);
    CVector right = random_unit_vector(d, stream);
    net.states.emplace_back(std::move(left), std::move(right));
  }
  return net;
}

}  // namespace cpsep
