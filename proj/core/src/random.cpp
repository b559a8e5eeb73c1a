#include "rtp/random.hpp"

namespace rtp {

static_assert(mix64(0) != mix64(1));
static_assert(derive_seed(1, {2, 3}) != derive_seed(1, {3, 2}));

} // namespace rtp
