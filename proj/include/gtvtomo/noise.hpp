#pragma once

#include <cstdint>

#include "gtvtomo/projector.hpp"

namespace gtvtomo {

struct NoiseSpec {
    double relative_level = 0.0; ///< ||e|| / ||s||, e.g. 0.05 or 0.08
    std::uint64_t seed = 0;
};

/**
 * Return s + e with e a seeded i.i.d. Gaussian vector rescaled so that
 * ||e||_2 = relative_level * ||s||_2 exactly. A zero level (or a zero
 * sinogram) returns the input unchanged.
 */
Sinogram add_noise(const Sinogram& s, const NoiseSpec& spec);

} // namespace gtvtomo
