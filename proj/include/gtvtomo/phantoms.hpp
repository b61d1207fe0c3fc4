#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "gtvtomo/image.hpp"

namespace gtvtomo {

enum class PhantomKind { SheppLogan, Smooth, Binary, Grains, FourPhases };

std::string_view to_string(PhantomKind kind);
/// Accepts the lowercase names used on the command line ("shepplogan",
/// "smooth", "binary", "grains", "fourphases"). Throws std::invalid_argument.
PhantomKind parse_phantom_kind(std::string_view name);

/**
 * Generate an n x n test image, rescaled to [0, 1].
 *
 * SheppLogan is the modified (high-contrast) ten-ellipse table, area-sampled
 * on a 4x4 subgrid per pixel. Smooth is a fixed sum of four anisotropic Gaussian bumps.
 * Binary, Grains and FourPhases are random and fully determined by `seed`;
 * SheppLogan and Smooth ignore it.
 *
 * Throws std::invalid_argument for n < 8.
 */
Image generate_phantom(PhantomKind kind, int n, std::uint64_t seed = 0);

} // namespace gtvtomo
