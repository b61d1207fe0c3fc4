#pragma once

#include <filesystem>

#include "gtvtomo/gtv_denoise.hpp"
#include "gtvtomo/image.hpp"
#include "gtvtomo/metrics.hpp"
#include "gtvtomo/patch_graph.hpp"
#include "gtvtomo/projector.hpp"

namespace gtvtomo::io {

// All writers throw IoError when the file cannot be written, readers throw
// IoError on missing files or malformed content.

/// Binary PGM scaled linearly from [min, max] of the image to the full range.
void write_pgm(const std::filesystem::path& path, const Image& img, int bits = 8);

/// Text header "IMG n\n" followed by n*n little-endian float64 values.
void write_raw_image(const std::filesystem::path& path, const Image& img);
Image read_raw_image(const std::filesystem::path& path);

/// Text header "SINO p q\n" followed by p*q little-endian float64 values.
void write_sinogram(const std::filesystem::path& path, const Sinogram& s);
Sinogram read_sinogram(const std::filesystem::path& path);
/// p lines of q comma-separated values.
void write_sinogram_csv(const std::filesystem::path& path, const Sinogram& s);

void write_curve_csv(const std::filesystem::path& path, const ErrorCurve& curve);
ErrorCurve read_curve_csv(const std::filesystem::path& path);
void write_profile_csv(const std::filesystem::path& path, const IntensityProfile& profile);
void write_edges_csv(const std::filesystem::path& path, const PatchGraph& g);
void write_trace_csv(const std::filesystem::path& path, const DenoiseTrace& trace);

} // namespace gtvtomo::io
