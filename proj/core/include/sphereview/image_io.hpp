#pragma once

#include <string>

#include "sphereview/grid.hpp"

namespace sphereview::io {

// 8-bit PNG in grayscale or RGB; palette images expand to RGB, alpha is
// stripped, 16-bit depth reduces to 8. Values come back as floats in 0..255.
Grid read_png(const std::string& path);

// Writes 1-channel (grayscale) or 3-channel (RGB) images; values are
// rounded and clamped to 0..255.
void write_png(const std::string& path, const Grid& img);

// Any nonzero sample is foreground; RGB masks use the first channel.
Mask read_mask_png(const std::string& path);
void write_mask_png(const std::string& path, const Mask& mask);

// Grayscale prediction scaled to [0, 1] by /255.
Grid read_prediction_png(const std::string& path);

// Feature-grid container: magic "FGRD", then little-endian uint32 w, h, c,
// then c row-major h*w planes of little-endian IEEE-754 float32.
Grid read_fgrid(const std::string& path);
void write_fgrid(const std::string& path, const Grid& fg);

// Fixed CSV float formatting: 6 significant digits, '.' decimal separator.
std::string format_g6(double v);

} // namespace sphereview::io
