// Copyright (c) the crackdet authors.
// Licensed under the terms of the Apache 2.0 License.

#ifndef CRACKDET_IMAGE_IO_HPP
#define CRACKDET_IMAGE_IO_HPP

#include <filesystem>

#include "crackdet/image.hpp"

namespace crackdet {

// Load a PNG or binary PPM/PGM image as grayscale. 3-channel inputs go
// through Rec. 601 luma; integer samples are divided by the sample maximum.
GrayFrame load_gray(const std::filesystem::path& path);

// 8-bit grayscale PNG; values clamped to [0,1] then round(255*v).
void save_gray_png8(const std::filesystem::path& path, const RealField& frame);

// 16-bit grayscale PNG for viewing; values clamped to [0,1].
void save_gray_png16(const std::filesystem::path& path, const RealField& frame);

// 8-bit binary PGM.
void save_gray_pgm(const std::filesystem::path& path, const RealField& frame);

}  // namespace crackdet

#endif  // CRACKDET_IMAGE_IO_HPP
