#pragma once

#include "core/image.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace adstest {

// Binary PPM (P6) / PGM (P5), maxval 255. Encoders emit the canonical header
// "P6\n<w> <h>\n255\n" so encode(decode(x)) round-trips bit-exactly.

std::vector<std::uint8_t> encode_ppm(const Image& image);
Image decode_ppm(const std::vector<std::uint8_t>& bytes);

std::vector<std::uint8_t> encode_pgm(const SemanticMask& mask);
// n_classes bounds the accepted class indices (values must be < n_classes).
SemanticMask decode_pgm(const std::vector<std::uint8_t>& bytes, int n_classes = cls::count);

std::vector<std::uint8_t> read_file(const std::string& path);
void write_file(const std::string& path, const std::vector<std::uint8_t>& bytes);

Image read_ppm(const std::string& path);
void write_ppm(const std::string& path, const Image& image);
SemanticMask read_pgm(const std::string& path, int n_classes = cls::count);
void write_pgm(const std::string& path, const SemanticMask& mask);

} // namespace adstest
