#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace adstest {

std::string base64_encode(const std::uint8_t* data, std::size_t len);
std::string base64_encode(const std::vector<std::uint8_t>& data);

// Throws CodecError on malformed input.
std::vector<std::uint8_t> base64_decode(const std::string& text);

} // namespace adstest
