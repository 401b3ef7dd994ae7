#pragma once

#include <string>
#include <string_view>

namespace mathlens::detail {

// Minimal SHA-256 (FIPS 180-4). Used only for content-addressing the replay
// cache and ablation provenance; not a general-purpose crypto interface.
std::string sha256_hex(std::string_view data);

}  // namespace mathlens::detail
