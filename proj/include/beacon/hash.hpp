#pragma once

#include <string>
#include <string_view>

namespace beacon {

// 128-bit FNV-1a over the bytes of `data`, as 32 lower-case hex digits.
// Stable across platforms and releases; environment ids depend on it.
std::string fnv1a_128_hex(std::string_view data);

}  // namespace beacon
