#include "beacon/hash.hpp"

namespace beacon {

std::string fnv1a_128_hex(std::string_view data) {
  using u128 = unsigned __int128;
  // offset basis 0x6c62272e07bb014262b821756295c58d, prime 2^88 + 0x13b
  u128 hash = (static_cast<u128>(0x6c62272e07bb0142ULL) << 64) | 0x62b821756295c58dULL;
  const u128 prime = (static_cast<u128>(1) << 88) | 0x13b;
  for (unsigned char c : data) {
    hash ^= c;
    hash *= prime;
  }
  static constexpr char digits[] = "0123456789abcdef";
  std::string out(32, '0');
  for (int i = 31; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[static_cast<unsigned>(hash & 0xf)];
    hash >>= 4;
  }
  return out;
}

}  // namespace beacon
