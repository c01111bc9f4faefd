#pragma once

#include <cstdint>
#include <vector>

#include "dfrelay/types.hpp"

namespace dfrelay::modem {

using BitBlock = std::vector<std::uint8_t>;

// QPSK symbols with common power; |symbol|^2 == power for every entry.
struct SymbolBlock {
  TimeBlock symbols;
  double power = 1.0;
};

// Gray map: (b0, b1) -> sqrt(power/2) * ((1 - 2 b0) + j (1 - 2 b1)).
SymbolBlock modulate(const BitBlock& bits, double power);

// Nearest constellation point per sample; a zero component decides positive.
SymbolBlock hard_decide(const TimeBlock& block, double power);

// Inverse of modulate. Inputs must be exact constellation points.
BitBlock demodulate(const SymbolBlock& symbols);

// Number of positions where the two bit blocks differ.
std::int64_t count_bit_errors(const BitBlock& a, const BitBlock& b);

} // namespace dfrelay::modem
