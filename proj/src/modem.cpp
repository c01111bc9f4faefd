#include "dfrelay/modem.hpp"

#include <cmath>
#include <string>

namespace dfrelay::modem {

namespace {

void require_power(double power) {
  if (!(power > 0.0) || !std::isfinite(power))
    throw InvalidConfig("power", "symbol power must be positive and finite");
}

} // namespace

SymbolBlock modulate(const BitBlock& bits, double power) {
  require_power(power);
  if (bits.size() % 2 != 0)
    throw InvalidLength("modulate: odd bit count " + std::to_string(bits.size()));
  const double a = std::sqrt(power / 2.0);
  SymbolBlock out{TimeBlock(static_cast<Index>(bits.size() / 2)), power};
  for (Index n = 0; n < out.symbols.size(); ++n) {
    const auto b0 = bits[2 * n];
    const auto b1 = bits[2 * n + 1];
    out.symbols[n] = Complex(a * (1.0 - 2.0 * b0), a * (1.0 - 2.0 * b1));
  }
  return out;
}

SymbolBlock hard_decide(const TimeBlock& block, double power) {
  require_power(power);
  const double a = std::sqrt(power / 2.0);
  SymbolBlock out{TimeBlock(block.size()), power};
  for (Index n = 0; n < block.size(); ++n)
    out.symbols[n] = Complex(block[n].real() < 0.0 ? -a : a, block[n].imag() < 0.0 ? -a : a);
  return out;
}

BitBlock demodulate(const SymbolBlock& symbols) {
  require_power(symbols.power);
  const double a = std::sqrt(symbols.power / 2.0);
  const double tol = 1e-9 * a;
  BitBlock bits(static_cast<std::size_t>(2 * symbols.symbols.size()));
  for (Index n = 0; n < symbols.symbols.size(); ++n) {
    const Complex s = symbols.symbols[n];
    if (std::abs(std::abs(s.real()) - a) > tol || std::abs(std::abs(s.imag()) - a) > tol)
      throw InvalidSymbol("demodulate: sample " + std::to_string(n) + " is not a constellation point");
    bits[2 * n] = s.real() < 0.0 ? 1 : 0;
    bits[2 * n + 1] = s.imag() < 0.0 ? 1 : 0;
  }
  return bits;
}

std::int64_t count_bit_errors(const BitBlock& a, const BitBlock& b) {
  if (a.size() != b.size())
    throw InvalidLength("count_bit_errors: length mismatch");
  std::int64_t errors = 0;
  for (std::size_t n = 0; n < a.size(); ++n)
    errors += a[n] != b[n];
  return errors;
}

} // namespace dfrelay::modem
