#include <doctest.h>

#include <cmath>

#include "dfrelay/modem.hpp"
#include "dfrelay/random.hpp"

using namespace dfrelay;
using namespace dfrelay::modem;

TEST_CASE("Gray QPSK mapping") {
  const auto a = modulate({0, 0}, 1.0);
  CHECK(std::abs(a.symbols[0] - Complex(1.0, 1.0) / std::sqrt(2.0)) < 1e-15);
  const auto b = modulate({1, 1}, 2.0);
  CHECK(std::abs(b.symbols[0] - Complex(-1.0, -1.0)) < 1e-15);

  // neighbours (90 degree rotations) differ in one bit
  const BitBlock ring{0, 0, 1, 0, 1, 1, 0, 1};
  const auto sym = modulate(ring, 1.0);
  for (Index k = 0; k < 4; ++k) {
    const Complex ratio = sym.symbols[(k + 1) % 4] / sym.symbols[k];
    CHECK(std::abs(std::abs(std::arg(ratio)) - kPi / 2) < 1e-12);
    const int differing = (ring[2 * k] != ring[2 * ((k + 1) % 4)]) + (ring[2 * k + 1] != ring[2 * ((k + 1) % 4) + 1]);
    CHECK(differing == 1);
  }
  CHECK_THROWS_AS(modulate({0, 1, 1}, 1.0), InvalidLength);
}

TEST_CASE("all four points round trip and keep constant modulus") {
  for (const double power : {0.5, 1.0, 3.0}) {
    const BitBlock bits{0, 0, 0, 1, 1, 0, 1, 1};
    const auto sym = modulate(bits, power);
    for (Index k = 0; k < sym.symbols.size(); ++k)
      CHECK(std::norm(sym.symbols[k]) == doctest::Approx(power).epsilon(1e-15));
    CHECK(demodulate(sym) == bits);
    CHECK(modulate(demodulate(sym), power).symbols == sym.symbols);
  }
}

TEST_CASE("hard decisions") {
  TimeBlock z(1);
  z << Complex(0.3, -0.9);
  CHECK(std::abs(hard_decide(z, 1.0).symbols[0] - Complex(1.0, -1.0) / std::sqrt(2.0)) < 1e-15);

  z << Complex(0.0, -0.0);
  CHECK(hard_decide(z, 2.0).symbols[0] == Complex(1.0, 1.0));

  const auto clean = modulate({1, 0, 0, 1}, 1.0);
  CHECK(hard_decide(clean.symbols, 1.0).symbols == clean.symbols);
  const auto once = hard_decide(hard_decide(clean.symbols * 0.7, 1.0).symbols, 1.0);
  CHECK(once.symbols == clean.symbols);
}

TEST_CASE("perturbations inside the decision region never flip a decision") {
  RandomStream rng(31);
  for (const double power : {0.25, 1.0, 4.0}) {
    const double radius = std::sqrt(power / 2.0);
    for (int trial = 0; trial < 2000; ++trial) {
      BitBlock bits{static_cast<std::uint8_t>(rng.bit()), static_cast<std::uint8_t>(rng.bit())};
      const auto s = modulate(bits, power);
      const double r = radius * rng.uniform_open() * 0.999999;
      const double phi = 2.0 * kPi * rng.uniform_open();
      TimeBlock noisy = s.symbols;
      noisy[0] += std::polar(r, phi);
      CHECK(hard_decide(noisy, power).symbols == s.symbols);
    }
  }
}

TEST_CASE("demodulate rejects non-constellation input") {
  TimeBlock z(1);
  z << Complex(0.2, 0.7);
  CHECK_THROWS_AS(demodulate(SymbolBlock{z, 1.0}), InvalidSymbol);
}

TEST_CASE("bit error counting") {
  CHECK(count_bit_errors({0, 1, 1, 0}, {0, 0, 1, 1}) == 2);
  CHECK_THROWS_AS(count_bit_errors({0, 1}, {0}), InvalidLength);
}
