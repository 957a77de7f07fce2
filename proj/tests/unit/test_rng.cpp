#include <cmath>

#include "bomber/rng.hpp"
#include "doctest.h"

using bomber::montecarlo::philox4x32;
using bomber::montecarlo::RngStream;

TEST_CASE("philox4x32-10 known-answer vectors") {
  // Random123 distribution kat_vectors for philox4x32 with 10 rounds.
  {
    const auto out = philox4x32({0u, 0u, 0u, 0u}, {0u, 0u});
    CHECK(out[0] == 0x6627e8d5u);
    CHECK(out[1] == 0xe169c58du);
    CHECK(out[2] == 0xbc57ac4cu);
    CHECK(out[3] == 0x9b00dbd8u);
  }
  {
    const auto out = philox4x32(
        {0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
        {0xffffffffu, 0xffffffffu});
    CHECK(out[0] == 0x408f276du);
    CHECK(out[1] == 0x41c83b0eu);
    CHECK(out[2] == 0xa20bc7c6u);
    CHECK(out[3] == 0x6d5451fdu);
  }
  {
    const auto out = philox4x32(
        {0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
        {0xa4093822u, 0x299f31d0u});
    CHECK(out[0] == 0xd16cfe09u);
    CHECK(out[1] == 0x94fdccebu);
    CHECK(out[2] == 0x5001e420u);
    CHECK(out[3] == 0x24126ea1u);
  }
}

TEST_CASE("streams are deterministic and distinct") {
  RngStream a(42, 0, 7), b(42, 0, 7), c(42, 1, 7), d(43, 0, 7);
  for (int i = 0; i < 100; ++i) {
    const double va = a.next_unit();
    CHECK(va == b.next_unit());
    CHECK(va != c.next_unit());
    CHECK(va != d.next_unit());
    CHECK(va >= 0.0);
    CHECK(va < 1.0);
  }
}

TEST_CASE("draw statistics look uniform / exponential") {
  RngStream r(123, 0, 0);
  double sum = 0.0, sum_exp = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    sum += r.next_unit();
    sum_exp += r.next_exponential();
  }
  CHECK(std::abs(sum / n - 0.5) < 0.005);
  CHECK(std::abs(sum_exp / n - 1.0) < 0.01);
}
