#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "netform/galois.hpp"
#include "netform/random.hpp"

using namespace netform;
using galois::GfElement;

namespace {

// Independent multiplication oracle: carry-less peasant multiplication with
// explicit polynomial reduction, no tables.
std::uint16_t clmul_mod(std::uint32_t a, std::uint32_t b, std::uint32_t poly,
                        unsigned m) {
  std::uint32_t prod = 0;
  for (unsigned i = 0; i < m; ++i)
    if (b & (1u << i)) prod ^= a << i;
  for (int bit = 2 * m - 2; bit >= static_cast<int>(m); --bit)
    if (prod & (1u << bit)) prod ^= poly << (bit - m);
  return static_cast<std::uint16_t>(prod & ((1u << m) - 1));
}

GfElement e8(std::uint16_t v) { return {v, 8}; }

}  // namespace

TEST_CASE("addition is xor with identity and self-inverse") {
  CHECK(galois::gf_add(e8(0x57), e8(0x57)).value == 0x00);
  CHECK(galois::gf_add(e8(0x57), e8(0x83)).value == 0xD4);
  rng::Stream s(1);
  for (int i = 0; i < 200; ++i) {
    const auto a = e8(static_cast<std::uint16_t>(s.below(256)));
    CHECK(galois::gf_add(a, e8(0)).value == a.value);
    CHECK(galois::gf_add(a, a).value == 0);
  }
}

TEST_CASE("mismatched field orders are a usage error") {
  CHECK_THROWS_AS(galois::gf_add({1, 8}, {1, 4}), std::invalid_argument);
  CHECK_THROWS_AS(galois::gf_mul({1, 8}, {1, 4}), std::invalid_argument);
}

TEST_CASE("multiplication identities") {
  rng::Stream s(2);
  for (int i = 0; i < 200; ++i) {
    const auto a = e8(static_cast<std::uint16_t>(s.below(256)));
    CHECK(galois::gf_mul(a, e8(0x01)).value == a.value);
    CHECK(galois::gf_mul(a, e8(0x00)).value == 0x00);
  }
  // One shift-reduce step under 0x11B: 0x02 * 0x80 = 0x100 -> 0x100 ^ 0x11B.
  CHECK(galois::gf_mul(e8(0x02), e8(0x80)).value ==
        clmul_mod(0x02, 0x80, 0x11B, 8));
  CHECK(galois::gf_mul(e8(0x02), e8(0x80)).value == 0x1B);
}

TEST_CASE("table multiplication matches the carry-less oracle") {
  const galois::Field& f = galois::Field::of(8);
  CHECK(f.reduction_poly() == 0x11B);
  for (unsigned a = 0; a < 256; ++a)
    for (unsigned b = 0; b < 256; ++b)
      CHECK(f.mul(a, b) == clmul_mod(a, b, 0x11B, 8));
}

TEST_CASE("field axioms hold exhaustively for GF(2^4)") {
  const galois::Field& f = galois::Field::of(4);
  for (unsigned a = 0; a < 16; ++a)
    for (unsigned b = 0; b < 16; ++b)
      for (unsigned c = 0; c < 16; ++c) {
        CHECK(f.mul(a, f.mul(b, c)) == f.mul(f.mul(a, b), c));
        CHECK(f.mul(a, b) == f.mul(b, a));
        CHECK(f.add(a, b) == f.add(b, a));
        CHECK(f.mul(a, f.add(b, c)) == f.add(f.mul(a, b), f.mul(a, c)));
      }
}

TEST_CASE("field axioms hold by sampling for GF(2^8)") {
  const galois::Field& f = galois::Field::of(8);
  rng::Stream s(3);
  for (int i = 0; i < 100000; ++i) {
    const std::uint16_t a = s.below(256), b = s.below(256), c = s.below(256);
    CHECK(f.mul(a, f.mul(b, c)) == f.mul(f.mul(a, b), c));
    CHECK(f.mul(a, b) == f.mul(b, a));
    CHECK(f.mul(a, f.add(b, c)) == f.add(f.mul(a, b), f.mul(a, c)));
  }
}

TEST_CASE("every nonzero element has a unique inverse") {
  CHECK(galois::gf_inv(e8(0x01)).value == 0x01);
  CHECK_THROWS_AS(galois::gf_inv(e8(0x00)), std::domain_error);

  const galois::Field& f = galois::Field::of(8);
  for (unsigned a = 1; a < 256; ++a) {
    unsigned count = 0, inverse = 0;
    for (unsigned b = 1; b < 256; ++b)
      if (f.mul(a, b) == 1) {
        ++count;
        inverse = b;
      }
    CHECK(count == 1);  // exhaustive search oracle
    CHECK(f.inv(a) == inverse);
    CHECK(galois::gf_mul(e8(a), galois::gf_inv(e8(a))).value == 0x01);
  }
}

TEST_CASE("rank basics") {
  CHECK(galois::GfMatrix::identity(3).rank() == 3);
  CHECK(galois::GfMatrix(4, 4).rank() == 0);

  galois::GfMatrix m(2, 3);
  m(0, 0) = 1;
  m(0, 1) = 2;
  m(0, 2) = 3;
  m(1, 0) = 2;  // 2 * row0 over GF(2^8): (2, 4, 6)
  m(1, 1) = 4;
  m(1, 2) = 6;
  CHECK(m.rank() == 1);
}

TEST_CASE("rank is invariant under row swaps and nonzero row scaling") {
  const galois::Field& f = galois::Field::of(8);
  rng::Stream s(4);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 3 + s.below(4);
    galois::GfMatrix m(n, n, 8);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c) m(r, c) = s.below(256);
    const std::size_t base = m.rank();

    galois::GfMatrix swapped = m;
    const std::size_t r1 = s.below(n), r2 = s.below(n);
    for (std::size_t c = 0; c < n; ++c) std::swap(swapped(r1, c), swapped(r2, c));
    CHECK(swapped.rank() == base);

    galois::GfMatrix scaled = m;
    const std::uint16_t k = 1 + s.below(255);
    for (std::size_t c = 0; c < n; ++c) scaled(r1, c) = f.mul(k, scaled(r1, c));
    CHECK(scaled.rank() == base);
  }
}

TEST_CASE("random 8x8 matrices over GF(2^8) are full rank at least as often "
          "as the product bound") {
  rng::Stream s(5);
  const int trials = 4000;
  int full = 0;
  for (int t = 0; t < trials; ++t) {
    galois::GfMatrix m(8, 8, 8);
    for (std::size_t r = 0; r < 8; ++r)
      for (std::size_t c = 0; c < 8; ++c) m(r, c) = s.below(256);
    if (m.rank() == 8) ++full;
  }
  const double bound = std::pow(1.0 - 8.0 / 256.0, 8);
  CHECK(static_cast<double>(full) / trials >= bound);
}

TEST_CASE("solve: identity and permutation systems") {
  std::vector<GfElement> y = {e8(9), e8(250), e8(3)};
  CHECK(galois::solve(galois::GfMatrix::identity(3), y) == y);

  galois::GfMatrix perm(3, 3);
  perm(0, 2) = 1;
  perm(1, 0) = 1;
  perm(2, 1) = 1;
  const auto x = galois::solve(perm, y);
  // perm * x = y means x = (y[1], y[2], y[0]).
  CHECK(x[0] == y[1]);
  CHECK(x[1] == y[2]);
  CHECK(x[2] == y[0]);
}

TEST_CASE("solve round-trips on random full-rank systems") {
  const galois::Field& f = galois::Field::of(8);
  rng::Stream s(6);
  int done = 0;
  while (done < 50) {
    galois::GfMatrix m(4, 4, 8);
    for (std::size_t r = 0; r < 4; ++r)
      for (std::size_t c = 0; c < 4; ++c) m(r, c) = s.below(256);
    if (m.rank() < 4) continue;
    std::vector<GfElement> y(4);
    for (auto& v : y) v = e8(static_cast<std::uint16_t>(s.below(256)));
    const auto x = galois::solve(m, y);
    for (std::size_t r = 0; r < 4; ++r) {
      std::uint16_t acc = 0;
      for (std::size_t c = 0; c < 4; ++c)
        acc = f.add(acc, f.mul(m(r, c), x[c].value));
      CHECK(acc == y[r].value);
    }
    ++done;
  }
}

TEST_CASE("solve rejects rank-deficient systems") {
  galois::GfMatrix m(2, 2);
  m(0, 0) = 5;
  m(0, 1) = 7;
  m(1, 0) = 5;
  m(1, 1) = 7;
  std::vector<GfElement> y = {e8(1), e8(2)};
  CHECK_THROWS_AS(galois::solve(m, y), galois::singular_matrix_error);
}

TEST_CASE("other field orders build and invert") {
  for (unsigned m : {1u, 2u, 4u, 12u, 16u}) {
    const galois::Field& f = galois::Field::of(m);
    const std::uint32_t n = f.size();
    for (std::uint32_t a = 1; a < std::min<std::uint32_t>(n, 512); ++a)
      CHECK(f.mul(a, f.inv(a)) == 1);
  }
}

TEST_CASE("explicit reduction polynomials") {
  // 0x11D is the other common GF(2^8) polynomial; arithmetic must agree
  // with the oracle under it as well.
  const galois::Field f(8, 0x11D);
  rng::Stream s(8);
  for (int i = 0; i < 2000; ++i) {
    const std::uint16_t a = s.below(256), b = s.below(256);
    CHECK(f.mul(a, b) == clmul_mod(a, b, 0x11D, 8));
  }
  for (unsigned a = 1; a < 256; ++a) CHECK(f.mul(a, f.inv(a)) == 1);

  // x^8 + x^4 factors, so no generator cycle covers the group.
  CHECK_THROWS_AS(galois::Field(8, 0x110), std::invalid_argument);
  CHECK_THROWS_AS(galois::Field(17), std::invalid_argument);
}
