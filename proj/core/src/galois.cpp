#include "netform/galois.hpp"

#include <map>
#include <memory>
#include <mutex>

namespace netform::galois {
namespace {

// Standard irreducible reduction polynomials per order exponent, high bit
// included. 0x11B for m = 8.
constexpr std::uint32_t kDefaultPoly[17] = {
    0,       0x3,    0x7,    0xB,    0x13,   0x25,    0x43,   0x83,  0x11B,
    0x211,   0x409,  0x805,  0x1053, 0x201B, 0x4443,  0x8003, 0x1100B};

// Carry-less multiply mod poly; only used to build the tables.
std::uint32_t slow_mul(std::uint32_t a, std::uint32_t b, std::uint32_t poly,
                       unsigned m) {
  std::uint32_t p = 0;
  const std::uint32_t high = 1u << m;
  while (b != 0) {
    if (b & 1u) p ^= a;
    a <<= 1;
    if (a & high) a ^= poly;
    b >>= 1;
  }
  return p;
}

}  // namespace

Field::Field(unsigned m, std::uint32_t poly) : m_(m) {
  if (m < 1 || m > 16)
    throw std::invalid_argument("Field: order exponent must be in [1, 16]");
  size_ = 1u << m;
  poly_ = poly == 0 ? kDefaultPoly[m] : poly;

  log_.assign(size_, 0);
  exp_.assign(2 * size_, 0);

  if (m == 1) {  // GF(2): the multiplicative group is trivial
    exp_[0] = 1;
    exp_[1] = 1;
    log_[1] = 0;
    return;
  }

  // Find a multiplicative generator. The default polynomials are all
  // irreducible but not necessarily primitive (0x11B is not), so search for
  // an element whose powers enumerate every nonzero value.
  std::vector<bool> seen(size_, false);
  std::uint32_t gen = 0;
  for (std::uint32_t g = 2; g < size_ && gen == 0; ++g) {
    std::fill(seen.begin(), seen.end(), false);
    std::uint32_t x = 1;
    std::uint32_t count = 0;
    do {
      if (seen[x]) break;
      seen[x] = true;
      ++count;
      x = slow_mul(x, g, poly_, m);
    } while (x != 1);
    if (count == size_ - 1) gen = g;
  }
  if (gen == 0)
    throw std::invalid_argument("Field: reduction polynomial is not irreducible");

  std::uint32_t x = 1;
  for (std::uint32_t i = 0; i < size_ - 1; ++i) {
    exp_[i] = static_cast<std::uint16_t>(x);
    log_[x] = static_cast<std::uint16_t>(i);
    x = slow_mul(x, gen, poly_, m);
  }
  // Duplicate so mul can index log a + log b without reducing mod (size - 1).
  for (std::uint32_t i = 0; i < size_; ++i) exp_[size_ - 1 + i] = exp_[i];
}

const Field& Field::of(unsigned m) {
  static std::mutex mu;
  static std::map<unsigned, std::unique_ptr<Field>> fields;
  std::scoped_lock lock(mu);
  auto it = fields.find(m);
  if (it == fields.end())
    it = fields.emplace(m, std::make_unique<Field>(m)).first;
  return *it->second;
}

namespace {

void check_same_order(GfElement a, GfElement b, const char* op) {
  if (a.order != b.order)
    throw std::invalid_argument(std::string(op) +
                                ": operands from different field orders");
}

}  // namespace

GfElement gf_add(GfElement a, GfElement b) {
  check_same_order(a, b, "gf_add");
  return {static_cast<std::uint16_t>(a.value ^ b.value), a.order};
}

GfElement gf_mul(GfElement a, GfElement b) {
  check_same_order(a, b, "gf_mul");
  const Field& f = Field::of(a.order);
  return {f.mul(a.value, b.value), a.order};
}

GfElement gf_inv(GfElement a) {
  const Field& f = Field::of(a.order);
  return {f.inv(a.value), a.order};
}

GfMatrix::GfMatrix(std::size_t rows, std::size_t cols, unsigned order)
    : rows_(rows), cols_(cols), order_(order), v_(rows * cols, 0) {}

GfMatrix GfMatrix::identity(std::size_t n, unsigned order) {
  GfMatrix m(n, n, order);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

void GfMatrix::set(std::size_t r, std::size_t c, GfElement e) {
  if (e.order != order_)
    throw std::invalid_argument("GfMatrix::set: element from different field");
  (*this)(r, c) = e.value;
}

std::vector<std::size_t> GfMatrix::rref() {
  const Field& f = Field::of(order_);
  std::vector<std::size_t> pivots;
  std::size_t row = 0;
  for (std::size_t col = 0; col < cols_ && row < rows_; ++col) {
    std::size_t pivot = row;
    while (pivot < rows_ && (*this)(pivot, col) == 0) ++pivot;
    if (pivot == rows_) continue;
    if (pivot != row)
      for (std::size_t c = 0; c < cols_; ++c)
        std::swap((*this)(row, c), (*this)(pivot, c));
    const std::uint16_t inv = f.inv((*this)(row, col));
    for (std::size_t c = 0; c < cols_; ++c)
      (*this)(row, c) = f.mul((*this)(row, c), inv);
    for (std::size_t r = 0; r < rows_; ++r) {
      if (r == row) continue;
      const std::uint16_t factor = (*this)(r, col);
      if (factor == 0) continue;
      for (std::size_t c = 0; c < cols_; ++c)
        (*this)(r, c) = f.add((*this)(r, c), f.mul(factor, (*this)(row, c)));
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

std::size_t GfMatrix::rank() const {
  GfMatrix copy = *this;
  return copy.rref().size();
}

GfMatrix GfMatrix::times(const GfMatrix& other) const {
  if (cols_ != other.rows_ || order_ != other.order_)
    throw std::invalid_argument("GfMatrix::times: shape or field mismatch");
  const Field& f = Field::of(order_);
  GfMatrix out(rows_, other.cols_, order_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t k = 0; k < cols_; ++k) {
      const std::uint16_t a = (*this)(i, k);
      if (a == 0) continue;
      for (std::size_t j = 0; j < other.cols_; ++j)
        out(i, j) = f.add(out(i, j), f.mul(a, other(k, j)));
    }
  return out;
}

std::vector<GfElement> solve(const GfMatrix& c, std::span<const GfElement> y) {
  if (c.rows() != c.cols())
    throw std::invalid_argument("solve: matrix must be square");
  if (y.size() != c.rows())
    throw std::invalid_argument("solve: rhs length mismatch");

  const std::size_t n = c.rows();
  GfMatrix aug(n, n + 1, c.order_exp());
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t col = 0; col < n; ++col) aug(r, col) = c(r, col);
    if (y[r].order != c.order_exp())
      throw std::invalid_argument("solve: rhs element from different field");
    aug(r, n) = y[r].value;
  }
  const auto pivots = aug.rref();
  std::size_t rank_in_c = 0;
  for (std::size_t p : pivots)
    if (p < n) ++rank_in_c;
  if (rank_in_c < n)
    throw singular_matrix_error("solve: matrix is rank deficient");

  std::vector<GfElement> x(n);
  for (std::size_t r = 0; r < n; ++r)
    x[r] = {aug(r, n), static_cast<std::uint8_t>(c.order_exp())};
  return x;
}

}  // namespace netform::galois
