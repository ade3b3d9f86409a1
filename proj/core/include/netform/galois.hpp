#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

// Exact arithmetic over GF(2^M) plus the dense matrix operations (rank,
// Gaussian elimination, linear solve) needed by the coding layer.

namespace netform::galois {

struct singular_matrix_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A field element tagged with its field order exponent M. Mixing elements of
// different orders in one operation is a usage error.
struct GfElement {
  std::uint16_t value = 0;
  std::uint8_t order = 8;

  friend bool operator==(const GfElement&, const GfElement&) = default;
};

// GF(2^m) with multiplication via log/antilog tables. Tables are built once
// in the constructor and never mutated afterwards, so a Field can be shared
// freely across threads.
class Field {
 public:
  // poly = 0 selects a standard irreducible reduction polynomial for m;
  // for m = 8 that is x^8 + x^4 + x^3 + x + 1 (0x11B).
  explicit Field(unsigned m, std::uint32_t poly = 0);

  unsigned order_exp() const { return m_; }
  std::uint32_t size() const { return size_; }
  std::uint32_t reduction_poly() const { return poly_; }

  std::uint16_t add(std::uint16_t a, std::uint16_t b) const {
    return static_cast<std::uint16_t>(a ^ b);
  }

  std::uint16_t mul(std::uint16_t a, std::uint16_t b) const {
    if (a == 0 || b == 0) return 0;
    return exp_[log_[a] + log_[b]];
  }

  std::uint16_t inv(std::uint16_t a) const {
    if (a == 0) throw std::domain_error("Field::inv: zero has no inverse");
    return exp_[size_ - 1 - log_[a]];
  }

  std::uint16_t div(std::uint16_t a, std::uint16_t b) const {
    return mul(a, inv(b));
  }

  // Shared immutable instance for a given order exponent.
  static const Field& of(unsigned m);

 private:
  unsigned m_;
  std::uint32_t size_;
  std::uint32_t poly_;
  std::vector<std::uint16_t> log_;   // log_[x] for x != 0
  std::vector<std::uint16_t> exp_;   // exp_[i] = g^i, doubled to avoid a mod
};

GfElement gf_add(GfElement a, GfElement b);
GfElement gf_mul(GfElement a, GfElement b);
GfElement gf_inv(GfElement a);

// Dense matrix of GF(2^m) values.
class GfMatrix {
 public:
  GfMatrix(std::size_t rows, std::size_t cols, unsigned order = 8);

  static GfMatrix identity(std::size_t n, unsigned order = 8);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  unsigned order_exp() const { return order_; }

  std::uint16_t operator()(std::size_t r, std::size_t c) const {
    return v_[r * cols_ + c];
  }
  std::uint16_t& operator()(std::size_t r, std::size_t c) {
    return v_[r * cols_ + c];
  }

  GfElement at(std::size_t r, std::size_t c) const {
    return {(*this)(r, c), static_cast<std::uint8_t>(order_)};
  }
  void set(std::size_t r, std::size_t c, GfElement e);

  std::size_t rank() const;

  // In-place reduced row echelon form over the field. Returns the pivot
  // column of each pivot row; the number of pivots is the rank.
  std::vector<std::size_t> rref();

  GfMatrix times(const GfMatrix& other) const;

  friend bool operator==(const GfMatrix&, const GfMatrix&) = default;

 private:
  std::size_t rows_;
  std::size_t cols_;
  unsigned order_;
  std::vector<std::uint16_t> v_;
};

// Solves c * x = y for a square full-rank c; throws singular_matrix_error
// when the system is rank deficient.
std::vector<GfElement> solve(const GfMatrix& c, std::span<const GfElement> y);

}  // namespace netform::galois
