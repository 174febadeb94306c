#pragma once

#include <cstdint>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace treespde {

// Exact rational arithmetic on 64-bit words. All intermediate products are
// widened to 128 bits; a reduced value that still does not fit in 64 bits
// throws rational_overflow instead of silently wrapping. Tree adjacency
// kernels keep numerators and denominators tiny, so the guard never fires in
// practice; it exists to make a pathological input fail loudly.
class rational_overflow : public std::overflow_error {
public:
  rational_overflow() : std::overflow_error("rational arithmetic overflow") {}
};

class Rational {
public:
  Rational() : num_(0), den_(1) {}
  Rational(long long n) : num_(n), den_(1) {}
  Rational(long long n, long long d) {
    if (d == 0) throw std::domain_error("rational with zero denominator");
    assign(static_cast<__int128>(n), static_cast<__int128>(d));
  }

  long long num() const { return num_; }
  long long den() const { return den_; }

  bool is_zero() const { return num_ == 0; }
  int sign() const { return num_ > 0 ? 1 : (num_ < 0 ? -1 : 0); }

  friend Rational operator+(const Rational& a, const Rational& b) {
    return make(i128(a.num_) * b.den_ + i128(b.num_) * a.den_,
                i128(a.den_) * b.den_);
  }
  friend Rational operator-(const Rational& a, const Rational& b) {
    return make(i128(a.num_) * b.den_ - i128(b.num_) * a.den_,
                i128(a.den_) * b.den_);
  }
  friend Rational operator*(const Rational& a, const Rational& b) {
    return make(i128(a.num_) * b.num_, i128(a.den_) * b.den_);
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.num_ == 0) throw std::domain_error("rational division by zero");
    return make(i128(a.num_) * b.den_, i128(a.den_) * b.num_);
  }
  Rational operator-() const {
    Rational r;
    r.num_ = -num_;
    r.den_ = den_;
    return r;
  }
  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  Rational& operator-=(const Rational& o) { return *this = *this - o; }
  Rational& operator*=(const Rational& o) { return *this = *this * o; }
  Rational& operator/=(const Rational& o) { return *this = *this / o; }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
  friend bool operator<(const Rational& a, const Rational& b) {
    return i128(a.num_) * b.den_ < i128(b.num_) * a.den_;
  }
  friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
  friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
  friend bool operator>=(const Rational& a, const Rational& b) { return !(a < b); }

  Rational abs() const { return num_ < 0 ? -*this : *this; }

  double to_double() const {
    return static_cast<double>(num_) / static_cast<double>(den_);
  }

  std::string to_string() const {
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
  }

private:
  using i128 = __int128;

  static Rational make(i128 n, i128 d) {
    Rational r;
    r.assign(n, d);
    return r;
  }

  void assign(i128 n, i128 d) {
    if (d < 0) {
      n = -n;
      d = -d;
    }
    if (n == 0) {
      num_ = 0;
      den_ = 1;
      return;
    }
    i128 g = gcd128(n < 0 ? -n : n, d);
    n /= g;
    d /= g;
    constexpr i128 lo = std::numeric_limits<long long>::min();
    constexpr i128 hi = std::numeric_limits<long long>::max();
    if (n < lo || n > hi || d > hi) throw rational_overflow();
    num_ = static_cast<long long>(n);
    den_ = static_cast<long long>(d);
  }

  static i128 gcd128(i128 a, i128 b) {
    while (b != 0) {
      i128 t = a % b;
      a = b;
      b = t;
    }
    return a;
  }

  long long num_;
  long long den_;
};

using RationalVector = std::vector<Rational>;

// Dense row-major rational matrix; dimensions stay small (vertex counts).
class RationalMatrix {
public:
  RationalMatrix() : rows_(0), cols_(0) {}
  RationalMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  Rational& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const Rational& operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }

  RationalVector row(std::size_t r) const {
    return RationalVector(data_.begin() + r * cols_, data_.begin() + (r + 1) * cols_);
  }

  RationalMatrix transposed() const {
    RationalMatrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    return t;
  }

  friend RationalMatrix operator*(const RationalMatrix& a, const RationalMatrix& b) {
    if (a.cols_ != b.rows_) throw std::invalid_argument("rational matrix shape mismatch");
    RationalMatrix p(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        if (a(i, k).is_zero()) continue;
        for (std::size_t j = 0; j < b.cols_; ++j)
          if (!b(k, j).is_zero()) p(i, j) += a(i, k) * b(k, j);
      }
    return p;
  }

  friend bool operator==(const RationalMatrix& a, const RationalMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<Rational> data_;
};

// In-place reduction to reduced row echelon form. Returns the pivot columns
// in order; the matrix afterwards has unit pivots, zeros above and below.
inline std::vector<std::size_t> rref(RationalMatrix& m) {
  std::vector<std::size_t> pivots;
  std::size_t pr = 0;
  for (std::size_t pc = 0; pc < m.cols() && pr < m.rows(); ++pc) {
    std::size_t sel = pr;
    while (sel < m.rows() && m(sel, pc).is_zero()) ++sel;
    if (sel == m.rows()) continue;
    if (sel != pr)
      for (std::size_t c = 0; c < m.cols(); ++c) std::swap(m(sel, c), m(pr, c));
    Rational inv = Rational(1) / m(pr, pc);
    for (std::size_t c = pc; c < m.cols(); ++c) m(pr, c) *= inv;
    for (std::size_t r = 0; r < m.rows(); ++r) {
      if (r == pr || m(r, pc).is_zero()) continue;
      Rational f = m(r, pc);
      for (std::size_t c = pc; c < m.cols(); ++c) m(r, c) -= f * m(pr, c);
    }
    pivots.push_back(pc);
    ++pr;
  }
  return pivots;
}

inline std::size_t rank(RationalMatrix m) { return rref(m).size(); }

// Canonical basis of the right null space {x : m x = 0}, returned as the rows
// of a d x cols matrix in reduced row echelon form. The RREF of a basis is
// unique per subspace, so equal kernels compare equal row by row.
inline RationalMatrix nullspace(const RationalMatrix& m) {
  RationalMatrix r = m;
  std::vector<std::size_t> pivots = rref(r);
  std::vector<bool> is_pivot(m.cols(), false);
  for (std::size_t p : pivots) is_pivot[p] = true;

  std::vector<std::size_t> free_cols;
  for (std::size_t c = 0; c < m.cols(); ++c)
    if (!is_pivot[c]) free_cols.push_back(c);

  RationalMatrix basis(free_cols.size(), m.cols());
  for (std::size_t i = 0; i < free_cols.size(); ++i) {
    std::size_t f = free_cols[i];
    basis(i, f) = Rational(1);
    for (std::size_t pr = 0; pr < pivots.size(); ++pr)
      basis(i, pivots[pr]) = -r(pr, f);
  }
  rref(basis);
  return basis;
}

}  // namespace treespde
