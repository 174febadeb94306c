#include <cstdint>
#include <vector>

#include "doctest.h"
#include "treespde/rational.hpp"
#include "treespde/rng.hpp"

using treespde::Rational;
using treespde::RationalMatrix;

namespace {

RationalMatrix from_rows(const std::vector<std::vector<long long>>& rows) {
  RationalMatrix m(rows.size(), rows.empty() ? 0 : rows[0].size());
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c) m(r, c) = Rational(rows[r][c]);
  return m;
}

bool is_zero_product(const RationalMatrix& a, const RationalMatrix& x_rows) {
  const RationalMatrix p = a * x_rows.transposed();
  for (std::size_t r = 0; r < p.rows(); ++r)
    for (std::size_t c = 0; c < p.cols(); ++c)
      if (!p(r, c).is_zero()) return false;
  return true;
}

}  // namespace

TEST_SUITE("rational") {

TEST_CASE("construction normalizes sign and gcd") {
  CHECK(Rational(6, 4) == Rational(3, 2));
  CHECK(Rational(-6, 4) == Rational(-3, 2));
  CHECK(Rational(6, -4) == Rational(-3, 2));
  CHECK(Rational(-6, -4) == Rational(3, 2));
  CHECK(Rational(0, -5) == Rational(0));
  CHECK(Rational(0, -5).den() == 1);
  CHECK(Rational(7).den() == 1);
  CHECK_THROWS_AS(Rational(1, 0), std::domain_error);
}

TEST_CASE("field operations are exact") {
  CHECK(Rational(1, 3) + Rational(1, 6) == Rational(1, 2));
  CHECK(Rational(2, 3) * Rational(9, 4) == Rational(3, 2));
  CHECK(Rational(1, 2) - Rational(2, 3) == Rational(-1, 6));
  CHECK(Rational(3, 5) / Rational(9, 10) == Rational(2, 3));
  CHECK(-Rational(3, 5) == Rational(-3, 5));
  CHECK_THROWS_AS(Rational(1) / Rational(0), std::domain_error);

  Rational h(0);
  for (long long k = 1; k <= 8; ++k) h += Rational(1, k);
  CHECK(h == Rational(761, 280));
}

TEST_CASE("ordering, sign, abs, to_string") {
  CHECK(Rational(1, 3) < Rational(1, 2));
  CHECK(Rational(-1, 2) < Rational(-1, 3));
  CHECK(Rational(2, 4) <= Rational(1, 2));
  CHECK(Rational(1, 2) >= Rational(2, 4));
  CHECK(Rational(-5, 7).sign() == -1);
  CHECK(Rational(0).sign() == 0);
  CHECK(Rational(-5, 7).abs() == Rational(5, 7));
  CHECK(Rational(3).to_string() == "3");
  CHECK(Rational(-3, 2).to_string() == "-3/2");
  CHECK(Rational(1, 4).to_double() == doctest::Approx(0.25));
}

TEST_CASE("overflow of reduced values throws instead of wrapping") {
  const Rational big(1LL << 40);
  CHECK_THROWS_AS(big * big, treespde::rational_overflow);
  const Rational tiny(1, 1LL << 40);
  CHECK_THROWS_AS(tiny * tiny, treespde::rational_overflow);
  // A product whose reduced value fits must not throw.
  CHECK((big * Rational(1, 1LL << 40)) == Rational(1));
}

TEST_CASE("matrix product and transpose") {
  const RationalMatrix a = from_rows({{1, 2}, {3, 4}});
  const RationalMatrix b = from_rows({{0, 1}, {1, 0}});
  const RationalMatrix p = a * b;
  CHECK(p == from_rows({{2, 1}, {4, 3}}));
  CHECK(a.transposed() == from_rows({{1, 3}, {2, 4}}));
  CHECK_THROWS_AS(a * from_rows({{1, 2, 3}, {4, 5, 6}, {7, 8, 9}}), std::invalid_argument);
}

TEST_CASE("rref reaches the canonical form") {
  RationalMatrix m = from_rows({{1, 2, 3}, {2, 4, 6}, {1, 1, 1}});
  const std::vector<std::size_t> pivots = treespde::rref(m);
  CHECK(pivots == std::vector<std::size_t>{0, 1});
  CHECK(m == from_rows({{1, 0, -1}, {0, 1, 2}, {0, 0, 0}}));

  RationalMatrix again = m;
  treespde::rref(again);
  CHECK(again == m);  // idempotent on reduced input

  CHECK(treespde::rank(from_rows({{1, 2, 3}, {2, 4, 6}, {1, 1, 1}})) == 2);
  CHECK(treespde::rank(from_rows({{2, 0}, {0, 5}})) == 2);
}

TEST_CASE("nullspace returns the canonical kernel basis") {
  const RationalMatrix a = from_rows({{1, 2, 3}, {2, 4, 6}, {1, 1, 1}});
  const RationalMatrix k = treespde::nullspace(a);
  CHECK(k.rows() == 1);
  CHECK(k == from_rows({{1, -2, 1}}));
  CHECK(is_zero_product(a, k));

  // Scaling rows preserves the kernel, hence the exact canonical basis.
  const RationalMatrix scaled = from_rows({{3, 6, 9}, {-2, -4, -6}, {5, 5, 5}});
  CHECK(treespde::nullspace(scaled) == k);

  const RationalMatrix full = from_rows({{1, 0}, {0, 1}});
  CHECK(treespde::nullspace(full).rows() == 0);
}

TEST_CASE("random matrices: rank-nullity and exact annihilation") {
  treespde::SplitMix64 rng(20240907);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t rows = 1 + rng.next() % 5;
    const std::size_t cols = 1 + rng.next() % 5;
    RationalMatrix a(rows, cols);
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t c = 0; c < cols; ++c)
        a(r, c) = Rational(static_cast<long long>(rng.next() % 7) - 3);
    const std::size_t rk = treespde::rank(a);
    const RationalMatrix k = treespde::nullspace(a);
    CHECK(rk + k.rows() == cols);
    CHECK(rk == treespde::rank(a.transposed()));
    CHECK(is_zero_product(a, k));
    // Basis rows are reduced: each has a unit leading entry.
    for (std::size_t r = 0; r < k.rows(); ++r) {
      std::size_t c = 0;
      while (c < k.cols() && k(r, c).is_zero()) ++c;
      REQUIRE(c < k.cols());
      CHECK(k(r, c) == Rational(1));
    }
  }
}

}  // TEST_SUITE
