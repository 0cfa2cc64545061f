#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <functional>

#include "atilde/counting.hpp"
#include "atilde/errors.hpp"
#include "oracle.hpp"

using namespace atilde;
using namespace atilde::counting;

TEST_CASE("q-factorials") {
  CHECK(q_bracket(3, 2) == 21);
  CHECK(q_bracket(0, 2) == 1);
  CHECK(q_bracket(0, 7) == 1);
  CHECK_THROWS_AS(q_bracket(-1, 2), UsageError);
  CHECK(q_bracket(4, 3) == QInt(80 * 26 * 8 * 2));
  for (int q : {2, 3, 4, 5})
    for (int k = 0; k <= 6; ++k) CHECK(q_bracket(k, q).str() == oracle::str(oracle::qfact(k, q)));
}

TEST_CASE("q-multinomials") {
  const int p12[] = {1, 2};
  CHECK(q_multinomial(p12, 2) == 7);
  const int p111[] = {1, 1, 1};
  CHECK(q_multinomial(p111, 2) == 21);
  const int p3[] = {3};
  CHECK(q_multinomial(p3, 5) == 1);
  // gaussian binomials count subspaces
  for (int m = 1; m <= 4; ++m)
    for (int d = 0; d <= m; ++d) CHECK(gaussian_binomial(m, d, 2) == oracle::binary_subspaces(m, d));
  CHECK(gaussian_binomial(3, 1, 3) == 13);
  CHECK(gaussian_binomial(4, 2, 2) == 35);
}

TEST_CASE("sphere sizes") {
  const SphereIndex k10{1, 0}, k0{0, 0}, k11{1, 1};
  CHECK(sphere_size(k10, 2, 2) == 7);
  CHECK(sphere_size(k0, 2, 2) == 1);
  CHECK(sphere_size(k11, 2, 2) == 42);
  // q^2 + q + 1 points, for every q
  for (int q : {2, 3, 4, 5, 7}) CHECK(sphere_size(k10, 2, q) == q * q + q + 1);

  // closed form against the independent oracle across ranks and orders
  for (int n = 1; n <= 4; ++n)
    for (int q : {2, 3, 4}) {
      SphereIndex k(static_cast<std::size_t>(n), 0);
      std::function<void(std::size_t, int)> rec = [&](std::size_t i, int left) {
        if (i == k.size()) {
          CHECK_MESSAGE(sphere_size(k, n, q).str() == oracle::str(oracle::sphere(k, q)), "n=", n, " q=", q);
          return;
        }
        for (int v = 0; v <= left; ++v) {
          k[i] = v;
          rec(i + 1, left - v);
        }
        k[i] = 0;
      };
      rec(0, n <= 2 ? 4 : 3);
    }

  // type-symmetry: |S_(a,b)| = |S_(b,a)| for n = 2
  for (int a = 0; a <= 4; ++a)
    for (int b = 0; b <= 4; ++b) {
      const SphereIndex x{a, b}, y{b, a};
      CHECK(sphere_size(x, 2, 3) == sphere_size(y, 2, 3));
    }
}

TEST_CASE("radial ratios") {
  const SphereIndex k11{1, 1}, d11{1, 1}, d0{0, 0}, e1{1, 0};
  CHECK(radial_ratio(k11, d0, 2, 2) == 1);
  CHECK(radial_ratio(k11, d11, 2, 2) == 16);
  CHECK(radial_ratio(k11, e1, 2, 2) * sphere_size(k11, 2, 2) == sphere_size(SphereIndex{2, 1}, 2, 2));
  // full support: a pure power q^{sum i(n+1-i) delta_i}
  const SphereIndex k3{1, 1, 1}, d3{0, 2, 1};
  CHECK(radial_ratio(k3, d3, 3, 2) == ipow(QInt(2), static_cast<unsigned>(weighted_exponent(d3))));
  // a change of support is an exact integer ratio too
  const SphereIndex z{0, 0};
  CHECK(radial_ratio(z, e1, 2, 2) == 7);
}

TEST_CASE("weighted exponents") {
  const int a[] = {1, 0};
  const int b[] = {0, 1};
  const int c[] = {1, 1, 1};
  CHECK(weighted_exponent(a) == 2);
  CHECK(weighted_exponent(b) == 2);
  CHECK(weighted_exponent(c) == 3 + 4 + 3);
}

TEST_CASE("flag and triangle counts") {
  CHECK(flag_count(2, 2) == 21);
  CHECK(flag_count(2, 3) == 52);
  CHECK(flag_count(3, 2) == 15 * 7 * 3);
  CHECK(triangle_count(1, 2, 2) == 21);
  CHECK(triangle_count(2, 2, 2) == 168);
  CHECK(triangle_count(1, 2, 3) == 52);
  CHECK_THROWS_AS(triangle_count(1, 3, 2), ConfigError);
  CHECK_THROWS_AS(triangle_count(0, 2, 2), UsageError);
}

TEST_CASE("wall triangles and the freeness bound") {
  CHECK(wall_triangle_count(1, 2) == 9);
  CHECK(wall_triangle_count(2, 2) == 18);
  CHECK(freeness_bound(1, 2) == Rational(3, 7));
  CHECK(freeness_bound(2, 2) == Rational(3, 28));
  CHECK(to_string(freeness_bound(1, 2)) == "3/7");
  for (int q : {2, 3, 4, 5})
    for (int m = 1; m <= 8; ++m) {
      CHECK(wall_triangle_count(m, q) == 3 * (q + 1) * ipow(QInt(q), static_cast<unsigned>(m - 1)));
      CHECK(freeness_step_ratio(m, q) == Rational(QInt(1), QInt(q * q)));
      CHECK(freeness_bound(m + 1, q) < freeness_bound(m, q));
    }
}

TEST_CASE("rendering of rationals") {
  CHECK(to_string(Rational(4)) == "4");
  CHECK(to_string(Rational(1, 9)) == "1/9");
  CHECK(to_string(Rational(-2, 6)) == "-1/3");
}
