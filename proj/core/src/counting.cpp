#include "atilde/counting.hpp"

#include <numeric>
#include <string>

#include "atilde/errors.hpp"

namespace atilde {

std::string to_string(const Rational& r) {
  const QInt num = boost::multiprecision::numerator(r);
  const QInt den = boost::multiprecision::denominator(r);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

namespace counting {

QInt ipow(const QInt& base, unsigned exponent) {
  QInt result = 1;
  QInt b = base;
  while (exponent != 0) {
    if (exponent & 1u) result *= b;
    exponent >>= 1u;
    if (exponent != 0) b *= b;
  }
  return result;
}

QInt q_bracket(int k, int q) {
  if (k < 0) throw UsageError("q_bracket: negative argument " + std::to_string(k));
  QInt result = 1;
  QInt power = 1;
  for (int i = 1; i <= k; ++i) {
    power *= q;
    result *= power - 1;
  }
  return result;
}

QInt q_multinomial(std::span<const int> parts, int q) {
  int total = 0;
  QInt den = 1;
  for (int p : parts) {
    if (p < 0) throw UsageError("q_multinomial: negative part");
    total += p;
    den *= q_bracket(p, q);
  }
  QInt num = q_bracket(total, q);
  QInt quot, rem;
  boost::multiprecision::divide_qr(num, den, quot, rem);
  if (rem != 0) throw ConsistencyError("q_multinomial: inexact division");
  return quot;
}

QInt gaussian_binomial(int m, int d, int q) {
  if (d < 0 || d > m) return 0;
  const int parts[2] = {d, m - d};
  return q_multinomial(parts, q);
}

std::int64_t weighted_exponent(std::span<const int> v) {
  const auto n = static_cast<std::int64_t>(v.size());
  std::int64_t e = 0;
  for (std::int64_t i = 1; i <= n; ++i) e += i * (n + 1 - i) * v[static_cast<std::size_t>(i - 1)];
  return e;
}

QInt sphere_size(std::span<const int> k, int n, int q) {
  if (static_cast<int>(k.size()) != n)
    throw UsageError("sphere_size: index has " + std::to_string(k.size()) +
                     " components, expected " + std::to_string(n));
  // Support positions j_1 < ... < j_t, framed by j_0 = 0 and j_{t+1} = n+1.
  std::vector<int> j{0};
  for (int i = 1; i <= n; ++i) {
    if (k[static_cast<std::size_t>(i - 1)] < 0) throw UsageError("sphere_size: negative component");
    if (k[static_cast<std::size_t>(i - 1)] >= 1) j.push_back(i);
  }
  j.push_back(n + 1);
  const std::size_t t = j.size() - 2;

  std::vector<int> parts;
  for (std::size_t v = 0; v + 1 < j.size(); ++v) parts.push_back(j[v + 1] - j[v]);
  const QInt multinomial = q_multinomial(parts, q);

  std::int64_t down = 0;
  for (std::size_t v = 1; v <= t; ++v) down += static_cast<std::int64_t>(j[v]) * (j[v + 1] - j[v]);
  const std::int64_t up = weighted_exponent(k);

  QInt num = multinomial * ipow(QInt(q), static_cast<unsigned>(up));
  QInt den = ipow(QInt(q), static_cast<unsigned>(down));
  QInt quot, rem;
  boost::multiprecision::divide_qr(num, den, quot, rem);
  if (rem != 0) throw ConsistencyError("sphere_size: non-integral value");
  return quot;
}

QInt radial_ratio(std::span<const int> k, std::span<const int> delta, int n, int q) {
  if (k.size() != delta.size()) throw UsageError("radial_ratio: length mismatch");
  std::vector<int> kd(k.begin(), k.end());
  for (std::size_t i = 0; i < kd.size(); ++i) kd[i] += delta[i];
  const QInt big = sphere_size(kd, n, q);
  const QInt small = sphere_size(k, n, q);
  QInt quot, rem;
  boost::multiprecision::divide_qr(big, small, quot, rem);
  if (rem != 0) throw ConsistencyError("radial_ratio: non-integral ratio");
  return quot;
}

QInt flag_count(int n, int q) {
  // prod_{i=1}^{n+1} (q^i - 1)/(q - 1)
  QInt result = 1;
  for (int i = 1; i <= n + 1; ++i) {
    QInt term = (ipow(QInt(q), static_cast<unsigned>(i)) - 1) / (q - 1);
    result *= term;
  }
  return result;
}

QInt triangle_count(int m, int n, int q) {
  if (n != 2) throw ConfigError("triangle_count: only A~_2 is supported (n = 2)");
  if (m < 1) throw UsageError("triangle_count: side must be >= 1");
  return QInt(q * q + q + 1) * (q + 1) * ipow(QInt(q), static_cast<unsigned>(3 * m - 3));
}

QInt wall_triangle_count(int m, int q) {
  if (m < 1) throw UsageError("wall_triangle_count: side must be >= 1");
  return QInt(3) * (q + 1) * ipow(QInt(q), static_cast<unsigned>(m - 1));
}

Rational freeness_bound(int m, int q) {
  return Rational(wall_triangle_count(m, q), triangle_count(m, 2, q));
}

Rational freeness_step_ratio(int m, int q) {
  return freeness_bound(m + 1, q) / freeness_bound(m, q);
}

}  // namespace counting
}  // namespace atilde
