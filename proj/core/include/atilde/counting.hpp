#pragma once

// Exact closed-form counts: q-analogs, sphere sizes in the building, and the
// triangle counts used for the freeness bound. No floating point anywhere.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace atilde {

using QInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Sector coordinate k in Z_+^n: k[j-1] counts the letters of dimension j.
using SphereIndex = std::vector<int>;

/// Renders a rational as "p/q" (or "p" when the denominator is 1).
std::string to_string(const Rational& r);

namespace counting {

QInt ipow(const QInt& base, unsigned exponent);

/// [k]_q = (q^k - 1)(q^{k-1} - 1)...(q - 1); [0]_q = 1.
QInt q_bracket(int k, int q);

/// [sum parts]_q / prod [part]_q. The division must be exact.
QInt q_multinomial(std::span<const int> parts, int q);

/// Number of d-dimensional subspaces of an m-dimensional space over F_q.
QInt gaussian_binomial(int m, int d, int q);

/// Sum over i of i(n+1-i) * v_i: the exponent that governs sphere growth
/// and the Radon-Nikodym cocycle.
std::int64_t weighted_exponent(std::span<const int> v);

/// |S_k| for the A~_n building of order q.
QInt sphere_size(std::span<const int> k, int n, int q);

/// |S_{k+delta}| / |S_k|. Always an integer (each vertex of S_k has the
/// same number of descendants); a remainder raises ConsistencyError.
QInt radial_ratio(std::span<const int> k, std::span<const int> delta, int n, int q);

/// Number of complete flags of PG(n, q), i.e. chambers containing a vertex.
QInt flag_count(int n, int q);

/// Apex-O triangles of side m in an A~_2 building: (q^2+q+1)(q+1)q^{3m-3}.
QInt triangle_count(int m, int n, int q);

/// Triangles of side m lying in an apartment with a fixed wall: 3(q+1)q^{m-1}.
QInt wall_triangle_count(int m, int q);

/// wall_triangle_count / triangle_count, the measure bound for wall points.
Rational freeness_bound(int m, int q);

/// freeness_bound(m+1) / freeness_bound(m); equals q^{-2} for every m >= 1.
Rational freeness_step_ratio(int m, int q);

}  // namespace counting
}  // namespace atilde
