#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sepgen/bigint.hpp"
#include "sepgen/config.hpp"
#include "sepgen/errors.hpp"
#include "sepgen/finite_field.hpp"

namespace sepgen {

// ---------------------------------------------------------------------------
// Arithmetic helpers
// ---------------------------------------------------------------------------

inline int moebius(std::uint64_t n) {
  if (n == 0) throw invalid_input("moebius: n must be >= 1");
  // Deliberate fault site for exercising the self-check machinery.
  if (n == 2 && test_fault_enabled("moebius-sign")) return 1;
  int sign = 1;
  for (std::uint64_t d = 2; d * d <= n; ++d) {
    if (n % d == 0) {
      n /= d;
      if (n % d == 0) return 0;  // square factor
      sign = -sign;
    }
  }
  if (n > 1) sign = -sign;
  return sign;
}

// ---------------------------------------------------------------------------
// Field-algebra tuple counts
// ---------------------------------------------------------------------------

// Number of F_q-algebra surjections (F_q[t_1..t_g] ->> F_{q^n}) divided by
// nothing -- equivalently the number of unordered "arrivals": the count of
// g-element tuples of F_{q^n} that generate it over F_q, divided by n.  By
// Moebius inversion over the subfield lattice:
//
//   N_{q,n}(g) = (1/n) * sum_{d | n} mu(d) q^{gn/d}
//
// The divisor sum is always non-negative and divisible by n; failure of
// either property is an internal bug.  g = 0 is allowed (empty tuples
// generate only the prime part: the sum collapses to [n == 1]).
inline Count n_etale(const PrimePower& q, unsigned n, unsigned g) {
  if (n == 0) throw invalid_input("n_etale: n must be >= 1");
  BigInt sum = 0;
  for (std::uint64_t d : divisors_u64(n)) {
    const int mu = moebius(d);
    if (mu == 0) continue;
    const BigInt term = pow_big(q.big(), (std::uint64_t(g) * n) / d);
    sum += mu > 0 ? term : -term;
  }
  if (sum < 0) throw integrity_error("n_etale: negative divisor sum");
  return Count(div_exact(sum, BigInt(n), "n_etale sum by n"));
}

// Partition identity: every one of the q^{gn} tuples of F_{q^n} generates a
// unique subfield F_{q^d} with d | n, so q^{gn} = sum_{d|n} d * N_{q,d}(g).
inline bool burnside_identity_check(const PrimePower& q, unsigned n,
                                    unsigned g) {
  BigInt sum = 0;
  for (std::uint64_t d : divisors_u64(n)) {
    sum += BigInt(d) *
           n_etale(q, static_cast<unsigned>(d), g).value();
  }
  return sum == pow_big(q.big(), std::uint64_t(g) * n);
}

// ---------------------------------------------------------------------------
// Bounds
// ---------------------------------------------------------------------------

// An inclusive bracket lower <= value <= upper, tagged with the rule that
// produced each endpoint.
struct BoundPair {
  Count lower;
  Count upper;
  std::string lower_rule;
  std::string upper_rule;

  bool exact() const { return lower == upper; }
};

// Elementary bracket for N_{q,n}(g), g >= 1:
//
//   ceil( q^{gn} (q-1) / (n q) )  <=  N_{q,n}(g)  <=  floor( q^{gn} / n )
//
// The upper bound counts all tuples per n-element orbit; the lower bound
// discards at most the fraction 1/q of tuples that fail to generate.
inline BoundPair etale_bounds(const PrimePower& q, unsigned n, unsigned g) {
  if (n == 0 || g == 0) throw invalid_input("etale_bounds: need n, g >= 1");
  const BigInt total = pow_big(q.big(), std::uint64_t(g) * n);
  BoundPair b;
  b.lower = Count(ceil_div(total * (q.big() - 1), BigInt(n) * q.big()));
  b.upper = Count(floor_div(total, BigInt(n)));
  b.lower_rule = "tuple-fraction";
  b.upper_rule = "orbit-cardinality";
  if (b.lower > b.upper)
    throw integrity_error("etale_bounds: lower exceeds upper");
  return b;
}

// Order of the symmetry group acting on generating tuples of M_m(F_{q^n})
// over F_q: inner automorphisms PGL_m(F_{q^n}) extended by the n Galois
// twists.
//
//   C(q, n, m) = n * prod_{i=0}^{m-1} (q^{nm} - q^{ni}) / (q^n - 1)
//
// For m = 1 this degenerates to n.
inline Count group_order_c(const PrimePower& q, unsigned n, unsigned m) {
  if (n == 0 || m == 0) throw invalid_input("group_order_c: need n, m >= 1");
  const BigInt qn = pow_big(q.big(), n);
  const BigInt qnm = pow_big(q.big(), std::uint64_t(n) * m);
  BigInt num = n;
  for (unsigned i = 0; i < m; ++i) num *= qnm - pow_big(qn, i);
  return Count(div_exact(num, qn - 1, "group order by q^n - 1"));
}

// Number of g-tuples spanning a d-dimensional F_q-space:
//
//   prod_{i=0}^{d-1} (q^g - q^i),  zero when g < d.
inline Count rank_count(const PrimePower& q, unsigned d, unsigned g) {
  if (d == 0) throw invalid_input("rank_count: d must be >= 1");
  if (g < d) return Count(0);
  const BigInt qg = pow_big(q.big(), g);
  BigInt prod = 1;
  for (unsigned i = 0; i < d; ++i) prod *= qg - pow_big(q.big(), i);
  return Count(prod);
}

// Bracket for N_{M_m(F_{q^n})/F_q}(g).  For m = 1 the matrix algebra is the
// field itself and the exact count is returned on both endpoints.  For
// m >= 2 the bracket combines:
//
//   upper: all tuples per orbit, optionally discarding tuples confined to
//          the scalar subalgebra M_m(F_q) (n >= 2) or to the subalgebra
//          with prescribed zeros in the first column (m >= 2);
//   lower: every (g-1)-tuple completes to a generating g-tuple (g >= 2),
//          and every tuple spanning the full matrix space generates.
//
// g = 0 is allowed and yields the exact count 0 for m >= 2.
inline BoundPair matrix_bounds(const PrimePower& q, unsigned n, unsigned m,
                               unsigned g) {
  if (n == 0 || m == 0) throw invalid_input("matrix_bounds: need n, m >= 1");
  if (m == 1) {
    const Count exact = n_etale(q, n, g);
    return BoundPair{exact, exact, "etale-exact", "etale-exact"};
  }

  const BigInt c = group_order_c(q, n, m).value();
  const std::uint64_t nm2 = std::uint64_t(n) * m * m;
  const BigInt all = pow_big(q.big(), std::uint64_t(g) * nm2);

  BoundPair b;
  b.upper = Count(floor_div(all, c));
  b.upper_rule = "orbit-cardinality";
  if (n >= 2) {
    const BigInt scalar = pow_big(q.big(), std::uint64_t(g) * m * m);
    Count u(floor_div(all - scalar, c));
    if (u < b.upper) {
      b.upper = u;
      b.upper_rule = "scalar-subalgebra-excluded";
    }
  }
  {
    const BigInt column =
        pow_big(q.big(), std::uint64_t(g) * n * (std::uint64_t(m) * m - m + 1));
    Count u(floor_div(all - column, c));
    if (u < b.upper) {
      b.upper = u;
      b.upper_rule = "column-subalgebra-excluded";
    }
  }

  b.lower = Count(0);
  b.lower_rule = "trivial";
  if (g >= 2) {
    const BigInt prefix = pow_big(q.big(), std::uint64_t(g - 1) * nm2);
    b.lower = Count(ceil_div(prefix, c));
    b.lower_rule = "prefix-completion";
  }
  {
    Count spanning = rank_count(q, static_cast<unsigned>(nm2), g);
    Count l(ceil_div(spanning.value(), c));
    if (l > b.lower) {
      b.lower = l;
      b.lower_rule = "spanning-tuples";
    }
  }

  if (b.lower > b.upper)
    throw integrity_error("matrix_bounds: lower exceeds upper");
  return b;
}

}  // namespace sepgen
