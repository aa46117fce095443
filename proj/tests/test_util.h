#pragma once

// Reference implementations used as independent cross-checks.  Everything
// here is deliberately naive -- enumeration and trial division only -- so a
// bug in the library cannot hide in its own test oracle.

#include <cstdint>
#include <vector>

namespace testref {

using Poly = std::vector<std::uint64_t>;  // constant term first

inline Poly ref_mul(const Poly& a, const Poly& b, std::uint64_t p) {
  Poly c(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j)
      c[i + j] = (c[i + j] + a[i] * b[j]) % p;
  return c;
}

// Does monic d divide a over F_p?
inline bool ref_divides(const Poly& d, Poly a, std::uint64_t p) {
  const std::size_t dd = d.size() - 1;
  while (a.size() > dd) {
    const std::uint64_t lead = a.back();
    if (lead != 0) {
      const std::size_t shift = a.size() - 1 - dd;
      for (std::size_t i = 0; i < d.size(); ++i)
        a[shift + i] = (a[shift + i] + p * lead - lead * d[i]) % p;
    }
    a.pop_back();
  }
  for (std::uint64_t c : a)
    if (c != 0) return false;
  return true;
}

// Irreducibility by trial division against every monic divisor candidate of
// degree at most deg(f)/2.
inline bool ref_irreducible(const Poly& f, std::uint64_t p) {
  const std::size_t deg = f.size() - 1;
  for (std::size_t dd = 1; 2 * dd <= deg; ++dd) {
    Poly cand(dd + 1, 0);
    cand[dd] = 1;
    for (;;) {
      if (ref_divides(cand, f, p)) return false;
      std::size_t i = dd;
      bool carry = true;
      while (i-- > 0) {
        if (++cand[i] < p) {
          carry = false;
          break;
        }
        cand[i] = 0;
      }
      if (carry) break;
    }
  }
  return true;
}

// First monic irreducible of the given degree in lexicographic coefficient
// order (constant term first).
inline Poly ref_lex_least_irreducible(std::uint64_t p, unsigned degree) {
  Poly low(degree, 0);
  for (;;) {
    Poly f(low);
    f.push_back(1);
    if (ref_irreducible(f, p)) return f;
    std::size_t i = degree;
    while (i-- > 0) {
      if (++low[i] < p) break;
      low[i] = 0;
    }
  }
}

// Number of monic irreducible polynomials of exact degree over F_p.
inline std::uint64_t ref_count_irreducible(std::uint64_t p, unsigned degree) {
  std::uint64_t count = 0;
  Poly low(degree, 0);
  for (;;) {
    Poly f(low);
    f.push_back(1);
    if (ref_irreducible(f, p)) ++count;
    std::size_t i = degree;
    bool carry = true;
    while (i-- > 0) {
      if (++low[i] < p) {
        carry = false;
        break;
      }
      low[i] = 0;
    }
    if (carry) return count;
  }
}

// Rank of a list of length-d vectors over F_p by Gaussian elimination.
inline unsigned ref_rank(std::vector<std::vector<std::uint64_t>> rows,
                         std::uint64_t p) {
  auto inv_mod = [p](std::uint64_t a) {
    std::uint64_t r = 1, b = a % p, e = p - 2;
    while (e) {
      if (e & 1) r = r * b % p;
      b = b * b % p;
      e >>= 1;
    }
    return r;
  };
  unsigned rank = 0;
  const std::size_t width = rows.empty() ? 0 : rows[0].size();
  std::size_t col = 0;
  for (; col < width && rank < rows.size(); ++col) {
    std::size_t pivot = rank;
    while (pivot < rows.size() && rows[pivot][col] == 0) ++pivot;
    if (pivot == rows.size()) continue;
    std::swap(rows[rank], rows[pivot]);
    const std::uint64_t s = inv_mod(rows[rank][col]);
    for (auto& v : rows[rank]) v = v * s % p;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (r == rank || rows[r][col] == 0) continue;
      const std::uint64_t f = rows[r][col];
      for (std::size_t j = 0; j < width; ++j)
        rows[r][j] = (rows[r][j] + p - f * rows[rank][j] % p) % p;
    }
    ++rank;
  }
  return rank;
}

}  // namespace testref
