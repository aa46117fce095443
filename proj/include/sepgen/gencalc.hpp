#pragma once

// Minimal-generator computation for separable algebras over a finite field:
// exact for products of field extensions, bracketed-with-refinement for
// matrix parts, combined across parts by the max rule, plus the residue
// interval decomposition that classifies which side of the bracket a
// multiplicity lands on.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sepgen/bigint.hpp"
#include "sepgen/counting.hpp"
#include "sepgen/errors.hpp"
#include "sepgen/oracle.hpp"

namespace sepgen {

enum class RefineMode {
  bounds_only,   // never enumerate; refine with closed-form bounds alone
  allow_oracle,  // may run the exhaustive counter when within the guard
};

// ---------------------------------------------------------------------------
// Algebra specifications
// ---------------------------------------------------------------------------

// One isotypic part: r copies of the m x m matrix algebra over F_{q^n}
// (m = 1 is a field extension).
struct AlgebraPart {
  unsigned n = 1;
  unsigned m = 1;
  Count r{1};

  friend bool operator==(const AlgebraPart& a, const AlgebraPart& b) {
    return a.n == b.n && a.m == b.m && a.r == b.r;
  }
};

struct AlgebraSpec {
  PrimePower q{2, 1, 2};
  std::vector<AlgebraPart> parts;
};

// Validates and normalizes: parts nonempty, all fields positive, duplicate
// (n, m) shapes merged by adding multiplicities, parts sorted by (n, m).
inline AlgebraSpec canonicalize(AlgebraSpec spec) {
  if (spec.parts.empty())
    throw invalid_input("algebra spec: parts must be nonempty");
  for (const AlgebraPart& p : spec.parts) {
    if (p.n == 0 || p.m == 0)
      throw invalid_input("algebra spec: n and m must be >= 1");
    if (p.r == Count(0))
      throw invalid_input("algebra spec: multiplicity must be >= 1");
  }
  std::sort(spec.parts.begin(), spec.parts.end(),
            [](const AlgebraPart& a, const AlgebraPart& b) {
              return a.n != b.n ? a.n < b.n : a.m < b.m;
            });
  std::vector<AlgebraPart> merged;
  for (const AlgebraPart& p : spec.parts) {
    if (!merged.empty() && merged.back().n == p.n && merged.back().m == p.m)
      merged.back().r = merged.back().r + p.r;
    else
      merged.push_back(p);
  }
  spec.parts = std::move(merged);
  return spec;
}

// ---------------------------------------------------------------------------
// Results
// ---------------------------------------------------------------------------

// Resolution labels. "formula" = closed form (field-extension parts);
// "bound-resolved" = the closed-form bracket collapsed via counting bounds;
// "oracle-resolved" = the exhaustive counter decided the bracket;
// "bracket-only" = returned undecided with hi = lo + 1.
inline constexpr const char* kMethodFormula = "formula";
inline constexpr const char* kMethodBoundResolved = "bound-resolved";
inline constexpr const char* kMethodOracleResolved = "oracle-resolved";
inline constexpr const char* kMethodBracketOnly = "bracket-only";

struct PartGen {
  unsigned n = 1;
  unsigned m = 1;
  Count r{1};
  unsigned lo = 0;  // lo == hi means exact
  unsigned hi = 0;
  std::string method;

  bool exact() const { return lo == hi; }
};

struct GenResult {
  std::string status;  // "exact" | "bracket"
  unsigned value = 0;  // meaningful when exact
  unsigned lo = 0;
  unsigned hi = 0;  // hi = lo + 1 when bracket
  std::string method;
  std::vector<PartGen> parts;

  bool exact() const { return status == "exact"; }
};

namespace detail {

inline GenResult result_from_range(unsigned lo, unsigned hi,
                                   std::string method,
                                   std::vector<PartGen> parts) {
  GenResult r;
  r.lo = lo;
  r.hi = hi;
  r.status = lo == hi ? "exact" : "bracket";
  r.value = lo;
  r.method = std::move(method);
  r.parts = std::move(parts);
  return r;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Pure parts
// ---------------------------------------------------------------------------

// Minimal g with r <= N_{q,n}(g): the number of generators of r copies of
// F_{q^n} as an F_q-algebra.  The count is strictly increasing in g (for
// g >= 1), so the increment-from-zero search terminates.
inline unsigned gen_pure_etale(const PrimePower& q, unsigned n,
                               const Count& r) {
  if (n == 0) throw invalid_input("gen_pure_etale: n must be >= 1");
  if (r == Count(0)) throw invalid_input("gen_pure_etale: r must be >= 1");
  unsigned g = 0;
  while (n_etale(q, n, g) < r) ++g;
  return g;
}

// Verifies the two-sided ceiling bracket
//   ceil((1/n) log_q(n r)) <= gen <= ceil((1/n) log_q(n r)) + 1
// by exact power comparison.
inline bool etale_bracket_check(const PrimePower& q, unsigned n,
                                const Count& r) {
  const unsigned gen = gen_pure_etale(q, n, r);
  const unsigned lo =
      ceil_log_pow(BigInt(n) * r.value(), q.big(), n);
  return gen >= lo && gen <= lo + 1;
}

// gen of r copies of M_m(F_{q^n}) (m >= 2) over F_q.  Starting bracket
// {max(g0, 2), max(g0, 2) + 1} with g0 = ceil((1/nm^2) log_q(C r)), from
// the two-sided power bound plus the noncommutativity floor of 2; then the
// bracket is collapsed when the counting bounds at g0 decide it, or, in
// allow_oracle mode, when the exhaustive count at g0 is within the guard.
// An infeasible oracle quietly downgrades to the bracket.
inline GenResult gen_pure_matrix(const PrimePower& q, unsigned n, unsigned m,
                                 const Count& r,
                                 RefineMode mode = RefineMode::bounds_only,
                                 const OracleOptions& opts = {}) {
  if (n == 0) throw invalid_input("gen_pure_matrix: n must be >= 1");
  if (m < 2) throw invalid_input("gen_pure_matrix: m must be >= 2");
  if (r == Count(0)) throw invalid_input("gen_pure_matrix: r must be >= 1");

  const Count c = group_order_c(q, n, m);
  const unsigned stride = n * m * m;
  const unsigned g0 = ceil_log_pow(c.value() * r.value(), q.big(), stride);

  auto single = [&](unsigned lo, unsigned hi, const char* method) {
    PartGen part{n, m, r, lo, hi, method};
    return detail::result_from_range(lo, hi, method, {part});
  };

  const BoundPair bounds = matrix_bounds(q, n, m, g0);
  if (r <= bounds.lower) return single(g0, g0, kMethodBoundResolved);
  if (r > bounds.upper) return single(g0 + 1, g0 + 1, kMethodBoundResolved);

  if (mode == RefineMode::allow_oracle) {
    try {
      const OracleResult exact = count_matrix(q, n, m, g0, opts);
      const unsigned gen = r <= exact.normalized ? g0 : g0 + 1;
      return single(gen, gen, kMethodOracleResolved);
    } catch (const infeasible_error&) {
      // Fall through to the undecided bracket.
    }
  }

  const unsigned lo = std::max(g0, 2u);
  return single(lo, lo + 1, kMethodBracketOnly);
}

// ---------------------------------------------------------------------------
// Arbitrary specs
// ---------------------------------------------------------------------------

// gen of a product algebra = max over its isotypic parts, combined with
// interval semantics: the result range is [max of lows, max of highs],
// which is the tightest interval derivable from the per-part ranges; it
// collapses to an exact value unless an undecided bracket straddles the
// maximum.  The reported method is the one of the first part attaining the
// combined upper endpoint.
inline GenResult gen_algebra(const AlgebraSpec& raw,
                             RefineMode mode = RefineMode::bounds_only,
                             const OracleOptions& opts = {}) {
  const AlgebraSpec spec = canonicalize(raw);
  std::vector<PartGen> parts;
  parts.reserve(spec.parts.size());
  for (const AlgebraPart& p : spec.parts) {
    if (p.m == 1) {
      const unsigned g = gen_pure_etale(spec.q, p.n, p.r);
      parts.push_back(PartGen{p.n, p.m, p.r, g, g, kMethodFormula});
    } else {
      const GenResult sub =
          gen_pure_matrix(spec.q, p.n, p.m, p.r, mode, opts);
      parts.push_back(PartGen{p.n, p.m, p.r, sub.lo, sub.hi, sub.method});
    }
  }
  unsigned lo = 0, hi = 0;
  for (const PartGen& part : parts) {
    lo = std::max(lo, part.lo);
    hi = std::max(hi, part.hi);
  }
  std::string method = kMethodFormula;
  for (const PartGen& part : parts) {
    if (part.hi == hi) {
      method = part.method;
      break;
    }
  }
  return detail::result_from_range(lo, hi, std::move(method),
                                   std::move(parts));
}

// For specs with every m = 1: checks gen <= ceil(log_q of the total
// F_q-dimension), the dimension bound for products of field extensions.
inline bool etale_dimension_bound_check(const AlgebraSpec& raw) {
  const AlgebraSpec spec = canonicalize(raw);
  BigInt dim = 0;
  for (const AlgebraPart& p : spec.parts) {
    if (p.m != 1)
      throw invalid_input("dimension bound: spec must be purely etale");
    dim += BigInt(p.n) * p.r.value();
  }
  const GenResult res = gen_algebra(spec);
  if (!res.exact())
    throw integrity_error("etale spec did not resolve exactly");
  return res.value <= ceil_log_pow(dim, spec.q.big(), 1);
}

// ---------------------------------------------------------------------------
// Residue intervals
// ---------------------------------------------------------------------------

// An integer interval (lo_exclusive, hi_inclusive].  Endpoint flags record
// whether the stored endpoint is the true value or only a one-sided bound
// (outer hull): an inexact hi is an upper bound, an inexact lo a lower
// bound, so the true interval is contained in the reported one.
struct IntegerInterval {
  BigInt lo_exclusive{0};
  BigInt hi_inclusive{0};
  bool lo_exact = true;
  bool hi_exact = true;

  bool empty() const { return hi_inclusive <= lo_exclusive; }
  bool exact() const { return lo_exact && hi_exact; }
  BigInt size() const {
    return empty() ? BigInt(0) : hi_inclusive - lo_exclusive;
  }
  bool contains(const BigInt& r) const {
    return r > lo_exclusive && r <= hi_inclusive;
  }
};

// The split of multiplicities r by which side of the two-sided bracket
// gen(r copies of M_m(F_{q^n})) lands on:
//   on_bracket_floor  = r with gen = ceil((1/nm^2) log_q(C r))      ("I_0")
//   above_bracket_floor = r with gen = that ceiling + 1             ("I_1")
// At level g these are (floor(q^{(g-1)nm^2}/C), N(g)] and
// (N(g-1), floor(q^{(g-1)nm^2}/C)] respectively; the common endpoint is
// exact integer arithmetic whether or not C divides the power.
struct IntervalReport {
  PrimePower q{2, 1, 2};
  unsigned n = 1;
  unsigned m = 1;
  unsigned g = 1;

  Count c{1};                // conjugation-Frobenius group order
  BigInt boundary_floor{0};  // floor(q^{(g-1)nm^2} / C)
  bool boundary_integral = false;

  std::string n_mode;  // "formula" | "oracle" | "bounds-only"
  IntegerInterval on_bracket_floor;     // needs N(g) on the high side
  IntegerInterval above_bracket_floor;  // needs N(g-1) on the low side

  // Floor lower bounds on the size of above_bracket_floor.  The shifted
  // (g-1)-exponent forms are the guaranteed ones; the unshifted g-exponent
  // variants are recorded for comparison only and must not be asserted.
  bool scalar_rule_applies = false;  // requires n >= 2
  BigInt scalar_rule_floor{0};       // floor(q^{(g-1)m^2} / C)
  BigInt scalar_rule_floor_unshifted{0};
  bool column_rule_applies = false;  // requires m >= 2
  BigInt column_rule_floor{0};       // floor(q^{(g-1)n(m^2-m+1)} / C)
  BigInt column_rule_floor_unshifted{0};
};

namespace detail {

// N_{q,n,m}(k) resolved as well as the mode allows.
struct ResolvedCount {
  std::optional<BigInt> exact;
  BoundPair bounds{Count(0), Count(0), "", ""};
  bool used_oracle = false;
};

inline ResolvedCount resolve_orbit_count(const PrimePower& q, unsigned n,
                                         unsigned m, unsigned k,
                                         RefineMode mode,
                                         const OracleOptions& opts) {
  ResolvedCount out;
  if (m == 1) {
    out.exact = n_etale(q, n, k).value();
    return out;
  }
  if (k == 0) {
    // No generators produce only the scalar line; with m >= 2 that is
    // never the full algebra.
    out.exact = BigInt(0);
    return out;
  }
  out.bounds = matrix_bounds(q, n, m, k);
  if (mode == RefineMode::allow_oracle) {
    try {
      out.exact = count_matrix(q, n, m, k, opts).normalized.value();
      out.used_oracle = true;
    } catch (const infeasible_error&) {
      // Bounds-only fallback.
    }
  }
  return out;
}

}  // namespace detail

inline IntervalReport intervals(const PrimePower& q, unsigned n, unsigned m,
                                unsigned g,
                                RefineMode mode = RefineMode::bounds_only,
                                const OracleOptions& opts = {}) {
  if (n == 0 || m == 0) throw invalid_input("intervals: need n, m >= 1");
  if (g == 0) throw invalid_input("intervals: g must be >= 1");

  IntervalReport rep;
  rep.q = q;
  rep.n = n;
  rep.m = m;
  rep.g = g;
  rep.c = group_order_c(q, n, m);

  const BigInt cval = rep.c.value();
  const BigInt power =
      pow_big(q.big(), std::uint64_t(g - 1) * n * m * m);
  rep.boundary_floor = floor_div(power, cval);
  rep.boundary_integral = power % cval == 0;

  const detail::ResolvedCount hi_n =
      detail::resolve_orbit_count(q, n, m, g, mode, opts);
  const detail::ResolvedCount lo_n =
      detail::resolve_orbit_count(q, n, m, g - 1, mode, opts);

  rep.on_bracket_floor.lo_exclusive = rep.boundary_floor;
  rep.on_bracket_floor.lo_exact = true;
  if (hi_n.exact) {
    rep.on_bracket_floor.hi_inclusive = *hi_n.exact;
    rep.on_bracket_floor.hi_exact = true;
  } else {
    rep.on_bracket_floor.hi_inclusive = hi_n.bounds.upper.value();
    rep.on_bracket_floor.hi_exact = false;
  }

  rep.above_bracket_floor.hi_inclusive = rep.boundary_floor;
  rep.above_bracket_floor.hi_exact = true;
  if (lo_n.exact) {
    rep.above_bracket_floor.lo_exclusive = *lo_n.exact;
    rep.above_bracket_floor.lo_exact = true;
  } else {
    rep.above_bracket_floor.lo_exclusive = lo_n.bounds.lower.value();
    rep.above_bracket_floor.lo_exact = false;
  }

  const bool all_exact = hi_n.exact.has_value() && lo_n.exact.has_value();
  if (!all_exact)
    rep.n_mode = "bounds-only";
  else if (hi_n.used_oracle || lo_n.used_oracle)
    rep.n_mode = "oracle";
  else
    rep.n_mode = "formula";

  rep.scalar_rule_applies = n >= 2;
  rep.scalar_rule_floor = floor_div(
      pow_big(q.big(), std::uint64_t(g - 1) * m * m), cval);
  rep.scalar_rule_floor_unshifted = floor_div(
      pow_big(q.big(), std::uint64_t(g) * m * m), cval);
  rep.column_rule_applies = m >= 2;
  const std::uint64_t col_exp = std::uint64_t(n) * (m * m - m + 1);
  rep.column_rule_floor =
      floor_div(pow_big(q.big(), (g - 1) * col_exp), cval);
  rep.column_rule_floor_unshifted =
      floor_div(pow_big(q.big(), g * col_exp), cval);
  return rep;
}

}  // namespace sepgen
