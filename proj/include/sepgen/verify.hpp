#pragma once

// Self-check suites: each check cross-validates one law of the library
// against an independent computation path (closed formula vs. exhaustive
// enumeration, bounds vs. exact counts, group actions vs. orbit counts,
// interval decompositions vs. direct gen computations).  A check failure
// reports the first discrepancy; an exception inside a check fails that
// check without aborting the suite.

#include <cstdint>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "sepgen/counting.hpp"
#include "sepgen/errors.hpp"
#include "sepgen/finite_field.hpp"
#include "sepgen/gencalc.hpp"
#include "sepgen/matrix_algebra.hpp"
#include "sepgen/oracle.hpp"

namespace sepgen {

struct CheckResult {
  std::string suite;
  std::string name;
  bool pass = false;
  std::string detail;  // empty on pass; first discrepancy or error on fail
};

namespace detail {

// Runs one check body; the body either returns normally (pass) or throws
// check_failure/any exception (fail with message).
struct check_failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

template <typename Body>
void run_check(const std::string& suite, const std::string& name, Body body,
               std::vector<CheckResult>* out) {
  CheckResult r;
  r.suite = suite;
  r.name = name;
  try {
    body();
    r.pass = true;
  } catch (const std::exception& e) {
    r.pass = false;
    r.detail = e.what();
  }
  out->push_back(r);
}

template <typename A, typename B>
void expect_eq(const A& got, const B& want, const std::string& where) {
  if (!(got == want)) {
    std::ostringstream os;
    os << where << ": got " << got << ", want " << want;
    throw check_failure(os.str());
  }
}

inline void expect(bool cond, const std::string& where) {
  if (!cond) throw check_failure(where);
}

inline PrimePower prime_power_of(std::uint64_t p, unsigned e) {
  return PrimePower::make(p, e);
}

// Builds the matrix whose row-major entries are the base-|F| digits of
// index (last entry least significant).
inline Matrix matrix_from_index(const FieldPtr& field, unsigned m,
                                std::uint64_t index, std::uint64_t order) {
  Matrix a = zero_matrix(field, m);
  for (unsigned k = m * m; k-- > 0;) {
    a.entries[k] = element_at(field, BigInt(index % order));
    index /= order;
  }
  return a;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// formula: Möbius counting vs. exhaustive enumeration
// ---------------------------------------------------------------------------

inline std::vector<CheckResult> verify_formula(const OracleOptions& opts) {
  std::vector<CheckResult> out;
  const std::string suite = "formula";

  detail::run_check(suite, "pinned-counts-match-oracle", [&] {
    struct Pin {
      std::uint64_t p;
      unsigned e, n, g;
      std::uint64_t want;
    };
    for (const Pin& pin : std::vector<Pin>{
             {2, 1, 2, 2, 6}, {2, 1, 6, 1, 9}, {2, 1, 3, 1, 2}}) {
      const PrimePower q = detail::prime_power_of(pin.p, pin.e);
      detail::expect_eq(n_etale(q, pin.n, pin.g).str(),
                        std::to_string(pin.want), "formula value");
      detail::expect_eq(count_etale(q, pin.n, pin.g, opts).normalized.str(),
                        std::to_string(pin.want), "enumerated value");
    }
  }, &out);

  detail::run_check(suite, "formula-matches-oracle-grid", [&] {
    for (std::uint64_t qv : {2, 3, 4, 5}) {
      const PrimePower q =
          qv == 4 ? detail::prime_power_of(2, 2) : detail::prime_power_of(qv, 1);
      for (unsigned n = 1; n <= 4; ++n) {
        for (unsigned g = 1; g <= 3; ++g) {
          BigInt tuples = pow_big(q.big(), std::uint64_t(n) * g);
          if (tuples > 10000) continue;
          std::ostringstream os;
          os << "q=" << qv << " n=" << n << " g=" << g;
          detail::expect_eq(n_etale(q, n, g).str(),
                            count_etale(q, n, g, opts).normalized.str(),
                            os.str());
        }
      }
    }
  }, &out);

  detail::run_check(suite, "burnside-identity", [&] {
    for (std::uint64_t qv : {2, 3, 5}) {
      const PrimePower q = detail::prime_power_of(qv, 1);
      for (unsigned n = 1; n <= 30; ++n) {
        for (unsigned g = 1; g <= 6; ++g) {
          BigInt sum = 0;
          for (std::uint64_t d : divisors_u64(n))
            sum += BigInt(d) *
                   n_etale(q, static_cast<unsigned>(d), g).value();
          std::ostringstream os;
          os << "q=" << qv << " n=" << n << " g=" << g;
          detail::expect_eq(sum, pow_big(q.big(), std::uint64_t(g) * n),
                            os.str());
        }
      }
    }
  }, &out);

  detail::run_check(suite, "count-strictly-increasing-in-g", [&] {
    for (std::uint64_t qv : {2, 3}) {
      const PrimePower q = detail::prime_power_of(qv, 1);
      for (unsigned n = 1; n <= 6; ++n)
        for (unsigned g = 1; g <= 5; ++g)
          detail::expect(n_etale(q, n, g) < n_etale(q, n, g + 1),
                         "count must increase with g");
    }
  }, &out);

  return out;
}

// ---------------------------------------------------------------------------
// bounds: brackets and bound pairs against exact values
// ---------------------------------------------------------------------------

inline std::vector<CheckResult> verify_bounds(const OracleOptions& opts) {
  std::vector<CheckResult> out;
  const std::string suite = "bounds";

  detail::run_check(suite, "matrix-bounds-contain-exact-counts", [&] {
    struct Case {
      std::uint64_t p;
      unsigned e, n, m, g;
    };
    for (const Case& c : std::vector<Case>{{2, 1, 1, 2, 1},
                                           {2, 1, 1, 2, 2},
                                           {2, 1, 1, 2, 3},
                                           {3, 1, 1, 2, 1},
                                           {3, 1, 1, 2, 2},
                                           {2, 1, 2, 2, 1},
                                           {2, 1, 2, 2, 2},
                                           {2, 1, 1, 3, 1}}) {
      const PrimePower q = detail::prime_power_of(c.p, c.e);
      const BoundPair b = matrix_bounds(q, c.n, c.m, c.g);
      const Count exact = count_matrix(q, c.n, c.m, c.g, opts).normalized;
      std::ostringstream os;
      os << "q=" << q.value << " n=" << c.n << " m=" << c.m << " g=" << c.g;
      detail::expect(b.lower <= exact && exact <= b.upper, os.str());
    }
  }, &out);

  detail::run_check(suite, "etale-two-sided-bracket", [&] {
    for (std::uint64_t qv : {2, 3, 4, 5}) {
      const PrimePower q =
          qv == 4 ? detail::prime_power_of(2, 2) : detail::prime_power_of(qv, 1);
      for (unsigned n = 1; n <= 4; ++n) {
        for (std::uint64_t r = 1; r <= 500; ++r) {
          std::ostringstream os;
          os << "q=" << qv << " n=" << n << " r=" << r;
          detail::expect(etale_bracket_check(q, n, Count(r)), os.str());
          if (n == 1)
            detail::expect_eq(gen_pure_etale(q, 1, Count(r)),
                              ceil_log_pow(BigInt(r), q.big(), 1), os.str());
        }
      }
    }
  }, &out);

  detail::run_check(suite, "matrix-refinement-paths-agree", [&] {
    struct Shape {
      std::uint64_t p;
      unsigned e, n, m;
      std::uint64_t r_max;
    };
    for (const Shape& s :
         std::vector<Shape>{{2, 1, 1, 2, 40}, {3, 1, 1, 2, 10}}) {
      const PrimePower q = detail::prime_power_of(s.p, s.e);
      for (std::uint64_t r = 1; r <= s.r_max; ++r) {
        const GenResult via_bounds =
            gen_pure_matrix(q, s.n, s.m, Count(r), RefineMode::bounds_only);
        const GenResult via_oracle = gen_pure_matrix(
            q, s.n, s.m, Count(r), RefineMode::allow_oracle, opts);
        std::ostringstream os;
        os << "q=" << q.value << " m=" << s.m << " r=" << r;
        if (via_bounds.status == "exact") {
          detail::expect_eq(via_oracle.status, via_bounds.status, os.str());
          detail::expect_eq(via_oracle.value, via_bounds.value, os.str());
        } else {
          detail::expect(via_oracle.lo >= via_bounds.lo &&
                             via_oracle.hi <= via_bounds.hi,
                         os.str());
        }
      }
    }
  }, &out);

  detail::run_check(suite, "etale-dimension-bound", [&] {
    for (std::uint64_t qv : {2, 3}) {
      for (std::uint64_t d = 1; d <= 64; ++d) {
        AlgebraSpec split;
        split.q = detail::prime_power_of(qv, 1);
        split.parts = {{1, 1, Count(d)}};
        detail::expect(etale_dimension_bound_check(split),
                       "split algebra dimension bound");
        detail::expect_eq(gen_algebra(split).value,
                          ceil_log_pow(BigInt(d), split.q.big(), 1),
                          "split algebra equality");
      }
    }
    AlgebraSpec mixed;
    mixed.q = detail::prime_power_of(2, 1);
    mixed.parts = {{1, 1, Count(5)}, {2, 1, Count(2)}, {3, 1, Count(1)}};
    detail::expect(etale_dimension_bound_check(mixed),
                   "mixed etale dimension bound");
  }, &out);

  detail::run_check(suite, "gen-monotone-in-multiplicity", [&] {
    for (std::uint64_t qv : {2, 3}) {
      const PrimePower q = detail::prime_power_of(qv, 1);
      for (unsigned n = 1; n <= 3; ++n) {
        unsigned prev = 0;
        for (std::uint64_t r = 1; r <= 200; ++r) {
          const unsigned g = gen_pure_etale(q, n, Count(r));
          detail::expect(g >= prev, "etale gen must not decrease");
          prev = g;
        }
      }
    }
    unsigned prev = 0;
    for (std::uint64_t r = 1; r <= 40; ++r) {
      const GenResult res = gen_pure_matrix(
          detail::prime_power_of(2, 1), 1, 2, Count(r),
          RefineMode::allow_oracle, opts);
      detail::expect(res.status == "exact", "small matrix cases resolve");
      detail::expect(res.value >= prev && res.value >= 2,
                     "matrix gen must not decrease and stays >= 2");
      prev = res.value;
    }
  }, &out);

  return out;
}

// ---------------------------------------------------------------------------
// orbits: the conjugation-Frobenius action on generating tuples
// ---------------------------------------------------------------------------

inline std::vector<CheckResult> verify_orbits(std::uint64_t guard) {
  std::vector<CheckResult> out;
  const std::string suite = "orbits";

  detail::run_check(suite, "automorphism-count-matches-group-order", [&] {
    struct Case {
      std::uint64_t p;
      unsigned e, n, m;
    };
    for (const Case& c : std::vector<Case>{
             {2, 1, 1, 2}, {3, 1, 1, 2}, {2, 1, 2, 1}, {2, 1, 1, 3},
             {2, 1, 2, 2}, {2, 2, 1, 2}, {3, 1, 3, 1}}) {
      const PrimePower q = detail::prime_power_of(c.p, c.e);
      const auto autos = enumerate_automorphisms(q, c.n, c.m, nullptr, guard);
      std::ostringstream os;
      os << "q=" << q.value << " n=" << c.n << " m=" << c.m;
      detail::expect_eq(Count(autos.size()).str(),
                        group_order_c(q, c.n, c.m).str(), os.str());
    }
  }, &out);

  detail::run_check(suite, "generating-orbits-have-full-group-size", [&] {
    for (std::uint64_t p : {2ull, 3ull}) {
      const PrimePower q = detail::prime_power_of(p, 1);
      const FieldPtr field = make_field(p, 1);
      const auto autos = enumerate_automorphisms(q, 1, 2, field, guard);
      const std::uint64_t order = p * p * p * p;  // matrices in M_2(F_p)
      std::uint64_t generating = 0;
      for (std::uint64_t i = 0; i < order; ++i) {
        for (std::uint64_t j = 0; j < order; ++j) {
          const MatrixTuple t = make_matrix_tuple(
              q, 1, 2,
              {detail::matrix_from_index(field, 2, i, p),
               detail::matrix_from_index(field, 2, j, p)});
          if (!generates_full(t)) continue;
          ++generating;
          std::vector<MatrixTuple> orbit;
          for (const Automorphism& a : autos) {
            const MatrixTuple image = apply_automorphism(a, t);
            bool seen = false;
            for (const MatrixTuple& s : orbit) seen = seen || s == image;
            if (!seen) orbit.push_back(image);
          }
          detail::expect_eq(orbit.size(), autos.size(),
                            "orbit of a generating pair");
        }
      }
      // |S_2| must be a positive multiple of the group order.
      detail::expect(generating > 0 && generating % autos.size() == 0,
                     "group order divides the generating count");
    }
  }, &out);

  detail::run_check(suite, "generation-invariant-under-automorphisms", [&] {
    const PrimePower q = detail::prime_power_of(2, 1);
    const FieldPtr field = make_field(2, 1);
    const auto autos = enumerate_automorphisms(q, 1, 2, field, guard);
    for (std::uint64_t i = 0; i < 16; ++i) {
      for (std::uint64_t j = 0; j < 16; ++j) {
        const MatrixTuple t = make_matrix_tuple(
            q, 1, 2,
            {detail::matrix_from_index(field, 2, i, 2),
             detail::matrix_from_index(field, 2, j, 2)});
        const bool gen = generates_full(t);
        for (const Automorphism& a : autos)
          detail::expect(generates_full(apply_automorphism(a, t)) == gen,
                         "generation is an orbit property");
      }
    }
  }, &out);

  detail::run_check(suite, "trivial-stabilizer-non-generating-fixture", [&] {
    for (std::uint64_t p : {2ull, 3ull}) {
      const MatrixTuple t =
          upper_triangular_triple(detail::prime_power_of(p, 1));
      detail::expect(stabilizer_is_trivial(t, guard),
                     "fixture stabilizer must be trivial");
      detail::expect(!generates_full(t), "fixture must not generate");
      detail::expect_eq(span_closure_dim(t), 3u, "fixture closure dimension");
    }
  }, &out);

  return out;
}

// ---------------------------------------------------------------------------
// intervals: the residue decomposition against direct gen computations
// ---------------------------------------------------------------------------

inline std::vector<CheckResult> verify_intervals(const OracleOptions& opts) {
  std::vector<CheckResult> out;
  const std::string suite = "intervals";

  detail::run_check(suite, "pinned-decomposition", [&] {
    const IntervalReport rep = intervals(detail::prime_power_of(2, 1), 1, 2,
                                         2, RefineMode::allow_oracle, opts);
    detail::expect(rep.above_bracket_floor.exact() &&
                       rep.on_bracket_floor.exact(),
                   "endpoints must be exact with the oracle");
    detail::expect_eq(rep.above_bracket_floor.lo_exclusive, BigInt(0),
                      "upper-interval low end");
    detail::expect_eq(rep.above_bracket_floor.hi_inclusive, BigInt(2),
                      "upper-interval high end");
    detail::expect_eq(rep.on_bracket_floor.lo_exclusive, BigInt(2),
                      "floor-interval low end");
    detail::expect_eq(rep.on_bracket_floor.hi_inclusive, BigInt(16),
                      "floor-interval high end");
  }, &out);

  detail::run_check(suite, "partition-law-at-exact-counts", [&] {
    struct Case {
      std::uint64_t p;
      unsigned e, n, m, g;
    };
    for (const Case& c : std::vector<Case>{{2, 1, 1, 2, 1},
                                           {2, 1, 1, 2, 2},
                                           {2, 1, 1, 2, 3},
                                           {3, 1, 1, 2, 2},
                                           {2, 1, 3, 1, 2},
                                           {2, 1, 2, 1, 3}}) {
      const PrimePower q = detail::prime_power_of(c.p, c.e);
      const IntervalReport rep =
          intervals(q, c.n, c.m, c.g, RefineMode::allow_oracle, opts);
      detail::expect(rep.above_bracket_floor.exact() &&
                         rep.on_bracket_floor.exact(),
                     "endpoints must be exact");
      detail::expect_eq(rep.above_bracket_floor.hi_inclusive,
                        rep.on_bracket_floor.lo_exclusive,
                        "intervals must abut at the boundary floor");
      const auto resolve = [&](unsigned k) {
        if (c.m == 1) return n_etale(q, c.n, k).value();
        if (k == 0) return BigInt(0);
        return count_matrix(q, c.n, c.m, k, opts).normalized.value();
      };
      detail::expect_eq(rep.above_bracket_floor.lo_exclusive,
                        resolve(c.g - 1), "low end is the previous count");
      detail::expect_eq(rep.on_bracket_floor.hi_inclusive, resolve(c.g),
                        "high end is the count");
      if (rep.scalar_rule_applies)
        detail::expect(rep.scalar_rule_floor <=
                           rep.above_bracket_floor.size(),
                       "scalar-rule floor bounds the interval size");
      if (rep.column_rule_applies)
        detail::expect(rep.column_rule_floor <=
                           rep.above_bracket_floor.size(),
                       "column-rule floor bounds the interval size");
    }
  }, &out);

  detail::run_check(suite, "consecutive-levels-chain", [&] {
    const PrimePower q = detail::prime_power_of(2, 1);
    for (unsigned g = 1; g <= 2; ++g) {
      const IntervalReport low =
          intervals(q, 1, 2, g, RefineMode::allow_oracle, opts);
      const IntervalReport high =
          intervals(q, 1, 2, g + 1, RefineMode::allow_oracle, opts);
      detail::expect_eq(low.on_bracket_floor.hi_inclusive,
                        high.above_bracket_floor.lo_exclusive,
                        "levels glue at the orbit count");
      detail::expect_eq(low.on_bracket_floor.lo_exclusive, low.boundary_floor,
                        "floor interval starts at the boundary");
      detail::expect_eq(high.above_bracket_floor.hi_inclusive,
                        high.boundary_floor,
                        "upper interval ends at the boundary");
    }
  }, &out);

  detail::run_check(suite, "membership-predicts-gen-offset", [&] {
    const PrimePower q = detail::prime_power_of(2, 1);
    const IntervalReport rep =
        intervals(q, 1, 2, 2, RefineMode::allow_oracle, opts);
    for (std::uint64_t r = 1; r <= 16; ++r) {
      const unsigned g0 = ceil_log_pow(BigInt(6) * r, q.big(), 4);
      const GenResult res = gen_pure_matrix(q, 1, 2, Count(r),
                                            RefineMode::allow_oracle, opts);
      detail::expect(res.status == "exact", "small cases resolve exactly");
      if (rep.above_bracket_floor.contains(BigInt(r)))
        detail::expect_eq(res.value, g0 + 1, "upper-interval multiplicity");
      else if (rep.on_bracket_floor.contains(BigInt(r)))
        detail::expect_eq(res.value, g0, "floor-interval multiplicity");
      else
        throw detail::check_failure("multiplicity escaped both intervals");
    }
  }, &out);

  detail::run_check(suite, "prime-field-upper-interval-empty", [&] {
    for (std::uint64_t qv : {2, 3, 5}) {
      const PrimePower q = detail::prime_power_of(qv, 1);
      for (unsigned g = 1; g <= 4; ++g) {
        const IntervalReport rep = intervals(q, 1, 1, g);
        detail::expect(rep.above_bracket_floor.empty(),
                       "prime field has no +1 multiplicities");
        detail::expect_eq(rep.n_mode, std::string("formula"),
                          "prime field resolves by formula");
      }
    }
  }, &out);

  return out;
}

// ---------------------------------------------------------------------------
// Dispatch
// ---------------------------------------------------------------------------

inline std::vector<CheckResult> verify_suite(const std::string& suite,
                                             const OracleOptions& opts) {
  if (suite == "formula") return verify_formula(opts);
  if (suite == "bounds") return verify_bounds(opts);
  if (suite == "orbits") return verify_orbits(opts.guard);
  if (suite == "intervals") return verify_intervals(opts);
  if (suite == "all") {
    std::vector<CheckResult> out = verify_formula(opts);
    for (auto&& part :
         {verify_bounds(opts), verify_orbits(opts.guard),
          verify_intervals(opts)})
      out.insert(out.end(), part.begin(), part.end());
    return out;
  }
  throw invalid_input("unknown verify suite: " + suite);
}

inline bool all_passed(const std::vector<CheckResult>& checks) {
  for (const CheckResult& c : checks)
    if (!c.pass) return false;
  return true;
}

}  // namespace sepgen
