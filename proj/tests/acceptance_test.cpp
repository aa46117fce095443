// Acceptance gate: each test below is one release criterion, checked at its
// full stated grid.  One pass/fail line is printed per criterion.

#include <gtest/gtest.h>

#include <cstdint>
#include <filesystem>
#include <random>
#include <vector>

#include "sepgen/counting.hpp"
#include "sepgen/finite_field.hpp"
#include "sepgen/gencalc.hpp"
#include "sepgen/matrix_algebra.hpp"
#include "sepgen/oracle.hpp"

namespace sepgen {
namespace {

PrimePower pp(std::uint64_t p, unsigned e = 1) { return PrimePower::make(p, e); }

PrimePower pp_value(std::uint64_t q) {
  std::uint64_t p = q;
  for (std::uint64_t d = 2; d * d <= q; ++d)
    if (q % d == 0) {
      p = d;
      break;
    }
  unsigned e = 0;
  for (std::uint64_t rest = q; rest > 1; rest /= p) ++e;
  return PrimePower::make(p, e);
}

const OracleOptions& cached_opts() {
  static const CacheStore store = [] {
    const auto dir =
        std::filesystem::temp_directory_path() / "sepgen-acceptance-cache";
    std::filesystem::remove_all(dir);
    return CacheStore(dir.string());
  }();
  static const OracleOptions opts = [] {
    OracleOptions o;
    o.cache = &store;
    return o;
  }();
  return opts;
}

void report(int criterion, const char* name) {
  if (!testing::Test::HasFailure())
    std::printf("CRITERION %2d (%s): PASS\n", criterion, name);
  else
    std::printf("CRITERION %2d (%s): FAIL\n", criterion, name);
}

// Criterion 1: the Möbius-inversion count equals the exhaustive count on
// the full desk-scale grid, including the pinned spot values.
TEST(Acceptance, C01_FormulaMatchesOracle) {
  EXPECT_EQ(n_etale(pp(2), 2, 2), Count(6));
  EXPECT_EQ(n_etale(pp(2), 6, 1), Count(9));
  EXPECT_EQ(n_etale(pp(2), 3, 1), Count(2));

  for (std::uint64_t qv : {2, 3, 4, 5, 7, 8, 9}) {
    const PrimePower q = pp_value(qv);
    for (unsigned n = 1; n <= 8; ++n) {
      for (unsigned g = 1; g <= 4; ++g) {
        if (pow_big(q.big(), std::uint64_t(n) * g) > 1000000) continue;
        EXPECT_EQ(n_etale(q, n, g),
                  count_etale(q, n, g, cached_opts()).normalized)
            << "q=" << qv << " n=" << n << " g=" << g;
      }
    }
  }
  report(1, "formula matches oracle");
}

// Criterion 2: the weighted counts over all divisors recover the full
// tuple space exactly.
TEST(Acceptance, C02_BurnsideIdentity) {
  for (std::uint64_t qv : {2, 3, 5}) {
    const PrimePower q = pp(qv);
    for (unsigned n = 1; n <= 60; ++n) {
      for (unsigned g = 1; g <= 8; ++g) {
        BigInt sum = 0;
        for (std::uint64_t d : divisors_u64(n))
          sum += BigInt(d) * n_etale(q, static_cast<unsigned>(d), g).value();
        EXPECT_EQ(sum, pow_big(q.big(), std::uint64_t(g) * n))
            << "q=" << qv << " n=" << n << " g=" << g;
      }
    }
  }
  report(2, "Burnside identity");
}

// Criterion 3: the matrix-algebra counting anchor with all its bound
// relations.
TEST(Acceptance, C03_MatrixOracleAnchor) {
  const OracleResult res = count_matrix(pp(2), 1, 2, 2, cached_opts());
  EXPECT_EQ(res.raw_count, Count(96));
  EXPECT_EQ(res.normalized, Count(16));

  const BoundPair b = matrix_bounds(pp(2), 1, 2, 2);
  EXPECT_EQ(b.lower, Count(3));  // ceil(16 / 6) completion bound
  EXPECT_LE(b.lower, res.normalized);
  EXPECT_EQ(floor_div(pow_big(BigInt(2), 8), BigInt(6)), BigInt(42));
  EXPECT_LE(res.normalized.value(), BigInt(42));  // all-orbits bound
  EXPECT_EQ(b.upper, Count(32));  // column-subalgebra-excluded bound
  EXPECT_LE(res.normalized, b.upper);
  EXPECT_GE(res.raw_count, Count(16));  // |S_2| >= q^{n m^2}
  report(3, "matrix oracle anchor");
}

// Criterion 4: the conjugation-Frobenius group acts freely on generating
// tuples, so every orbit has exactly C elements and C divides |S_g|.
TEST(Acceptance, C04_FreeActionOnGeneratingTuples) {
  for (std::uint64_t p : {2ull, 3ull}) {
    const PrimePower q = pp(p);
    const FieldPtr field = make_field(p, 1);
    const auto autos = enumerate_automorphisms(q, 1, 2, field);
    const std::uint64_t order = p * p * p * p;
    std::uint64_t generating = 0;
    for (std::uint64_t i = 0; i < order; ++i) {
      for (std::uint64_t j = 0; j < order; ++j) {
        Matrix a = zero_matrix(field, 2), b = zero_matrix(field, 2);
        std::uint64_t ii = i, jj = j;
        for (unsigned k = 4; k-- > 0;) {
          a.entries[k] = element_at(field, BigInt(ii % p));
          b.entries[k] = element_at(field, BigInt(jj % p));
          ii /= p;
          jj /= p;
        }
        const MatrixTuple t = make_matrix_tuple(q, 1, 2, {a, b}, field);
        if (!generates_full(t)) continue;
        ++generating;
        std::vector<MatrixTuple> orbit;
        for (const Automorphism& phi : autos) {
          const MatrixTuple image = apply_automorphism(phi, t);
          bool seen = false;
          for (const MatrixTuple& s : orbit) seen = seen || s == image;
          if (!seen) orbit.push_back(image);
        }
        ASSERT_EQ(orbit.size(), autos.size()) << "p=" << p;
      }
    }
    EXPECT_GT(generating, 0u);
    EXPECT_EQ(generating % autos.size(), 0u) << "p=" << p;
    EXPECT_EQ(Count(generating),
              count_matrix(q, 1, 2, 2, cached_opts()).raw_count);
  }
  report(4, "free action on generating tuples");
}

// Criterion 5: the upper-triangular triple has trivial stabilizer yet
// spans only a 3-dimensional proper subalgebra.
TEST(Acceptance, C05_TrivialStabilizerFixture) {
  for (std::uint64_t p : {2ull, 3ull}) {
    const MatrixTuple t = upper_triangular_triple(pp(p));
    EXPECT_TRUE(stabilizer_is_trivial(t));
    EXPECT_EQ(span_closure_dim(t), 3u);
    EXPECT_FALSE(generates_full(t));
    EXPECT_EQ(t.full_dim(), 4u);
  }
  report(5, "trivial stabilizer fixture");
}

// Criterion 6: the explicit two-matrix construction generates for every
// admissible draw, and all its scalar shifts do too.
TEST(Acceptance, C06_ConstructivePairs) {
  for (std::uint64_t qv : {2, 3, 4, 5}) {
    const PrimePower q = pp_value(qv);
    for (unsigned n = 1; n <= 3; ++n) {
      for (unsigned m = 2; m <= 4; ++m) {
        if (q.e * n * m * m > 64) continue;
        const FieldPtr field = make_field(q.p, q.e * n);
        const FieldElement u = extension_generator(field, q, n);
        std::mt19937_64 rng(qv * 1000 + n * 10 + m);
        const auto random_element = [&](bool nonzero) {
          std::vector<std::uint64_t> coeffs(field->degree());
          while (true) {
            for (auto& c : coeffs) c = rng() % q.p;
            FieldElement e = field->element(coeffs);
            if (!nonzero || !e.is_zero()) return e;
          }
        };
        std::pair<Matrix, Matrix> first_pair{zero_matrix(field, m),
                                             zero_matrix(field, m)};
        for (unsigned draw = 0; draw < 100; ++draw) {
          std::vector<FieldElement> alphas, betas;
          for (unsigned i = 0; i + 1 < m; ++i)
            alphas.push_back(random_element(true));
          for (unsigned k = 0; k < m * m; ++k)
            betas.push_back(random_element(false));
          const auto pair = construct_pair(q, n, m, alphas, betas, u);
          if (draw == 0) first_pair = pair;
          const MatrixTuple t =
              make_matrix_tuple(q, n, m, {pair.first, pair.second}, field);
          ASSERT_TRUE(generates_full(t))
              << "q=" << qv << " n=" << n << " m=" << m << " draw=" << draw;
        }
        for (const auto& shifted :
             shifted_family(first_pair.first, first_pair.second, q)) {
          const MatrixTuple t = make_matrix_tuple(
              q, n, m, {shifted.first, shifted.second}, field);
          ASSERT_TRUE(generates_full(t))
              << "shifted pair at q=" << qv << " n=" << n << " m=" << m;
        }
      }
    }
  }
  report(6, "constructive pairs");
}

// Criterion 7: the two-sided ceiling bracket for products of extensions,
// with the exact lower endpoint over prime fields and their powers (n = 1).
TEST(Acceptance, C07_EtaleBracket) {
  for (std::uint64_t qv : {2, 3, 4, 5}) {
    const PrimePower q = pp_value(qv);
    for (unsigned n = 1; n <= 6; ++n) {
      unsigned prev = 0;
      for (std::uint64_t r = 1; r <= 10000; ++r) {
        const unsigned gen = gen_pure_etale(q, n, Count(r));
        const unsigned lo = ceil_log_pow(BigInt(n) * r, q.big(), n);
        ASSERT_GE(gen, lo) << "q=" << qv << " n=" << n << " r=" << r;
        ASSERT_LE(gen, lo + 1) << "q=" << qv << " n=" << n << " r=" << r;
        if (n == 1)
          ASSERT_EQ(gen, lo) << "q=" << qv << " r=" << r;
        ASSERT_GE(gen, prev);
        prev = gen;
      }
    }
  }
  report(7, "two-sided etale bracket");
}

// Criterion 8: the dimension bound for random étale specs, with equality
// on split algebras.
TEST(Acceptance, C08_DimensionBound) {
  std::mt19937_64 rng(20260818);
  const std::uint64_t q_values[] = {2, 3, 4};
  for (unsigned trial = 0; trial < 500; ++trial) {
    const PrimePower q = pp_value(q_values[trial % 3]);
    AlgebraSpec spec;
    spec.q = q;
    BigInt dim = 0;
    if (trial % 10 == 0) {
      // Forced split algebra: the bound must be attained.
      const std::uint64_t d = 1 + rng() % 10000;
      spec.parts = {{1, 1, Count(d)}};
      dim = d;
    } else {
      const unsigned n_parts = 1 + rng() % 6;
      for (unsigned k = 0; k < n_parts; ++k) {
        const unsigned n = 1 + rng() % 5;
        const std::uint64_t r = 1 + rng() % (10000 / (6 * 5));
        spec.parts.push_back({n, 1, Count(r)});
        dim += BigInt(n) * r;
      }
    }
    ASSERT_LE(dim, BigInt(10000));
    EXPECT_TRUE(etale_dimension_bound_check(spec)) << "trial=" << trial;
    const unsigned bound = ceil_log_pow(dim, q.big(), 1);
    const GenResult res = gen_algebra(spec);
    ASSERT_EQ(res.status, "exact");
    EXPECT_LE(res.value, bound) << "trial=" << trial;
    if (trial % 10 == 0) EXPECT_EQ(res.value, bound) << "trial=" << trial;
  }
  report(8, "etale dimension bound");
}

// Criterion 9: the interval decomposition at the anchor case, its
// partition law, the floor rule, and the gen offsets it predicts.
TEST(Acceptance, C09_IntervalPartition) {
  const IntervalReport rep =
      intervals(pp(2), 1, 2, 2, RefineMode::allow_oracle, cached_opts());
  ASSERT_TRUE(rep.on_bracket_floor.exact());
  ASSERT_TRUE(rep.above_bracket_floor.exact());
  EXPECT_EQ(rep.on_bracket_floor.lo_exclusive, BigInt(2));
  EXPECT_EQ(rep.on_bracket_floor.hi_inclusive, BigInt(16));
  EXPECT_EQ(rep.above_bracket_floor.lo_exclusive, BigInt(0));
  EXPECT_EQ(rep.above_bracket_floor.hi_inclusive, BigInt(2));

  // Partition law: the two intervals abut and glue to (N(1), N(2)].
  EXPECT_EQ(rep.above_bracket_floor.hi_inclusive,
            rep.on_bracket_floor.lo_exclusive);
  EXPECT_EQ(rep.above_bracket_floor.lo_exclusive, BigInt(0));  // N(1)
  EXPECT_EQ(rep.on_bracket_floor.hi_inclusive, BigInt(16));    // N(2)

  // Floor rule: floor(2^3 / 6) = 1 bounds |I_1| = 2 from below.
  EXPECT_TRUE(rep.column_rule_applies);
  EXPECT_EQ(rep.column_rule_floor, BigInt(1));
  EXPECT_LE(rep.column_rule_floor, rep.above_bracket_floor.size());

  // Membership predicts the exact gen against the ceiling.
  for (std::uint64_t r = 1; r <= 16; ++r) {
    const unsigned g0 = ceil_log_pow(BigInt(6) * r, BigInt(2), 4);
    const GenResult res = gen_pure_matrix(pp(2), 1, 2, Count(r),
                                          RefineMode::allow_oracle,
                                          cached_opts());
    ASSERT_EQ(res.status, "exact") << "r=" << r;
    if (rep.above_bracket_floor.contains(BigInt(r)))
      EXPECT_EQ(res.value, g0 + 1) << "r=" << r;
    else if (rep.on_bracket_floor.contains(BigInt(r)))
      EXPECT_EQ(res.value, g0) << "r=" << r;
    else
      FAIL() << "multiplicity " << r << " escaped both intervals";
  }
  report(9, "interval partition");
}

// Criterion 10: spanning-tuple counts against exhaustive enumeration, and
// the tail inequality as exact integers.
TEST(Acceptance, C10_RankCount) {
  // Exhaustive: count d x g matrices over F_2 of rank d.
  for (unsigned d = 1; d <= 3; ++d) {
    for (unsigned g = 1; g <= 3; ++g) {
      const std::uint64_t cells = std::uint64_t(d) * g;
      std::uint64_t full_rank = 0;
      for (std::uint64_t bits = 0; bits < (std::uint64_t(1) << cells);
           ++bits) {
        // Row-reduce the d x g bit-matrix over F_2.
        std::vector<std::uint64_t> rows(d, 0);
        for (unsigned i = 0; i < d; ++i)
          for (unsigned j = 0; j < g; ++j)
            if (bits >> (i * g + j) & 1) rows[i] |= std::uint64_t(1) << j;
        unsigned rank = 0;
        for (unsigned col = 0; col < g && rank < d; ++col) {
          unsigned pivot = rank;
          while (pivot < d && !(rows[pivot] >> col & 1)) ++pivot;
          if (pivot == d) continue;
          std::swap(rows[rank], rows[pivot]);
          for (unsigned i = 0; i < d; ++i)
            if (i != rank && (rows[i] >> col & 1)) rows[i] ^= rows[rank];
          ++rank;
        }
        if (rank == d) ++full_rank;
      }
      EXPECT_EQ(rank_count(pp(2), d, g), Count(full_rank))
          << "d=" << d << " g=" << g;
    }
  }

  // Tail inequality, cross-multiplied to integers:
  //   rank_count >= q^{dg} - sum_{i<d} q^{g(d-1)+i}.
  for (std::uint64_t qv : {2, 3}) {
    const PrimePower q = pp(qv);
    for (unsigned d = 1; d <= 6; ++d) {
      for (unsigned g = 1; g <= 12; ++g) {
        BigInt rhs = pow_big(q.big(), std::uint64_t(d) * g);
        for (unsigned i = 0; i < d; ++i)
          rhs -= pow_big(q.big(), std::uint64_t(g) * (d - 1) + i);
        EXPECT_GE(rank_count(q, d, g).value(), rhs)
            << "q=" << qv << " d=" << d << " g=" << g;
      }
    }
  }
  report(10, "rank count and tail inequality");
}

// Criterion 11: the Monte Carlo interval brackets the exact generating
// fraction 96/256 = 0.375 at the anchor case (one re-seed allowed).
TEST(Acceptance, C11_MonteCarloCalibration) {
  bool contained = false;
  for (std::uint64_t seed : {1ull, 2ull}) {
    const OracleResult res =
        estimate_matrix_fraction(pp(2), 1, 2, 2, 10000, seed, cached_opts());
    if (res.ci_low <= 0.375 && 0.375 <= res.ci_high) {
      contained = true;
      break;
    }
  }
  EXPECT_TRUE(contained);
  report(11, "Monte Carlo calibration");
}

}  // namespace
}  // namespace sepgen
