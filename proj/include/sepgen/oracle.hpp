#pragma once

// Brute-force and Monte-Carlo ground truth for generating-tuple counts,
// independent of the closed-form counting layer, with a text-file cache.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "sepgen/bigint.hpp"
#include "sepgen/config.hpp"
#include "sepgen/counting.hpp"
#include "sepgen/errors.hpp"
#include "sepgen/finite_field.hpp"
#include "sepgen/matrix_algebra.hpp"

namespace sepgen {

// ---------------------------------------------------------------------------
// Results
// ---------------------------------------------------------------------------

struct OracleResult {
  PrimePower q{2, 1, 2};
  unsigned n = 1;
  unsigned m = 1;  // 1 for the etale counters
  unsigned g = 0;
  std::string mode;  // "exhaustive" or "montecarlo"

  // Exhaustive: raw_count is the number of generating tuples and
  // normalized the orbit count raw/n (etale) or raw/C (matrix).
  // Monte-Carlo: raw_count is the number of sampled tuples that generate;
  // normalized stays 0 -- estimates never masquerade as exact counts.
  Count raw_count{0};
  Count normalized{0};

  // Monte-Carlo only.
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  double point = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;

  friend bool operator==(const OracleResult& a, const OracleResult& b) {
    return a.q == b.q && a.n == b.n && a.m == b.m && a.g == b.g &&
           a.mode == b.mode && a.raw_count == b.raw_count &&
           a.normalized == b.normalized && a.samples == b.samples &&
           a.seed == b.seed && a.point == b.point && a.ci_low == b.ci_low &&
           a.ci_high == b.ci_high;
  }
  friend bool operator!=(const OracleResult& a, const OracleResult& b) {
    return !(a == b);
  }
};

// ---------------------------------------------------------------------------
// Cache
// ---------------------------------------------------------------------------

namespace detail {

inline std::uint64_t fnv1a64(const std::string& data) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string serialize_record(const std::string& key,
                                    const OracleResult& r) {
  std::ostringstream out;
  out << "key: " << key << '\n';
  out << "mode: " << r.mode << '\n';
  out << "p: " << r.q.p << '\n';
  out << "e: " << r.q.e << '\n';
  out << "n: " << r.n << '\n';
  out << "m: " << r.m << '\n';
  out << "g: " << r.g << '\n';
  out << "raw: " << r.raw_count.str() << '\n';
  out << "normalized: " << r.normalized.str() << '\n';
  if (r.mode == "montecarlo") {
    out << "samples: " << r.samples << '\n';
    out << "seed: " << r.seed << '\n';
    out << "point: " << format_double(r.point) << '\n';
    out << "ci_low: " << format_double(r.ci_low) << '\n';
    out << "ci_high: " << format_double(r.ci_high) << '\n';
  }
  std::string body = out.str();
  char sum[32];
  std::snprintf(sum, sizeof sum, "%016llx",
                static_cast<unsigned long long>(fnv1a64(body)));
  body += "checksum: ";
  body += sum;
  body += '\n';
  return body;
}

inline std::optional<OracleResult> parse_record(const std::string& text,
                                                const std::string& want_key) {
  const std::size_t mark = text.rfind("checksum: ");
  if (mark == std::string::npos) return std::nullopt;
  const std::string body = text.substr(0, mark);
  std::string stored = text.substr(mark + 10);
  while (!stored.empty() && (stored.back() == '\n' || stored.back() == '\r'))
    stored.pop_back();
  char sum[32];
  std::snprintf(sum, sizeof sum, "%016llx",
                static_cast<unsigned long long>(fnv1a64(body)));
  if (stored != sum) return std::nullopt;

  std::map<std::string, std::string> kv;
  std::istringstream in(body);
  std::string line;
  while (std::getline(in, line)) {
    const std::size_t colon = line.find(": ");
    if (colon == std::string::npos) return std::nullopt;
    kv[line.substr(0, colon)] = line.substr(colon + 2);
  }
  try {
    if (kv.at("key") != want_key) return std::nullopt;
    OracleResult r;
    r.q = PrimePower::make(std::stoull(kv.at("p")),
                           static_cast<unsigned>(std::stoul(kv.at("e"))));
    r.n = static_cast<unsigned>(std::stoul(kv.at("n")));
    r.m = static_cast<unsigned>(std::stoul(kv.at("m")));
    r.g = static_cast<unsigned>(std::stoul(kv.at("g")));
    r.mode = kv.at("mode");
    r.raw_count = Count(BigInt(kv.at("raw")));
    r.normalized = Count(BigInt(kv.at("normalized")));
    if (r.mode == "montecarlo") {
      r.samples = std::stoull(kv.at("samples"));
      r.seed = std::stoull(kv.at("seed"));
      r.point = std::strtod(kv.at("point").c_str(), nullptr);
      r.ci_low = std::strtod(kv.at("ci_low").c_str(), nullptr);
      r.ci_high = std::strtod(kv.at("ci_high").c_str(), nullptr);
    } else if (r.mode != "exhaustive") {
      return std::nullopt;
    }
    return r;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

}  // namespace detail

// File-per-key store of oracle results.  All failures (unwritable
// directory, missing file, corrupt record) degrade to cache misses; the
// oracle then recomputes and tries to overwrite.
class CacheStore {
 public:
  explicit CacheStore(std::string directory) : dir_(std::move(directory)) {}

  const std::string& directory() const { return dir_; }

  std::optional<OracleResult> get(const std::string& key) const {
    if (dir_.empty()) return std::nullopt;
    std::ifstream in(path_for(key), std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream text;
    text << in.rdbuf();
    return detail::parse_record(text.str(), key);
  }

  // Best-effort: storage failures are silently treated as "no cache".
  void put(const std::string& key, const OracleResult& r) const {
    if (dir_.empty()) return;
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) return;
    std::ofstream out(path_for(key), std::ios::binary | std::ios::trunc);
    if (!out) return;
    out << detail::serialize_record(key, r);
  }

 private:
  std::string path_for(const std::string& key) const {
    return (std::filesystem::path(dir_) / (key + ".txt")).string();
  }

  std::string dir_;
};

struct OracleOptions {
  std::uint64_t guard = kDefaultGuard;
  unsigned partitions = 1;  // enumeration splits into this many ranges
  const CacheStore* cache = nullptr;
};

// ---------------------------------------------------------------------------
// Etale counter
// ---------------------------------------------------------------------------

namespace detail {

// degree_table[i] = subfield_degree(element_at(field, i), q, n); built by
// following Frobenius orbits a -> a^q, whose lengths are exactly the
// degrees, so each element costs one Frobenius step.
inline std::vector<std::uint32_t> subfield_degree_table(const FieldPtr& field,
                                                        const PrimePower& q,
                                                        unsigned n) {
  const auto size = static_cast<std::uint64_t>(field->order());
  std::vector<std::uint32_t> table(size, 0);
  std::vector<std::uint64_t> orbit;
  for (std::uint64_t start = 0; start < size; ++start) {
    if (table[start]) continue;
    orbit.clear();
    orbit.push_back(start);
    FieldElement a = element_at(field, BigInt(start));
    for (;;) {
      a = frobenius(a, q.e);
      const auto next = static_cast<std::uint64_t>(element_index(a));
      if (next == start) break;
      orbit.push_back(next);
    }
    const auto d = static_cast<std::uint32_t>(orbit.size());
    for (std::uint64_t idx : orbit) table[idx] = d;
  }
  // Orbit lengths must divide n; anything else is a bug.
  for (std::uint64_t i = 0; i < size; ++i)
    if (n % table[i] != 0)
      throw integrity_error("degree table: orbit length does not divide n");
  return table;
}

inline std::string etale_key(const PrimePower& q, unsigned n, unsigned g) {
  std::ostringstream s;
  s << "etale-q" << q.value << "-n" << n << "-g" << g;
  return s.str();
}

inline std::string matrix_key(const PrimePower& q, unsigned n, unsigned m,
                              unsigned g) {
  std::ostringstream s;
  s << "matrix-q" << q.value << "-n" << n << "-m" << m << "-g" << g;
  return s.str();
}

inline std::string montecarlo_key(const PrimePower& q, unsigned n, unsigned m,
                                  unsigned g, std::uint64_t samples,
                                  std::uint64_t seed) {
  std::ostringstream s;
  s << "mc-q" << q.value << "-n" << n << "-m" << m << "-g" << g << "-s"
    << samples << "-seed" << seed;
  return s.str();
}

// Splits [0, total) into `parts` contiguous ranges and sums `body(lo, hi)`.
// The reduction is associative and the ranges disjoint, so the sum does not
// depend on the split; workers sharing only immutable context could run the
// ranges concurrently.
template <typename Body>
std::uint64_t sum_over_ranges(std::uint64_t total, unsigned parts,
                              Body&& body) {
  if (parts == 0) throw invalid_input("partitions must be >= 1");
  std::uint64_t acc = 0;
  for (unsigned c = 0; c < parts; ++c) {
    const std::uint64_t lo =
        static_cast<std::uint64_t>(BigInt(total) * c / parts);
    const std::uint64_t hi =
        static_cast<std::uint64_t>(BigInt(total) * (c + 1) / parts);
    acc += body(lo, hi);
  }
  return acc;
}

}  // namespace detail

// Exhaustively counts g-tuples over F_{q^n} that generate it as an
// F_q-algebra; a tuple generates iff the lcm of its entries' subfield
// degrees is n.  normalized = raw/n reproduces the closed-form count.
inline OracleResult count_etale(const PrimePower& q, unsigned n, unsigned g,
                                const OracleOptions& opts = {}) {
  if (n == 0) throw invalid_input("count_etale: n must be >= 1");
  const BigInt total_big = pow_big(BigInt(q.value), std::uint64_t(n) * g);
  if (total_big > BigInt(opts.guard))
    throw infeasible_error("count_etale: tuple space exceeds the guard");

  const std::string key = detail::etale_key(q, n, g);
  if (opts.cache) {
    if (auto hit = opts.cache->get(key)) return *hit;
  }

  std::uint64_t raw = 0;
  if (g == 0) {
    // The empty tuple generates F_q, which is everything iff n = 1.
    raw = n == 1 ? 1 : 0;
  } else {
    const FieldPtr field = make_field(q.p, q.e * n);
    const std::vector<std::uint32_t> degree =
        detail::subfield_degree_table(field, q, n);
    const std::uint64_t order = degree.size();
    raw = detail::sum_over_ranges(
        static_cast<std::uint64_t>(total_big), opts.partitions,
        [&](std::uint64_t lo, std::uint64_t hi) -> std::uint64_t {
          std::vector<std::uint64_t> digits(g, 0);
          std::uint64_t rest = lo;
          for (unsigned i = g; i-- > 0;) {
            digits[i] = rest % order;
            rest /= order;
          }
          std::uint64_t count = 0;
          for (std::uint64_t idx = lo; idx < hi; ++idx) {
            std::uint64_t l = 1;
            for (unsigned i = 0; i < g; ++i)
              l = std::lcm(l, std::uint64_t(degree[digits[i]]));
            if (l == n) ++count;
            for (unsigned i = g; i-- > 0;) {
              if (++digits[i] < order) break;
              digits[i] = 0;
            }
          }
          return count;
        });
  }

  OracleResult r;
  r.q = q;
  r.n = n;
  r.m = 1;
  r.g = g;
  r.mode = "exhaustive";
  r.raw_count = Count(raw);
  r.normalized =
      Count(div_exact(BigInt(raw), BigInt(n), "etale oracle raw/n"));
  if (opts.cache) opts.cache->put(key, r);
  return r;
}

// Exhaustively counts g-tuples of m x m matrices over F_{q^n} that generate
// the full matrix algebra over F_q (span closure test); normalized = raw/C.
inline OracleResult count_matrix(const PrimePower& q, unsigned n, unsigned m,
                                 unsigned g, const OracleOptions& opts = {}) {
  if (n == 0 || m == 0) throw invalid_input("count_matrix: need n, m >= 1");
  const BigInt total_big =
      pow_big(BigInt(q.value), std::uint64_t(n) * m * m * g);
  if (total_big > BigInt(opts.guard))
    throw infeasible_error("count_matrix: tuple space exceeds the guard");

  const std::string key = detail::matrix_key(q, n, m, g);
  if (opts.cache) {
    if (auto hit = opts.cache->get(key)) return *hit;
  }

  const FieldPtr field = make_field(q.p, q.e * n);
  detail::ClosureEngine engine(field, q, n, m);
  const unsigned deg = field->degree();
  const unsigned full = engine.dim();
  const unsigned digits_per_tuple = m * m * g;

  // Element index -> coefficient vector, tabulated once.
  std::uint64_t order = 1;
  std::vector<std::uint32_t> coeff;
  if (g > 0) {
    order = static_cast<std::uint64_t>(field->order());
    coeff.resize(order * deg);
    for (std::uint64_t idx = 0; idx < order; ++idx) {
      std::uint64_t rest = idx;
      for (unsigned i = deg; i-- > 0;) {
        coeff[idx * deg + i] = static_cast<std::uint32_t>(rest % q.p);
        rest /= q.p;
      }
    }
  }

  std::vector<detail::ClosureEngine::Flat> flats(
      g, detail::ClosureEngine::Flat(std::size_t(deg) * m * m, 0));
  auto set_digit = [&](unsigned t, std::uint64_t v) {
    std::uint32_t* dst = &flats[t / (m * m)][(t % (m * m)) * std::size_t(deg)];
    const std::uint32_t* src = &coeff[v * deg];
    for (unsigned i = 0; i < deg; ++i) dst[i] = src[i];
  };

  const std::uint64_t raw = detail::sum_over_ranges(
      static_cast<std::uint64_t>(total_big), opts.partitions,
      [&](std::uint64_t lo, std::uint64_t hi) -> std::uint64_t {
        std::vector<std::uint64_t> digits(digits_per_tuple, 0);
        std::uint64_t rest = lo;
        for (unsigned i = digits_per_tuple; i-- > 0;) {
          digits[i] = rest % order;
          rest /= order;
        }
        for (unsigned t = 0; t < digits_per_tuple; ++t)
          set_digit(t, digits[t]);
        std::uint64_t count = 0;
        for (std::uint64_t idx = lo; idx < hi; ++idx) {
          if (engine.closure_dim(flats) == full) ++count;
          for (unsigned t = digits_per_tuple; t-- > 0;) {
            if (++digits[t] < order) {
              set_digit(t, digits[t]);
              break;
            }
            digits[t] = 0;
            set_digit(t, 0);
          }
        }
        return count;
      });

  OracleResult r;
  r.q = q;
  r.n = n;
  r.m = m;
  r.g = g;
  r.mode = "exhaustive";
  r.raw_count = Count(raw);
  r.normalized = Count(div_exact(BigInt(raw), group_order_c(q, n, m).value(),
                                 "matrix oracle raw/C"));
  if (opts.cache) opts.cache->put(key, r);
  return r;
}

// Monte-Carlo estimate of the generating fraction |S_g| / q^{g n m^2}.
// Tuples are drawn coefficient-by-coefficient with rejection sampling on a
// seeded mt19937_64, so identical (samples, seed) give identical output on
// every platform.  Reports a 99% two-sided Wilson score interval.
inline OracleResult estimate_matrix_fraction(const PrimePower& q, unsigned n,
                                             unsigned m, unsigned g,
                                             std::uint64_t samples,
                                             std::uint64_t seed,
                                             const OracleOptions& opts = {}) {
  if (n == 0 || m == 0)
    throw invalid_input("estimate_matrix_fraction: need n, m >= 1");
  if (samples == 0)
    throw invalid_input("estimate_matrix_fraction: samples must be >= 1");

  const std::string key = detail::montecarlo_key(q, n, m, g, samples, seed);
  if (opts.cache) {
    if (auto hit = opts.cache->get(key)) return *hit;
  }

  const FieldPtr field = make_field(q.p, q.e * n);
  detail::ClosureEngine engine(field, q, n, m);
  const unsigned deg = field->degree();
  const unsigned full = engine.dim();

  std::mt19937_64 rng(seed);
  const std::uint64_t p = q.p;
  // Largest multiple of p in the 64-bit range: draws at or above it are
  // rejected, leaving each residue exactly equally likely.
  const std::uint64_t limit = ~std::uint64_t(0) - ~std::uint64_t(0) % p;
  auto draw = [&]() -> std::uint32_t {
    for (;;) {
      const std::uint64_t v = rng();
      if (v < limit) return static_cast<std::uint32_t>(v % p);
    }
  };

  std::vector<detail::ClosureEngine::Flat> flats(
      g, detail::ClosureEngine::Flat(std::size_t(deg) * m * m, 0));
  std::uint64_t hits = 0;
  for (std::uint64_t s = 0; s < samples; ++s) {
    for (unsigned i = 0; i < g; ++i)
      for (auto& c : flats[i]) c = draw();
    if (engine.closure_dim(flats) == full) ++hits;
  }

  const double nn = static_cast<double>(samples);
  const double phat = static_cast<double>(hits) / nn;
  const double z = 2.5758293035489004;  // two-sided 99% normal quantile
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double center = (phat + z2 / (2.0 * nn)) / denom;
  const double half =
      z * std::sqrt(phat * (1.0 - phat) / nn + z2 / (4.0 * nn * nn)) / denom;

  OracleResult r;
  r.q = q;
  r.n = n;
  r.m = m;
  r.g = g;
  r.mode = "montecarlo";
  r.raw_count = Count(hits);
  r.samples = samples;
  r.seed = seed;
  r.point = phat;
  r.ci_low = std::max(0.0, center - half);
  r.ci_high = std::min(1.0, center + half);
  if (opts.cache) opts.cache->put(key, r);
  return r;
}

}  // namespace sepgen
