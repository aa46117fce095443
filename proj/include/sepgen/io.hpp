#pragma once

// Machine-readable serialization for the command-line surface.
//
// Conventions: every command emits a single top-level JSON object (keys
// sorted); counts and interval endpoints are decimal strings because they
// outgrow machine words; structural parameters (p, D, n, m, g, seeds,
// coefficient digits) are plain JSON numbers; floating-point values are
// decimal strings that never use scientific notation.  The TSV rendering
// is two lines: dotted flattened keys, then the values.

#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#include <json.hpp>

#include "sepgen/bigint.hpp"
#include "sepgen/errors.hpp"
#include "sepgen/finite_field.hpp"
#include "sepgen/gencalc.hpp"
#include "sepgen/matrix_algebra.hpp"
#include "sepgen/oracle.hpp"

namespace sepgen {

using Json = nlohmann::json;  // object keys kept sorted

inline std::string decimal(const BigInt& v) { return v.str(); }
inline std::string decimal(const Count& v) { return v.str(); }

// Shortest round-trip decimal form, expanded to plain notation when the
// printf form would use an exponent.
inline std::string decimal(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  if (std::strpbrk(buf, "eE") == nullptr) return buf;
  std::snprintf(buf, sizeof buf, "%.21f", v);
  std::string s = buf;
  // Trim trailing zeros but keep one digit after the point.
  const auto dot = s.find('.');
  auto last = s.find_last_not_of('0');
  if (last > dot) s.erase(last + 1);
  if (s.back() == '.') s.push_back('0');
  return s;
}

// ---------------------------------------------------------------------------
// Field, element, and matrix descriptors
// ---------------------------------------------------------------------------

inline Json element_json(const FieldElement& a) {
  return Json(a.coeffs());  // constant term first
}

inline Json field_json(const ExtensionField& f) {
  Json j;
  j["p"] = f.p();
  j["D"] = f.degree();
  j["modulus"] = f.modulus();
  return j;
}

inline Json matrix_json(const Matrix& a, const PrimePower& q, unsigned n) {
  Json j;
  j["q"] = q.value;
  j["n"] = n;
  j["m"] = a.m;
  Json entries = Json::array();
  for (const FieldElement& e : a.entries) entries.push_back(element_json(e));
  j["entries"] = entries;
  return j;
}

// ---------------------------------------------------------------------------
// Algebra specifications
// ---------------------------------------------------------------------------

// Factors a prime-power value into PrimePower or rejects it.
inline PrimePower parse_prime_power(std::uint64_t q) {
  if (q < 2) throw invalid_input("q must be a prime power >= 2");
  std::uint64_t p = q;
  for (std::uint64_t d = 2; d * d <= q; ++d) {
    if (q % d == 0) {
      p = d;
      break;
    }
  }
  unsigned e = 0;
  std::uint64_t rest = q;
  while (rest % p == 0) {
    rest /= p;
    ++e;
  }
  if (rest != 1) throw invalid_input("q must be a prime power");
  return PrimePower::make(p, e);
}

inline AlgebraSpec algebra_spec_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("q") || !j.contains("parts"))
    throw invalid_input("algebra spec: expected {\"q\": ..., \"parts\": [...]}");
  AlgebraSpec spec;
  if (!j["q"].is_number_unsigned())
    throw invalid_input("algebra spec: q must be a positive integer");
  spec.q = parse_prime_power(j["q"].get<std::uint64_t>());
  if (!j["parts"].is_array())
    throw invalid_input("algebra spec: parts must be an array");
  for (const Json& part : j["parts"]) {
    if (!part.is_object() || !part.contains("n") || !part.contains("m") ||
        !part.contains("r"))
      throw invalid_input("algebra spec: each part needs n, m, r");
    AlgebraPart p;
    if (!part["n"].is_number_unsigned() || !part["m"].is_number_unsigned())
      throw invalid_input("algebra spec: n and m must be positive integers");
    p.n = part["n"].get<unsigned>();
    p.m = part["m"].get<unsigned>();
    if (part["r"].is_number_unsigned()) {
      p.r = Count(part["r"].get<std::uint64_t>());
    } else if (part["r"].is_string()) {
      try {
        p.r = Count(BigInt(part["r"].get<std::string>()));
      } catch (const std::exception&) {
        throw invalid_input("algebra spec: r must be a positive integer");
      }
    } else {
      throw invalid_input("algebra spec: r must be a positive integer");
    }
    spec.parts.push_back(p);
  }
  return canonicalize(spec);
}

inline AlgebraSpec parse_algebra_spec(const std::string& text) {
  Json j = Json::parse(text, nullptr, false);
  if (j.is_discarded()) throw invalid_input("algebra spec: malformed JSON");
  return algebra_spec_from_json(j);
}

// ---------------------------------------------------------------------------
// Result objects
// ---------------------------------------------------------------------------

// The command-line summary: status, method, and the value or bracket.
// (The per-part breakdown stays on the GenResult type for library callers.)
inline Json gen_result_json(const GenResult& r) {
  Json j;
  j["status"] = r.status;
  j["method"] = r.method;
  if (r.exact()) {
    j["gen"] = std::to_string(r.value);
  } else {
    j["lo"] = std::to_string(r.lo);
    j["hi"] = std::to_string(r.hi);
  }
  return j;
}

inline Json count_exact_json(const OracleResult& r) {
  Json j;
  j["C"] = decimal(group_order_c(r.q, r.n, r.m));
  j["N"] = decimal(r.normalized);
  j["S_g"] = decimal(r.raw_count);
  return j;
}

inline Json count_montecarlo_json(const OracleResult& r) {
  Json j;
  j["mode"] = "montecarlo";
  j["samples"] = r.samples;
  j["seed"] = r.seed;
  j["point"] = decimal(r.point);
  j["ci_low"] = decimal(r.ci_low);
  j["ci_high"] = decimal(r.ci_high);
  return j;
}

inline Json interval_json(const IntegerInterval& iv) {
  Json j;
  j["empty"] = iv.empty();
  j["lo_exclusive"] = decimal(iv.lo_exclusive);
  j["hi_inclusive"] = decimal(iv.hi_inclusive);
  if (!iv.empty() && iv.exact()) {
    j["min"] = decimal(iv.lo_exclusive + 1);
    j["max"] = decimal(iv.hi_inclusive);
    j["size"] = decimal(iv.size());
  }
  return j;
}

inline Json interval_report_json(const IntervalReport& rep) {
  Json j;
  j["q"] = rep.q.value;
  j["n"] = rep.n;
  j["m"] = rep.m;
  j["g"] = rep.g;
  j["mode"] = rep.n_mode;
  j["C"] = decimal(rep.c);
  j["boundary_floor"] = decimal(rep.boundary_floor);
  j["boundary_integral"] = rep.boundary_integral;
  j["N_exact"] = rep.on_bracket_floor.hi_exact;
  j["N_prev_exact"] = rep.above_bracket_floor.lo_exact;
  j["I0"] = interval_json(rep.on_bracket_floor);
  j["I1"] = interval_json(rep.above_bracket_floor);
  Json scalar;
  scalar["applies"] = rep.scalar_rule_applies;
  scalar["floor"] = decimal(rep.scalar_rule_floor);
  scalar["floor_unshifted"] = decimal(rep.scalar_rule_floor_unshifted);
  j["scalar_rule"] = scalar;
  Json column;
  column["applies"] = rep.column_rule_applies;
  column["floor"] = decimal(rep.column_rule_floor);
  column["floor_unshifted"] = decimal(rep.column_rule_floor_unshifted);
  j["column_rule"] = column;
  return j;
}

// ---------------------------------------------------------------------------
// Rendering
// ---------------------------------------------------------------------------

namespace detail {

inline void flatten_json(const Json& j, const std::string& prefix,
                         std::vector<std::pair<std::string, std::string>>* out) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) {
      const std::string key =
          prefix.empty() ? it.key() : prefix + "." + it.key();
      flatten_json(it.value(), key, out);
    }
    return;
  }
  std::string value;
  if (j.is_string())
    value = j.get<std::string>();
  else
    value = j.dump();
  out->emplace_back(prefix, value);
}

}  // namespace detail

// Two-line tab-separated rendering: flattened keys, then values.
inline std::string render_tsv(const Json& j) {
  std::vector<std::pair<std::string, std::string>> cells;
  detail::flatten_json(j, "", &cells);
  std::string keys, values;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) {
      keys.push_back('\t');
      values.push_back('\t');
    }
    keys += cells[i].first;
    values += cells[i].second;
  }
  return keys + "\n" + values + "\n";
}

inline std::string render(const Json& j, const std::string& format) {
  if (format == "tsv") return render_tsv(j);
  return j.dump() + "\n";
}

}  // namespace sepgen
