// Command-line surface for the separable-algebra generator toolkit.
//
// Subcommands: nfield, gen, count-matrix, intervals, pair, verify.
// Every command prints one JSON object (or a two-line TSV table with
// --format tsv).  Exit codes: 0 success, 1 verification failure, 2 invalid
// input, 3 infeasible under the enumeration guard, 4 internal integrity
// violation.

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sepgen/config.hpp"
#include "sepgen/errors.hpp"
#include "sepgen/gencalc.hpp"
#include "sepgen/io.hpp"
#include "sepgen/matrix_algebra.hpp"
#include "sepgen/oracle.hpp"
#include "sepgen/verify.hpp"

namespace {

using sepgen::Json;

constexpr const char* kDefaultCacheDir = ".sepgen-cache";
constexpr std::uint64_t kDefaultSamples = 10000;
constexpr std::uint64_t kDefaultSeed = 1;

struct GlobalConfig {
  std::string format = "json";
  std::uint64_t guard = sepgen::kDefaultGuard;
  std::string cache_dir;  // resolved: flag > SEPGEN_CACHE > default
  bool cache_flag_set = false;
};

// Flag overrides environment variable, which overrides the built-in
// default local directory.
std::string resolve_cache_dir(const GlobalConfig& cfg) {
  if (cfg.cache_flag_set) return cfg.cache_dir;
  if (const char* env = std::getenv("SEPGEN_CACHE")) return env;
  return kDefaultCacheDir;
}

sepgen::RefineMode parse_mode(const std::string& mode) {
  if (mode == "bounds-only") return sepgen::RefineMode::bounds_only;
  if (mode == "allow-oracle") return sepgen::RefineMode::allow_oracle;
  throw sepgen::invalid_input("mode must be bounds-only or allow-oracle");
}

void emit(const Json& j, const GlobalConfig& cfg) {
  std::cout << sepgen::render(j, cfg.format);
}

// Parses one inline part "n=N,m=M,r=R" (keys in any order).
sepgen::AlgebraPart parse_inline_part(const std::string& text) {
  sepgen::AlgebraPart part;
  bool saw_n = false, saw_m = false, saw_r = false;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos)
      throw sepgen::invalid_input("part must look like n=N,m=M,r=R");
    const std::string key = item.substr(0, eq);
    const std::string value = item.substr(eq + 1);
    try {
      if (key == "n") {
        part.n = static_cast<unsigned>(std::stoul(value));
        saw_n = true;
      } else if (key == "m") {
        part.m = static_cast<unsigned>(std::stoul(value));
        saw_m = true;
      } else if (key == "r") {
        part.r = sepgen::Count(sepgen::BigInt(value));
        saw_r = true;
      } else {
        throw sepgen::invalid_input("unknown part key: " + key);
      }
    } catch (const sepgen::invalid_input&) {
      throw;
    } catch (const std::exception&) {
      throw sepgen::invalid_input("bad part value in: " + text);
    }
  }
  if (!saw_n || !saw_m || !saw_r)
    throw sepgen::invalid_input("part must provide n, m, and r");
  return part;
}

// ---------------------------------------------------------------------------
// Subcommand bodies
// ---------------------------------------------------------------------------

int cmd_nfield(const GlobalConfig& cfg, std::uint64_t qv, unsigned n,
               unsigned g) {
  const sepgen::PrimePower q = sepgen::parse_prime_power(qv);
  Json j;
  j["N"] = sepgen::decimal(sepgen::n_etale(q, n, g));
  emit(j, cfg);
  return 0;
}

int cmd_gen(const GlobalConfig& cfg, const std::string& spec_file,
            std::uint64_t qv, const std::vector<std::string>& inline_parts,
            const std::string& mode) {
  sepgen::AlgebraSpec spec;
  if (!spec_file.empty()) {
    if (!inline_parts.empty())
      throw sepgen::invalid_input("use either --spec or --part, not both");
    std::ifstream in(spec_file, std::ios::binary);
    if (!in) throw sepgen::invalid_input("cannot read spec file: " + spec_file);
    std::ostringstream buf;
    buf << in.rdbuf();
    spec = sepgen::parse_algebra_spec(buf.str());
  } else {
    if (inline_parts.empty())
      throw sepgen::invalid_input("provide --spec FILE or --part entries");
    spec.q = sepgen::parse_prime_power(qv);
    for (const std::string& text : inline_parts)
      spec.parts.push_back(parse_inline_part(text));
  }

  const sepgen::CacheStore store(resolve_cache_dir(cfg));
  sepgen::OracleOptions opts;
  opts.guard = cfg.guard;
  opts.cache = &store;
  const sepgen::GenResult res = sepgen::gen_algebra(spec, parse_mode(mode), opts);
  emit(sepgen::gen_result_json(res), cfg);
  return 0;
}

int cmd_count_matrix(const GlobalConfig& cfg, std::uint64_t qv, unsigned n,
                     unsigned m, unsigned g, const std::string& mode,
                     std::uint64_t samples, std::uint64_t seed) {
  const sepgen::PrimePower q = sepgen::parse_prime_power(qv);
  const sepgen::CacheStore store(resolve_cache_dir(cfg));
  sepgen::OracleOptions opts;
  opts.guard = cfg.guard;
  opts.cache = &store;
  if (mode == "exact") {
    const sepgen::OracleResult res = sepgen::count_matrix(q, n, m, g, opts);
    emit(sepgen::count_exact_json(res), cfg);
    return 0;
  }
  if (mode == "montecarlo") {
    const sepgen::OracleResult res =
        sepgen::estimate_matrix_fraction(q, n, m, g, samples, seed, opts);
    emit(sepgen::count_montecarlo_json(res), cfg);
    return 0;
  }
  throw sepgen::invalid_input("mode must be exact or montecarlo");
}

int cmd_intervals(const GlobalConfig& cfg, std::uint64_t qv, unsigned n,
                  unsigned m, unsigned g, const std::string& mode) {
  const sepgen::PrimePower q = sepgen::parse_prime_power(qv);
  const sepgen::CacheStore store(resolve_cache_dir(cfg));
  sepgen::OracleOptions opts;
  opts.guard = cfg.guard;
  opts.cache = &store;
  const sepgen::IntervalReport rep =
      sepgen::intervals(q, n, m, g, parse_mode(mode), opts);
  emit(sepgen::interval_report_json(rep), cfg);
  return 0;
}

int cmd_pair(const GlobalConfig& cfg, std::uint64_t qv, unsigned n, unsigned m,
             std::uint64_t seed) {
  const sepgen::PrimePower q = sepgen::parse_prime_power(qv);
  if (n == 0) throw sepgen::invalid_input("n must be >= 1");
  if (m < 2) throw sepgen::invalid_input("pair construction requires m >= 2");
  const sepgen::FieldPtr field = sepgen::make_field(q.p, q.e * n);

  // Seeded admissible draw: nonzero superdiagonal entries, arbitrary
  // remaining entries, corner fixed by a generator of the extension.
  std::mt19937_64 rng(seed);
  const auto random_element = [&](bool nonzero) {
    std::vector<std::uint64_t> coeffs(field->degree());
    while (true) {
      for (auto& c : coeffs) c = rng() % q.p;
      sepgen::FieldElement e = field->element(coeffs);
      if (!nonzero || !e.is_zero()) return e;
    }
  };
  std::vector<sepgen::FieldElement> alphas;
  for (unsigned i = 0; i + 1 < m; ++i) alphas.push_back(random_element(true));
  std::vector<sepgen::FieldElement> betas;
  for (unsigned k = 0; k < m * m; ++k) betas.push_back(random_element(false));
  const sepgen::FieldElement u = sepgen::extension_generator(field, q, n);

  const auto [a_mat, b_mat] = sepgen::construct_pair(q, n, m, alphas, betas, u);
  const sepgen::MatrixTuple t =
      sepgen::make_matrix_tuple(q, n, m, {a_mat, b_mat}, field);

  Json j;
  j["field"] = sepgen::field_json(*field);
  j["A"] = sepgen::matrix_json(a_mat, q, n);
  j["B"] = sepgen::matrix_json(b_mat, q, n);
  j["generates"] = sepgen::generates_full(t);
  j["seed"] = seed;
  emit(j, cfg);
  return 0;
}

int cmd_verify(const GlobalConfig& cfg, const std::string& suite) {
  const sepgen::CacheStore store(resolve_cache_dir(cfg));
  sepgen::OracleOptions opts;
  opts.guard = cfg.guard;
  opts.cache = &store;
  const std::vector<sepgen::CheckResult> checks =
      sepgen::verify_suite(suite, opts);

  if (cfg.format == "tsv") {
    std::cout << "suite\tcheck\tresult\tdetail\n";
    for (const sepgen::CheckResult& c : checks)
      std::cout << c.suite << '\t' << c.name << '\t'
                << (c.pass ? "PASS" : "FAIL") << '\t' << c.detail << '\n';
  } else {
    Json j;
    Json rows = Json::array();
    unsigned failed = 0;
    for (const sepgen::CheckResult& c : checks) {
      Json row;
      row["suite"] = c.suite;
      row["check"] = c.name;
      row["pass"] = c.pass;
      if (!c.pass) {
        row["detail"] = c.detail;
        ++failed;
      }
      rows.push_back(row);
    }
    j["checks"] = rows;
    j["failed"] = failed;
    j["passed"] = static_cast<unsigned>(checks.size()) - failed;
    std::cout << j.dump() << "\n";
  }
  return sepgen::all_passed(checks) ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact generator counts for separable algebras over finite fields"};
  app.require_subcommand(1);
  app.fallthrough();  // global options may follow the subcommand

  GlobalConfig cfg;
  app.add_option("--format", cfg.format, "Output format")
      ->check(CLI::IsMember({"json", "tsv"}))
      ->capture_default_str();
  app.add_option("--guard", cfg.guard,
                 "Ceiling on exhaustive enumeration size")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  auto* cache_opt =
      app.add_option("--cache", cfg.cache_dir,
                     "Cache directory (overrides SEPGEN_CACHE)");

  // nfield
  std::uint64_t nf_q = 2;
  unsigned nf_n = 1, nf_g = 1;
  auto* nfield = app.add_subcommand(
      "nfield", "Exact count of generating g-tuples for extension products");
  nfield->add_option("--q", nf_q, "Base field size (prime power)")->required();
  nfield->add_option("--n", nf_n, "Extension degree")->required();
  nfield->add_option("--g", nf_g, "Tuple length")->required();

  // gen
  std::string gen_spec_file;
  std::uint64_t gen_q = 2;
  std::vector<std::string> gen_parts;
  std::string gen_mode = "allow-oracle";
  auto* gen = app.add_subcommand(
      "gen", "Minimal number of generators of a separable algebra");
  gen->add_option("--spec", gen_spec_file, "Algebra spec file (JSON)");
  gen->add_option("--q", gen_q, "Base field size for inline parts");
  gen->add_option("--part", gen_parts,
                  "Inline part n=N,m=M,r=R (repeatable)");
  gen->add_option("--mode", gen_mode, "Bracket refinement mode")
      ->check(CLI::IsMember({"bounds-only", "allow-oracle"}))
      ->capture_default_str();

  // count-matrix
  std::uint64_t cm_q = 2;
  unsigned cm_n = 1, cm_m = 2, cm_g = 2;
  std::string cm_mode = "exact";
  std::uint64_t cm_samples = kDefaultSamples, cm_seed = kDefaultSeed;
  auto* count = app.add_subcommand(
      "count-matrix", "Count generating g-tuples of a matrix algebra");
  count->add_option("--q", cm_q, "Base field size (prime power)")->required();
  count->add_option("--n", cm_n, "Extension degree")->required();
  count->add_option("--m", cm_m, "Matrix size")->required();
  count->add_option("--g", cm_g, "Tuple length")->required();
  count->add_option("--mode", cm_mode, "exact or montecarlo")
      ->check(CLI::IsMember({"exact", "montecarlo"}))
      ->capture_default_str();
  count->add_option("--samples", cm_samples, "Monte Carlo sample count")
      ->capture_default_str();
  count->add_option("--seed", cm_seed, "Monte Carlo seed")
      ->capture_default_str();

  // intervals
  std::uint64_t iv_q = 2;
  unsigned iv_n = 1, iv_m = 2, iv_g = 2;
  std::string iv_mode = "allow-oracle";
  auto* ivals = app.add_subcommand(
      "intervals", "Multiplicity intervals around the bracket boundary");
  ivals->add_option("--q", iv_q, "Base field size (prime power)")->required();
  ivals->add_option("--n", iv_n, "Extension degree")->required();
  ivals->add_option("--m", iv_m, "Matrix size")->required();
  ivals->add_option("--g", iv_g, "Tuple length")->required();
  ivals->add_option("--mode", iv_mode, "Orbit-count resolution mode")
      ->check(CLI::IsMember({"bounds-only", "allow-oracle"}))
      ->capture_default_str();

  // pair
  std::uint64_t pr_q = 2, pr_seed = 0;
  unsigned pr_n = 1, pr_m = 2;
  auto* pair = app.add_subcommand(
      "pair", "Construct and verify an explicit generating pair");
  pair->add_option("--q", pr_q, "Base field size (prime power)")->required();
  pair->add_option("--n", pr_n, "Extension degree")->required();
  pair->add_option("--m", pr_m, "Matrix size (>= 2)")->required();
  pair->add_option("--seed", pr_seed, "Seed for the admissible draw")
      ->capture_default_str();

  // verify
  std::string vf_suite = "all";
  auto* verify = app.add_subcommand("verify", "Run the self-check suites");
  verify->add_option("--suite", vf_suite, "Which suite to run")
      ->check(CLI::IsMember(
          {"formula", "bounds", "orbits", "intervals", "all"}))
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
    app.exit(e);
    return 2;
  }

  cfg.cache_flag_set = cache_opt->count() > 0;

  try {
    if (nfield->parsed()) return cmd_nfield(cfg, nf_q, nf_n, nf_g);
    if (gen->parsed())
      return cmd_gen(cfg, gen_spec_file, gen_q, gen_parts, gen_mode);
    if (count->parsed())
      return cmd_count_matrix(cfg, cm_q, cm_n, cm_m, cm_g, cm_mode,
                              cm_samples, cm_seed);
    if (ivals->parsed())
      return cmd_intervals(cfg, iv_q, iv_n, iv_m, iv_g, iv_mode);
    if (pair->parsed()) return cmd_pair(cfg, pr_q, pr_n, pr_m, pr_seed);
    if (verify->parsed()) return cmd_verify(cfg, vf_suite);
  } catch (const sepgen::invalid_input& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return 2;
  } catch (const sepgen::infeasible_error& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return 3;
  } catch (const sepgen::integrity_error& e) {
    std::cerr << "integrity violation: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
  return 2;  // no subcommand matched (require_subcommand should prevent this)
}
