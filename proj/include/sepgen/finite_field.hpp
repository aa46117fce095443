#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sepgen/bigint.hpp"
#include "sepgen/config.hpp"
#include "sepgen/errors.hpp"

namespace sepgen {

// ---------------------------------------------------------------------------
// Prime powers
// ---------------------------------------------------------------------------

inline bool is_prime_u64(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

// q = p^e with p prime, e >= 1.  The value itself must fit a machine word;
// powers of q are always taken into BigInt.
struct PrimePower {
  std::uint64_t p = 2;
  unsigned e = 1;
  std::uint64_t value = 2;

  static PrimePower make(std::uint64_t p, unsigned e) {
    if (!is_prime_u64(p)) throw invalid_input("PrimePower: p is not prime");
    if (e == 0) throw invalid_input("PrimePower: exponent must be >= 1");
    PrimePower q;
    q.p = p;
    q.e = e;
    q.value = 1;
    for (unsigned i = 0; i < e; ++i) {
      if (q.value > std::numeric_limits<std::uint64_t>::max() / p)
        throw invalid_input("PrimePower: p^e exceeds machine range");
      q.value *= p;
    }
    return q;
  }

  // Factor q as p^e; rejects values that are not prime powers.
  static PrimePower from_value(std::uint64_t q) {
    if (q < 2) throw invalid_input("PrimePower: q must be >= 2");
    std::uint64_t p = 0;
    for (std::uint64_t d = 2; d * d <= q; ++d) {
      if (q % d == 0) {
        p = d;
        break;
      }
    }
    if (p == 0) return make(q, 1);  // q itself is prime
    unsigned e = 0;
    std::uint64_t rest = q;
    while (rest % p == 0) {
      rest /= p;
      ++e;
    }
    if (rest != 1) throw invalid_input("PrimePower: q is not a prime power");
    return make(p, e);
  }

  BigInt big() const { return BigInt(value); }

  friend bool operator==(const PrimePower& a, const PrimePower& b) {
    return a.p == b.p && a.e == b.e;
  }
};

// ---------------------------------------------------------------------------
// Dense polynomial arithmetic over F_p (internal)
// ---------------------------------------------------------------------------

namespace detail {

// Coefficient vectors are constant-term first and may carry trailing zeros.
using Poly = std::vector<std::uint64_t>;

inline std::uint64_t pow_mod_u64(std::uint64_t b, std::uint64_t e,
                                 std::uint64_t m) {
  std::uint64_t acc = 1 % m;
  b %= m;
  while (e) {
    if (e & 1) acc = acc * b % m;
    b = b * b % m;
    e >>= 1;
  }
  return acc;
}

inline std::uint64_t inv_mod_p(std::uint64_t a, std::uint64_t p) {
  return pow_mod_u64(a, p - 2, p);  // p prime, a != 0 mod p
}

inline int poly_deg(const Poly& a) {
  for (std::size_t i = a.size(); i-- > 0;)
    if (a[i] != 0) return static_cast<int>(i);
  return -1;
}

inline void poly_trim(Poly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

inline Poly poly_mul(const Poly& a, const Poly& b, std::uint64_t p) {
  if (a.empty() || b.empty()) return {};
  Poly c(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; j < b.size(); ++j)
      c[i + j] = (c[i + j] + a[i] * b[j]) % p;
  }
  return c;
}

// Remainder modulo a monic polynomial f (trimmed, deg >= 1).
inline Poly poly_rem(Poly a, const Poly& f, std::uint64_t p) {
  const int df = poly_deg(f);
  poly_trim(a);
  while (poly_deg(a) >= df) {
    const std::size_t k = a.size() - 1;
    const std::uint64_t c = a[k];
    if (c != 0) {
      const std::size_t shift = k - static_cast<std::size_t>(df);
      for (int i = 0; i <= df; ++i) {
        const std::uint64_t sub = c * f[static_cast<std::size_t>(i)] % p;
        std::uint64_t& dst = a[shift + static_cast<std::size_t>(i)];
        dst = (dst + p - sub) % p;
      }
    }
    a.pop_back();
    poly_trim(a);
  }
  return a;
}

inline Poly poly_mulmod(const Poly& a, const Poly& b, const Poly& f,
                        std::uint64_t p) {
  return poly_rem(poly_mul(a, b, p), f, p);
}

inline Poly poly_powmod(Poly base, BigInt exp, const Poly& f,
                        std::uint64_t p) {
  Poly acc{1};
  base = poly_rem(std::move(base), f, p);
  while (exp > 0) {
    if ((exp & 1) != 0) acc = poly_mulmod(acc, base, f, p);
    exp >>= 1;
    if (exp > 0) base = poly_mulmod(base, base, f, p);
  }
  return acc;
}

inline Poly poly_gcd(Poly a, Poly b, std::uint64_t p) {
  poly_trim(a);
  poly_trim(b);
  while (poly_deg(b) >= 0) {
    // Make b monic so poly_rem applies.
    const std::uint64_t lead = b.back();
    if (lead != 1) {
      const std::uint64_t s = inv_mod_p(lead, p);
      for (auto& c : b) c = c * s % p;
    }
    Poly r = poly_rem(std::move(a), b, p);
    a = std::move(b);
    b = std::move(r);
  }
  poly_trim(a);
  if (!a.empty() && a.back() != 1) {
    const std::uint64_t s = inv_mod_p(a.back(), p);
    for (auto& c : a) c = c * s % p;
  }
  return a;
}

inline std::vector<unsigned> prime_divisors(unsigned n) {
  std::vector<unsigned> out;
  for (unsigned d = 2; d * d <= n; ++d) {
    if (n % d == 0) {
      out.push_back(d);
      while (n % d == 0) n /= d;
    }
  }
  if (n > 1) out.push_back(n);
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Field construction
// ---------------------------------------------------------------------------

// Evidence that the modulus of a field is irreducible of the stated degree:
// x^(p^D) = x holds modulo f, and for every prime divisor l of D the map
// x -> x^(p^(D/l)) fixes no proper subfield pointwise along f, witnessed by
// gcd(x^(p^(D/l)) - x, f) = 1.  verify() recomputes both conditions.
struct FieldCertificate {
  std::uint64_t p = 0;
  unsigned degree = 0;
  std::vector<std::uint64_t> modulus;  // constant-term first, monic
  std::vector<unsigned> degree_prime_divisors;
  bool frobenius_fixes_x = false;
  bool proper_subfields_excluded = false;

  bool ok() const { return frobenius_fixes_x && proper_subfields_excluded; }
};

class ExtensionField;
using FieldPtr = std::shared_ptr<const ExtensionField>;

class FieldElement;

// F_{p^D} realised as F_p[x]/(f) with f the canonical modulus: the
// lexicographically least monic irreducible of degree D, coefficients
// compared constant-term first.  Field instances are immutable and shared.
class ExtensionField : public std::enable_shared_from_this<ExtensionField> {
 public:
  std::uint64_t p() const { return p_; }
  unsigned degree() const { return deg_; }
  const BigInt& order() const { return order_; }
  // Modulus coefficients, constant-term first, length degree()+1, monic.
  const std::vector<std::uint64_t>& modulus() const { return mod_; }
  const FieldCertificate& certificate() const { return cert_; }

  FieldElement zero() const;
  FieldElement one() const;
  // The residue class of x (equals zero only when degree() == 1 and the
  // modulus is x itself).
  FieldElement gen() const;
  FieldElement element(std::vector<std::uint64_t> coeffs) const;

  // Two instances describe the same field iff p and modulus agree.
  bool same_as(const ExtensionField& other) const {
    return p_ == other.p_ && mod_ == other.mod_;
  }

  static FieldPtr make(std::uint64_t p, unsigned degree);
  static FieldPtr make_with_modulus(std::uint64_t p,
                                    std::vector<std::uint64_t> modulus);

 private:
  ExtensionField(std::uint64_t p, unsigned deg, std::vector<std::uint64_t> mod,
                 FieldCertificate cert)
      : p_(p),
        deg_(deg),
        mod_(std::move(mod)),
        cert_(std::move(cert)),
        order_(pow_big(BigInt(p), deg)) {}

  std::uint64_t p_;
  unsigned deg_;
  std::vector<std::uint64_t> mod_;
  FieldCertificate cert_;
  BigInt order_;
};

namespace detail {

inline FieldCertificate certify_modulus(std::uint64_t p, unsigned degree,
                                        const Poly& f) {
  FieldCertificate cert;
  cert.p = p;
  cert.degree = degree;
  cert.modulus.assign(f.begin(), f.end());
  cert.degree_prime_divisors = prime_divisors(degree);

  const Poly x{0, 1};
  const Poly x_mod = poly_rem(x, f, p);
  const Poly frob = poly_powmod(x, pow_big(BigInt(p), degree), f, p);
  cert.frobenius_fixes_x = (frob == x_mod);

  cert.proper_subfields_excluded = true;
  for (unsigned l : cert.degree_prime_divisors) {
    Poly g = poly_powmod(x, pow_big(BigInt(p), degree / l), f, p);
    // g <- g - x  (mod p)
    if (g.size() < 2) g.resize(2, 0);
    g[1] = (g[1] + p - 1) % p;
    poly_trim(g);
    const Poly d = poly_gcd(g, f, p);
    if (poly_deg(d) != 0) {
      cert.proper_subfields_excluded = false;
      break;
    }
  }
  return cert;
}

}  // namespace detail

inline FieldPtr ExtensionField::make(std::uint64_t p, unsigned degree) {
  if (!is_prime_u64(p)) throw invalid_input("field: p must be prime");
  if (p >= (std::uint64_t(1) << 31))
    throw invalid_input("field: p out of supported range");
  if (degree == 0) throw invalid_input("field: degree must be >= 1");

  // Scan monic candidates in lexicographic order (constant term first).
  // For degree >= 2 every candidate with zero constant term is divisible
  // by x, so the scan starts at constant term 1.
  std::vector<std::uint64_t> low(degree, 0);
  if (degree >= 2) low[0] = 1;
  for (;;) {
    detail::Poly f(low);
    f.push_back(1);  // monic
    FieldCertificate cert = detail::certify_modulus(p, degree, f);
    if (cert.ok()) {
      return FieldPtr(
          new ExtensionField(p, degree, std::move(cert.modulus), cert));
    }
    // Next candidate: increment the last coefficient, carrying leftwards
    // so that (c_0, ..., c_{D-1}) advances in lexicographic order.
    std::size_t i = degree;
    while (i-- > 0) {
      if (++low[i] < p) break;
      low[i] = 0;
      if (i == 0)
        throw integrity_error("field: no irreducible modulus found");
    }
  }
}

inline FieldPtr ExtensionField::make_with_modulus(
    std::uint64_t p, std::vector<std::uint64_t> modulus) {
  if (!is_prime_u64(p)) throw invalid_input("field: p must be prime");
  if (p >= (std::uint64_t(1) << 31))
    throw invalid_input("field: p out of supported range");
  if (modulus.size() < 2 || modulus.back() != 1)
    throw invalid_input("field: modulus must be monic of degree >= 1");
  for (std::uint64_t c : modulus)
    if (c >= p) throw invalid_input("field: modulus coefficient out of range");
  const unsigned degree = static_cast<unsigned>(modulus.size() - 1);
  FieldCertificate cert = detail::certify_modulus(p, degree, modulus);
  if (!cert.ok()) throw invalid_input("field: modulus is not irreducible");
  return FieldPtr(new ExtensionField(p, degree, std::move(modulus), cert));
}

inline FieldPtr make_field(std::uint64_t p, unsigned degree) {
  return ExtensionField::make(p, degree);
}

// ---------------------------------------------------------------------------
// Field elements
// ---------------------------------------------------------------------------

class FieldElement {
 public:
  FieldElement() = default;

  FieldElement(FieldPtr field, std::vector<std::uint64_t> coeffs)
      : field_(std::move(field)), c_(std::move(coeffs)) {
    if (!field_) throw invalid_input("element: null field");
    if (c_.size() != field_->degree())
      throw invalid_input("element: coefficient count != field degree");
    for (std::uint64_t v : c_)
      if (v >= field_->p())
        throw invalid_input("element: coefficient out of range");
  }

  const FieldPtr& field() const { return field_; }
  // Coefficients of the residue, constant-term first, length = degree.
  const std::vector<std::uint64_t>& coeffs() const { return c_; }

  bool is_zero() const {
    for (std::uint64_t v : c_)
      if (v) return false;
    return true;
  }

  friend bool operator==(const FieldElement& a, const FieldElement& b) {
    return a.field_->same_as(*b.field_) && a.c_ == b.c_;
  }
  friend bool operator!=(const FieldElement& a, const FieldElement& b) {
    return !(a == b);
  }

  friend FieldElement operator+(const FieldElement& a, const FieldElement& b) {
    check_same(a, b);
    std::vector<std::uint64_t> c(a.c_.size());
    const std::uint64_t p = a.field_->p();
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = (a.c_[i] + b.c_[i]) % p;
    return FieldElement(a.field_, std::move(c));
  }

  friend FieldElement operator-(const FieldElement& a, const FieldElement& b) {
    check_same(a, b);
    std::vector<std::uint64_t> c(a.c_.size());
    const std::uint64_t p = a.field_->p();
    for (std::size_t i = 0; i < c.size(); ++i)
      c[i] = (a.c_[i] + p - b.c_[i]) % p;
    return FieldElement(a.field_, std::move(c));
  }

  friend FieldElement operator-(const FieldElement& a) {
    std::vector<std::uint64_t> c(a.c_.size());
    const std::uint64_t p = a.field_->p();
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = (p - a.c_[i]) % p;
    return FieldElement(a.field_, std::move(c));
  }

  friend FieldElement operator*(const FieldElement& a, const FieldElement& b) {
    check_same(a, b);
    detail::Poly r = detail::poly_mulmod(a.c_, b.c_, a.field_->modulus(),
                                         a.field_->p());
    r.resize(a.field_->degree(), 0);
    return FieldElement(a.field_, std::move(r));
  }

  // a^k for k >= 0 by binary exponentiation (0^0 = 1).
  FieldElement pow(BigInt k) const {
    if (k < 0) throw invalid_input("element pow: negative exponent");
    detail::Poly r =
        detail::poly_powmod(c_, std::move(k), field_->modulus(), field_->p());
    r.resize(field_->degree(), 0);
    return FieldElement(field_, std::move(r));
  }

  FieldElement inv() const {
    if (is_zero()) throw invalid_input("element: inverse of zero");
    return pow(field_->order() - 2);
  }

 private:
  static void check_same(const FieldElement& a, const FieldElement& b) {
    if (a.field_.get() != b.field_.get() && !a.field_->same_as(*b.field_))
      throw field_mismatch("elements belong to different fields");
  }

  FieldPtr field_;
  std::vector<std::uint64_t> c_;
};

inline FieldElement ExtensionField::zero() const {
  return FieldElement(shared_from_this(),
                      std::vector<std::uint64_t>(deg_, 0));
}

inline FieldElement ExtensionField::one() const {
  std::vector<std::uint64_t> c(deg_, 0);
  c[0] = 1;
  return FieldElement(shared_from_this(), std::move(c));
}

inline FieldElement ExtensionField::gen() const {
  std::vector<std::uint64_t> c(deg_, 0);
  if (deg_ >= 2) {
    c[1] = 1;
  } else {
    // Degree 1: x reduces to -c_0 modulo the modulus x + c_0.
    c[0] = (p_ - mod_[0]) % p_;
  }
  return FieldElement(shared_from_this(), std::move(c));
}

inline FieldElement ExtensionField::element(
    std::vector<std::uint64_t> coeffs) const {
  return FieldElement(shared_from_this(), std::move(coeffs));
}

// ---------------------------------------------------------------------------
// Frobenius and subfield structure
// ---------------------------------------------------------------------------

// a -> a^(p^k), repeated p-th powers.
inline FieldElement frobenius(const FieldElement& a, unsigned k) {
  FieldElement r = a;
  const BigInt p = a.field()->p();
  for (unsigned i = 0; i < k; ++i) r = r.pow(p);
  return r;
}

inline std::vector<std::uint64_t> divisors_u64(std::uint64_t n) {
  std::vector<std::uint64_t> small, large;
  for (std::uint64_t d = 1; d * d <= n; ++d) {
    if (n % d == 0) {
      small.push_back(d);
      if (d != n / d) large.push_back(n / d);
    }
  }
  small.insert(small.end(), large.rbegin(), large.rend());
  return small;
}

// Degree of a over F_q inside F_{q^n}: the least d | n with a^(q^d) = a.
// Requires a to live in the field of order q^n (absolute degree e*n).
inline unsigned subfield_degree(const FieldElement& a, const PrimePower& q,
                                unsigned n) {
  if (n == 0) throw invalid_input("subfield_degree: n must be >= 1");
  const auto& F = *a.field();
  if (F.p() != q.p || F.degree() != q.e * n)
    throw invalid_input("subfield_degree: element not in a field of order q^n");
  for (std::uint64_t d : divisors_u64(n)) {
    if (frobenius(a, q.e * static_cast<unsigned>(d)) == a)
      return static_cast<unsigned>(d);
  }
  throw integrity_error("subfield_degree: no divisor fixed the element");
}

// ---------------------------------------------------------------------------
// Enumeration
// ---------------------------------------------------------------------------

// Lexicographic rank of an element among all field elements, coefficients
// compared constant-term first: index = sum c_i * p^(D-1-i).
inline BigInt element_index(const FieldElement& a) {
  BigInt idx = 0;
  const BigInt p = a.field()->p();
  for (std::uint64_t c : a.coeffs()) idx = idx * p + c;
  return idx;
}

inline FieldElement element_at(const FieldPtr& field, BigInt index) {
  if (index < 0 || index >= field->order())
    throw invalid_input("element_at: index out of range");
  const unsigned d = field->degree();
  std::vector<std::uint64_t> c(d, 0);
  const BigInt p = field->p();
  for (unsigned i = d; i-- > 0;) {
    c[i] = static_cast<std::uint64_t>(index % p);
    index /= p;
  }
  return field->element(std::move(c));
}

// Streams all p^D elements in lexicographic order (first 0, last the
// all-(p-1) coefficient vector).  The field order must not exceed the guard.
class ElementEnumerator {
 public:
  explicit ElementEnumerator(FieldPtr field,
                             std::uint64_t guard = kDefaultGuard)
      : field_(std::move(field)), digits_(field_->degree(), 0) {
    if (field_->order() > BigInt(kMaxEnumerableOrder) ||
        field_->order() > BigInt(guard))
      throw infeasible_error("element enumeration exceeds the guard");
  }

  // Number of elements the stream will produce.
  std::uint64_t size() const {
    return static_cast<std::uint64_t>(field_->order());
  }

  std::optional<FieldElement> next() {
    if (done_) return std::nullopt;
    FieldElement out = field_->element(digits_);
    // Advance the coefficient odometer, least significant digit last.
    std::size_t i = digits_.size();
    const std::uint64_t p = field_->p();
    while (i-- > 0) {
      if (++digits_[i] < p) return out;
      digits_[i] = 0;
    }
    done_ = true;
    return out;
  }

 private:
  FieldPtr field_;
  std::vector<std::uint64_t> digits_;
  bool done_ = false;
};

}  // namespace sepgen
