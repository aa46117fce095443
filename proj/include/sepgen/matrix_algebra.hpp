#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "sepgen/bigint.hpp"
#include "sepgen/config.hpp"
#include "sepgen/counting.hpp"
#include "sepgen/errors.hpp"
#include "sepgen/finite_field.hpp"

namespace sepgen {

// ---------------------------------------------------------------------------
// Matrices over an extension field
// ---------------------------------------------------------------------------

struct Matrix {
  unsigned m = 0;
  std::vector<FieldElement> entries;  // row-major, size m*m

  const FieldElement& at(unsigned i, unsigned j) const {
    return entries[std::size_t(i) * m + j];
  }
  FieldElement& at(unsigned i, unsigned j) {
    return entries[std::size_t(i) * m + j];
  }
  const FieldPtr& field() const { return entries.front().field(); }

  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.m == b.m && a.entries == b.entries;
  }
};

inline Matrix zero_matrix(const FieldPtr& f, unsigned m) {
  if (m == 0) throw invalid_input("matrix: m must be >= 1");
  Matrix out;
  out.m = m;
  out.entries.assign(std::size_t(m) * m, f->zero());
  return out;
}

inline Matrix identity_matrix(const FieldPtr& f, unsigned m) {
  Matrix out = zero_matrix(f, m);
  for (unsigned i = 0; i < m; ++i) out.at(i, i) = f->one();
  return out;
}

// Matrix with a single 1 in position (i, j), zero-based.
inline Matrix elementary_matrix(const FieldPtr& f, unsigned m, unsigned i,
                                unsigned j) {
  if (i >= m || j >= m) throw invalid_input("elementary_matrix: index range");
  Matrix out = zero_matrix(f, m);
  out.at(i, j) = f->one();
  return out;
}

namespace detail {
inline void check_shapes(const Matrix& a, const Matrix& b) {
  if (a.m != b.m) throw invalid_input("matrix shapes differ");
  if (!a.field()->same_as(*b.field()))
    throw field_mismatch("matrices over different fields");
}
}  // namespace detail

inline Matrix mat_add(const Matrix& a, const Matrix& b) {
  detail::check_shapes(a, b);
  Matrix out = a;
  for (std::size_t i = 0; i < out.entries.size(); ++i)
    out.entries[i] = out.entries[i] + b.entries[i];
  return out;
}

inline Matrix mat_mul(const Matrix& a, const Matrix& b) {
  detail::check_shapes(a, b);
  const unsigned m = a.m;
  Matrix out = zero_matrix(a.field(), m);
  for (unsigned i = 0; i < m; ++i)
    for (unsigned k = 0; k < m; ++k) {
      const FieldElement& aik = a.at(i, k);
      if (aik.is_zero()) continue;
      for (unsigned j = 0; j < m; ++j)
        out.at(i, j) = out.at(i, j) + aik * b.at(k, j);
    }
  return out;
}

inline Matrix mat_scale(const Matrix& a, const FieldElement& c) {
  Matrix out = a;
  for (auto& e : out.entries) e = e * c;
  return out;
}

// Entrywise a -> a^(p^k).
inline Matrix mat_frobenius(const Matrix& a, unsigned k) {
  Matrix out = a;
  for (auto& e : out.entries) e = frobenius(e, k);
  return out;
}

// Gauss-Jordan inverse; nullopt when singular.
inline std::optional<Matrix> mat_inverse(const Matrix& a) {
  const unsigned m = a.m;
  Matrix left = a;
  Matrix right = identity_matrix(a.field(), m);
  unsigned row = 0;
  for (unsigned col = 0; col < m; ++col) {
    unsigned pivot = row;
    while (pivot < m && left.at(pivot, col).is_zero()) ++pivot;
    if (pivot == m) return std::nullopt;
    for (unsigned j = 0; j < m; ++j) {
      std::swap(left.at(row, j), left.at(pivot, j));
      std::swap(right.at(row, j), right.at(pivot, j));
    }
    const FieldElement inv = left.at(row, col).inv();
    for (unsigned j = 0; j < m; ++j) {
      left.at(row, j) = left.at(row, j) * inv;
      right.at(row, j) = right.at(row, j) * inv;
    }
    for (unsigned r = 0; r < m; ++r) {
      if (r == row || left.at(r, col).is_zero()) continue;
      const FieldElement f = left.at(r, col);
      for (unsigned j = 0; j < m; ++j) {
        left.at(r, j) = left.at(r, j) - f * left.at(row, j);
        right.at(r, j) = right.at(r, j) - f * right.at(row, j);
      }
    }
    ++row;
  }
  return right;
}

// ---------------------------------------------------------------------------
// Tuples with context
// ---------------------------------------------------------------------------

// A g-tuple of m x m matrices over F_{q^n}, carrying the (q, n, m) context
// that fixes which algebra "generate" refers to.  g = 0 is allowed.
struct MatrixTuple {
  PrimePower q;
  unsigned n = 1;
  unsigned m = 1;
  FieldPtr field;  // absolute degree q.e * n
  std::vector<Matrix> mats;

  unsigned g() const { return static_cast<unsigned>(mats.size()); }
  // F_p-dimension of the full algebra M_m(F_{q^n}).
  unsigned full_dim() const { return q.e * n * m * m; }

  friend bool operator==(const MatrixTuple& a, const MatrixTuple& b) {
    return a.q == b.q && a.n == b.n && a.m == b.m && a.mats == b.mats;
  }
};

inline MatrixTuple make_matrix_tuple(const PrimePower& q, unsigned n, unsigned m,
                              std::vector<Matrix> mats,
                              FieldPtr field = nullptr) {
  if (n == 0 || m == 0) throw invalid_input("tuple: need n, m >= 1");
  MatrixTuple t;
  t.q = q;
  t.n = n;
  t.m = m;
  if (!mats.empty()) {
    field = mats.front().field();
  } else if (!field) {
    field = make_field(q.p, q.e * n);
  }
  if (field->p() != q.p || field->degree() != q.e * n)
    throw invalid_input("tuple: field degree does not match q^n");
  for (const Matrix& mm : mats) {
    if (mm.m != m) throw invalid_input("tuple: matrix shape mismatch");
    if (!mm.field()->same_as(*field))
      throw field_mismatch("tuple: matrices over different fields");
  }
  t.field = std::move(field);
  t.mats = std::move(mats);
  return t;
}

// ---------------------------------------------------------------------------
// Distinguished subfield generators
// ---------------------------------------------------------------------------

// Generator w of F_q = F_{p^e} over F_p inside the given field: w is a fixed
// deterministic element with F_p[w] = F_q.  Found through the norm map: the
// (p^D-1)/(p^e-1)-th power of an element lands in F_{p^e}; the first element
// in enumeration order whose power has exact degree e is used.
inline FieldElement prime_subfield_generator(const FieldPtr& field,
                                             const PrimePower& q) {
  const unsigned e = q.e;
  if (field->p() != q.p || field->degree() % e != 0)
    throw invalid_input("subfield generator: q does not divide the field");
  if (e == 1) return field->one();
  const BigInt exp =
      div_exact(field->order() - 1, pow_big(BigInt(q.p), e) - 1,
                "norm exponent");
  const PrimePower prime = PrimePower::make(q.p, 1);
  for (BigInt idx = 1; idx < field->order(); ++idx) {
    const FieldElement w = element_at(field, idx).pow(exp);
    if (w.is_zero()) continue;
    if (subfield_degree(w, prime, field->degree()) == e) return w;
  }
  throw integrity_error("subfield generator: none found");
}

// First nonzero element (enumeration order) of exact degree n over F_q;
// generates F_{q^n} over F_q.  The field must have absolute degree e*n.
inline FieldElement extension_generator(const FieldPtr& field,
                                        const PrimePower& q, unsigned n) {
  if (field->p() != q.p || field->degree() != q.e * n)
    throw invalid_input("extension generator: field must have order q^n");
  for (BigInt idx = 1; idx < field->order(); ++idx) {
    const FieldElement a = element_at(field, idx);
    if (subfield_degree(a, q, n) == n) return a;
  }
  throw integrity_error("extension generator: none found");
}

// ---------------------------------------------------------------------------
// Span closure (internal engine)
// ---------------------------------------------------------------------------

namespace detail {

// Computes dimensions of generated subalgebras on a flat coefficient
// representation: an m x m matrix over F_{p^D} is a vector of L = D*m*m
// residues mod p, entry (i,j) occupying the D slots starting at (i*m+j)*D.
// The engine is reused across many closure runs; all scratch space is
// instance-local, so distinct engines may run on distinct threads.
class ClosureEngine {
 public:
  using Flat = std::vector<std::uint32_t>;

  ClosureEngine(const FieldPtr& field, const PrimePower& q, unsigned n,
                unsigned m)
      : p_(static_cast<std::uint32_t>(field->p())),
        deg_(field->degree()),
        m_(m),
        dim_(static_cast<unsigned>(field->degree()) * m * m),
        lazy_acc_(field->p() < (std::uint64_t(1) << 15)) {
    if (field->p() >= (std::uint64_t(1) << 31))
      throw infeasible_error("span closure: characteristic too large");
    if (field->degree() != q.e * n)
      throw invalid_input("span closure: field degree mismatch");
    mod_.assign(field->modulus().begin(), field->modulus().end());
    w_coeffs_.assign(deg_, 0);
    const FieldElement w = prime_subfield_generator(field, q);
    for (unsigned i = 0; i < deg_; ++i)
      w_coeffs_[i] = static_cast<std::uint32_t>(w.coeffs()[i]);
    scratch_.assign(2 * std::size_t(deg_), 0);
    prod_.assign(dim_, 0);
  }

  unsigned dim() const { return dim_; }

  // Dimension over F_p of the unital F_q-subalgebra generated by the given
  // flat matrices.
  unsigned closure_dim(const std::vector<Flat>& tuple) {
    rows_.clear();
    pivots_.clear();
    reps_.clear();

    // Generators that drive the product worklist: the tuple entries plus
    // w*I (products with w*I sweep out F_q-scalar multiples).
    gens_.clear();
    gens_.reserve(tuple.size() + 1);
    Flat wi(dim_, 0);
    for (unsigned d = 0; d < m_; ++d)
      for (unsigned c = 0; c < deg_; ++c)
        wi[flat_off(d, d) + c] = w_coeffs_[c];
    gens_.push_back(std::move(wi));
    for (const Flat& t : tuple) {
      if (t.size() != dim_) throw invalid_input("span closure: flat size");
      gens_.push_back(t);
    }

    Flat ident(dim_, 0);
    for (unsigned d = 0; d < m_; ++d) ident[flat_off(d, d)] = 1;
    insert(ident);
    for (const Flat& g : gens_) {
      if (dim_reached()) return dim_;
      insert(g);
    }

    // Left-multiply every new basis representative by every generator.
    // Once stable, the span contains every product of generators (each
    // word grows by one letter on the left), i.e. the full subalgebra.
    for (std::size_t next = 0; next < reps_.size(); ++next) {
      if (dim_reached()) return dim_;
      const Flat rep = reps_[next];  // copy: reps_ may reallocate
      for (const Flat& g : gens_) {
        mul(g, rep, prod_);
        insert(prod_);
        if (dim_reached()) return dim_;
      }
    }
    return static_cast<unsigned>(rows_.size());
  }

  // Plain F_p-span dimension of {w^j * identity} U tuple, no products.
  unsigned plain_span_dim(const std::vector<Flat>& tuple) {
    rows_.clear();
    pivots_.clear();
    reps_.clear();
    Flat acc(dim_, 0);
    for (unsigned d = 0; d < m_; ++d) acc[flat_off(d, d)] = 1;
    // Powers of w on the diagonal: w^0 = 1 through the degree of w.
    Flat wj = acc;
    insert(wj);
    for (unsigned j = 1; j < deg_; ++j) {
      Flat next(dim_, 0);
      for (unsigned d = 0; d < m_; ++d)
        poly_mul_acc(&wj[flat_off(d, d)], w_coeffs_.data(),
                     &next[flat_off(d, d)]);
      wj = next;
      insert(wj);
    }
    for (const Flat& t : tuple) insert(t);
    return static_cast<unsigned>(rows_.size());
  }

  // Flatten a public matrix into engine representation.
  Flat flatten(const Matrix& mat) const {
    Flat out(dim_, 0);
    for (unsigned i = 0; i < m_; ++i)
      for (unsigned j = 0; j < m_; ++j) {
        const auto& c = mat.at(i, j).coeffs();
        for (unsigned k = 0; k < deg_; ++k)
          out[flat_off(i, j) + k] = static_cast<std::uint32_t>(c[k]);
      }
    return out;
  }

 private:
  static std::uint32_t inv_mod_p32(std::uint32_t a, std::uint32_t p) {
    std::uint64_t r = 1, b = a, e = p - 2;
    while (e) {
      if (e & 1) r = r * b % p;
      b = b * b % p;
      e >>= 1;
    }
    return static_cast<std::uint32_t>(r);
  }

  std::size_t flat_off(unsigned i, unsigned j) const {
    return (std::size_t(i) * m_ + j) * deg_;
  }

  bool dim_reached() const { return rows_.size() == dim_; }

  // scratch_ <- a * b as polynomials, reduced mod the field modulus, then
  // added into out (all length deg_).
  void poly_mul_acc(const std::uint32_t* a, const std::uint32_t* b,
                    std::uint32_t* out) {
    const unsigned d = deg_;
    std::uint64_t* s = scratch_.data();
    for (unsigned i = 0; i < 2 * d; ++i) s[i] = 0;
    if (lazy_acc_) {
      // p is small enough that d products fit in 64 bits unreduced.
      for (unsigned i = 0; i < d; ++i) {
        const std::uint64_t ai = a[i];
        if (!ai) continue;
        for (unsigned j = 0; j < d; ++j) s[i + j] += ai * b[j];
      }
    } else {
      for (unsigned i = 0; i < d; ++i) {
        const std::uint64_t ai = a[i];
        if (!ai) continue;
        for (unsigned j = 0; j < d; ++j) s[i + j] += ai * b[j] % p_;
      }
    }
    // Reduce by the monic modulus from the top down.
    for (unsigned k = 2 * d - 2; k >= d; --k) {
      const std::uint64_t c = s[k] % p_;
      if (c) {
        const std::uint64_t cneg = p_ - c;
        for (unsigned i = 0; i < d; ++i)
          s[k - d + i] += cneg * mod_[i] % p_;
      }
      if (k == d) break;
    }
    for (unsigned i = 0; i < d; ++i)
      out[i] = static_cast<std::uint32_t>((out[i] + s[i]) % p_);
  }

  // out <- a * b (matrix product on flat representations).
  void mul(const Flat& a, const Flat& b, Flat& out) {
    std::fill(out.begin(), out.end(), 0);
    for (unsigned i = 0; i < m_; ++i)
      for (unsigned k = 0; k < m_; ++k) {
        const std::uint32_t* aik = &a[flat_off(i, k)];
        bool zero = true;
        for (unsigned c = 0; c < deg_; ++c)
          if (aik[c]) {
            zero = false;
            break;
          }
        if (zero) continue;
        for (unsigned j = 0; j < m_; ++j)
          poly_mul_acc(aik, &b[flat_off(k, j)], &out[flat_off(i, j)]);
      }
  }

  // Reduced-row-echelon insert; returns true when v was independent.
  bool insert(const Flat& v) {
    red_ = v;
    for (std::size_t r = 0; r < rows_.size(); ++r) {
      const std::uint32_t c = red_[pivots_[r]];
      if (!c) continue;
      const std::uint64_t cneg = p_ - c;
      const Flat& row = rows_[r];
      for (unsigned i = 0; i < dim_; ++i)
        red_[i] =
            static_cast<std::uint32_t>((red_[i] + cneg * row[i]) % p_);
    }
    unsigned piv = dim_;
    for (unsigned i = 0; i < dim_; ++i)
      if (red_[i]) {
        piv = i;
        break;
      }
    if (piv == dim_) return false;
    const std::uint64_t s = inv_mod_p32(red_[piv], p_);
    for (unsigned i = 0; i < dim_; ++i)
      red_[i] = static_cast<std::uint32_t>(red_[i] * s % p_);
    // Keep earlier rows reduced against the new pivot.
    for (std::size_t r = 0; r < rows_.size(); ++r) {
      const std::uint32_t c = rows_[r][piv];
      if (!c) continue;
      const std::uint64_t cneg = p_ - c;
      Flat& row = rows_[r];
      for (unsigned i = 0; i < dim_; ++i)
        row[i] =
            static_cast<std::uint32_t>((row[i] + cneg * red_[i]) % p_);
    }
    rows_.push_back(red_);
    pivots_.push_back(piv);
    reps_.push_back(v);
    return true;
  }

  std::uint32_t p_;
  unsigned deg_;
  unsigned m_;
  unsigned dim_;
  bool lazy_acc_;
  std::vector<std::uint32_t> mod_;
  std::vector<std::uint32_t> w_coeffs_;

  std::vector<Flat> rows_;
  std::vector<unsigned> pivots_;
  std::vector<Flat> reps_;
  std::vector<Flat> gens_;
  std::vector<std::uint64_t> scratch_;
  Flat prod_;
  Flat red_;
};

}  // namespace detail

// F_p-dimension of the unital F_q-subalgebra of M_m(F_{q^n}) generated by
// the tuple entries.  Closure alternates F_p-linear span (with identity and
// w*identity seeded, w a generator of F_q over F_p) and products.
inline unsigned span_closure_dim(const MatrixTuple& t) {
  detail::ClosureEngine engine(t.field, t.q, t.n, t.m);
  std::vector<detail::ClosureEngine::Flat> flats;
  flats.reserve(t.mats.size());
  for (const Matrix& mm : t.mats) flats.push_back(engine.flatten(mm));
  return engine.closure_dim(flats);
}

inline bool generates_full(const MatrixTuple& t) {
  return span_closure_dim(t) == t.full_dim();
}

// Plain span dimension (no products) of the entries together with the
// F_q-scalar line; if this already equals full_dim, the tuple generates.
inline unsigned tuple_span_dim(const MatrixTuple& t) {
  detail::ClosureEngine engine(t.field, t.q, t.n, t.m);
  std::vector<detail::ClosureEngine::Flat> flats;
  flats.reserve(t.mats.size());
  for (const Matrix& mm : t.mats) flats.push_back(engine.flatten(mm));
  return engine.plain_span_dim(flats);
}

// ---------------------------------------------------------------------------
// The explicit generating pair
// ---------------------------------------------------------------------------

// Builds the pair
//   A = superdiagonal(alpha_1, ..., alpha_{m-1}),
//   B = (beta_{ij}) with beta_{m,1} overwritten to u * (alpha_1...alpha_{m-1})^{-1},
// which generates M_m(F_{q^n}) as an F_q-algebra for every admissible choice
// of nonzero alphas and arbitrary remaining betas.
inline std::pair<Matrix, Matrix> construct_pair(
    const PrimePower& q, unsigned n, unsigned m,
    const std::vector<FieldElement>& alphas,
    const std::vector<FieldElement>& beta_entries, const FieldElement& u) {
  if (m < 2) throw invalid_input("construct_pair: m must be >= 2");
  if (alphas.size() != std::size_t(m) - 1)
    throw invalid_input("construct_pair: need m-1 alphas");
  if (beta_entries.size() != std::size_t(m) * m)
    throw invalid_input("construct_pair: need m*m betas");
  const FieldPtr field = u.field();
  if (field->p() != q.p || field->degree() != q.e * n)
    throw invalid_input("construct_pair: field must have order q^n");
  if (u.is_zero() || subfield_degree(u, q, n) != n)
    throw invalid_input("construct_pair: u must generate the extension");

  for (const FieldElement& b : beta_entries)
    if (!b.field()->same_as(*field))
      throw field_mismatch("construct_pair: beta over a different field");

  FieldElement alpha_prod = field->one();
  for (const FieldElement& a : alphas) {
    if (!a.field()->same_as(*field))
      throw field_mismatch("construct_pair: alpha over a different field");
    if (a.is_zero()) throw invalid_input("construct_pair: zero alpha");
    alpha_prod = alpha_prod * a;
  }

  Matrix a_mat = zero_matrix(field, m);
  for (unsigned i = 0; i + 1 < m; ++i) a_mat.at(i, i + 1) = alphas[i];

  Matrix b_mat;
  b_mat.m = m;
  b_mat.entries = beta_entries;
  b_mat.at(m - 1, 0) = u * alpha_prod.inv();
  return {std::move(a_mat), std::move(b_mat)};
}

// The q pairs (A + gamma*I, B) for gamma running over F_q (as the span of
// powers of w), in a fixed deterministic order.
inline std::vector<std::pair<Matrix, Matrix>> shifted_family(
    const Matrix& a, const Matrix& b, const PrimePower& q) {
  detail::check_shapes(a, b);
  const FieldPtr field = a.field();
  const FieldElement w = prime_subfield_generator(field, q);
  // Enumerate gamma = sum_j c_j w^j, c in F_p^e, odometer on (c_0..c_{e-1}).
  std::vector<FieldElement> wpow;
  wpow.push_back(field->one());
  for (unsigned j = 1; j < q.e; ++j) wpow.push_back(wpow.back() * w);

  std::vector<std::pair<Matrix, Matrix>> out;
  std::vector<std::uint64_t> digits(q.e, 0);
  const Matrix ident = identity_matrix(field, a.m);
  for (;;) {
    FieldElement gamma = field->zero();
    for (unsigned j = 0; j < q.e; ++j) {
      if (!digits[j]) continue;
      std::vector<std::uint64_t> constant(field->degree(), 0);
      constant[0] = digits[j];
      gamma = gamma + field->element(constant) * wpow[j];
    }
    out.emplace_back(mat_add(a, mat_scale(ident, gamma)), b);
    std::size_t i = q.e;
    bool carry = true;
    while (i-- > 0) {
      if (++digits[i] < q.p) {
        carry = false;
        break;
      }
      digits[i] = 0;
    }
    if (carry) break;
  }
  return out;
}

// ---------------------------------------------------------------------------
// The automorphism group and its action
// ---------------------------------------------------------------------------

// An algebra automorphism of M_m(F_{q^n}) over F_q: entrywise q^k-power
// Frobenius followed by conjugation with an invertible matrix P, the latter
// canonicalized modulo scalars (first nonzero entry in row-major order
// scaled to 1).
struct Automorphism {
  unsigned frobenius_power = 0;  // k in [0, n)
  Matrix projective_matrix;

  bool is_identity() const {
    if (frobenius_power != 0) return false;
    const unsigned m = projective_matrix.m;
    const FieldPtr& f = projective_matrix.field();
    return projective_matrix == identity_matrix(f, m);
  }
};

// Streams all C = group_order_c(q,n,m) automorphisms: Frobenius powers in
// increasing order, canonical projective representatives in lexicographic
// order of their entry indices.
class AutomorphismStream {
 public:
  AutomorphismStream(const PrimePower& q, unsigned n, unsigned m,
                     FieldPtr field = nullptr,
                     std::uint64_t guard = kDefaultGuard)
      : q_(q), n_(n), m_(m) {
    if (n == 0 || m == 0)
      throw invalid_input("automorphisms: need n, m >= 1");
    field_ = field ? std::move(field) : make_field(q.p, q.e * n);
    if (field_->p() != q.p || field_->degree() != q.e * n)
      throw invalid_input("automorphisms: field must have order q^n");
    if (group_order_c(q, n, m) > Count(guard))
      throw infeasible_error("automorphism group exceeds the guard");
    // The candidate scan walks all matrices entry-indexed over F_{q^n}.
    const BigInt scan = pow_big(pow_big(BigInt(q.value), n), m * m);
    if (scan > BigInt(guard))
      throw infeasible_error("automorphism candidate scan exceeds the guard");
    order_ = static_cast<std::uint64_t>(pow_big(BigInt(q.value), n));
    one_index_ = static_cast<std::uint64_t>(element_index(field_->one()));
    digits_.assign(std::size_t(m) * m, 0);
    done_ = false;
  }

  std::optional<Automorphism> next() {
    while (!done_) {
      // Canonical iff the first nonzero entry is 1.
      std::uint64_t first = 0;
      for (std::uint64_t d : digits_) {
        if (d) {
          first = d;
          break;
        }
      }
      if (first == one_index_) {
        Matrix cand;
        cand.m = m_;
        cand.entries.reserve(std::size_t(m_) * m_);
        for (std::uint64_t d : digits_)
          cand.entries.push_back(element_at(field_, BigInt(d)));
        if (mat_inverse(cand).has_value()) {
          Automorphism out{k_, std::move(cand)};
          advance();
          return out;
        }
      }
      advance();
    }
    return std::nullopt;
  }

 private:
  void advance() {
    std::size_t i = digits_.size();
    while (i-- > 0) {
      if (++digits_[i] < order_) return;
      digits_[i] = 0;
    }
    if (++k_ >= n_) done_ = true;
  }

  PrimePower q_;
  unsigned n_, m_;
  FieldPtr field_;
  std::uint64_t order_ = 0;
  std::uint64_t one_index_ = 0;
  std::vector<std::uint64_t> digits_;
  unsigned k_ = 0;
  bool done_ = false;
};

inline std::vector<Automorphism> enumerate_automorphisms(
    const PrimePower& q, unsigned n, unsigned m, FieldPtr field = nullptr,
    std::uint64_t guard = kDefaultGuard) {
  AutomorphismStream stream(q, n, m, std::move(field), guard);
  std::vector<Automorphism> out;
  while (auto a = stream.next()) out.push_back(std::move(*a));
  if (Count(out.size()) != group_order_c(q, n, m))
    throw integrity_error("automorphism count mismatch");
  return out;
}

// phi(M) = P * M^(q^k) * P^{-1} applied to every tuple entry.
inline MatrixTuple apply_automorphism(const Automorphism& phi,
                                      const MatrixTuple& t) {
  const Matrix& pm = phi.projective_matrix;
  if (pm.m != t.m) throw invalid_input("apply: shape mismatch");
  if (!pm.field()->same_as(*t.field))
    throw field_mismatch("apply: automorphism over a different field");
  if (phi.frobenius_power >= t.n)
    throw invalid_input("apply: frobenius power out of range");
  const auto inv = mat_inverse(pm);
  if (!inv) throw invalid_input("apply: projective matrix is singular");
  MatrixTuple out = t;
  const unsigned steps = t.q.e * phi.frobenius_power;
  for (Matrix& mm : out.mats)
    mm = mat_mul(mat_mul(pm, mat_frobenius(mm, steps)), *inv);
  return out;
}

// The inverse automorphism: k' = (n-k) mod n and P' the canonical
// representative of sigma^{k'}(P^{-1}).
inline Automorphism automorphism_inverse(const Automorphism& phi,
                                         const PrimePower& q, unsigned n) {
  const unsigned k = phi.frobenius_power;
  const unsigned kinv = k == 0 ? 0 : n - k;
  const auto inv = mat_inverse(phi.projective_matrix);
  if (!inv) throw invalid_input("inverse: projective matrix is singular");
  Matrix pm = mat_frobenius(*inv, q.e * kinv);
  // Canonicalize: scale so the first nonzero entry is 1.
  for (const FieldElement& entry : pm.entries) {
    if (!entry.is_zero()) {
      pm = mat_scale(pm, entry.inv());
      break;
    }
  }
  return Automorphism{kinv, std::move(pm)};
}

// True iff only the identity automorphism fixes the tuple pointwise.
inline bool stabilizer_is_trivial(const MatrixTuple& t,
                                  std::uint64_t guard = kDefaultGuard) {
  AutomorphismStream stream(t.q, t.n, t.m, t.field, guard);
  while (auto phi = stream.next()) {
    if (phi->is_identity()) continue;
    if (apply_automorphism(*phi, t) == t) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// A distinguished non-generating witness
// ---------------------------------------------------------------------------

// The triple (E_{1,1}, E_{1,2}, E_{2,2}) over F_q (n = 1, m = 2): its
// stabilizer in the automorphism group is trivial, yet it generates only
// the 3-dimensional upper-triangular subalgebra -- freeness of the action
// on generating tuples does not extend to all tuples with free orbits.
inline MatrixTuple upper_triangular_triple(const PrimePower& q) {
  const FieldPtr field = make_field(q.p, q.e);
  std::vector<Matrix> mats;
  mats.push_back(elementary_matrix(field, 2, 0, 0));
  mats.push_back(elementary_matrix(field, 2, 0, 1));
  mats.push_back(elementary_matrix(field, 2, 1, 1));
  return make_matrix_tuple(q, 1, 2, std::move(mats));
}

}  // namespace sepgen
