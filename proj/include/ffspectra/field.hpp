#pragma once

// Exact arithmetic in GF(p^n), q = p^n <= 2^22.
//
// Elements are stored as their base-p encoding in the polynomial basis:
// the coefficient of x^i is the i-th base-p digit. Multiplication and
// inversion go through discrete log / antilog tables, built eagerly for
// q <= 2^16 and on first use above that. A table-free path (schoolbook
// multiplication modulo the defining polynomial) is kept alongside for
// construction and cross-checking.

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdint>
#include <memory>
#include <mutex>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ffspectra/error.hpp"

namespace ffspectra {

struct Elem {
  std::uint32_t v = 0;

  friend constexpr auto operator<=>(Elem, Elem) = default;
};

inline constexpr std::uint64_t kMaxFieldOrder = std::uint64_t{1} << 22;
inline constexpr std::uint64_t kEagerTableOrder = std::uint64_t{1} << 16;

namespace detail {

inline bool is_prime(std::uint64_t m) {
  if (m < 2) return false;
  for (std::uint64_t d = 2; d * d <= m; ++d)
    if (m % d == 0) return false;
  return true;
}

/// Distinct prime factors by trial division, ascending.
inline std::vector<std::uint64_t> prime_factors(std::uint64_t m) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t d = 2; d * d <= m; ++d) {
    if (m % d != 0) continue;
    out.push_back(d);
    while (m % d == 0) m /= d;
  }
  if (m > 1) out.push_back(m);
  return out;
}

inline std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) % m);
}

inline std::uint64_t powmod(std::uint64_t base, std::uint64_t e, std::uint64_t m) {
  if (m == 1) return 0;
  std::uint64_t r = 1;
  base %= m;
  while (e) {
    if (e & 1) r = mulmod(r, base, m);
    base = mulmod(base, base, m);
    e >>= 1;
  }
  return r;
}

/// Polynomials over GF(p), coefficients low degree first.
using PrimePoly = std::vector<std::uint32_t>;

inline void trim(PrimePoly& f) {
  while (!f.empty() && f.back() == 0) f.pop_back();
}

/// Remainder of a modulo a monic polynomial m.
inline PrimePoly poly_rem(PrimePoly a, const PrimePoly& m, std::uint32_t p) {
  trim(a);
  const std::size_t dm = m.size() - 1;
  while (a.size() > dm) {
    const std::uint64_t c = a.back();
    const std::size_t shift = a.size() - 1 - dm;
    if (c != 0) {
      for (std::size_t i = 0; i <= dm; ++i) {
        const std::uint64_t sub = (c * m[i]) % p;
        a[shift + i] = static_cast<std::uint32_t>((a[shift + i] + p - sub) % p);
      }
    }
    a.pop_back();
    trim(a);
  }
  return a;
}

/// Exhaustive search for a monic factor of degree 1..deg/2.
inline bool is_irreducible(const PrimePoly& f, std::uint32_t p) {
  const std::size_t deg = f.size() - 1;
  for (std::size_t k = 1; k <= deg / 2; ++k) {
    std::uint64_t count = 1;
    for (std::size_t i = 0; i < k; ++i) count *= p;
    PrimePoly g(k + 1, 0);
    g[k] = 1;
    for (std::uint64_t code = 0; code < count; ++code) {
      std::uint64_t c = code;
      for (std::size_t i = 0; i < k; ++i) {
        g[i] = static_cast<std::uint32_t>(c % p);
        c /= p;
      }
      if (poly_rem(f, g, p).empty()) return false;
    }
  }
  return true;
}

}  // namespace detail

class Field;
using FieldPtr = std::shared_ptr<const Field>;

FieldPtr mk_field(std::uint32_t p, unsigned n,
                  std::optional<std::vector<std::uint32_t>> modulus = std::nullopt);

/// Immutable description of GF(p^n). Construct through mk_field.
class Field : public std::enable_shared_from_this<Field> {
  struct Key {};
  friend FieldPtr mk_field(std::uint32_t, unsigned, std::optional<std::vector<std::uint32_t>>);

 public:
  Field(Key, std::uint32_t p, unsigned n, std::optional<std::vector<std::uint32_t>> modulus);

  Field(const Field&) = delete;
  Field& operator=(const Field&) = delete;

  std::uint32_t p() const noexcept { return p_; }
  unsigned n() const noexcept { return n_; }
  std::uint32_t q() const noexcept { return q_; }
  std::uint32_t order_minus_one() const noexcept { return q_ - 1; }
  bool is_binary() const noexcept { return p_ == 2; }

  /// Monic defining polynomial, n+1 coefficients, low degree first.
  const std::vector<std::uint32_t>& modulus() const noexcept { return modulus_; }
  Elem generator() const noexcept { return generator_; }
  const std::vector<std::uint64_t>& group_order_factors() const noexcept { return factors_; }

  bool has_log_tables() const noexcept { return tables_.load(std::memory_order_acquire) != nullptr; }
  /// Builds the log/antilog and addition tables if they are not there yet.
  void ensure_tables() const { (void)tables(); }

  Elem zero() const noexcept { return Elem{0}; }
  Elem one() const noexcept { return Elem{1}; }
  /// Element of the prime subfield with integer value c mod p.
  Elem prime(std::int64_t c) const noexcept {
    const std::int64_t r = ((c % p_) + p_) % p_;
    return Elem{static_cast<std::uint32_t>(r)};
  }
  Elem from_encoding(std::uint64_t code) const {
    if (code >= q_) throw Error(ErrorCode::InvalidArgument, "encoding " + std::to_string(code) + " out of range for q=" + std::to_string(q_));
    return Elem{static_cast<std::uint32_t>(code)};
  }
  /// The basis element x^i.
  Elem basis(unsigned i) const noexcept { return Elem{pow_p_[i]}; }
  std::uint32_t p_power(unsigned i) const noexcept { return pow_p_[i]; }

  std::vector<std::uint32_t> digits(Elem x) const;
  Elem from_digits(std::span<const std::uint32_t> digits) const;

  Elem add(Elem x, Elem y) const noexcept {
    if (p_ == 2) return Elem{x.v ^ y.v};
    if (n_ == 1) {
      const std::uint32_t s = x.v + y.v;
      return Elem{s >= p_ ? s - p_ : s};
    }
    const Tables& t = tables();
    const std::uint32_t xl = x.v % lo_size_, xh = x.v / lo_size_;
    const std::uint32_t yl = y.v % lo_size_, yh = y.v / lo_size_;
    return Elem{t.add_lo[xl * lo_size_ + yl] + lo_size_ * t.add_hi[xh * hi_size_ + yh]};
  }
  Elem neg(Elem x) const noexcept {
    if (p_ == 2) return x;
    if (n_ == 1) return Elem{x.v == 0 ? 0 : p_ - x.v};
    const Tables& t = tables();
    return Elem{t.neg_lo[x.v % lo_size_] + lo_size_ * t.neg_hi[x.v / lo_size_]};
  }
  Elem sub(Elem x, Elem y) const noexcept { return add(x, neg(y)); }

  Elem mul(Elem x, Elem y) const noexcept {
    if (x.v == 0 || y.v == 0) return Elem{0};
    const Tables& t = tables();
    return Elem{t.exp[t.log[x.v] + t.log[y.v]]};
  }
  /// Multiplication by an integer scalar (repeated addition in the prime subfield).
  Elem scale(Elem x, std::int64_t k) const noexcept { return mul(prime(k), x); }
  Elem inv(Elem x) const {
    if (x.v == 0) throw Error(ErrorCode::DivisionByZero, "inverse of zero");
    const Tables& t = tables();
    const std::uint32_t l = t.log[x.v];
    return Elem{t.exp[l == 0 ? 0 : (q_ - 1) - l]};
  }
  Elem div(Elem x, Elem y) const { return mul(x, inv(y)); }

  /// x^e. Nonzero bases reduce e mod q-1; 0^0 = 1 and 0^e = 0 for e > 0.
  Elem pow(Elem x, std::uint64_t e) const noexcept {
    if (e == 0) return one();
    if (x.v == 0) return zero();
    const Tables& t = tables();
    const std::uint64_t l = detail::mulmod(t.log[x.v], e % (q_ - 1), q_ - 1);
    return Elem{t.exp[l]};
  }

  /// Table-free multiplication modulo the defining polynomial.
  Elem mul_direct(Elem x, Elem y) const;
  /// Table-free square-and-multiply, same conventions as pow.
  Elem pow_direct(Elem x, std::uint64_t e) const;

  /// Discrete log to the base generator(); x must be nonzero.
  std::uint32_t log(Elem x) const {
    if (x.v == 0) throw Error(ErrorCode::DivisionByZero, "log of zero");
    return tables().log[x.v];
  }
  Elem exp(std::uint64_t k) const noexcept { return Elem{tables().exp[k % (q_ - 1)]}; }

  /// x^(p^i); frobenius(x, n) == x.
  Elem frobenius(Elem x, std::uint64_t i) const noexcept {
    if (x.v == 0) return x;
    const Tables& t = tables();
    const std::uint64_t l = detail::mulmod(t.log[x.v], pow_p_[i % n_], q_ - 1);
    return Elem{t.exp[l]};
  }

  Elem abs_trace(Elem x) const noexcept {
    Elem acc = zero();
    for (unsigned i = 0; i < n_; ++i) acc = add(acc, frobenius(x, i));
    return acc;
  }
  /// Relative trace to GF(p^d); d must divide n.
  Elem rel_trace(Elem x, unsigned d) const;
  bool in_subfield(Elem x, unsigned d) const noexcept { return frobenius(x, d) == x; }

  /// Quadratic character: 0 at 0, +1 on nonzero squares, -1 otherwise.
  int quad_char(Elem x) const;
  /// Same value through x^((q-1)/2), without the log-parity shortcut.
  int quad_char_by_power(Elem x) const;

  /// Human-readable form of the modulus, e.g. "x^3+x+1".
  std::string modulus_string() const;

 private:
  struct Tables {
    std::vector<std::uint32_t> log;  // log[0] unused
    std::vector<std::uint32_t> exp;  // length 2(q-1), exp[k] = g^k
    std::vector<std::uint32_t> add_lo, add_hi, neg_lo, neg_hi;
  };

  const Tables& tables() const noexcept {
    const Tables* t = tables_.load(std::memory_order_acquire);
    if (t != nullptr) return *t;
    std::call_once(tables_once_, [this] { build_tables(); });
    return *tables_.load(std::memory_order_acquire);
  }
  void build_tables() const;
  Elem find_generator() const;

  std::uint32_t p_;
  unsigned n_;
  std::uint32_t q_;
  std::vector<std::uint32_t> modulus_;
  std::vector<std::uint32_t> pow_p_;  // p^0 .. p^n
  std::uint64_t binary_modulus_ = 0;  // bit mask of the modulus when p == 2
  std::uint32_t lo_size_ = 1, hi_size_ = 1;
  Elem generator_{};
  std::vector<std::uint64_t> factors_;

  mutable std::once_flag tables_once_;
  mutable std::unique_ptr<Tables> owned_tables_;
  mutable std::atomic<const Tables*> tables_{nullptr};
};

// ---------------------------------------------------------------------------

inline Field::Field(Key, std::uint32_t p, unsigned n, std::optional<std::vector<std::uint32_t>> modulus)
    : p_(p), n_(n) {
  if (!detail::is_prime(p)) throw Error(ErrorCode::NotPrime, std::to_string(p) + " is not prime");
  if (n == 0) throw Error(ErrorCode::DegreeMismatch, "extension degree must be >= 1");
  std::uint64_t q = 1;
  for (unsigned i = 0; i < n; ++i) {
    q *= p;
    if (q > kMaxFieldOrder) throw Error(ErrorCode::FieldTooLarge, "p^n exceeds 2^22");
  }
  q_ = static_cast<std::uint32_t>(q);
  pow_p_.resize(n + 1);
  pow_p_[0] = 1;
  for (unsigned i = 1; i <= n; ++i) pow_p_[i] = pow_p_[i - 1] * p;

  if (modulus) {
    auto m = *modulus;
    if (m.size() != n + 1 || m.back() != 1)
      throw Error(ErrorCode::DegreeMismatch, "modulus must be monic of degree " + std::to_string(n));
    for (auto c : m)
      if (c >= p) throw Error(ErrorCode::InvalidArgument, "modulus coefficient out of range");
    if (!detail::is_irreducible(m, p)) throw Error(ErrorCode::ReducibleModulus, "modulus is reducible over GF(" + std::to_string(p) + ")");
    modulus_ = std::move(m);
  } else {
    // Smallest irreducible by the base-p value of the lower coefficients.
    detail::PrimePoly cand(n + 1, 0);
    cand[n] = 1;
    for (std::uint64_t code = 0; code < q; ++code) {
      std::uint64_t c = code;
      for (unsigned i = 0; i < n; ++i) {
        cand[i] = static_cast<std::uint32_t>(c % p);
        c /= p;
      }
      if (detail::is_irreducible(cand, p)) {
        modulus_ = cand;
        break;
      }
    }
  }

  if (p == 2) {
    for (unsigned i = 0; i <= n; ++i)
      if (modulus_[i]) binary_modulus_ |= std::uint64_t{1} << i;
  } else if (n > 1) {
    lo_size_ = pow_p_[n / 2];
    hi_size_ = pow_p_[n - n / 2];
  }

  factors_ = detail::prime_factors(q_ - 1);
  generator_ = find_generator();
  if (q_ <= kEagerTableOrder) ensure_tables();
}

inline FieldPtr mk_field(std::uint32_t p, unsigned n, std::optional<std::vector<std::uint32_t>> modulus) {
  return std::make_shared<Field>(Field::Key{}, p, n, std::move(modulus));
}

inline std::vector<std::uint32_t> Field::digits(Elem x) const {
  std::vector<std::uint32_t> d(n_);
  std::uint32_t v = x.v;
  for (unsigned i = 0; i < n_; ++i) {
    d[i] = v % p_;
    v /= p_;
  }
  return d;
}

inline Elem Field::from_digits(std::span<const std::uint32_t> d) const {
  std::uint32_t v = 0;
  for (std::size_t i = d.size(); i-- > 0;) v = v * p_ + (d[i] % p_);
  return Elem{v};
}

inline Elem Field::mul_direct(Elem x, Elem y) const {
  if (p_ == 2) {
    std::uint64_t r = 0;
    for (unsigned i = 0; i < n_; ++i)
      if ((y.v >> i) & 1u) r ^= std::uint64_t{x.v} << i;
    for (int k = 2 * static_cast<int>(n_) - 2; k >= static_cast<int>(n_); --k)
      if ((r >> k) & 1u) r ^= binary_modulus_ << (k - n_);
    return Elem{static_cast<std::uint32_t>(r)};
  }
  if (n_ == 1) return Elem{static_cast<std::uint32_t>((std::uint64_t{x.v} * y.v) % p_)};
  const auto a = digits(x), b = digits(y);
  std::vector<std::uint64_t> r(2 * n_ - 1, 0);
  for (unsigned i = 0; i < n_; ++i) {
    if (a[i] == 0) continue;
    for (unsigned j = 0; j < n_; ++j) r[i + j] = (r[i + j] + std::uint64_t{a[i]} * b[j]) % p_;
  }
  for (std::size_t k = r.size(); k-- > n_;) {
    const std::uint64_t c = r[k];
    if (c == 0) continue;
    for (unsigned i = 0; i <= n_; ++i) {
      const std::uint64_t sub = (c * modulus_[i]) % p_;
      r[k - n_ + i] = (r[k - n_ + i] + p_ - sub) % p_;
    }
  }
  std::uint32_t v = 0;
  for (unsigned i = n_; i-- > 0;) v = v * p_ + static_cast<std::uint32_t>(r[i]);
  return Elem{v};
}

inline Elem Field::pow_direct(Elem x, std::uint64_t e) const {
  if (e == 0) return one();
  if (x.v == 0) return zero();
  e %= (q_ - 1);
  Elem r = one();
  while (e) {
    if (e & 1) r = mul_direct(r, x);
    x = mul_direct(x, x);
    e >>= 1;
  }
  return r;
}

inline Elem Field::find_generator() const {
  const std::uint64_t order = q_ - 1;
  for (std::uint32_t c = 1; c < q_; ++c) {
    bool ok = true;
    for (auto r : factors_) {
      if (pow_direct(Elem{c}, order / r) == one()) {
        ok = false;
        break;
      }
    }
    if (ok) return Elem{c};
  }
  throw Error(ErrorCode::InvalidArgument, "no generator found");
}

inline void Field::build_tables() const {
  auto t = std::make_unique<Tables>();
  const std::uint32_t order = q_ - 1;
  t->log.assign(q_, 0);
  t->exp.assign(2 * std::size_t{order}, 0);
  Elem cur = one();
  for (std::uint32_t k = 0; k < order; ++k) {
    t->exp[k] = cur.v;
    t->log[cur.v] = k;
    cur = mul_direct(cur, generator_);
  }
  for (std::uint32_t k = order; k < 2 * order; ++k) t->exp[k] = t->exp[k - order];

  if (p_ != 2 && n_ > 1) {
    auto build = [this](std::uint32_t size, std::vector<std::uint32_t>& add, std::vector<std::uint32_t>& neg) {
      add.assign(std::size_t{size} * size, 0);
      neg.assign(size, 0);
      std::vector<std::uint32_t> dx, dy;
      auto split = [this](std::uint32_t v, std::vector<std::uint32_t>& d, std::uint32_t size) {
        d.clear();
        for (std::uint32_t s = 1; s < size; s *= p_) {
          d.push_back(v % p_);
          v /= p_;
        }
      };
      for (std::uint32_t x = 0; x < size; ++x) {
        split(x, dx, size);
        std::uint32_t nv = 0;
        for (std::size_t i = dx.size(); i-- > 0;) nv = nv * p_ + (dx[i] == 0 ? 0 : p_ - dx[i]);
        neg[x] = nv;
        for (std::uint32_t y = 0; y < size; ++y) {
          split(y, dy, size);
          std::uint32_t sv = 0;
          for (std::size_t i = dx.size(); i-- > 0;) {
            std::uint32_t s = dx[i] + dy[i];
            if (s >= p_) s -= p_;
            sv = sv * p_ + s;
          }
          add[std::size_t{x} * size + y] = sv;
        }
      }
    };
    build(lo_size_, t->add_lo, t->neg_lo);
    build(hi_size_, t->add_hi, t->neg_hi);
  }
  owned_tables_ = std::move(t);
  tables_.store(owned_tables_.get(), std::memory_order_release);
}

inline Elem Field::rel_trace(Elem x, unsigned d) const {
  if (d == 0 || n_ % d != 0)
    throw Error(ErrorCode::NotADivisor, std::to_string(d) + " does not divide " + std::to_string(n_));
  Elem acc = zero();
  for (unsigned i = 0; i < n_ / d; ++i) acc = add(acc, frobenius(x, std::uint64_t{d} * i));
  return acc;
}

inline int Field::quad_char(Elem x) const {
  if (p_ == 2) throw Error(ErrorCode::EvenCharacteristic, "quadratic character needs odd p");
  if (x.v == 0) return 0;
  return (log(x) % 2 == 0) ? 1 : -1;
}

inline int Field::quad_char_by_power(Elem x) const {
  if (p_ == 2) throw Error(ErrorCode::EvenCharacteristic, "quadratic character needs odd p");
  if (x.v == 0) return 0;
  return pow_direct(x, (q_ - 1) / 2) == one() ? 1 : -1;
}

inline std::string Field::modulus_string() const {
  std::string out;
  for (std::size_t i = modulus_.size(); i-- > 0;) {
    const auto c = modulus_[i];
    if (c == 0) continue;
    if (!out.empty()) out += "+";
    if (c != 1 || i == 0) out += std::to_string(c);
    if (i > 0) {
      if (c != 1) out += "*";
      out += "x";
      if (i > 1) out += "^" + std::to_string(i);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

/// An element bound to its field; arithmetic between different fields throws.
class FieldElement {
 public:
  FieldElement(FieldPtr field, Elem value) : field_(std::move(field)), value_(value) {
    if (value_.v >= field_->q()) throw Error(ErrorCode::InvalidArgument, "encoding out of range");
  }

  const FieldPtr& field() const noexcept { return field_; }
  Elem value() const noexcept { return value_; }
  std::uint32_t encoding() const noexcept { return value_.v; }

  friend FieldElement operator+(const FieldElement& x, const FieldElement& y) {
    check(x, y);
    return {x.field_, x.field_->add(x.value_, y.value_)};
  }
  friend FieldElement operator-(const FieldElement& x, const FieldElement& y) {
    check(x, y);
    return {x.field_, x.field_->sub(x.value_, y.value_)};
  }
  friend FieldElement operator*(const FieldElement& x, const FieldElement& y) {
    check(x, y);
    return {x.field_, x.field_->mul(x.value_, y.value_)};
  }
  friend FieldElement operator/(const FieldElement& x, const FieldElement& y) {
    check(x, y);
    return {x.field_, x.field_->div(x.value_, y.value_)};
  }
  FieldElement operator-() const { return {field_, field_->neg(value_)}; }
  FieldElement inv() const { return {field_, field_->inv(value_)}; }
  FieldElement pow(std::uint64_t e) const { return {field_, field_->pow(value_, e)}; }
  FieldElement frobenius(std::uint64_t i) const { return {field_, field_->frobenius(value_, i)}; }

  friend bool operator==(const FieldElement& x, const FieldElement& y) {
    check(x, y);
    return x.value_ == y.value_;
  }

 private:
  static void check(const FieldElement& x, const FieldElement& y) {
    if (x.field_.get() != y.field_.get())
      throw Error(ErrorCode::ContextMismatch, "elements belong to different field contexts");
  }

  FieldPtr field_;
  Elem value_;
};

/// Parses "123" (encoding) or "g^k" (power of the generator).
inline Elem parse_element(const Field& f, std::string_view text) {
  auto trim_view = [](std::string_view s) {
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
    return s;
  };
  text = trim_view(text);
  auto parse_uint = [&](std::string_view s) -> std::uint64_t {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size())
      throw Error(ErrorCode::ParseError, "bad element literal '" + std::string(text) + "'");
    return v;
  };
  if (text == "g") return f.generator();
  if (text.starts_with("g^")) return f.pow(f.generator(), parse_uint(text.substr(2)));
  return f.from_encoding(parse_uint(text));
}

}  // namespace ffspectra
