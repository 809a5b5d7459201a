#pragma once

// Root finding for the structured equations that the spectrum formulas reduce
// to: affine trinomials X^(p^k) - A X - B, characteristic-2 quadratics and
// cubics, and linearized (GF(p)-linear) maps.

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "ffspectra/error.hpp"
#include "ffspectra/field.hpp"
#include "ffspectra/linalg.hpp"

namespace ffspectra {

/// Roots of an equation plus the case that produced them.
struct SolveOutcome {
  std::vector<Elem> roots;  // ascending encoding
  std::string certificate;
  std::vector<std::pair<std::string, std::uint64_t>> quantities;

  std::optional<std::uint64_t> quantity(std::string_view name) const {
    for (const auto& [k, v] : quantities)
      if (k == name) return v;
    return std::nullopt;
  }
};

namespace detail {

inline void sort_unique(std::vector<Elem>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

/// All elements of the subfield GF(p^d), ascending.
inline std::vector<Elem> subfield_elements(const Field& f, unsigned d) {
  std::vector<Elem> out;
  if (d == f.n()) {
    out.reserve(f.q());
    for (std::uint32_t v = 0; v < f.q(); ++v) out.push_back(Elem{v});
    return out;
  }
  const std::uint64_t sub_order = detail::powmod(f.p(), d, std::uint64_t{1} << 62) - 1;
  const std::uint64_t step = (f.q() - 1) / sub_order;
  out.push_back(f.zero());
  for (std::uint64_t j = 0; j < sub_order; ++j) out.push_back(f.exp(j * step));
  sort_unique(out);
  return out;
}

/// sum_{j=lo}^{hi} p^(k j) reduced mod q-1 (empty sum is 0).
inline std::uint64_t frobenius_exponent_sum(const Field& f, std::uint64_t k, std::uint64_t lo, std::uint64_t hi) {
  const std::uint64_t mod = f.q() - 1;
  if (mod == 1) return 0;
  std::uint64_t acc = 0;
  for (std::uint64_t j = lo; j <= hi; ++j)
    acc = (acc + detail::powmod(f.p(), (k * j) % f.n(), mod)) % mod;
  return acc;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Affine trinomials

/// X^(p^k) - A X - B over the given field.
struct TrinomialInstance {
  std::uint64_t k = 0;
  Elem A{};
  Elem B{};
};

inline Elem trinomial_value(const Field& f, const TrinomialInstance& t, Elem x) {
  return f.sub(f.sub(f.frobenius(x, t.k), f.mul(t.A, x)), t.B);
}

struct TrinomialSequences {
  unsigned d = 0;  // gcd(k, n)
  unsigned m = 0;  // n / d
  std::vector<Elem> alpha;  // alpha_0 .. alpha_{m-1}
  std::vector<Elem> beta;   // beta_0 .. beta_{m-1}
};

/// alpha_r = A alpha_{r-1}^(p^k), beta_r = A^(p^(kr)) beta_{r-1} + B^(p^(kr)).
inline TrinomialSequences trinomial_sequences(const Field& f, const TrinomialInstance& t) {
  TrinomialSequences s;
  s.d = static_cast<unsigned>(std::gcd(t.k % f.n(), std::uint64_t{f.n()}));
  if (s.d == 0) s.d = f.n();
  s.m = f.n() / s.d;
  s.alpha.push_back(t.A);
  s.beta.push_back(t.B);
  for (unsigned r = 1; r < s.m; ++r) {
    s.alpha.push_back(f.mul(t.A, f.frobenius(s.alpha.back(), t.k)));
    const std::uint64_t kr = t.k * r;
    s.beta.push_back(f.add(f.mul(f.frobenius(t.A, kr), s.beta.back()), f.frobenius(t.B, kr)));
  }
  return s;
}

/// Same sequences straight from the exponent sums, for cross-checking.
inline TrinomialSequences trinomial_sequences_direct(const Field& f, const TrinomialInstance& t) {
  TrinomialSequences s;
  s.d = static_cast<unsigned>(std::gcd(t.k % f.n(), std::uint64_t{f.n()}));
  if (s.d == 0) s.d = f.n();
  s.m = f.n() / s.d;
  for (unsigned r = 0; r < s.m; ++r) {
    s.alpha.push_back(f.pow(t.A, detail::frobenius_exponent_sum(f, t.k, 0, r)));
    Elem beta = f.zero();
    for (unsigned i = 0; i <= r; ++i) {
      // s_i = sum_{j=i}^{r-1} p^(k(j+1)), s_r = 0
      const std::uint64_t si = i == r ? 0 : detail::frobenius_exponent_sum(f, t.k, i + 1, r);
      beta = f.add(beta, f.mul(i == r ? f.one() : f.pow(t.A, si), f.frobenius(t.B, t.k * i)));
    }
    s.beta.push_back(beta);
  }
  return s;
}

/// Smallest-encoding tau with tau^(p^k - 1) = A, if one exists.
inline std::optional<Elem> frobenius_root(const Field& f, std::uint64_t k, Elem A) {
  if (A.v == 0) return std::nullopt;
  const std::uint64_t order = f.q() - 1;
  if (order == 1) return f.one();
  const std::uint64_t e = (detail::powmod(f.p(), k % f.n(), order) + order - 1) % order;
  const std::uint64_t la = f.log(A);
  const std::uint64_t g = std::gcd(e, order);  // gcd(0, order) = order
  if (la % g != 0) return std::nullopt;
  // t * (e/g) = la/g  (mod order/g)
  const std::uint64_t mod = order / g;
  std::uint64_t t0 = 0;
  if (mod > 1) {
    // inverse of e/g modulo mod via extended Euclid
    std::int64_t r0 = static_cast<std::int64_t>(mod), r1 = static_cast<std::int64_t>((e / g) % mod);
    std::int64_t s0 = 0, s1 = 1;
    while (r1 != 0) {
      const std::int64_t qq = r0 / r1;
      std::tie(r0, r1) = std::make_pair(r1, r0 - qq * r1);
      std::tie(s0, s1) = std::make_pair(s1, s0 - qq * s1);
    }
    const std::uint64_t inv = static_cast<std::uint64_t>(((s0 % static_cast<std::int64_t>(mod)) + static_cast<std::int64_t>(mod)) % static_cast<std::int64_t>(mod));
    t0 = detail::mulmod((la / g) % mod, inv, mod);
  }
  Elem best = f.exp(t0);
  for (std::uint64_t j = 1; j < g; ++j) best = std::min(best, f.exp(t0 + j * mod));
  return best;
}

/// All roots of X^(p^k) - A X - B in GF(p^n), A != 0.
inline SolveOutcome solve_trinomial(const Field& f, const TrinomialInstance& t) {
  if (t.A.v == 0) throw Error(ErrorCode::ZeroLeadingCoefficient, "trinomial needs A != 0");
  const TrinomialSequences seq = trinomial_sequences(f, t);
  const TrinomialSequences direct = trinomial_sequences_direct(f, t);
  if (seq.alpha.back() != direct.alpha.back() || seq.beta.back() != direct.beta.back())
    throw Error(ErrorCode::InvalidArgument, "trinomial sequences disagree with their definition");

  const Elem alpha = seq.alpha.back(), beta = seq.beta.back();
  SolveOutcome out;
  out.quantities = {{"d", seq.d}, {"m", seq.m}, {"alpha", alpha.v}, {"beta", beta.v}};

  if (alpha != f.one()) {
    out.certificate = "unique";
    out.roots.push_back(f.div(beta, f.sub(f.one(), alpha)));
    return out;
  }
  if (beta.v != 0) {
    out.certificate = "no-root";
    return out;
  }

  out.certificate = "p^d-family";
  const unsigned m = seq.m;
  Elem c{};
  bool found = false;
  for (unsigned j = 0; j < f.n() && !found; ++j) {
    if (f.rel_trace(f.basis(j), seq.d).v != 0) {
      c = f.basis(j);
      found = true;
    }
  }
  if (!found) throw Error(ErrorCode::InvalidArgument, "no basis element with nonzero relative trace");

  // t_i = sum_{j=i}^{m-2} p^(k(j+1)); s_i for r = m-1 is the same sum.
  const std::uint64_t order = f.q() - 1;
  std::vector<std::uint64_t> t_exp(m), s_exp(m);
  for (unsigned i = 0; i < m; ++i) {
    for (unsigned j = i; j + 2 <= m; ++j)
      t_exp[i] = (t_exp[i] + detail::powmod(f.p(), (t.k * (j + 1)) % f.n(), order)) % order;
    s_exp[i] = i + 1 == m ? 0 : detail::frobenius_exponent_sum(f, t.k, i + 1, m - 1);
  }
  if (t_exp != s_exp) throw Error(ErrorCode::InvalidArgument, "t_i and s_i differ");

  Elem x = f.zero();
  Elem partial = f.zero();
  for (unsigned i = 0; i < m; ++i) {
    partial = f.add(partial, f.frobenius(c, t.k * i));
    x = f.add(x, f.mul(f.mul(partial, f.pow(t.A, t_exp[i])), f.frobenius(t.B, t.k * i)));
  }
  x = f.div(x, f.rel_trace(c, seq.d));

  const auto tau = frobenius_root(f, t.k, t.A);
  if (!tau) throw Error(ErrorCode::InvalidArgument, "A has no (p^k-1)-th root");
  for (Elem delta : detail::subfield_elements(f, seq.d)) out.roots.push_back(f.add(x, f.mul(delta, *tau)));
  detail::sort_unique(out.roots);
  out.quantities.push_back({"c", c.v});
  out.quantities.push_back({"tau", tau->v});
  out.quantities.push_back({"x", x.v});
  return out;
}

// ---------------------------------------------------------------------------
// Linearized maps

struct LinearTerm {
  Elem coef;
  unsigned frob;  // the term is coef * X^(p^frob)
};

/// L(X) = sum coef_i X^(p^i), plus an optional constant offset.
struct LinearizedMap {
  std::vector<LinearTerm> terms;
  Elem offset{};

  Elem apply_linear(const Field& f, Elem x) const {
    Elem acc = f.zero();
    for (const auto& t : terms) acc = f.add(acc, f.mul(t.coef, f.frobenius(x, t.frob)));
    return acc;
  }
  Elem apply(const Field& f, Elem x) const { return f.add(apply_linear(f, x), offset); }

  /// GF(p)-matrix of the linear part in the polynomial basis.
  PrimeMatrix matrix(const Field& f) const {
    std::vector<Elem> cols;
    cols.reserve(f.n());
    for (unsigned j = 0; j < f.n(); ++j) cols.push_back(apply_linear(f, f.basis(j)));
    return PrimeMatrix::from_columns(f, cols);
  }
};

struct KernelResult {
  unsigned dim = 0;
  std::vector<Elem> basis;
};

inline KernelResult linearized_kernel(const Field& f, const LinearizedMap& L) {
  KernelResult out;
  for (const auto& v : null_space(L.matrix(f))) out.basis.push_back(f.from_digits(v));
  out.dim = static_cast<unsigned>(out.basis.size());
  return out;
}

/// Every GF(p)-combination of the basis, ascending.
inline std::vector<Elem> span_elements(const Field& f, const std::vector<Elem>& basis) {
  std::vector<Elem> out{f.zero()};
  for (Elem b : basis) {
    const std::size_t size = out.size();
    for (std::uint32_t c = 1; c < f.p(); ++c)
      for (std::size_t i = 0; i < size; ++i) out.push_back(f.add(out[i], f.scale(b, c)));
  }
  detail::sort_unique(out);
  return out;
}

struct AffineSolveResult {
  std::uint64_t count = 0;  // 0 or p^kernel_dim
  std::optional<Elem> solution;
  unsigned kernel_dim = 0;
};

/// Solves L(X) = delta, i.e. linear part = delta - offset.
inline AffineSolveResult affine_solution_count(const Field& f, const LinearizedMap& L, Elem delta) {
  const PrimeMatrix m = L.matrix(f);
  AffineSolveResult out;
  out.kernel_dim = static_cast<unsigned>(f.n() - rref(m).rank());
  const auto sol = solve(m, f.digits(f.sub(delta, L.offset)));
  if (!sol) return out;
  out.solution = f.from_digits(*sol);
  out.count = detail::powmod(f.p(), out.kernel_dim, std::uint64_t{1} << 62);
  return out;
}

// ---------------------------------------------------------------------------
// Characteristic 2

/// Roots of X^2 + aX + b over GF(2^n), a != 0.
inline SolveOutcome solve_quadratic_char2(const Field& f, Elem a, Elem b) {
  if (f.p() != 2) throw Error(ErrorCode::OddCharacteristic, "quadratic solver needs characteristic 2");
  if (a.v == 0) throw Error(ErrorCode::ZeroLinearCoefficient, "X^2 + aX + b needs a != 0");
  // X = aY turns the equation into Y^2 + Y = c.
  const Elem c = f.div(b, f.mul(a, a));
  const Elem tr = f.abs_trace(c);
  SolveOutcome out;
  out.quantities = {{"trace", tr.v}};
  if (tr.v != 0) {
    out.certificate = "no-root";
    return out;
  }
  Elem y{};
  if (f.n() % 2 == 1) {
    out.certificate = "half-trace";
    for (unsigned i = 0; 2 * i < f.n(); ++i) y = f.add(y, f.frobenius(c, 2 * i));
  } else {
    out.certificate = "linear-system";
    const LinearizedMap L{{{f.one(), 1}, {f.one(), 0}}, f.zero()};
    const auto s = affine_solution_count(f, L, c);
    y = *s.solution;
  }
  out.roots = {f.mul(a, y), f.mul(a, f.add(y, f.one()))};
  detail::sort_unique(out.roots);
  return out;
}

/// GF(p^(2n)) with an embedding of a given GF(p^n).
struct QuadraticExtension {
  FieldPtr big;
  std::vector<Elem> basis_image;  // image of x^i, i < n

  Elem embed(const Field& small, Elem x) const {
    const auto d = small.digits(x);
    Elem acc = big->zero();
    for (unsigned i = 0; i < d.size(); ++i)
      if (d[i] != 0) acc = big->add(acc, big->scale(basis_image[i], d[i]));
    return acc;
  }
};

inline std::shared_ptr<const QuadraticExtension> build_quadratic_extension(const Field& small) {
  auto ext = std::make_shared<QuadraticExtension>();
  ext->big = mk_field(small.p(), 2 * small.n());
  const Field& big = *ext->big;
  // A root of the small modulus inside the order-q subfield of the big field.
  const std::uint64_t step = (std::uint64_t{big.q()} - 1) / (small.q() - 1);
  const auto& mod = small.modulus();
  std::optional<Elem> root;
  for (std::uint64_t j = 0; j < small.q() && !root; ++j) {
    const Elem y = j == 0 ? big.zero() : big.exp((j - 1) * step);
    Elem acc = big.zero();
    for (std::size_t i = mod.size(); i-- > 0;) acc = big.add(big.mul(acc, y), big.prime(mod[i]));
    if (acc.v == 0) root = y;
  }
  if (!root) throw Error(ErrorCode::InvalidArgument, "modulus has no root in the quadratic extension");
  for (unsigned i = 0; i < small.n(); ++i) ext->basis_image.push_back(big.pow(*root, i));
  return ext;
}

/// Cached per (p, n, modulus); the big field uses the default modulus.
inline std::shared_ptr<const QuadraticExtension> quadratic_extension(const Field& small) {
  static std::mutex mutex;
  static std::map<std::vector<std::uint32_t>, std::shared_ptr<const QuadraticExtension>> cache;
  std::vector<std::uint32_t> key = small.modulus();
  key.push_back(small.p());
  std::lock_guard lock(mutex);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  auto ext = build_quadratic_extension(small);
  cache.emplace(std::move(key), ext);
  return ext;
}

enum class CubicShape { Linear3, LinearQuadratic, Irreducible };

inline const char* to_string(CubicShape s) {
  switch (s) {
    case CubicShape::Linear3: return "(1,1,1)";
    case CubicShape::LinearQuadratic: return "(1,2)";
    case CubicShape::Irreducible: return "(3)";
  }
  return "?";
}

struct CubicOutcome {
  CubicShape shape{};
  std::vector<Elem> roots;  // roots in GF(2^n), ascending
  Elem trace_inv_a{};
  Elem trace_one{};
  std::optional<bool> t_cubes;  // set when the trace test passes
  bool t_in_base = false;       // t^2 + a t + 1 splits over GF(2^n)
};

/// Factorization shape of X^3 + X + a over GF(2^n) from the trace and cube
/// tests; the roots come from the kernel of X^4 + X^2 + aX.
inline CubicOutcome classify_cubic_char2(const Field& f, Elem a) {
  if (f.p() != 2) throw Error(ErrorCode::OddCharacteristic, "cubic classifier needs characteristic 2");
  if (a.v == 0) throw Error(ErrorCode::ZeroConstant, "X^3 + X + a needs a != 0");
  CubicOutcome out;
  out.trace_inv_a = f.abs_trace(f.inv(a));
  out.trace_one = f.abs_trace(f.one());
  if (out.trace_inv_a != out.trace_one) {
    out.shape = CubicShape::LinearQuadratic;
  } else {
    // t1, t2: roots of t^2 + a t + 1, split over GF(2^n) iff Tr(1/a) = 0.
    out.t_in_base = out.trace_inv_a.v == 0;
    bool cubes = false;
    if (out.t_in_base) {
      const auto t = solve_quadratic_char2(f, a, f.one());
      cubes = f.pow(t.roots.front(), (f.q() - 1) / 3) == f.one();
    } else {
      const auto ext = quadratic_extension(f);
      const Field& big = *ext->big;
      const auto t = solve_quadratic_char2(big, ext->embed(f, a), big.one());
      cubes = big.pow(t.roots.front(), (big.q() - 1) / 3) == big.one();
    }
    out.t_cubes = cubes;
    out.shape = cubes ? CubicShape::Linear3 : CubicShape::Irreducible;
  }
  const LinearizedMap L{{{f.one(), 2}, {f.one(), 1}, {a, 0}}, f.zero()};
  for (Elem r : span_elements(f, linearized_kernel(f, L).basis))
    if (r.v != 0) out.roots.push_back(r);
  return out;
}

// ---------------------------------------------------------------------------

struct CompanionResult {
  unsigned rank = 0;        // rank of E1
  unsigned kernel_dim = 0;  // t - rank
};

/// Kernel dimension of T(Y) = Y^(2^t) + A Y^2 + (1+A) Y through the rank of
/// E1 = C_T C_T^(2) ... C_T^(2^(n-1)) - I.
inline CompanionResult companion_rank_kernel(const Field& f, Elem A, unsigned t) {
  if (f.p() != 2) throw Error(ErrorCode::OddCharacteristic, "companion method needs characteristic 2");
  if (A == f.one()) throw Error(ErrorCode::DegenerateA, "A = 1");
  if (t < 2) throw Error(ErrorCode::InvalidArgument, "companion matrix needs t >= 2");
  FieldMatrix c(f, t, t);
  c(0, t - 1) = f.add(f.one(), A);
  c(1, t - 1) = A;
  for (unsigned i = 1; i < t; ++i) c(i, i - 1) = f.one();
  FieldMatrix prod = c;
  for (unsigned i = 1; i < f.n(); ++i) prod = prod * c.frobenius(i);
  const FieldMatrix e1 = prod - FieldMatrix::identity(f, t);
  CompanionResult out;
  out.rank = static_cast<unsigned>(e1.rank());
  out.kernel_dim = t - out.rank;
  return out;
}

/// The linearized map T(Y) = Y^(2^t) + A Y^2 + (1+A) Y.
inline LinearizedMap companion_trinomial(const Field& f, Elem A, unsigned t) {
  return LinearizedMap{{{f.one(), t}, {A, 1}, {f.add(f.one(), A), 0}}, f.zero()};
}

}  // namespace ffspectra
