#pragma once

#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ffspectra/error.hpp"
#include "ffspectra/field.hpp"
#include "ffspectra/parallel.hpp"
#include "ffspectra/solvers.hpp"
#include "ffspectra/spectra.hpp"

namespace ffspectra {

enum class TheoremId {
  apn_char,
  pn_char,
  nabla1_apn,
  binomial,
  ternary_gold,
  quarter_family,
  x21_odd,
  x21_even,
  cubic_general,
  inverse_like,
  inverse_like_t3,
  do_poly,
};

inline constexpr TheoremId kAllTheorems[] = {
    TheoremId::apn_char,       TheoremId::pn_char,      TheoremId::nabla1_apn,    TheoremId::binomial,
    TheoremId::ternary_gold,   TheoremId::quarter_family, TheoremId::x21_odd,     TheoremId::x21_even,
    TheoremId::cubic_general,  TheoremId::inverse_like, TheoremId::inverse_like_t3, TheoremId::do_poly,
};

inline const char* to_string(TheoremId id) {
  switch (id) {
    case TheoremId::apn_char: return "apn_char";
    case TheoremId::pn_char: return "pn_char";
    case TheoremId::nabla1_apn: return "nabla1_apn";
    case TheoremId::binomial: return "binomial";
    case TheoremId::ternary_gold: return "ternary_gold";
    case TheoremId::quarter_family: return "quarter_family";
    case TheoremId::x21_odd: return "x21_odd";
    case TheoremId::x21_even: return "x21_even";
    case TheoremId::cubic_general: return "cubic_general";
    case TheoremId::inverse_like: return "inverse_like";
    case TheoremId::inverse_like_t3: return "inverse_like_t3";
    case TheoremId::do_poly: return "do_poly";
  }
  return "?";
}

inline std::optional<TheoremId> theorem_from_string(std::string_view s) {
  for (TheoremId id : kAllTheorems)
    if (s == to_string(id)) return id;
  return std::nullopt;
}

/// Predicted nabla_F(a, b) with the branch that produced it.
struct Prediction {
  std::uint64_t value = 0;
  bool is_bound = false;
  std::string case_label;
  std::vector<std::pair<std::string, std::uint64_t>> quantities;
  std::vector<std::string> conflicts;  // other branches with a different value that also fired
  std::vector<Elem> witnesses;         // solutions X, when requested

  std::optional<std::uint64_t> quantity(std::string_view name) const {
    for (const auto& [k, v] : quantities)
      if (k == name) return v;
    return std::nullopt;
  }
};

namespace detail {

inline Prediction trivial_cell(const Field& f) {
  Prediction p;
  p.value = f.q();
  p.case_label = "trivial";
  return p;
}

inline void require_char2(const Field& f, const char* what) {
  if (f.p() != 2) throw Error(ErrorCode::WrongCharacteristic, std::string(what) + " needs characteristic 2");
}

inline std::uint64_t ipow(std::uint64_t base, unsigned e) {
  std::uint64_t r = 1;
  while (e--) r *= base;
  return r;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// X^(q-1) + u X^2, odd characteristic

/// Guard chain in case order. Values are the number of distinct solutions
/// among X in {0, -a, -b, -(a+b)}; where a branch's nominal figure double counts
/// X = -a = -b it keeps its label but reports the true count, and the nominal
/// figure is kept as the "nominal" quantity.
inline Prediction predict_binomial(const Field& f, Elem u, Elem a, Elem b) {
  if (f.p() == 2) throw Error(ErrorCode::EvenCharacteristic, "binomial theorem needs odd characteristic");
  if (f.q() <= 3) throw Error(ErrorCode::DegenerateField, "binomial theorem needs q > 3");
  if (u.v == 0) throw Error(ErrorCode::ZeroLinearCoefficient, "u must be nonzero");
  if (a.v == 0 || b.v == 0) return detail::trivial_cell(f);

  const Elem abu = f.mul(f.mul(a, b), u);
  const Elem two_abu = f.add(abu, abu);
  const bool m1_abu = f.sub(abu, f.one()).v == 0;       // -1 + abu = 0
  const bool p1_abu = f.add(abu, f.one()).v == 0;       // 1 + abu = 0
  const bool m1_2abu = f.sub(two_abu, f.one()).v == 0;  // -1 + 2abu = 0
  const bool p1_2abu = f.add(two_abu, f.one()).v == 0;  // 1 + 2abu = 0
  const bool a_eq_b = a == b, a_eq_mb = a == f.neg(b);
  const bool p3 = f.p() == 3;

  struct Branch {
    bool fires;
    std::uint64_t nominal, count;
    const char* label;
  };
  const Branch chain[] = {
      {!p3 && a_eq_mb && m1_abu, 1, 1, "p!=3, a=-b, -1+abu=0"},
      {!p3 && a_eq_b && m1_2abu, 2, 2, "p!=3, a=b, -1+2abu=0"},
      {!p3 && a_eq_b && p1_abu, 2, 1, "p!=3, a=b, 1+abu=0"},
      {!p3 && a_eq_mb && p1_2abu, 2, 2, "p!=3, a=-b, 1+2abu=0"},
      {!a_eq_b && !a_eq_mb && (m1_2abu || p1_2abu), 2, 2, "a!=b,-b, -1+2abu=0 or 1+2abu=0"},
      {p3 && a_eq_mb && m1_abu, 3, 3, "p=3, a=-b, -1+abu=0"},
      {p3 && a_eq_b && p1_abu, 4, 3, "p=3, a=b, 1+abu=0"},
  };

  Prediction out;
  out.case_label = "otherwise";
  const Branch* hit = nullptr;
  for (const auto& br : chain) {
    if (!br.fires) continue;
    if (!hit) {
      hit = &br;
    } else if (br.nominal != hit->nominal) {
      out.conflicts.push_back(br.label);
    }
  }
  if (hit) {
    out.value = hit->count;
    out.case_label = hit->label;
    out.quantities.push_back({"nominal", hit->nominal});
  }

  // Direct count over the four candidates, kept alongside for cross-checks.
  const bool x0 = a_eq_mb ? m1_abu : m1_2abu;
  const bool xa = a_eq_b ? p1_abu : p1_2abu;
  const bool xb = !a_eq_b && p1_2abu;
  const bool xab = !a_eq_mb && m1_2abu;
  out.quantities.push_back({"candidate_count", std::uint64_t{x0} + xa + xb + xab});
  out.quantities.push_back({"abu", abu.v});
  return out;
}

// ---------------------------------------------------------------------------
// X^(2*3^m+1) over GF(3^n), n = 2m+1

inline std::uint64_t ternary_gold_exponent(unsigned n) { return 2 * detail::ipow(3, (n - 1) / 2) + 1; }

inline Prediction predict_ternary_gold(const Field& f, Elem a, Elem b) {
  if (f.p() != 3) throw Error(ErrorCode::WrongCharacteristic, "ternary theorem needs characteristic 3");
  if (f.n() % 2 == 0) throw Error(ErrorCode::EvenDegree, "ternary theorem needs n odd");
  if (f.n() == 1) throw Error(ErrorCode::DegenerateField, "ternary theorem needs n >= 3");
  if (a.v == 0 || b.v == 0) return detail::trivial_cell(f);

  const unsigned m = (f.n() - 1) / 2;
  const Elem B = f.div(b, a);
  Prediction out;
  out.quantities.push_back({"B", B.v});
  if (B == f.one() || B == f.neg(f.one())) {
    out.value = 3;
    out.case_label = "a=+-b";
    return out;
  }
  const Elem Bm = f.frobenius(B, m);
  const Elem denom = f.add(B, Bm);
  if (denom.v == 0) {
    // Reduced equation is linear in Y.
    out.value = 1;
    out.case_label = "B+B^(3^m)=0";
    return out;
  }
  const TrinomialInstance t{m, f.neg(f.div(Bm, denom)), f.div(f.mul(f.sub(Bm, B), f.sub(Bm, f.one())), denom)};
  const auto sol = solve_trinomial(f, t);
  const std::uint64_t alpha = *sol.quantity("alpha");
  out.value = alpha == f.one().v ? 3 : 1;
  out.case_label = alpha == f.one().v ? "alpha=1" : "alpha!=1";
  out.quantities.push_back({"A", t.A.v});
  out.quantities.push_back({"alpha", alpha});
  out.quantities.push_back({"roots", sol.roots.size()});
  if (sol.roots.size() != out.value) out.conflicts.push_back("trinomial root count " + std::to_string(sol.roots.size()));
  return out;
}

// ---------------------------------------------------------------------------
// d = (q+1)/4 (+ (q-1)/2)

struct QuarterFamilyPrediction {
  std::uint64_t d = 0;
  std::uint64_t bound = 0;
  bool even = true;  // nabla_F is even for this family
  int chi2 = 0;
};

inline QuarterFamilyPrediction predict_quarter_family(const Field& f) {
  const std::uint64_t q = f.q();
  if (f.p() == 2 || (q % 8 != 3 && q % 8 != 7))
    throw Error(ErrorCode::BadCongruence, "quarter family needs q = 3 or 7 (mod 8)");
  QuarterFamilyPrediction out;
  out.d = q % 8 == 3 ? (q + 1) / 4 + (q - 1) / 2 : (q + 1) / 4;
  out.chi2 = f.quad_char(f.prime(2));
  out.bound = (f.p() == 3 || out.chi2 == -1) ? 8 : 18;
  return out;
}

// ---------------------------------------------------------------------------
// X^21 over GF(2^n)

namespace detail {

/// tau = B(1 + B^3); the linear coefficient of Z^4 + vZ + C is v = tau^3.
struct X21Setup {
  Elem B, tau, v, C;
};

inline X21Setup x21_setup(const Field& f, Elem a, Elem b) {
  X21Setup s;
  s.B = f.div(b, a);
  s.tau = f.mul(s.B, f.add(f.one(), f.pow(s.B, 3)));
  s.v = f.pow(s.tau, 3);
  const Elem num = f.add(f.add(f.pow(b, 20), f.mul(f.pow(a, 4), f.pow(b, 16))),
                         f.add(f.mul(f.pow(a, 15), f.pow(b, 5)), f.mul(f.pow(a, 3), f.pow(b, 17))));
  const Elem den = f.add(f.mul(f.pow(a, 16), f.pow(b, 4)), f.mul(f.pow(a, 19), b));
  s.C = den.v == 0 ? f.zero() : f.add(f.one(), f.div(num, den));
  return s;
}

/// s_i = sum_{j=i}^{last} 4^(j+1) mod (q-1); zero once i > last.
inline std::vector<std::uint64_t> x21_exponents(const Field& f, unsigned count, int last) {
  const std::uint64_t order = f.q() - 1;
  std::vector<std::uint64_t> s(count, 0);
  for (unsigned i = 0; i < count; ++i)
    for (int j = static_cast<int>(i); j <= last; ++j)
      s[i] = (s[i] + powmod(4, static_cast<std::uint64_t>(j + 1), order)) % order;
  return s;
}

}  // namespace detail

/// Solves Z^4 + vZ + C = 0 and then Y^4 + Y + Z_j = 0 for every root, counting
/// X = aY. Serves as the constructive witness path and as a cross-check.
inline Prediction predict_x21_cascade(const Field& f, Elem a, Elem b) {
  detail::require_char2(f, "X^21 theorem");
  if (a.v == 0 || b.v == 0 || a == b) return detail::trivial_cell(f);
  const auto s = detail::x21_setup(f, a, b);
  Prediction out;
  out.quantities = {{"B", s.B.v}, {"v", s.v.v}, {"C", s.C.v}};
  if (f.add(f.pow(s.B, 4), s.B).v == 0) {
    out.value = 0;
    out.case_label = "a^3=b^3";
    return out;
  }
  const auto z = solve_trinomial(f, TrinomialInstance{2, s.v, s.C});
  out.quantities.push_back({"z_roots", z.roots.size()});
  for (Elem zj : z.roots) {
    const auto y = solve_trinomial(f, TrinomialInstance{2, f.one(), zj});
    for (Elem yr : y.roots) out.witnesses.push_back(f.mul(a, yr));
  }
  std::sort(out.witnesses.begin(), out.witnesses.end(), [](Elem l, Elem r) { return l.v < r.v; });
  out.value = out.witnesses.size();
  out.case_label = "cascade";
  return out;
}

/// Z^4 + vZ + C has roots iff S1 = sum_{i<m} v^(s_i) C^(4^i) vanishes (m = n/d,
/// d = gcd(2, n)); one root is Z1 = sum_i (sum_{j<=i} c^(4^j)) v^(s_i) C^(4^i) / Tr(c)
/// and Y^4 + Y = Z1 is solvable iff S2 = Tr_{n/d}(Z1) vanishes. For n odd c = 1
/// and these are the two plain sums. For n even c = 1 only works when n/2
/// is odd, so c is the first basis element of nonzero relative trace.
inline Prediction predict_x21(const Field& f, Elem a, Elem b, bool with_witness = false) {
  detail::require_char2(f, "X^21 theorem");
  if (a.v == 0 || b.v == 0 || a == b) return detail::trivial_cell(f);
  const unsigned n = f.n();
  const auto s = detail::x21_setup(f, a, b);
  Prediction out;
  out.quantities = {{"B", s.B.v}, {"tau", s.tau.v}, {"v", s.v.v}, {"C", s.C.v}};
  if (n % 2 == 0 && f.pow(a, 3) == f.pow(b, 3)) {
    out.value = 0;
    out.case_label = "a^3=b^3";
    return out;
  }
  const unsigned d = n % 2 == 1 ? 1 : 2, m = n / d;
  const auto si = detail::x21_exponents(f, m, static_cast<int>(m) - 2);

  Elem c = f.one();
  for (unsigned j = 0; f.rel_trace(c, d).v == 0; ++j) c = f.basis(j + 1);
  out.quantities.push_back({"c", c.v});

  Elem s1 = f.zero(), z1 = f.zero(), partial = f.zero();
  for (unsigned i = 0; i < m; ++i) {
    const Elem term = f.mul(f.pow(s.v, si[i]), f.frobenius(s.C, 2 * i));
    partial = f.add(partial, f.frobenius(c, 2 * i));
    s1 = f.add(s1, term);
    z1 = f.add(z1, f.mul(partial, term));
  }
  z1 = f.div(z1, f.rel_trace(c, d));
  Elem s2 = f.zero();
  for (unsigned r = 0; r < m; ++r) s2 = f.add(s2, f.frobenius(z1, 2 * r));

  out.quantities.push_back({"S1", s1.v});
  out.quantities.push_back({"Z1", z1.v});
  out.quantities.push_back({"S2", s2.v});
  const bool hit = s1.v == 0 && s2.v == 0;
  out.value = hit ? (n % 2 == 1 ? 4 : 16) : 0;
  out.case_label = hit ? "sums vanish" : "otherwise";
  if (with_witness) out.witnesses = predict_x21_cascade(f, a, b).witnesses;
  return out;
}

// ---------------------------------------------------------------------------
// Cubic forms sum c_ij X^(p^i + p^j + 1)

/// L_{a,b} and delta_{a,b}; the equation is L(X) + delta = 0.
inline std::pair<LinearizedMap, Elem> cubic_linearization(const Field& f, const CubicForm& F, Elem a, Elem b) {
  LinearizedMap L;
  L.offset = f.zero();
  Elem delta = f.zero();
  const Elem ab = f.add(a, b);
  for (const auto& t : F.terms) {
    if (!(0 < t.i && t.i < t.j && t.j < f.n()))
      throw Error(ErrorCode::MalformedCubic, "cubic term indices must satisfy 0 < i < j < n");
    const Elem ai = f.frobenius(a, t.i), aj = f.frobenius(a, t.j);
    const Elem bi = f.frobenius(b, t.i), bj = f.frobenius(b, t.j);
    const Elem cross = f.add(f.mul(ai, bj), f.mul(aj, bi));
    L.terms.push_back({f.mul(t.coef, cross), 0});
    L.terms.push_back({f.mul(t.coef, f.add(f.mul(b, aj), f.mul(a, bj))), t.i});
    L.terms.push_back({f.mul(t.coef, f.add(f.mul(b, ai), f.mul(a, bi))), t.j});
    const Elem d = f.add(f.add(f.mul(ab, cross), f.mul(a, f.mul(bi, bj))), f.mul(b, f.mul(ai, aj)));
    delta = f.add(delta, f.mul(t.coef, d));
  }
  return {L, delta};
}

inline Prediction predict_cubic(const Field& f, const CubicForm& F, Elem a, Elem b) {
  for (const auto& t : F.terms)
    if (!(0 < t.i && t.i < t.j && t.j < f.n()))
      throw Error(ErrorCode::MalformedCubic, "cubic term indices must satisfy 0 < i < j < n");
  if (a.v == 0 || b.v == 0) return detail::trivial_cell(f);
  const auto [L, delta] = cubic_linearization(f, F, a, b);
  const auto r = affine_solution_count(f, L, f.neg(delta));
  Prediction out;
  out.quantities = {{"delta", delta.v}, {"kernel_dim", r.kernel_dim}};
  if (r.count > 0) {
    out.value = r.count;
    out.case_label = "delta in image";
  } else {
    out.value = 0;
    out.case_label = "delta not in image";
  }
  return out;
}

// ---------------------------------------------------------------------------
// DO polynomials: the second-order difference is constant in X

inline Prediction predict_do(const Field& f, const DOPoly& F, Elem a, Elem b) {
  const FuncSpec spec{F};
  const Elem value = f.add(f.sub(f.sub(eval(f, spec, f.add(a, b)), eval(f, spec, a)), eval(f, spec, b)),
                           eval(f, spec, f.zero()));
  Prediction out;
  out.value = value.v == 0 ? f.q() : 0;
  out.case_label = value.v == 0 ? "identically zero" : "nonzero constant";
  out.quantities = {{"constant", value.v}};
  return out;
}

// ---------------------------------------------------------------------------
// X^(2^n - 2^s) over GF(2^n)

inline std::uint64_t inverse_like_exponent(unsigned n, unsigned s) { return (std::uint64_t{1} << n) - (std::uint64_t{1} << s); }

namespace detail {

inline void check_inverse_like(const Field& f, unsigned s) {
  require_char2(f, "X^(2^n-2^s) theorem");
  if (s < 1 || s >= f.n()) throw Error(ErrorCode::InvalidArgument, "s must satisfy 1 <= s < n");
  if (std::gcd(f.n(), s + 1) != 1) throw Error(ErrorCode::GcdViolation, "gcd(n, s+1) must be 1");
}

}  // namespace detail

inline Prediction predict_inverse_like(const Field& f, unsigned s, Elem a, Elem b) {
  detail::check_inverse_like(f, s);
  if (a.v == 0 || b.v == 0 || a == b) return detail::trivial_cell(f);
  const unsigned n = f.n(), t = n - s;
  const unsigned g = std::gcd(s, n);
  Prediction out;
  const Elem guard = f.add(f.mul(a, f.frobenius(b, s)), f.mul(f.frobenius(a, s), b));
  if (guard.v == 0 && g > 1) {
    out.value = (std::uint64_t{1} << g) - 4;
    out.case_label = "ab^(2^s)+a^(2^s)b=0";
    out.quantities.push_back({"gcd", g});
    return out;
  }
  const Elem num = f.add(f.mul(a, f.frobenius(b, t)), f.mul(f.frobenius(a, t), b));
  const Elem den = f.mul(f.pow(a, (std::uint64_t{1} << t) - 2), f.add(f.mul(a, f.mul(b, b)), f.mul(f.mul(a, a), b)));
  const Elem A = f.div(num, den);
  out.quantities.push_back({"A", A.v});
  if (guard.v == 0 || A == f.one()) {
    out.value = 0;
    out.case_label = guard.v == 0 ? "otherwise" : "A=1";
    return out;
  }
  const auto cr = companion_rank_kernel(f, A, t);
  out.quantities.push_back({"rank_E1", cr.rank});
  if (cr.rank + 2 <= t) {
    out.value = (std::uint64_t{1} << (t - cr.rank)) - 4;
    out.case_label = "rank(E1)<=t-2";
  } else {
    out.value = 0;
    out.case_label = "otherwise";
  }
  return out;
}

/// n - s = 3: trace and cube conditions in place of the companion rank.
inline Prediction predict_inverse_like_t3(const Field& f, unsigned s, Elem a, Elem b) {
  detail::require_char2(f, "X^(2^n-2^s) theorem");
  if (s + 3 != f.n()) throw Error(ErrorCode::WrongCodimension, "n - s must be 3");
  detail::check_inverse_like(f, s);
  if (a.v == 0 || b.v == 0 || a == b) return detail::trivial_cell(f);
  Prediction out;
  const unsigned g = std::gcd(s, f.n());
  const Elem guard = f.add(f.mul(a, f.frobenius(b, s)), f.mul(f.frobenius(a, s), b));
  if (guard.v == 0 && g == 3) {
    out.value = 4;
    out.case_label = "ab^(2^s)+a^(2^s)b=0, gcd(s,n)=3";
    return out;
  }
  const Elem ab2_a2b = f.add(f.mul(a, f.mul(b, b)), f.mul(f.mul(a, a), b));
  const Elem a7 = f.pow(a, 7);
  // Tr(a^7(ab^2+a^2b)/(a^2b^8+a^8b^2)) = Tr(1/(1+A)).
  const Elem den1 = f.add(f.mul(f.pow(a, 2), f.pow(b, 8)), f.mul(f.pow(a, 8), f.pow(b, 2)));
  const bool tr1 = den1.v != 0 && f.abs_trace(f.div(f.mul(a7, ab2_a2b), den1)) == f.one();
  const Elem den2 = f.add(f.mul(f.mul(a, a), b), f.mul(a, f.mul(b, b)));
  const bool tr2 = f.abs_trace(f.div(f.pow(a, 3), den2)) == f.one();
  out.quantities.push_back({"tr_inv_1pA", tr1});
  out.quantities.push_back({"tr_inv_B2B", tr2});

  bool cubes = false;
  if (tr1) {
    // t^2 + (1+A) t + 1 with 1+A = (a^8b^2+a^2b^8)/(a^7(ab^2+a^2b)).
    const auto cubic = classify_cubic_char2(f, f.div(den1, f.mul(a7, ab2_a2b)));
    cubes = cubic.t_cubes.value_or(false);
  }
  out.quantities.push_back({"t_cubes", cubes});

  bool z_traces = false;
  if (tr1 && tr2 && cubes) {
    // a^6 Z^2 + a^3(ab^2+a^2b) Z + a^2b^4 + a^4b^2 + a^6 = 0, normalized to Z^2 + cZ + e.
    const Elem a6 = f.pow(a, 6);
    const Elem c = f.div(f.mul(f.pow(a, 3), ab2_a2b), a6);
    const Elem e = f.div(f.add(f.add(f.mul(f.pow(a, 2), f.pow(b, 4)), f.mul(f.pow(a, 4), f.pow(b, 2))), a6), a6);
    const auto w = solve_quadratic_char2(f, c, e);
    z_traces = w.roots.size() == 2;
    for (Elem z : w.roots) z_traces = z_traces && f.abs_trace(z).v == 0;
    for (std::size_t i = 0; i < w.roots.size(); ++i) out.quantities.push_back({"Z" + std::to_string(i + 1), w.roots[i].v});
  }
  const bool hit = tr1 && tr2 && cubes && z_traces;
  out.value = hit ? 4 : 0;
  out.case_label = hit ? "trace and cube conditions" : "otherwise";
  return out;
}

// ---------------------------------------------------------------------------
// The converse of "nabla = 1 and odd/even implies APN" fails

struct Counterexample {
  std::uint32_t p;
  unsigned n;
  FuncSpec func;
  std::string text;
  std::uint32_t delta;  // differential uniformity
  std::uint32_t nabla;  // second-order zero differential uniformity
};

inline std::vector<Counterexample> converse_counterexamples() {
  SparsePoly x9x4{{{Elem{1}, 9}, {Elem{1}, 4}}};
  return {
      {5, 3, monomial(14), "x^14", 2, 4},          // APN, nabla = 4
      {11, 1, FuncSpec{x9x4}, "x^9+x^4", 3, 1},  // nabla = 1, not APN
  };
}

// ---------------------------------------------------------------------------
// Verification against the oracle

struct VerifyParams {
  std::uint32_t p = 2;
  unsigned n = 1;
  std::optional<std::vector<std::uint32_t>> modulus = std::nullopt;
  Elem u{1};
  unsigned s = 1;
  std::optional<FuncSpec> func = std::nullopt;  // apn_char, pn_char, cubic_general, do_poly
  unsigned samples = 200;                        // nabla1_apn: random sparse polynomials
  std::uint64_t seed = 1;
};

struct CellMismatch {
  Elem a, b;
  std::uint64_t predicted = 0;
  std::uint64_t actual = 0;
  std::string case_label;
};

struct VerifyReport {
  TheoremId theorem{};
  FieldPtr field;
  std::string function;
  std::uint64_t cells_checked = 0;
  std::uint64_t mismatch_count = 0;
  std::vector<CellMismatch> mismatches;  // the first few, in (a, b) order
  std::uint64_t conflict_count = 0;
  std::uint32_t uniformity = 0;
  SpectrumSummary spectrum;
  std::optional<std::uint64_t> bound;
  std::vector<std::pair<std::string, std::uint64_t>> facts;

  bool passed() const noexcept { return mismatch_count == 0 && conflict_count == 0; }

  std::optional<std::uint64_t> fact(std::string_view name) const {
    for (const auto& [k, v] : facts)
      if (k == name) return v;
    return std::nullopt;
  }
};

inline constexpr std::size_t kStoredMismatches = 16;

namespace detail {

/// Direct zero-test on every cell, parallel over a.
inline std::vector<std::uint32_t> oracle_grid(const Field& f, std::span<const Elem> lut) {
  const std::uint32_t q = f.q();
  std::vector<std::uint32_t> grid(std::size_t{q} * q);
  parallel_for(0, q, [&](std::uint64_t a) {
    for (std::uint32_t b = 0; b < q; ++b)
      grid[a * q + b] = sozd_entry(f, lut, Elem{static_cast<std::uint32_t>(a)}, Elem{b});
  });
  return grid;
}

template <class Predict>
void compare_cells(const Field& f, const std::vector<std::uint32_t>& grid, Predict&& predict, VerifyReport& rep) {
  const std::uint32_t q = f.q();
  std::vector<std::vector<CellMismatch>> rows(q);
  std::vector<std::uint64_t> row_mismatch(q, 0), row_conflict(q, 0);
  parallel_for(0, q, [&](std::uint64_t av) {
    const Elem a{static_cast<std::uint32_t>(av)};
    for (std::uint32_t bv = 0; bv < q; ++bv) {
      const Elem b{bv};
      const Prediction pr = predict(a, b);
      const std::uint32_t actual = grid[av * q + bv];
      const bool ok = pr.is_bound ? actual <= pr.value : actual == pr.value;
      if (!pr.conflicts.empty()) ++row_conflict[av];
      if (ok) continue;
      ++row_mismatch[av];
      if (rows[av].size() < kStoredMismatches) rows[av].push_back({a, b, pr.value, actual, pr.case_label});
    }
  });
  for (std::uint32_t a = 0; a < q; ++a) {
    rep.mismatch_count += row_mismatch[a];
    rep.conflict_count += row_conflict[a];
    for (auto& m : rows[a])
      if (rep.mismatches.size() < kStoredMismatches) rep.mismatches.push_back(std::move(m));
  }
  rep.cells_checked += std::uint64_t{q} * q;
}

inline void summarize(const FieldPtr& f, std::vector<std::uint32_t> grid, VerifyReport& rep) {
  const auto table = SpectrumTable::from_grid(f, TableKind::FBCT, std::move(grid));
  rep.spectrum = table.summary();
  rep.uniformity = table.uniformity().value;
}

inline std::string describe_monomial(std::uint64_t d) { return "x^" + std::to_string(d); }

}  // namespace detail

/// Sweeps every (a, b), compares the closed form to the direct oracle and
/// collects the spectrum. Bound-type theorems are checked with <=.
inline VerifyReport verify_theorem(TheoremId id, const VerifyParams& params) {
  VerifyReport rep;
  rep.theorem = id;
  rep.field = mk_field(params.p, params.n, params.modulus);
  const FieldPtr& fp = rep.field;
  const Field& f = *fp;

  auto per_cell = [&](const FuncSpec& F, auto&& predict) {
    const auto lut = materialize(f, F);
    auto grid = detail::oracle_grid(f, lut);
    detail::compare_cells(f, grid, predict, rep);
    detail::summarize(fp, std::move(grid), rep);
  };
  auto need_func = [&](const char* what) -> const FuncSpec& {
    if (!params.func) throw Error(ErrorCode::InvalidArgument, std::string(what) + " needs a function");
    return *params.func;
  };

  switch (id) {
    case TheoremId::apn_char:
    case TheoremId::pn_char: {
      const bool apn = id == TheoremId::apn_char;
      if (apn) detail::require_char2(f, "APN characterization");
      if (!apn && f.p() == 2) throw Error(ErrorCode::EvenCharacteristic, "PN characterization needs odd characteristic");
      const FuncSpec F = params.func ? *params.func : monomial(apn ? 3 : 2);
      validate(f, F);
      rep.function = params.func ? "custom" : detail::describe_monomial(apn ? 3 : 2);
      const auto lut = materialize(f, F);
      const bool holds = apn ? is_apn(f, lut).holds : is_pn(f, lut).holds;
      rep.facts.push_back({apn ? "apn" : "pn", holds});
      if (!holds) throw Error(ErrorCode::InvalidArgument, std::string("function is not ") + (apn ? "APN" : "PN"));
      per_cell(F, [&](Elem a, Elem b) {
        Prediction p;
        const bool triv = a.v == 0 || b.v == 0 || (f.p() == 2 && a == b);
        p.value = triv ? f.q() : 0;
        p.case_label = triv ? "trivial" : "nontrivial";
        return p;
      });
      break;
    }
    case TheoremId::binomial: {
      SparsePoly poly{{{f.one(), f.q() - 1}, {params.u, 2}}};
      rep.function = "x^" + std::to_string(f.q() - 1) + "+" + std::to_string(params.u.v) + "*x^2";
      (void)predict_binomial(f, params.u, f.one(), f.one());  // precondition check
      per_cell(FuncSpec{poly}, [&](Elem a, Elem b) { return predict_binomial(f, params.u, a, b); });
      rep.facts.push_back({"chi_u_positive", f.quad_char(params.u) == 1});
      break;
    }
    case TheoremId::ternary_gold: {
      (void)predict_ternary_gold(f, f.zero(), f.zero());
      const std::uint64_t d = ternary_gold_exponent(f.n());
      rep.function = detail::describe_monomial(d);
      per_cell(monomial(d), [&](Elem a, Elem b) { return predict_ternary_gold(f, a, b); });
      break;
    }
    case TheoremId::x21_odd:
    case TheoremId::x21_even: {
      detail::require_char2(f, "X^21 theorem");
      if (id == TheoremId::x21_odd && f.n() % 2 == 0) throw Error(ErrorCode::EvenDegree, "x21_odd needs n odd");
      if (id == TheoremId::x21_even && f.n() % 2 == 1) throw Error(ErrorCode::InvalidArgument, "x21_even needs n even");
      rep.function = detail::describe_monomial(21);
      per_cell(monomial(21), [&](Elem a, Elem b) { return predict_x21(f, a, b); });
      break;
    }
    case TheoremId::cubic_general: {
      const FuncSpec& F = need_func("cubic_general");
      const auto* cubic = std::get_if<CubicForm>(&F.body);
      if (!cubic) throw Error(ErrorCode::MalformedCubic, "cubic_general needs a cubic form");
      validate(f, F);
      rep.function = "cubic form";
      per_cell(F, [&](Elem a, Elem b) { return predict_cubic(f, *cubic, a, b); });
      break;
    }
    case TheoremId::do_poly: {
      const FuncSpec& F = need_func("do_poly");
      const auto* dop = std::get_if<DOPoly>(&F.body);
      if (!dop) throw Error(ErrorCode::InvalidFunction, "do_poly needs a DO polynomial");
      validate(f, F);
      rep.function = "DO polynomial";
      per_cell(F, [&](Elem a, Elem b) { return predict_do(f, *dop, a, b); });
      break;
    }
    case TheoremId::inverse_like:
    case TheoremId::inverse_like_t3: {
      const bool t3 = id == TheoremId::inverse_like_t3;
      if (t3) {
        (void)predict_inverse_like_t3(f, params.s, f.zero(), f.zero());
      } else {
        detail::check_inverse_like(f, params.s);
      }
      const std::uint64_t d = inverse_like_exponent(f.n(), params.s);
      rep.function = detail::describe_monomial(d);
      per_cell(monomial(d), [&](Elem a, Elem b) {
        return t3 ? predict_inverse_like_t3(f, params.s, a, b) : predict_inverse_like(f, params.s, a, b);
      });
      break;
    }
    case TheoremId::quarter_family: {
      const auto qf = predict_quarter_family(f);
      rep.function = detail::describe_monomial(qf.d);
      rep.bound = qf.bound;
      const auto table = SpectrumTable::from_monomial_row(fp, sozd_row_monomial(f, monomial(qf.d)));
      rep.spectrum = table.summary();
      rep.uniformity = table.uniformity().value;
      rep.cells_checked = std::uint64_t{f.q()} * f.q();
      for (const auto& [v, cnt] : rep.spectrum.nontrivial) {
        if (v <= qf.bound && v % 2 == 0) continue;
        rep.mismatch_count += cnt;
      }
      if (rep.mismatch_count > 0) {
        const auto& row = table.base_row();
        for (std::uint32_t B = 1; B < f.q() && rep.mismatches.size() < kStoredMismatches; ++B)
          if (row[B] > qf.bound || row[B] % 2 != 0)
            rep.mismatches.push_back({f.one(), Elem{B}, qf.bound, row[B], row[B] > qf.bound ? "bound" : "parity"});
      }
      rep.facts.push_back({"d", qf.d});
      rep.facts.push_back({"chi2_positive", qf.chi2 == 1});
      rep.facts.push_back({"even", rep.uniformity % 2 == 0});
      break;
    }
    case TheoremId::nabla1_apn: {
      if (f.p() == 2) throw Error(ErrorCode::EvenCharacteristic, "the nabla = 1 theorem concerns odd characteristic");
      rep.function = "monomials and sparse odd/even polynomials";
      std::uint64_t swept = 0, with_parity = 0, hits = 0;
      auto check = [&](const FuncSpec& F, const std::string& text) {
        const auto lut = materialize(f, F);
        ++swept;
        if (parity_of(f, lut) == Parity::None) return;
        ++with_parity;
        const auto table = F.is_monomial() ? fbct_table(f, F) : fbct_table_full(f, lut);
        rep.cells_checked += std::uint64_t{f.q()} * f.q();
        if (table.uniformity().value != 1) return;
        ++hits;
        const auto delta = differential_uniformity(f, lut).value;
        if (delta == 2) return;
        ++rep.mismatch_count;
        if (rep.mismatches.size() < kStoredMismatches) rep.mismatches.push_back({Elem{}, Elem{}, 2, delta, text});
      };
      for (std::uint64_t d = 1; d < f.q(); ++d) check(monomial(d), detail::describe_monomial(d));
      std::mt19937_64 rng(params.seed);
      for (unsigned i = 0; i < params.samples; ++i) {
        const std::uint64_t parity = i % 2;
        SparsePoly sp;
        std::string text;
        for (unsigned t = 0, terms = 2 + static_cast<unsigned>(rng() % 2); t < terms; ++t) {
          std::uint64_t e = 1 + rng() % (f.q() - 1);
          if (e % 2 != parity) e = e + 1 < f.q() ? e + 1 : e - 1;
          const Elem c{static_cast<std::uint32_t>(1 + rng() % (f.q() - 1))};
          sp.terms.push_back({c, e});
          text += (text.empty() ? "" : "+") + std::to_string(c.v) + "*x^" + std::to_string(e);
        }
        check(FuncSpec{sp}, text);
      }
      rep.uniformity = 1;
      rep.facts = {{"functions", swept}, {"with_parity", with_parity}, {"nabla_one", hits}};
      break;
    }
  }
  return rep;
}

/// Throws PredicateViolation naming the first failing cell.
inline void require_pass(const VerifyReport& rep) {
  if (rep.passed()) return;
  std::string msg = std::string(to_string(rep.theorem)) + ": " + std::to_string(rep.mismatch_count) + " mismatching cells";
  if (!rep.mismatches.empty()) {
    const auto& m = rep.mismatches.front();
    msg += ", first at (" + std::to_string(m.a.v) + "," + std::to_string(m.b.v) + ") predicted " +
           std::to_string(m.predicted) + " actual " + std::to_string(m.actual) + " [" + m.case_label + "]";
  }
  if (rep.conflict_count > 0) msg += ", " + std::to_string(rep.conflict_count) + " guard conflicts";
  throw Error(ErrorCode::PredicateViolation, msg);
}

}  // namespace ffspectra
