#pragma once

// Difference distribution tables and second-order zero differential spectra
// (the FBCT in characteristic 2), computed by exhaustive search.
//
// Every sweep first materializes F as a lookup table. A full row
// nabla(a, .) is built from D(x) = F(x+a) - F(x): since
//   F(x+a+b) - F(x+b) - F(x+a) + F(x) = D(x+b) - D(x),
// nabla(a, b) counts the pairs (x, x+b) inside one level set of D. Bucketing
// x by D(x) gives the whole row in O(q * max bucket) instead of O(q^2).
// sozd_entry keeps the literal four-term zero test as the reference.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "ffspectra/error.hpp"
#include "ffspectra/field.hpp"
#include "ffspectra/linalg.hpp"
#include "ffspectra/parallel.hpp"

namespace ffspectra {

enum class Parity { None, Odd, Even };

inline const char* to_string(Parity p) {
  switch (p) {
    case Parity::None: return "none";
    case Parity::Odd: return "odd";
    case Parity::Even: return "even";
  }
  return "?";
}

struct Monomial {
  std::uint64_t d = 1;
};

struct Term {
  Elem coef;
  std::uint64_t exp;
};

struct SparsePoly {
  std::vector<Term> terms;
};

/// coef * X^(p^i + p^j + 1), 0 < i < j < n.
struct CubicTerm {
  unsigned i, j;
  Elem coef;
};

struct CubicForm {
  std::vector<CubicTerm> terms;
};

/// coef * X^(p^i + p^j), 0 <= i <= j < n.
struct DOTerm {
  unsigned i, j;
  Elem coef;
};

struct DOPoly {
  std::vector<DOTerm> terms;
};

struct Lut {
  std::vector<Elem> values;
};

struct FuncSpec {
  std::variant<Monomial, SparsePoly, CubicForm, DOPoly, Lut> body;
  Parity parity_hint = Parity::None;

  bool is_monomial() const noexcept { return std::holds_alternative<Monomial>(body); }
};

inline FuncSpec monomial(std::uint64_t d) { return FuncSpec{Monomial{d}}; }

using FunctionTable = std::vector<Elem>;

// ---------------------------------------------------------------------------

inline Elem eval(const Field& f, const FuncSpec& F, Elem x) {
  return std::visit(
      [&](const auto& body) -> Elem {
        using T = std::decay_t<decltype(body)>;
        if constexpr (std::is_same_v<T, Monomial>) {
          return f.pow(x, body.d);
        } else if constexpr (std::is_same_v<T, SparsePoly>) {
          Elem acc = f.zero();
          for (const auto& t : body.terms) acc = f.add(acc, f.mul(t.coef, f.pow(x, t.exp)));
          return acc;
        } else if constexpr (std::is_same_v<T, CubicForm>) {
          Elem acc = f.zero();
          for (const auto& t : body.terms)
            acc = f.add(acc, f.mul(t.coef, f.mul(f.mul(f.frobenius(x, t.i), f.frobenius(x, t.j)), x)));
          return acc;
        } else if constexpr (std::is_same_v<T, DOPoly>) {
          Elem acc = f.zero();
          for (const auto& t : body.terms)
            acc = f.add(acc, f.mul(t.coef, f.mul(f.frobenius(x, t.i), f.frobenius(x, t.j))));
          return acc;
        } else {
          return body.values[x.v];
        }
      },
      F.body);
}

inline FunctionTable materialize(const Field& f, const FuncSpec& F) {
  if (const auto* lut = std::get_if<Lut>(&F.body)) return lut->values;
  FunctionTable out(f.q());
  parallel_for(0, f.q(), [&](std::uint64_t x) { out[x] = eval(f, F, Elem{static_cast<std::uint32_t>(x)}); });
  return out;
}

inline bool has_parity(const Field& f, std::span<const Elem> lut, Parity parity) {
  if (parity == Parity::None) return true;
  for (std::uint32_t x = 0; x < f.q(); ++x) {
    const Elem fx = lut[x], fnx = lut[f.neg(Elem{x}).v];
    if (parity == Parity::Odd && fnx != f.neg(fx)) return false;
    if (parity == Parity::Even && fnx != fx) return false;
  }
  return true;
}

/// Odd is reported first; in characteristic 2 every function is both.
inline Parity parity_of(const Field& f, std::span<const Elem> lut) {
  if (has_parity(f, lut, Parity::Odd)) return Parity::Odd;
  if (has_parity(f, lut, Parity::Even)) return Parity::Even;
  return Parity::None;
}

/// Checks structural constraints and the parity hint against the table.
inline void validate(const Field& f, const FuncSpec& F) {
  if (const auto* lut = std::get_if<Lut>(&F.body)) {
    if (lut->values.size() != f.q())
      throw Error(ErrorCode::InvalidFunction, "lookup table must have exactly q entries");
    for (Elem v : lut->values)
      if (v.v >= f.q()) throw Error(ErrorCode::InvalidFunction, "lookup table entry out of range");
  }
  if (const auto* c = std::get_if<CubicForm>(&F.body)) {
    for (const auto& t : c->terms)
      if (!(0 < t.i && t.i < t.j && t.j < f.n()))
        throw Error(ErrorCode::MalformedCubic, "cubic term indices must satisfy 0 < i < j < n");
  }
  if (const auto* d = std::get_if<DOPoly>(&F.body)) {
    for (const auto& t : d->terms)
      if (!(t.i <= t.j && t.j < f.n())) throw Error(ErrorCode::InvalidFunction, "DO term indices must satisfy i <= j < n");
  }
  if (F.parity_hint != Parity::None) {
    const auto lut = materialize(f, F);
    if (!has_parity(f, lut, F.parity_hint))
      throw Error(ErrorCode::InvalidFunction, std::string("function is not ") + to_string(F.parity_hint));
  }
}

// ---------------------------------------------------------------------------
// Per-row engines

/// Scratch space for one worker; reused across rows.
struct RowScratch {
  std::vector<std::uint32_t> diff, count, start, order;
  void resize(std::uint32_t q) {
    diff.resize(q);
    count.resize(q);
    start.resize(std::size_t{q} + 1);
    order.resize(q);
  }
};

namespace detail {

/// Buckets x by D(x) = F(x+a) - F(x); count[v] ends up as DDT(a, v).
inline void bucket_derivative(const Field& f, std::span<const Elem> lut, Elem a, RowScratch& s) {
  const std::uint32_t q = f.q();
  s.resize(q);
  std::fill(s.count.begin(), s.count.end(), 0);
  for (std::uint32_t x = 0; x < q; ++x) {
    const std::uint32_t d = f.sub(lut[f.add(Elem{x}, a).v], lut[x]).v;
    s.diff[x] = d;
    ++s.count[d];
  }
  s.start[0] = 0;
  for (std::uint32_t v = 0; v < q; ++v) s.start[v + 1] = s.start[v] + s.count[v];
  std::vector<std::uint32_t> fill(s.start.begin(), s.start.end() - 1);
  for (std::uint32_t x = 0; x < q; ++x) s.order[fill[s.diff[x]]++] = x;
}

}  // namespace detail

inline void ddt_row_into(const Field& f, std::span<const Elem> lut, Elem a, std::vector<std::uint32_t>& row,
                         RowScratch& s) {
  row.assign(f.q(), 0);
  if (a.v == 0) {
    row[0] = f.q();
    return;
  }
  detail::bucket_derivative(f, lut, a, s);
  std::copy(s.count.begin(), s.count.end(), row.begin());
}

/// row[b] = nabla_F(a, b) for every b.
inline void sozd_row_into(const Field& f, std::span<const Elem> lut, Elem a, std::vector<std::uint32_t>& row,
                          RowScratch& s) {
  const std::uint32_t q = f.q();
  if (a.v == 0) {
    row.assign(q, q);
    return;
  }
  row.assign(q, 0);
  detail::bucket_derivative(f, lut, a, s);
  for (std::uint32_t v = 0; v < q; ++v) {
    const std::uint32_t lo = s.start[v], hi = s.start[v + 1];
    for (std::uint32_t i = lo; i < hi; ++i) {
      const Elem x{s.order[i]};
      for (std::uint32_t j = lo; j < hi; ++j) ++row[f.sub(Elem{s.order[j]}, x).v];
    }
  }
}

inline std::vector<std::uint32_t> sozd_row(const Field& f, std::span<const Elem> lut, Elem a) {
  std::vector<std::uint32_t> row;
  RowScratch s;
  sozd_row_into(f, lut, a, row, s);
  return row;
}

inline std::vector<std::uint32_t> ddt_row(const Field& f, std::span<const Elem> lut, Elem a) {
  std::vector<std::uint32_t> row;
  RowScratch s;
  ddt_row_into(f, lut, a, row, s);
  return row;
}

// ---------------------------------------------------------------------------
// Single entries, straight from the definitions

inline std::uint32_t ddt_entry(const Field& f, std::span<const Elem> lut, Elem a, Elem b) {
  if (a.v == 0) throw Error(ErrorCode::ZeroDirection, "DDT entry needs a != 0");
  std::uint32_t count = 0;
  for (std::uint32_t x = 0; x < f.q(); ++x)
    if (f.sub(lut[f.add(Elem{x}, a).v], lut[x]) == b) ++count;
  return count;
}

/// #{X : F(X+a+b) - F(X+b) - F(X+a) + F(X) = 0}.
inline std::uint32_t sozd_entry(const Field& f, std::span<const Elem> lut, Elem a, Elem b) {
  std::uint32_t count = 0;
  const Elem ab = f.add(a, b);
  for (std::uint32_t xv = 0; xv < f.q(); ++xv) {
    const Elem x{xv};
    const Elem v = f.add(f.sub(f.sub(lut[f.add(x, ab).v], lut[f.add(x, b).v]), lut[f.add(x, a).v]), lut[xv]);
    if (v.v == 0) ++count;
  }
  return count;
}

// ---------------------------------------------------------------------------
// Tables

enum class TableKind { DDT, FBCT };

inline const char* to_string(TableKind k) { return k == TableKind::DDT ? "DDT" : "FBCT"; }

struct Witness {
  std::uint32_t value = 0;
  Elem a{}, b{};
  bool found = false;
};

struct SpectrumSummary {
  std::map<std::uint32_t, std::uint64_t> trivial;
  std::map<std::uint32_t, std::uint64_t> nontrivial;
};

/// q x q grid of DDT or FBCT entries. A monomial FBCT is stored as the single
/// row nabla(1, B) and expanded through nabla(a, b) = nabla(1, b/a).
class SpectrumTable {
 public:
  static SpectrumTable from_grid(FieldPtr f, TableKind kind, std::vector<std::uint32_t> grid) {
    SpectrumTable t(std::move(f), kind);
    t.grid_ = std::move(grid);
    return t;
  }
  static SpectrumTable from_monomial_row(FieldPtr f, std::vector<std::uint32_t> row) {
    SpectrumTable t(std::move(f), TableKind::FBCT);
    t.row_ = std::move(row);
    t.scaled_ = true;
    return t;
  }

  const Field& field() const noexcept { return *field_; }
  const FieldPtr& field_ptr() const noexcept { return field_; }
  TableKind kind() const noexcept { return kind_; }
  std::uint32_t q() const noexcept { return field_->q(); }
  bool is_scaled_row() const noexcept { return scaled_; }
  /// nabla(1, B) for a scaled table.
  const std::vector<std::uint32_t>& base_row() const noexcept { return row_; }

  std::uint32_t at(Elem a, Elem b) const {
    if (!scaled_) return grid_[std::size_t{a.v} * q() + b.v];
    if (a.v == 0) return q();
    return row_[field_->div(b, a).v];
  }

  /// DDT: the a = 0 row. FBCT: ab = 0, plus a = b in characteristic 2.
  bool is_trivial(Elem a, Elem b) const noexcept {
    if (kind_ == TableKind::DDT) return a.v == 0;
    return a.v == 0 || b.v == 0 || (field_->p() == 2 && a == b);
  }

  SpectrumSummary summary() const {
    SpectrumSummary s;
    const std::uint32_t qq = q();
    if (scaled_) {
      s.trivial[qq] += qq;  // a = 0
      for (std::uint32_t B = 0; B < qq; ++B) {
        const bool triv = B == 0 || (field_->p() == 2 && B == 1);
        (triv ? s.trivial : s.nontrivial)[row_[B]] += qq - 1;
      }
    } else {
      for (std::uint32_t a = 0; a < qq; ++a)
        for (std::uint32_t b = 0; b < qq; ++b)
          (is_trivial(Elem{a}, Elem{b}) ? s.trivial : s.nontrivial)[grid_[std::size_t{a} * qq + b]] += 1;
    }
    return s;
  }

  /// Maximum over nontrivial cells with the lexicographically first witness.
  Witness uniformity() const {
    Witness w;
    const std::uint32_t qq = q();
    if (scaled_) {
      for (std::uint32_t B = 1; B < qq; ++B) {
        if (field_->p() == 2 && B == 1) continue;
        if (!w.found || row_[B] > w.value) w = {row_[B], field_->one(), Elem{B}, true};
      }
      return w;
    }
    for (std::uint32_t a = 0; a < qq; ++a)
      for (std::uint32_t b = 0; b < qq; ++b) {
        if (is_trivial(Elem{a}, Elem{b})) continue;
        const std::uint32_t v = grid_[std::size_t{a} * qq + b];
        if (!w.found || v > w.value) w = {v, Elem{a}, Elem{b}, true};
      }
    return w;
  }

 private:
  SpectrumTable(FieldPtr f, TableKind kind) : field_(std::move(f)), kind_(kind) {}

  FieldPtr field_;
  TableKind kind_;
  bool scaled_ = false;
  std::vector<std::uint32_t> grid_;
  std::vector<std::uint32_t> row_;
};

/// nabla_F(1, B) for every B; F must be a monomial.
inline std::vector<std::uint32_t> sozd_row_monomial(const Field& f, const FuncSpec& F) {
  if (!F.is_monomial()) throw Error(ErrorCode::NotAMonomial, "scaling row needs a monomial");
  const auto lut = materialize(f, F);
  return sozd_row(f, lut, f.one());
}

namespace detail {

template <class RowFn>
std::vector<std::uint32_t> full_grid(const Field& f, RowFn&& row_fn) {
  const std::uint32_t q = f.q();
  std::vector<std::uint32_t> grid(std::size_t{q} * q);
  const unsigned workers = std::max(1u, std::min<unsigned>(thread_count(), q));
  // One scratch per worker slot; rows are assigned to slots by index.
  std::vector<RowScratch> scratch(workers);
  std::vector<std::vector<std::uint32_t>> rows(workers);
  parallel_for(0, workers, [&](std::uint64_t w) {
    for (std::uint32_t a = static_cast<std::uint32_t>(w); a < q; a += workers) {
      row_fn(Elem{a}, rows[w], scratch[w]);
      std::copy(rows[w].begin(), rows[w].end(), grid.begin() + std::size_t{a} * q);
    }
  });
  return grid;
}

}  // namespace detail

inline SpectrumTable ddt_table(const Field& f, std::span<const Elem> lut) {
  auto grid = detail::full_grid(f, [&](Elem a, auto& row, auto& s) { ddt_row_into(f, lut, a, row, s); });
  return SpectrumTable::from_grid(f.shared_from_this(), TableKind::DDT, std::move(grid));
}

/// Full FBCT grid regardless of the function's form.
inline SpectrumTable fbct_table_full(const Field& f, std::span<const Elem> lut) {
  auto grid = detail::full_grid(f, [&](Elem a, auto& row, auto& s) { sozd_row_into(f, lut, a, row, s); });
  return SpectrumTable::from_grid(f.shared_from_this(), TableKind::FBCT, std::move(grid));
}

/// Monomials go through the scaling row, everything else through the grid.
inline SpectrumTable fbct_table(const Field& f, const FuncSpec& F) {
  if (F.is_monomial()) return SpectrumTable::from_monomial_row(f.shared_from_this(), sozd_row_monomial(f, F));
  const auto lut = materialize(f, F);
  return fbct_table_full(f, lut);
}

inline Witness sozd_uniformity(const Field& f, const FuncSpec& F) { return fbct_table(f, F).uniformity(); }

/// Delta_F = max over a != 0 and all b, with the first maximizing (a, b).
inline Witness differential_uniformity(const Field& f, std::span<const Elem> lut) {
  const std::uint32_t q = f.q();
  std::vector<Witness> per_row(q);
  parallel_for(1, q, [&](std::uint64_t av) {
    RowScratch s;
    std::vector<std::uint32_t> row;
    const Elem a{static_cast<std::uint32_t>(av)};
    ddt_row_into(f, lut, a, row, s);
    Witness w;
    for (std::uint32_t b = 0; b < q; ++b)
      if (!w.found || row[b] > w.value) w = {row[b], a, Elem{b}, true};
    per_row[av] = w;
  });
  Witness best;
  for (std::uint32_t a = 1; a < q; ++a)
    if (!best.found || per_row[a].value > best.value) best = per_row[a];
  return best;
}

// ---------------------------------------------------------------------------
// Classification

struct Classification {
  bool holds = false;
  Witness witness;  // maximizing DDT cell
};

/// APN: Delta_F = 2.
inline Classification is_apn(const Field& f, std::span<const Elem> lut) {
  const Witness w = differential_uniformity(f, lut);
  return {w.value == 2, w};
}

/// PN: Delta_F = 1; odd characteristic only.
inline Classification is_pn(const Field& f, std::span<const Elem> lut) {
  if (f.p() == 2) throw Error(ErrorCode::EvenCharacteristic, "PN functions need odd characteristic");
  const Witness w = differential_uniformity(f, lut);
  return {w.value == 1, w};
}

struct PartialApnResult {
  bool holds = true;
  std::optional<std::pair<Elem, Elem>> violation;
};

/// x0-APN: F(x0)+F(x)+F(y)+F(x0+x+y) = 0 only when x = x0, y = x0 or x = y.
inline PartialApnResult is_partial_apn(const Field& f, std::span<const Elem> lut, Elem x0) {
  if (f.p() != 2) throw Error(ErrorCode::OddCharacteristic, "partial APN is defined in characteristic 2");
  PartialApnResult out;
  const Elem fx0 = lut[x0.v];
  for (std::uint32_t xv = 0; xv < f.q(); ++xv) {
    const Elem x{xv};
    if (x == x0) continue;
    const Elem base = f.add(fx0, lut[xv]);
    for (std::uint32_t yv = xv + 1; yv < f.q(); ++yv) {
      const Elem y{yv};
      if (y == x0) continue;
      if (f.add(f.add(base, lut[yv]), lut[f.add(f.add(x0, x), y).v]).v == 0) {
        out.holds = false;
        out.violation = {x, y};
        return out;
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// EA equivalence

/// x -> M x + c with M acting on base-p digit vectors.
struct AffineMap {
  PrimeMatrix linear;
  Elem constant{};

  Elem apply(const Field& f, Elem x) const {
    const auto d = f.digits(x);
    std::vector<std::uint32_t> out(f.n(), 0);
    for (unsigned r = 0; r < f.n(); ++r) {
      std::uint64_t acc = 0;
      for (unsigned c = 0; c < f.n(); ++c) acc += std::uint64_t{linear(r, c)} * d[c];
      out[r] = static_cast<std::uint32_t>(acc % f.p());
    }
    return f.add(f.from_digits(out), constant);
  }

  bool is_permutation() const { return rref(linear).rank() == linear.rows(); }
};

template <class Rng>
AffineMap random_affine_map(const Field& f, Rng& rng, bool permutation) {
  std::uniform_int_distribution<std::uint32_t> digit(0, f.p() - 1), elem(0, f.q() - 1);
  for (;;) {
    AffineMap m{PrimeMatrix(f.n(), f.n(), f.p()), Elem{elem(rng)}};
    for (unsigned r = 0; r < f.n(); ++r)
      for (unsigned c = 0; c < f.n(); ++c) m.linear(r, c) = digit(rng);
    if (!permutation || m.is_permutation()) return m;
  }
}

/// G = P o F o Q + A as a lookup table.
inline FuncSpec ea_transform(const Field& f, std::span<const Elem> lut, const AffineMap& P, const AffineMap& Q,
                             const AffineMap& A) {
  if (!P.is_permutation() || !Q.is_permutation())
    throw Error(ErrorCode::NotAPermutation, "P and Q must be affine permutations");
  Lut out;
  out.values.resize(f.q());
  for (std::uint32_t x = 0; x < f.q(); ++x) {
    const Elem fx = lut[Q.apply(f, Elem{x}).v];
    out.values[x] = f.add(P.apply(f, fx), A.apply(f, Elem{x}));
  }
  return FuncSpec{std::move(out)};
}

}  // namespace ffspectra
