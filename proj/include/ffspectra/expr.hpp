#pragma once

#include <cctype>
#include <charconv>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ffspectra/error.hpp"
#include "ffspectra/field.hpp"
#include "ffspectra/spectra.hpp"

namespace ffspectra {

/// Function text such as "x^9 + x^4" or "g^3*x^5 + 2*x^2". Exponents are kept
/// literally; coefficients resolve against a field only in to_funcspec.
struct FuncExpr {
  enum class Coef { One, GeneratorPower, Encoding };
  struct Term {
    Coef kind = Coef::One;
    std::uint64_t value = 0;  // K of g^K, or the decimal encoding
    std::uint64_t exp = 1;

    bool operator==(const Term&) const = default;
  };
  std::vector<Term> terms;

  bool operator==(const FuncExpr&) const = default;
};

namespace detail {

class ExprParser {
 public:
  explicit ExprParser(std::string_view text) : text_(text) {}

  FuncExpr parse() {
    FuncExpr out;
    skip_ws();
    if (pos_ == text_.size()) fail("empty expression");
    for (;;) {
      out.terms.push_back(term());
      skip_ws();
      if (pos_ == text_.size()) break;
      expect('+');
      skip_ws();
    }
    return out;
  }

 private:
  FuncExpr::Term term() {
    FuncExpr::Term t;
    if (peek() == 'g') {
      ++pos_;
      skip_ws();
      t.kind = FuncExpr::Coef::GeneratorPower;
      t.value = 1;  // bare "g"
      if (peek() == '^') {
        ++pos_;
        skip_ws();
        t.value = number();
        skip_ws();
      }
      expect('*');
      skip_ws();
    } else if (std::isdigit(static_cast<unsigned char>(peek()))) {
      t.kind = FuncExpr::Coef::Encoding;
      t.value = number();
      skip_ws();
      expect('*');
      skip_ws();
    }
    if (peek() != 'x' && peek() != 'X') fail("expected 'x'");
    ++pos_;
    skip_ws();
    expect('^');
    skip_ws();
    t.exp = number();
    return t;
  }

  std::uint64_t number() {
    const std::size_t start = pos_;
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(text_.data() + pos_, text_.data() + text_.size(), v);
    if (ec == std::errc::result_out_of_range) fail("number too large");
    if (ec != std::errc{}) fail("expected a number");
    pos_ = static_cast<std::size_t>(ptr - text_.data());
    if (pos_ == start) fail("expected a number");
    return v;
  }

  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  [[noreturn]] void fail(const std::string& what) const {
    std::string msg = what + " at position " + std::to_string(pos_);
    if (pos_ < text_.size()) msg += " near '" + std::string(text_.substr(pos_, 8)) + "'";
    throw Error(ErrorCode::ParseError, msg);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline FuncExpr parse_expr(std::string_view text) { return detail::ExprParser(text).parse(); }

inline std::string to_string(const FuncExpr& e) {
  std::string out;
  for (const auto& t : e.terms) {
    if (!out.empty()) out += " + ";
    if (t.kind == FuncExpr::Coef::GeneratorPower) out += "g^" + std::to_string(t.value) + "*";
    if (t.kind == FuncExpr::Coef::Encoding) out += std::to_string(t.value) + "*";
    out += "x^" + std::to_string(t.exp);
  }
  return out;
}

/// A single term with coefficient 1 becomes a Monomial, anything else a SparsePoly.
inline FuncSpec to_funcspec(const Field& f, const FuncExpr& e) {
  if (e.terms.size() == 1 && e.terms[0].kind == FuncExpr::Coef::One) return monomial(e.terms[0].exp);
  SparsePoly poly;
  for (const auto& t : e.terms) {
    Elem c = f.one();
    if (t.kind == FuncExpr::Coef::GeneratorPower) c = f.pow(f.generator(), t.value);
    if (t.kind == FuncExpr::Coef::Encoding) {
      if (t.value >= f.q()) throw Error(ErrorCode::ParseError, "coefficient " + std::to_string(t.value) + " is not below q");
      c = Elem{static_cast<std::uint32_t>(t.value)};
    }
    poly.terms.push_back({c, t.exp});
  }
  return FuncSpec{poly};
}

inline FuncSpec parse_function(const Field& f, std::string_view text) { return to_funcspec(f, parse_expr(text)); }

/// Reads a sparse polynomial as sum c_ij X^(p^i+p^j+1), 0 < i < j < n, if every
/// exponent has that shape.
inline std::optional<CubicForm> as_cubic_form(const Field& f, const SparsePoly& poly) {
  CubicForm out;
  for (const auto& t : poly.terms) {
    bool matched = false;
    for (unsigned i = 1; i < f.n() && !matched; ++i)
      for (unsigned j = i + 1; j < f.n() && !matched; ++j)
        if (t.exp == std::uint64_t{f.p_power(i)} + f.p_power(j) + 1) {
          out.terms.push_back({i, j, t.coef});
          matched = true;
        }
    if (!matched) return std::nullopt;
  }
  return out;
}

/// Reads a sparse polynomial as sum a_ij X^(p^i+p^j), i <= j < n.
inline std::optional<DOPoly> as_do_poly(const Field& f, const SparsePoly& poly) {
  DOPoly out;
  for (const auto& t : poly.terms) {
    bool matched = false;
    for (unsigned i = 0; i < f.n() && !matched; ++i)
      for (unsigned j = i; j < f.n() && !matched; ++j)
        if (t.exp == std::uint64_t{f.p_power(i)} + f.p_power(j)) {
          out.terms.push_back({i, j, t.coef});
          matched = true;
        }
    if (!matched) return std::nullopt;
  }
  return out;
}

inline SparsePoly as_sparse(const FuncSpec& F) {
  if (const auto* m = std::get_if<Monomial>(&F.body)) return SparsePoly{{{Elem{1}, m->d}}};
  if (const auto* s = std::get_if<SparsePoly>(&F.body)) return *s;
  throw Error(ErrorCode::InvalidFunction, "expected a polynomial expression");
}

}  // namespace ffspectra
