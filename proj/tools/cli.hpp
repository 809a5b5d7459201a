#pragma once

#include <cstdint>
#include <fstream>
#include <memory>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ffspectra/ffspectra.hpp"

namespace ffspectra::cli {

inline constexpr std::uint64_t kGridBudget = std::uint64_t{1} << 10;
inline constexpr std::uint64_t kMonomialBudget = std::uint64_t{1} << 16;

struct FieldArgs {
  std::uint32_t p = 2;
  unsigned n = 1;
  std::vector<std::uint32_t> modulus;

  void attach(CLI::App* cmd) {
    cmd->add_option("--p", p, "characteristic")->required();
    cmd->add_option("--n", n, "extension degree")->required();
    cmd->add_option("--modulus", modulus, "modulus coefficients, low to high")->delimiter(',');
  }
  FieldPtr make() const {
    return mk_field(p, n, modulus.empty() ? std::nullopt : std::optional<std::vector<std::uint32_t>>(modulus));
  }
};

struct TableArgs {
  FieldArgs field;
  std::string func;
  std::string out_path;
  std::string format;
  bool force = false;

  void attach(CLI::App* cmd) {
    field.attach(cmd);
    cmd->add_option("--func", func, "function, e.g. \"x^9 + x^4\"")->required();
    cmd->add_option("--out", out_path, "write the table to a file");
    cmd->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    cmd->add_flag("--force", force, "ignore the size budget");
  }
};

inline void check_budget(const Field& f, std::uint64_t limit, bool force, const char* what) {
  if (force || f.q() <= limit) return;
  throw Error(ErrorCode::BudgetExceeded, std::string(what) + " over q = " + std::to_string(f.q()) + " exceeds the budget q <= " +
                                             std::to_string(limit) + " (use --force)");
}

inline void print_summary(std::ostream& out, const SpectrumSummary& s) {
  auto side = [&](const char* name, const std::map<std::uint32_t, std::uint64_t>& m) {
    out << name << ':';
    for (const auto& [v, cnt] : m) out << ' ' << v << 'x' << cnt;
    out << '\n';
  };
  side("spectrum nontrivial", s.nontrivial);
  side("spectrum trivial", s.trivial);
}

inline void print_field_line(std::ostream& out, const Field& f) {
  out << "field GF(" << f.p() << '^' << f.n() << ") q=" << f.q() << " modulus " << f.modulus_string() << '\n';
}

/// Writes the table when --out or --format asks for it; stdout when no file is given.
inline void export_table(std::ostream& out, const TableArgs& args, const SpectrumTable& t) {
  if (args.out_path.empty() && args.format.empty()) return;
  std::string format = args.format;
  if (format.empty()) format = args.out_path.ends_with(".json") ? "json" : "csv";
  std::ofstream file;
  std::ostream* dst = &out;
  if (!args.out_path.empty()) {
    file.open(args.out_path, std::ios::binary);
    if (!file) throw Error(ErrorCode::InvalidArgument, "cannot open " + args.out_path);
    dst = &file;
  }
  if (format == "json") {
    *dst << to_json(t, args.func).dump(2) << '\n';
  } else {
    write_csv(*dst, t);
  }
  if (file.is_open()) {
    file.close();
    if (!file) throw Error(ErrorCode::InvalidArgument, "failed writing " + args.out_path);
  }
}

inline int cmd_field(std::ostream& out, const FieldArgs& args) {
  const FieldPtr f = args.make();
  out << "q=" << f->q() << '\n';
  out << "modulus " << f->modulus_string() << '\n';
  out << "modulus coefficients";
  for (auto c : f->modulus()) out << ' ' << c;
  out << '\n';
  out << "generator " << f->generator().v << '\n';
  out << "log tables " << (f->has_log_tables() ? "yes" : "no") << '\n';
  return 0;
}

inline int cmd_fbct(std::ostream& out, const TableArgs& args) {
  const FieldPtr f = args.field.make();
  const FuncSpec F = parse_function(*f, args.func);
  validate(*f, F);
  check_budget(*f, F.is_monomial() ? kMonomialBudget : kGridBudget, args.force, "FBCT");
  const SpectrumTable t = fbct_table(*f, F);
  const Witness w = t.uniformity();
  if (!args.out_path.empty() || args.format.empty()) {
    print_field_line(out, *f);
    out << "function " << to_string(parse_expr(args.func)) << '\n';
    out << "nabla=" << w.value;
    if (w.found) out << " at a=" << w.a.v << " b=" << w.b.v;
    out << '\n';
    print_summary(out, t.summary());
  }
  export_table(out, args, t);
  return 0;
}

inline int cmd_ddt(std::ostream& out, const TableArgs& args) {
  const FieldPtr f = args.field.make();
  const FuncSpec F = parse_function(*f, args.func);
  validate(*f, F);
  check_budget(*f, kGridBudget, args.force, "DDT");
  const auto lut = materialize(*f, F);
  const SpectrumTable t = ddt_table(*f, lut);
  const Witness w = t.uniformity();
  if (!args.out_path.empty() || args.format.empty()) {
    print_field_line(out, *f);
    out << "function " << to_string(parse_expr(args.func)) << '\n';
    out << "delta=" << w.value << " at a=" << w.a.v << " b=" << w.b.v << '\n';
    print_summary(out, t.summary());
  }
  export_table(out, args, t);
  return 0;
}

inline int cmd_uniformity(std::ostream& out, const TableArgs& args) {
  const FieldPtr f = args.field.make();
  const FuncSpec F = parse_function(*f, args.func);
  validate(*f, F);
  check_budget(*f, F.is_monomial() ? kMonomialBudget : kGridBudget, args.force, "uniformity");
  const auto lut = materialize(*f, F);
  Witness delta;
  if (F.is_monomial()) {
    // Delta(a, b) = Delta(1, b / a^d) for a monomial.
    const auto row = ddt_row(*f, lut, f->one());
    for (std::uint32_t b = 0; b < f->q(); ++b)
      if (!delta.found || row[b] > delta.value) delta = {row[b], f->one(), Elem{b}, true};
  } else {
    delta = differential_uniformity(*f, lut);
  }
  const Witness nabla = fbct_table(*f, F).uniformity();
  print_field_line(out, *f);
  out << "function " << to_string(parse_expr(args.func)) << '\n';
  out << "delta=" << delta.value << '\n';
  out << "nabla=" << nabla.value << '\n';
  if (f->p() == 2) {
    out << "apn " << (delta.value == 2 ? "yes" : "no") << '\n';
  } else {
    out << "pn " << (delta.value == 1 ? "yes" : "no") << '\n';
    const Parity par = parity_of(*f, lut);
    out << "parity " << (par == Parity::Odd ? "odd" : par == Parity::Even ? "even" : "none") << '\n';
  }
  return 0;
}

struct SolveArgs {
  FieldArgs field;
  std::string kind;
  unsigned k = 1;
  unsigned t = 2;
  std::string A = "0", B = "0", a = "1", b = "0";
};

inline void print_outcome(std::ostream& out, const SolveOutcome& s) {
  out << "certificate " << s.certificate << '\n';
  out << "roots " << s.roots.size();
  for (Elem r : s.roots) out << ' ' << r.v;
  out << '\n';
  for (const auto& [k, v] : s.quantities) out << k << ' ' << v << '\n';
}

inline int cmd_solve(std::ostream& out, const SolveArgs& args) {
  const FieldPtr f = args.field.make();
  if (args.kind == "trinomial") {
    const TrinomialInstance inst{args.k, parse_element(*f, args.A), parse_element(*f, args.B)};
    print_outcome(out, solve_trinomial(*f, inst));
  } else if (args.kind == "quadratic") {
    print_outcome(out, solve_quadratic_char2(*f, parse_element(*f, args.a), parse_element(*f, args.b)));
  } else if (args.kind == "cubic") {
    const CubicOutcome c = classify_cubic_char2(*f, parse_element(*f, args.a));
    out << "shape " << to_string(c.shape) << '\n';
    out << "roots " << c.roots.size();
    for (Elem r : c.roots) out << ' ' << r.v;
    out << '\n';
    if (c.t_cubes) out << "t_cubes " << (*c.t_cubes ? "yes" : "no") << '\n';
  } else if (args.kind == "companion") {
    const Elem A = parse_element(*f, args.A);
    const CompanionResult c = companion_rank_kernel(*f, A, args.t);
    out << "rank " << c.rank << '\n';
    out << "kernel_dim " << c.kernel_dim << '\n';
  } else {
    throw Error(ErrorCode::InvalidArgument, "unknown solver '" + args.kind + "'");
  }
  return 0;
}

struct VerifyArgs {
  FieldArgs field;
  std::string theorem;
  std::string u = "1";
  unsigned s = 1;
  std::string func;
  unsigned samples = 200;
  std::uint64_t seed = 1;
  std::string format;
  std::string out_path;
};

inline FuncSpec verify_function(const Field& f, TheoremId id, const std::string& text) {
  const FuncSpec F = parse_function(f, text);
  if (id == TheoremId::cubic_general) {
    auto c = as_cubic_form(f, as_sparse(F));
    if (!c) throw Error(ErrorCode::MalformedCubic, "exponents must have the form p^i + p^j + 1 with 0 < i < j < n");
    return FuncSpec{*c};
  }
  if (id == TheoremId::do_poly) {
    auto d = as_do_poly(f, as_sparse(F));
    if (!d) throw Error(ErrorCode::InvalidFunction, "exponents must have the form p^i + p^j");
    return FuncSpec{*d};
  }
  return F;
}

inline int cmd_verify(std::ostream& out, const VerifyArgs& args) {
  const auto id = theorem_from_string(args.theorem);
  if (!id) throw Error(ErrorCode::InvalidArgument, "unknown theorem '" + args.theorem + "'");
  VerifyParams params;
  params.p = args.field.p;
  params.n = args.field.n;
  if (!args.field.modulus.empty()) params.modulus = args.field.modulus;
  params.s = args.s;
  params.samples = args.samples;
  params.seed = args.seed;
  // Elements that depend on the field (u, coefficients) resolve against the same modulus.
  const FieldPtr f = args.field.make();
  params.u = parse_element(*f, args.u);
  if (!args.func.empty()) params.func = verify_function(*f, *id, args.func);

  const VerifyReport rep = verify_theorem(*id, params);
  if (args.format == "json" || !args.out_path.empty()) {
    const std::string text = to_json(rep).dump(2);
    if (args.out_path.empty()) {
      out << text << '\n';
    } else {
      std::ofstream file(args.out_path, std::ios::binary);
      if (!file) throw Error(ErrorCode::InvalidArgument, "cannot open " + args.out_path);
      file << text << '\n';
    }
  }
  if (args.format != "json" || !args.out_path.empty()) {
    out << "theorem " << to_string(rep.theorem) << '\n';
    print_field_line(out, *rep.field);
    out << "function " << rep.function << '\n';
    out << "cells " << rep.cells_checked << " mismatches " << rep.mismatch_count << " conflicts " << rep.conflict_count << '\n';
    for (const auto& m : rep.mismatches)
      out << "  mismatch a=" << m.a.v << " b=" << m.b.v << " predicted " << m.predicted << " actual " << m.actual << " ["
          << m.case_label << "]\n";
    for (const auto& [k, v] : rep.facts) out << k << '=' << v << ' ';
    out << "nabla=" << rep.uniformity;
    if (rep.bound) out << " bound " << *rep.bound;
    out << ' ' << (rep.passed() ? "PASS" : "FAIL") << '\n';
  }
  return rep.passed() ? 0 : 1;
}

struct SearchArgs {
  std::uint32_t p = 2;
  std::string n_range;
  std::string family = "monomial";
  std::string predicate = "apn";
  std::vector<std::uint64_t> exps;
  bool force = false;
};

inline std::pair<unsigned, unsigned> parse_range(const std::string& text) {
  auto to_uint = [&](const std::string& s) {
    try {
      std::size_t used = 0;
      const unsigned long v = std::stoul(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return static_cast<unsigned>(v);
    } catch (const std::exception&) {
      throw Error(ErrorCode::ParseError, "bad degree range '" + text + "'");
    }
  };
  for (const std::string sep : {"..", "-", ":"}) {
    if (auto pos = text.find(sep); pos != std::string::npos)
      return {to_uint(text.substr(0, pos)), to_uint(text.substr(pos + sep.size()))};
  }
  const unsigned v = to_uint(text);
  return {v, v};
}

struct Predicate {
  enum class Kind { Apn, ZeroApn, NablaAtMost } kind = Kind::Apn;
  std::uint32_t k = 0;
};

inline Predicate parse_predicate(const std::string& text) {
  if (text == "apn") return {Predicate::Kind::Apn, 0};
  if (text == "0apn") return {Predicate::Kind::ZeroApn, 0};
  for (const std::string prefix : {"nabla<=", "nabla"}) {
    if (!text.starts_with(prefix)) continue;
    const std::string rest = text.substr(prefix.size());
    std::uint32_t k = 0;
    auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), k);
    if (rest.empty() || ec != std::errc{} || ptr != rest.data() + rest.size()) break;
    return {Predicate::Kind::NablaAtMost, k};
  }
  throw Error(ErrorCode::ParseError, "unknown predicate '" + text + "' (apn, 0apn, nabla<=K)");
}

inline int cmd_search(std::ostream& out, const SearchArgs& args) {
  if (args.family != "monomial") throw Error(ErrorCode::InvalidArgument, "unknown family '" + args.family + "'");
  const Predicate pred = parse_predicate(args.predicate);
  const auto [lo, hi] = parse_range(args.n_range);
  if (lo == 0 || hi < lo) throw Error(ErrorCode::InvalidArgument, "empty degree range");
  std::uint64_t hits = 0;
  for (unsigned n = lo; n <= hi; ++n) {
    const FieldPtr f = mk_field(args.p, n, std::nullopt);
    if (pred.kind == Predicate::Kind::ZeroApn && f->p() != 2)
      throw Error(ErrorCode::OddCharacteristic, "0-APN is defined in characteristic 2");
    const bool single = !args.exps.empty();
    // A full sweep costs q functions, so it gets the grid budget.
    std::uint64_t limit = single ? kMonomialBudget : kGridBudget;
    if (pred.kind == Predicate::Kind::ZeroApn && single) limit = std::uint64_t{1} << 12;
    check_budget(*f, limit, args.force, "search");
    std::vector<std::uint64_t> exps = args.exps;
    if (exps.empty())
      for (std::uint64_t d = 1; d < f->q(); ++d) exps.push_back(d);
    for (std::uint64_t d : exps) {
      const FuncSpec F = monomial(d);
      const auto lut = materialize(*f, F);
      bool hit = false;
      std::string detail;
      switch (pred.kind) {
        case Predicate::Kind::Apn: {
          const auto row = ddt_row(*f, lut, f->one());
          const std::uint32_t delta = *std::max_element(row.begin(), row.end());
          hit = delta == 2;
          detail = "delta=" + std::to_string(delta);
          break;
        }
        case Predicate::Kind::ZeroApn: {
          const auto r = is_partial_apn(*f, lut, f->zero());
          hit = r.holds;
          if (r.violation) detail = "violation x=" + std::to_string(r.violation->first.v) + " y=" + std::to_string(r.violation->second.v);
          break;
        }
        case Predicate::Kind::NablaAtMost: {
          const std::uint32_t nabla = fbct_table(*f, F).uniformity().value;
          hit = nabla <= pred.k;
          detail = "nabla=" + std::to_string(nabla);
          break;
        }
      }
      if (hit) ++hits;
      if (hit || single) {
        out << (hit ? "HIT" : "MISS") << " n=" << n << " d=" << d;
        if (!detail.empty()) out << ' ' << detail;
        out << '\n';
      }
    }
  }
  out << "hits " << hits << '\n';
  return 0;
}

/// Entry point shared by the executable and the tests.
inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Difference and second-order zero differential spectra over finite fields", "ffspectra"};
  app.require_subcommand(1);
  unsigned threads = 0;
  app.add_option("--threads", threads, "worker threads (default: FFSPECTRA_THREADS or all cores)");

  FieldArgs field_args;
  auto* field_cmd = app.add_subcommand("field", "show the field context");
  field_args.attach(field_cmd);

  TableArgs fbct_args, ddt_args, unif_args;
  fbct_args.attach(app.add_subcommand("fbct", "FBCT / second-order zero differential spectrum"));
  ddt_args.attach(app.add_subcommand("ddt", "difference distribution table"));
  auto* unif_cmd = app.add_subcommand("uniformity", "differential and boomerang uniformity");
  unif_args.field.attach(unif_cmd);
  unif_cmd->add_option("--func", unif_args.func, "function")->required();
  unif_cmd->add_flag("--force", unif_args.force, "ignore the size budget");

  SolveArgs solve_args;
  auto* solve_cmd = app.add_subcommand("solve", "run one of the equation solvers");
  solve_cmd->add_option("kind", solve_args.kind, "trinomial, quadratic, cubic or companion")
      ->required()
      ->check(CLI::IsMember({"trinomial", "quadratic", "cubic", "companion"}));
  solve_args.field.attach(solve_cmd);
  solve_cmd->add_option("--k", solve_args.k, "trinomial: X^(p^k) - A X - B");
  solve_cmd->add_option("--t", solve_args.t, "companion: Y^(2^t) + A Y^2 + (1+A) Y");
  solve_cmd->add_option("--A", solve_args.A, "element");
  solve_cmd->add_option("--B", solve_args.B, "element");
  solve_cmd->add_option("--a", solve_args.a, "element");
  solve_cmd->add_option("--b", solve_args.b, "element");

  VerifyArgs verify_args;
  auto* verify_cmd = app.add_subcommand("verify", "compare a closed form against brute force");
  verify_args.field.attach(verify_cmd);
  verify_cmd->add_option("--theorem", verify_args.theorem, "theorem id")->required();
  verify_cmd->add_option("--u", verify_args.u, "binomial coefficient u");
  verify_cmd->add_option("--s", verify_args.s, "inverse-like parameter s");
  verify_cmd->add_option("--func", verify_args.func, "function for apn_char, pn_char, cubic_general, do_poly");
  verify_cmd->add_option("--samples", verify_args.samples, "nabla1_apn: random polynomials");
  verify_cmd->add_option("--seed", verify_args.seed, "nabla1_apn: RNG seed");
  verify_cmd->add_option("--format", verify_args.format, "text or json")->check(CLI::IsMember({"text", "json"}));
  verify_cmd->add_option("--out", verify_args.out_path, "write the JSON report to a file");

  SearchArgs search_args;
  auto* search_cmd = app.add_subcommand("search", "sweep a family for a predicate");
  search_cmd->add_option("--family", search_args.family, "function family")->check(CLI::IsMember({"monomial"}));
  search_cmd->add_option("--p", search_args.p, "characteristic")->required();
  search_cmd->add_option("--n", search_args.n_range, "degree or range lo..hi")->required();
  search_cmd->add_option("--predicate", search_args.predicate, "apn, 0apn or nabla<=K");
  search_cmd->add_option("--exp", search_args.exps, "restrict to these exponents")->delimiter(',');
  search_cmd->add_flag("--force", search_args.force, "ignore the size budget");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }
  if (threads > 0) set_thread_count(threads);

  try {
    if (*field_cmd) return cmd_field(out, field_args);
    if (app.got_subcommand("fbct")) return cmd_fbct(out, fbct_args);
    if (app.got_subcommand("ddt")) return cmd_ddt(out, ddt_args);
    if (*unif_cmd) return cmd_uniformity(out, unif_args);
    if (*solve_cmd) return cmd_solve(out, solve_args);
    if (*verify_cmd) return cmd_verify(out, verify_args);
    if (*search_cmd) return cmd_search(out, search_args);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}

}  // namespace ffspectra::cli
