#include "ffspectra/spectra.hpp"

#include <gtest/gtest.h>

#include <random>

namespace ffspectra {
namespace {

FuncSpec sparse(std::initializer_list<std::pair<std::uint32_t, std::uint64_t>> terms) {
  SparsePoly p;
  for (auto [c, e] : terms) p.terms.push_back({Elem{c}, e});
  return FuncSpec{p};
}

// Reference grid from the literal four-term equation.
std::vector<std::uint32_t> brute_fbct(const Field& f, const FunctionTable& lut) {
  std::vector<std::uint32_t> grid(std::size_t{f.q()} * f.q());
  for (std::uint32_t a = 0; a < f.q(); ++a)
    for (std::uint32_t b = 0; b < f.q(); ++b) grid[std::size_t{a} * f.q() + b] = sozd_entry(f, lut, Elem{a}, Elem{b});
  return grid;
}

std::uint32_t brute_nabla(const Field& f, const FunctionTable& lut) {
  std::uint32_t best = 0;
  for (std::uint32_t a = 1; a < f.q(); ++a)
    for (std::uint32_t b = 1; b < f.q(); ++b) {
      if (f.p() == 2 && a == b) continue;
      best = std::max(best, sozd_entry(f, lut, Elem{a}, Elem{b}));
    }
  return best;
}

std::uint32_t brute_delta(const Field& f, const FunctionTable& lut) {
  std::uint32_t best = 0;
  for (std::uint32_t a = 1; a < f.q(); ++a)
    for (std::uint32_t b = 0; b < f.q(); ++b) best = std::max(best, ddt_entry(f, lut, Elem{a}, Elem{b}));
  return best;
}

FuncSpec random_sparse(const Field& f, std::mt19937_64& rng, Parity parity) {
  SparsePoly p;
  const unsigned terms = 1 + rng() % 3;
  for (unsigned i = 0; i < terms; ++i) {
    std::uint64_t e = 1 + rng() % (f.q() - 1);
    if (parity == Parity::Odd && e % 2 == 0) e = e + 1 == f.q() ? e - 1 : e + 1;
    if (parity == Parity::Even && e % 2 == 1) e = e + 1 == f.q() ? e - 1 : e + 1;
    p.terms.push_back({Elem{static_cast<std::uint32_t>(1 + rng() % (f.q() - 1))}, e});
  }
  return FuncSpec{p};
}

// ---------------------------------------------------------------------------

TEST(Eval, Examples) {
  auto f = mk_field(2, 5);
  for (std::uint32_t x = 0; x < f->q(); ++x) EXPECT_EQ(eval(*f, monomial(1), Elem{x}), Elem{x});
  auto f11 = mk_field(11, 1);
  EXPECT_EQ(eval(*f11, sparse({{1, 9}, {1, 4}}), Elem{2}), Elem{0});
  // d = 0 maps everything to 1; 0^d = 0 for d > 0, also when d is a multiple of q-1.
  EXPECT_EQ(eval(*f11, monomial(0), Elem{0}), Elem{1});
  EXPECT_EQ(eval(*f11, monomial(10), Elem{0}), Elem{0});
  EXPECT_EQ(eval(*f11, monomial(10), Elem{3}), Elem{1});
}

TEST(Eval, LutRoundTrip) {
  auto f = mk_field(3, 3);
  const FuncSpec F = sparse({{2, 5}, {7, 11}, {1, 26}});
  const auto lut = materialize(*f, F);
  const FuncSpec L{Lut{lut}};
  for (std::uint32_t x = 0; x < f->q(); ++x) EXPECT_EQ(eval(*f, L, Elem{x}), eval(*f, F, Elem{x}));
}

TEST(Eval, CubicAndDoForms) {
  auto f = mk_field(3, 3);
  const FuncSpec cubic{CubicForm{{{1, 2, Elem{5}}}}};
  const FuncSpec dop{DOPoly{{{0, 1, Elem{4}}, {1, 1, Elem{2}}}}};
  for (std::uint32_t x = 0; x < f->q(); ++x) {
    const Elem e{x};
    EXPECT_EQ(eval(*f, cubic, e), f->mul(Elem{5}, f->pow(e, 3 + 9 + 1)));
    EXPECT_EQ(eval(*f, dop, e), f->add(f->mul(Elem{4}, f->pow(e, 1 + 3)), f->mul(Elem{2}, f->pow(e, 6))));
  }
}

TEST(Validate, RejectsBadInput) {
  auto f = mk_field(2, 4);
  EXPECT_THROW(validate(*f, FuncSpec{Lut{std::vector<Elem>(15)}}), Error);
  EXPECT_THROW(validate(*f, FuncSpec{CubicForm{{{0, 2, Elem{1}}}}}), Error);
  EXPECT_THROW(validate(*f, FuncSpec{CubicForm{{{2, 2, Elem{1}}}}}), Error);
  auto f3 = mk_field(3, 2);
  FuncSpec even = monomial(3);
  even.parity_hint = Parity::Even;
  EXPECT_THROW(validate(*f3, even), Error);
  even.parity_hint = Parity::Odd;
  EXPECT_NO_THROW(validate(*f3, even));
}

// ---------------------------------------------------------------------------

TEST(Ddt, Examples) {
  for (auto [p, n] : std::vector<std::pair<std::uint32_t, unsigned>>{{3, 2}, {5, 1}, {7, 2}, {3, 3}}) {
    auto f = mk_field(p, n);
    EXPECT_EQ(differential_uniformity(*f, materialize(*f, monomial(2))).value, 1u);
  }
  auto f32 = mk_field(2, 5);
  EXPECT_EQ(differential_uniformity(*f32, materialize(*f32, monomial(3))).value, 2u);
  auto f11 = mk_field(11, 1);
  EXPECT_EQ(differential_uniformity(*f11, materialize(*f11, sparse({{1, 9}, {1, 4}}))).value, 3u);
}

TEST(Ddt, ZeroDirectionRejected) {
  auto f = mk_field(2, 3);
  const auto lut = materialize(*f, monomial(3));
  try {
    ddt_entry(*f, lut, f->zero(), f->one());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ZeroDirection);
  }
}

TEST(Ddt, RowsMatchEntriesAndSumToQ) {
  std::mt19937_64 rng(3);
  for (auto [p, n] : std::vector<std::pair<std::uint32_t, unsigned>>{{2, 4}, {2, 6}, {3, 3}, {5, 2}, {7, 1}}) {
    auto f = mk_field(p, n);
    const auto lut = materialize(*f, random_sparse(*f, rng, Parity::None));
    const auto table = ddt_table(*f, lut);
    for (std::uint32_t a = 1; a < f->q(); ++a) {
      std::uint64_t sum = 0;
      for (std::uint32_t b = 0; b < f->q(); ++b) {
        ASSERT_EQ(table.at(Elem{a}, Elem{b}), ddt_entry(*f, lut, Elem{a}, Elem{b}));
        sum += table.at(Elem{a}, Elem{b});
      }
      EXPECT_EQ(sum, f->q());
    }
  }
}

// ---------------------------------------------------------------------------

TEST(Sozd, TrivialEntries) {
  std::mt19937_64 rng(5);
  for (auto [p, n] : std::vector<std::pair<std::uint32_t, unsigned>>{{2, 4}, {3, 2}, {2, 5}}) {
    auto f = mk_field(p, n);
    const auto lut = materialize(*f, random_sparse(*f, rng, Parity::None));
    for (std::uint32_t b = 0; b < f->q(); ++b) EXPECT_EQ(sozd_entry(*f, lut, f->zero(), Elem{b}), f->q());
    if (p == 2) {
      for (std::uint32_t a = 0; a < f->q(); ++a) EXPECT_EQ(sozd_entry(*f, lut, Elem{a}, Elem{a}), f->q());
    }
  }
}

TEST(Sozd, X14OverGf125IsApnWithNablaFour) {
  auto f = mk_field(5, 3);
  const auto lut = materialize(*f, monomial(14));
  EXPECT_EQ(brute_nabla(*f, lut), 4u);
  EXPECT_EQ(brute_delta(*f, lut), 2u);
}

TEST(Sozd, UniformityExamples) {
  auto f32 = mk_field(2, 5);
  EXPECT_EQ(sozd_uniformity(*f32, monomial(3)).value, 0u);
  auto f7 = mk_field(7, 1);
  EXPECT_EQ(sozd_uniformity(*f7, monomial(2)).value, 0u);
  auto f11 = mk_field(11, 1);
  EXPECT_EQ(sozd_uniformity(*f11, sparse({{1, 9}, {1, 4}})).value, 1u);
  EXPECT_EQ(brute_nabla(*f11, materialize(*f11, sparse({{1, 9}, {1, 4}}))), 1u);
}

struct EngineCase {
  std::uint32_t p;
  unsigned n;
};

class EngineOracle : public ::testing::TestWithParam<EngineCase> {};

TEST_P(EngineOracle, BucketRowsMatchDirectZeroTest) {
  auto f = mk_field(GetParam().p, GetParam().n);
  std::mt19937_64 rng(11 + f->q());
  std::vector<FuncSpec> funcs = {monomial(3), monomial(f->q() - 2), random_sparse(*f, rng, Parity::None)};
  Lut random_lut;
  for (std::uint32_t x = 0; x < f->q(); ++x) random_lut.values.push_back(Elem{static_cast<std::uint32_t>(rng() % f->q())});
  funcs.push_back(FuncSpec{random_lut});
  for (const auto& F : funcs) {
    const auto lut = materialize(*f, F);
    const auto expected = brute_fbct(*f, lut);
    const auto table = fbct_table_full(*f, lut);
    for (std::uint32_t a = 0; a < f->q(); ++a)
      for (std::uint32_t b = 0; b < f->q(); ++b)
        ASSERT_EQ(table.at(Elem{a}, Elem{b}), expected[std::size_t{a} * f->q() + b]) << a << "," << b;
    if (F.is_monomial()) {
      const auto scaled = fbct_table(*f, F);
      ASSERT_TRUE(scaled.is_scaled_row());
      for (std::uint32_t a = 0; a < f->q(); ++a)
        for (std::uint32_t b = 0; b < f->q(); ++b)
          ASSERT_EQ(scaled.at(Elem{a}, Elem{b}), expected[std::size_t{a} * f->q() + b]);
      EXPECT_EQ(scaled.summary().trivial, table.summary().trivial);
      EXPECT_EQ(scaled.summary().nontrivial, table.summary().nontrivial);
      EXPECT_EQ(scaled.uniformity().value, table.uniformity().value);
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Fields, EngineOracle,
                         ::testing::Values(EngineCase{2, 3}, EngineCase{2, 5}, EngineCase{3, 2}, EngineCase{3, 3},
                                           EngineCase{5, 2}, EngineCase{7, 1}, EngineCase{13, 1}));

TEST(ScalingRow, MatchesDirectEntriesOverGf27) {
  auto f = mk_field(3, 3);
  const auto lut = materialize(*f, monomial(20));
  const auto row = sozd_row_monomial(*f, monomial(20));
  for (std::uint32_t a = 1; a < f->q(); ++a)
    for (std::uint32_t b = 0; b < f->q(); ++b)
      ASSERT_EQ(row[f->div(Elem{b}, Elem{a}).v], sozd_entry(*f, lut, Elem{a}, Elem{b}));
  EXPECT_EQ(row[0], f->q());
}

TEST(ScalingRow, ConstantAlongScaledPairs) {
  auto f = mk_field(2, 5);
  const auto lut = materialize(*f, monomial(7));
  for (std::uint32_t B = 0; B < f->q(); ++B) {
    const std::uint32_t ref = sozd_entry(*f, lut, f->one(), Elem{B});
    for (std::uint32_t a = 1; a < f->q(); ++a)
      ASSERT_EQ(sozd_entry(*f, lut, Elem{a}, f->mul(Elem{a}, Elem{B})), ref);
  }
}

TEST(ScalingRow, RejectsNonMonomial) {
  auto f = mk_field(3, 2);
  try {
    sozd_row_monomial(*f, sparse({{1, 2}, {1, 4}}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotAMonomial);
  }
}

// ---------------------------------------------------------------------------

TEST(Classify, ApnAndPnExamples) {
  auto f32 = mk_field(2, 5);
  EXPECT_TRUE(is_apn(*f32, materialize(*f32, monomial(3))).holds);
  auto f9 = mk_field(3, 2);
  EXPECT_TRUE(is_pn(*f9, materialize(*f9, monomial(2))).holds);
  EXPECT_THROW(is_pn(*f32, materialize(*f32, monomial(3))), Error);
}

// X^(q-1) + u X^2 is APN exactly when chi(u) = -1, q = 1 mod 4 or chi(u) = 1, q = 3 mod 4.
TEST(Classify, BinomialApnConditions) {
  for (auto [p, n] : std::vector<std::pair<std::uint32_t, unsigned>>{{5, 1}, {7, 1}, {11, 1}, {13, 1}, {3, 2}, {5, 2}, {3, 3}}) {
    auto f = mk_field(p, n);
    for (std::uint32_t u = 1; u < f->q(); ++u) {
      SparsePoly poly{{{f->one(), f->q() - 1}, {Elem{u}, 2}}};
      const auto lut = materialize(*f, FuncSpec{poly});
      const int chi = f->quad_char(Elem{u});
      const bool predicted = (chi == -1 && f->q() % 4 == 1) || (chi == 1 && f->q() % 4 == 3);
      const auto c = is_apn(*f, lut);
      EXPECT_EQ(c.holds, predicted) << "q=" << f->q() << " u=" << u;
      if (!predicted) { EXPECT_EQ(c.witness.value, 3u); }
    }
  }
}

TEST(Classify, PartialApnForX21) {
  for (unsigned n : {3u, 4u, 5u, 7u}) {
    auto f = mk_field(2, n);
    EXPECT_TRUE(is_partial_apn(*f, materialize(*f, monomial(21)), f->zero()).holds) << n;
  }
  auto f64 = mk_field(2, 6);
  const auto r = is_partial_apn(*f64, materialize(*f64, monomial(21)), f64->zero());
  EXPECT_FALSE(r.holds);
  ASSERT_TRUE(r.violation.has_value());
  const auto lut = materialize(*f64, monomial(21));
  const auto [x, y] = *r.violation;
  EXPECT_EQ(f64->add(f64->add(lut[0], lut[x.v]), f64->add(lut[y.v], lut[f64->add(x, y).v])).v, 0u);
}

TEST(Classify, ApnIsPartialApnEverywhere) {
  auto f = mk_field(2, 5);
  const auto lut = materialize(*f, monomial(3));
  for (std::uint32_t x0 = 0; x0 < f->q(); ++x0) EXPECT_TRUE(is_partial_apn(*f, lut, Elem{x0}).holds);
  auto f9 = mk_field(3, 2);
  EXPECT_THROW(is_partial_apn(*f9, materialize(*f9, monomial(2)), f9->zero()), Error);
}

TEST(Parity, MonomialsAndDoPolynomials) {
  for (auto [p, n] : std::vector<std::pair<std::uint32_t, unsigned>>{{3, 3}, {5, 2}, {7, 1}}) {
    auto f = mk_field(p, n);
    for (std::uint64_t d = 1; d < f->q(); ++d) {
      const Parity got = parity_of(*f, materialize(*f, monomial(d)));
      EXPECT_EQ(got, d % 2 ? Parity::Odd : Parity::Even) << d;
    }
  }
  auto f = mk_field(3, 3);
  std::mt19937_64 rng(9);
  for (int iter = 0; iter < 50; ++iter) {
    DOPoly dp;
    for (unsigned i = 0; i < 3; ++i)
      for (unsigned j = i; j < 3; ++j)
        if (rng() % 2) dp.terms.push_back({i, j, Elem{static_cast<std::uint32_t>(rng() % f->q())}});
    const auto lut = materialize(*f, FuncSpec{dp});
    bool odd = true, even = true;
    for (std::uint32_t x = 0; x < f->q(); ++x) {
      const Elem mx = f->neg(Elem{x});
      odd = odd && lut[mx.v] == f->neg(lut[x]);
      even = even && lut[mx.v] == lut[x];
    }
    const Parity expected = odd ? Parity::Odd : even ? Parity::Even : Parity::None;
    EXPECT_EQ(parity_of(*f, lut), expected);
  }
}

TEST(EaInvariance, DeltaAndNablaPreserved) {
  std::mt19937_64 rng(2024);
  struct Case {
    std::uint32_t p;
    unsigned n;
    FuncSpec F;
  };
  std::vector<Case> cases = {{2, 5, monomial(3)}, {3, 3, sparse({{1, 2}, {1, 10}})}};
  for (const auto& c : cases) {
    auto f = mk_field(c.p, c.n);
    const auto lut = materialize(*f, c.F);
    const auto delta = differential_uniformity(*f, lut).value;
    const auto nabla = fbct_table_full(*f, lut).uniformity().value;
    for (int i = 0; i < 20; ++i) {
      const auto P = random_affine_map(*f, rng, true), Q = random_affine_map(*f, rng, true);
      const auto A = random_affine_map(*f, rng, false);
      const auto G = materialize(*f, ea_transform(*f, lut, P, Q, A));
      EXPECT_EQ(differential_uniformity(*f, G).value, delta);
      EXPECT_EQ(fbct_table_full(*f, G).uniformity().value, nabla);
    }
  }
}

TEST(EaInvariance, RejectsSingularMaps) {
  auto f = mk_field(2, 3);
  const auto lut = materialize(*f, monomial(3));
  AffineMap zero{PrimeMatrix(3, 3, 2), Elem{0}};
  std::mt19937_64 rng(1);
  const auto P = random_affine_map(*f, rng, true);
  try {
    ea_transform(*f, lut, P, zero, zero);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotAPermutation);
  }
}

// ---------------------------------------------------------------------------
// Structural properties

struct PropField {
  std::uint32_t p;
  unsigned n;
};

class SpectrumProperties : public ::testing::TestWithParam<PropField> {};

TEST_P(SpectrumProperties, HoldOnSampledFunctions) {
  auto f = mk_field(GetParam().p, GetParam().n);
  const std::uint32_t q = f->q();
  std::mt19937_64 rng(77 + q);
  std::vector<FuncSpec> funcs;
  for (int i = 0; i < 6; ++i) funcs.push_back(monomial(1 + rng() % (q - 1)));
  for (Parity par : {Parity::None, Parity::Odd, Parity::Even}) funcs.push_back(random_sparse(*f, rng, par));
  for (const auto& F : funcs) {
    const auto lut = materialize(*f, F);
    const auto table = fbct_table_full(*f, lut);
    const Parity parity = f->p() == 2 ? Parity::None : parity_of(*f, lut);
    for (std::uint32_t av = 0; av < q; ++av) {
      for (std::uint32_t bv = 0; bv < q; ++bv) {
        const Elem a{av}, b{bv};
        const std::uint32_t v = table.at(a, b);
        ASSERT_LE(v, q);
        ASSERT_EQ(v, table.at(b, a));
        if (f->p() == 2 && !table.is_trivial(a, b)) { ASSERT_EQ(v % 4, 0u); }
        if (parity == Parity::None || av == 0 || bv == 0) continue;
        // X -> -(X+a+b) maps the solution set to itself.
        const Elem ab = f->add(a, b);
        auto is_solution = [&](Elem x) {
          return f->add(f->sub(f->sub(lut[f->add(x, ab).v], lut[f->add(x, b).v]), lut[f->add(x, a).v]), lut[x.v]).v == 0;
        };
        const Elem fixed = f->neg(f->div(ab, f->prime(2)));
        if (parity == Parity::Odd) { ASSERT_TRUE(is_solution(fixed)); }
        std::uint32_t count = 0;
        for (std::uint32_t x = 0; x < q; ++x) {
          if (!is_solution(Elem{x})) continue;
          ++count;
          ASSERT_TRUE(is_solution(f->neg(f->add(Elem{x}, ab))));
        }
        if (parity == Parity::Even && !is_solution(fixed)) { ASSERT_EQ(count % 2, 0u); }
      }
    }
  }
}

TEST_P(SpectrumProperties, DoPolynomialCellsAreZeroOrQ) {
  auto f = mk_field(GetParam().p, GetParam().n);
  std::mt19937_64 rng(99 + f->q());
  for (int iter = 0; iter < 3; ++iter) {
    DOPoly dp;
    for (unsigned i = 0; i < f->n(); ++i)
      for (unsigned j = i; j < f->n(); ++j)
        if (rng() % 2) dp.terms.push_back({i, j, Elem{static_cast<std::uint32_t>(rng() % f->q())}});
    const auto table = fbct_table_full(*f, materialize(*f, FuncSpec{dp}));
    for (std::uint32_t a = 0; a < f->q(); ++a)
      for (std::uint32_t b = 0; b < f->q(); ++b) {
        const auto v = table.at(Elem{a}, Elem{b});
        ASSERT_TRUE(v == 0 || v == f->q());
      }
  }
}

// APN (char 2) and PN (odd char) are exactly "every nontrivial cell is 0".
TEST_P(SpectrumProperties, CharacterizationAgreesWithDdt) {
  auto f = mk_field(GetParam().p, GetParam().n);
  const std::uint32_t q = f->q();
  std::vector<std::uint64_t> exps;
  if (q <= 81) {
    for (std::uint64_t d = 1; d < q; ++d) exps.push_back(d);
  } else {
    std::mt19937_64 rng(q);
    for (int i = 0; i < 24; ++i) exps.push_back(1 + rng() % (q - 1));
    exps.push_back(3);
    exps.push_back(2);
  }
  for (auto d : exps) {
    const auto lut = materialize(*f, monomial(d));
    const auto table = fbct_table(*f, monomial(d));
    bool all_zero = true;
    for (const auto& [v, cnt] : table.summary().nontrivial) all_zero = all_zero && v == 0;
    const auto delta = differential_uniformity(*f, lut).value;
    if (f->p() == 2) {
      EXPECT_EQ(all_zero, delta == 2) << "d=" << d;
    } else {
      EXPECT_EQ(all_zero, delta == 1) << "d=" << d;
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Fields, SpectrumProperties,
                         ::testing::Values(PropField{2, 3}, PropField{2, 4}, PropField{2, 5}, PropField{2, 6},
                                           PropField{3, 2}, PropField{3, 3}, PropField{5, 2}, PropField{7, 2},
                                           PropField{3, 4}, PropField{11, 1}));

TEST(SpectrumCharacterization, LargerFields) {
  for (auto [p, n] : std::vector<std::pair<std::uint32_t, unsigned>>{{2, 9}, {3, 5}, {2, 8}}) {
    auto f = mk_field(p, n);
    for (std::uint64_t d : {2u, 3u, 5u, 7u, 9u, 13u, 21u}) {
      const auto table = fbct_table(*f, monomial(d));
      bool all_zero = true;
      for (const auto& [v, cnt] : table.summary().nontrivial) all_zero = all_zero && v == 0;
      const auto delta = differential_uniformity(*f, materialize(*f, monomial(d))).value;
      EXPECT_EQ(all_zero, delta == (p == 2 ? 2u : 1u)) << p << "^" << n << " d=" << d;
    }
  }
}

// nabla_F = 1 with F odd or even forces Delta_F = 2.
TEST(MainTheorem, NablaOneImpliesApn) {
  std::mt19937_64 rng(31337);
  int hits = 0;
  for (auto [p, n] : std::vector<std::pair<std::uint32_t, unsigned>>{
           {5, 1}, {7, 1}, {11, 1}, {13, 1}, {3, 2}, {3, 3}, {5, 2}, {7, 2}, {3, 4}, {3, 5}}) {
    auto f = mk_field(p, n);
    std::vector<FuncSpec> funcs;
    for (std::uint64_t d = 1; d < f->q(); ++d) funcs.push_back(monomial(d));
    for (int i = 0; i < 40; ++i) funcs.push_back(random_sparse(*f, rng, i % 2 ? Parity::Odd : Parity::Even));
    for (const auto& F : funcs) {
      const auto lut = materialize(*f, F);
      if (parity_of(*f, lut) == Parity::None) continue;
      if (fbct_table(*f, F).uniformity().value != 1) continue;
      ++hits;
      EXPECT_EQ(differential_uniformity(*f, lut).value, 2u);
    }
  }
  EXPECT_GT(hits, 0);
}

}  // namespace
}  // namespace ffspectra
