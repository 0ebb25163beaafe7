#include <doctest.h>

#include <map>

#include "reclift/provenance.hpp"
#include "support/gen.hpp"

using namespace reclift;
using testgen::Rng;

namespace {

Polynomial tok(uint64_t id) { return Polynomial::from_token(Token{id}); }

SemiringValue pv(const Polynomial& p) { return SemiringValue::polynomial(p); }

}  // namespace

TEST_CASE("token embedding and basic ops") {
  CHECK(render(tok(1)) == "x1");
  CHECK(render(plus(tok(1), tok(1))) == "2·x1");
  CHECK(render(times(tok(1), tok(2))) == "x1·x2");
  CHECK(render(plus(times(tok(1), tok(2)), tok(3))) == "x1·x2 + x3");
  CHECK(render(Polynomial::zero()) == "0");
  CHECK(render(Polynomial::one()) == "1");
}

TEST_CASE("identities and annihilation") {
  Polynomial p = plus(times(tok(1), tok(2)), tok(4));
  CHECK(plus(Polynomial::zero(), p) == p);
  CHECK(times(Polynomial::one(), p) == p);
  CHECK(times(p, Polynomial::zero()) == Polynomial::zero());
  CHECK(times(plus(tok(1), tok(2)), tok(3)) ==
        plus(times(tok(1), tok(3)), times(tok(2), tok(3))));
}

TEST_CASE("is_zero across variants") {
  CHECK(is_zero(pv(Polynomial::zero())));
  CHECK_FALSE(is_zero(pv(tok(1))));
  CHECK(is_zero(SemiringValue::counting(uint64_t{0})));
  CHECK_FALSE(is_zero(SemiringValue::counting(uint64_t{3})));
  CHECK(is_zero(SemiringValue::boolean(false)));
}

TEST_CASE("mixed variants are rejected") {
  CHECK_THROWS_AS(plus(pv(tok(1)), SemiringValue::boolean(true)),
                  SemiringError);
  CHECK_THROWS_AS(times(SemiringValue::counting(uint64_t{1}),
                        SemiringValue::boolean(true)),
                  SemiringError);
}

TEST_CASE("semiring axioms hold on random values") {
  for (SemiringTag tag : {SemiringTag::Boolean, SemiringTag::Counting,
                          SemiringTag::Provenance}) {
    Rng rng(42);
    for (int i = 0; i < 400; ++i) {
      auto a = testgen::random_value(rng, tag);
      auto b = testgen::random_value(rng, tag);
      auto c = testgen::random_value(rng, tag);
      CHECK(plus(a, b) == plus(b, a));
      CHECK(times(a, b) == times(b, a));
      CHECK(plus(plus(a, b), c) == plus(a, plus(b, c)));
      CHECK(times(times(a, b), c) == times(a, times(b, c)));
      CHECK(plus(SemiringValue::zero(tag), a) == a);
      CHECK(times(SemiringValue::one(tag), a) == a);
      CHECK(is_zero(times(SemiringValue::zero(tag), a)));
      CHECK(times(a, plus(b, c)) == plus(times(a, b), times(a, c)));
    }
  }
}

TEST_CASE("zero-divisor freedom for N[X]") {
  Rng rng(7);
  for (int i = 0; i < 500; ++i) {
    auto p = testgen::random_polynomial(rng);
    auto q = testgen::random_polynomial(rng);
    if (times(p, q).is_zero()) {
      CHECK((p.is_zero() || q.is_zero()));
    }
  }
}

TEST_CASE("canonical form: no zero coefficients, sorted monomials") {
  Rng rng(11);
  for (int i = 0; i < 300; ++i) {
    auto p = testgen::random_polynomial(rng);
    auto q = testgen::random_polynomial(rng);
    for (const auto* poly : {&p, &q}) {
      (void)poly;
    }
    auto r = plus(p, q);
    auto s = times(p, q);
    for (const auto* poly : {&r, &s}) {
      const auto& ts = poly->terms();
      for (size_t j = 0; j < ts.size(); ++j) {
        CHECK_FALSE(ts[j].second.is_zero());
        if (j > 0) CHECK(ts[j - 1].first < ts[j].first);
        auto f = ts[j].first.factors();
        for (size_t k = 1; k < f.size(); ++k) CHECK(f[k - 1] <= f[k]);
      }
    }
  }
}

TEST_CASE("eval_hom examples") {
  // x1*x2 + x3 under all-ones counting valuation counts derivations.
  auto p = plus(times(tok(1), tok(2)), tok(3));
  auto ones = [](Token) {
    return std::optional<SemiringValue>(SemiringValue::counting(uint64_t{1}));
  };
  CHECK(eval_hom(p, ones, SemiringTag::Counting) ==
        SemiringValue::counting(uint64_t{2}));

  auto q = times(tok(1), tok(2));
  auto v = [](Token t) -> std::optional<SemiringValue> {
    return SemiringValue::boolean(t.id == 1);
  };
  CHECK(eval_hom(q, v, SemiringTag::Boolean) == SemiringValue::boolean(false));

  auto missing = [](Token t) -> std::optional<SemiringValue> {
    if (t.id == 1) return SemiringValue::boolean(true);
    return std::nullopt;
  };
  CHECK_THROWS_WITH_AS(eval_hom(q, missing, SemiringTag::Boolean),
                       doctest::Contains("x2"), SemiringError);
}

TEST_CASE("homomorphism laws on random polynomials") {
  Rng rng(13);
  for (SemiringTag tag : {SemiringTag::Boolean, SemiringTag::Counting}) {
    std::map<uint64_t, SemiringValue> table;
    for (uint64_t id = 1; id <= 8; ++id)
      table.emplace(id, testgen::random_value(rng, tag));
    auto v = [&](Token t) -> std::optional<SemiringValue> {
      auto it = table.find(t.id);
      if (it == table.end()) return std::nullopt;
      return it->second;
    };
    for (int i = 0; i < 300; ++i) {
      auto p = testgen::random_polynomial(rng);
      auto q = testgen::random_polynomial(rng);
      CHECK(eval_hom(plus(p, q), v, tag) ==
            plus(eval_hom(p, v, tag), eval_hom(q, v, tag)));
      CHECK(eval_hom(times(p, q), v, tag) ==
            times(eval_hom(p, v, tag), eval_hom(q, v, tag)));
    }
  }
}

TEST_CASE("identity valuation into N[X] is the identity") {
  Rng rng(17);
  auto v = [](Token t) {
    return std::optional<SemiringValue>(
        SemiringValue::polynomial(Polynomial::from_token(t)));
  };
  for (int i = 0; i < 100; ++i) {
    auto p = testgen::random_polynomial(rng);
    CHECK(eval_hom(p, v, SemiringTag::Provenance) == pv(p));
  }
}

TEST_CASE("term cap keeps smallest monomials and flags the value") {
  Polynomial acc = Polynomial::zero();
  for (uint64_t id = 1; id <= 10; ++id) acc = plus(acc, tok(id), 4);
  CHECK(acc.capped());
  CHECK(acc.terms().size() == 4);
  CHECK(acc.terms().front().first == Monomial::of(Token{1}));
  CHECK_FALSE(acc.is_zero());
  CHECK(render(acc) == "x1 + x2 + x3 + x4 (capped)");
  // Capping never zeroes a nonzero product.
  auto prod = times(acc, acc, 2);
  CHECK(prod.capped());
  CHECK_FALSE(prod.is_zero());
}

TEST_CASE("coefficient saturation") {
  Nat64 big = Nat64::of(UINT64_MAX);
  CHECK(big.plus(Nat64::of(1)).saturated);
  CHECK(big.times(Nat64::of(2)).saturated);
  CHECK(Nat64::of(0).times(big) == Nat64::of(0));
  Polynomial p = Polynomial::make({{Monomial::of(Token{1}), Nat64::sat()}});
  CHECK(render(p) == "inf·x1");
}

TEST_CASE("natural order and lub") {
  auto p = plus(tok(1), tok(2));
  auto q = plus(p, tok(3));
  CHECK(leq(p, q));
  CHECK_FALSE(leq(q, p));
  CHECK(lub(p, q) == q);
  CHECK(lub(plus(tok(1), tok(1)), tok(1)) == plus(tok(1), tok(1)));
}

TEST_CASE("render/parse round trip") {
  Rng rng(23);
  for (int i = 0; i < 200; ++i) {
    auto p = testgen::random_polynomial(rng);
    auto text = render(pv(p));
    CHECK(parse_semiring_value(text, SemiringTag::Provenance) == pv(p));
  }
  CHECK(parse_semiring_value("true", SemiringTag::Boolean) ==
        SemiringValue::boolean(true));
  CHECK(parse_semiring_value("17", SemiringTag::Counting) ==
        SemiringValue::counting(uint64_t{17}));
  CHECK(parse_semiring_value("0", SemiringTag::Provenance) ==
        pv(Polynomial::zero()));
  CHECK_THROWS_AS(parse_semiring_value("x1 +", SemiringTag::Provenance),
                  SemiringError);
}
