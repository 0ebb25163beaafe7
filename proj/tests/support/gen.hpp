#pragma once

// Deterministic random generators shared by the property tests.

#include <random>
#include <vector>

#include "reclift/provenance.hpp"

namespace reclift::testgen {

using Rng = std::mt19937_64;

inline Polynomial random_polynomial(Rng& rng, size_t max_terms = 4,
                                    size_t max_degree = 3,
                                    uint64_t max_token = 8,
                                    uint64_t max_coef = 3) {
  std::uniform_int_distribution<size_t> nterms(0, max_terms);
  std::uniform_int_distribution<size_t> degree(0, max_degree);
  std::uniform_int_distribution<uint64_t> tok(1, max_token);
  std::uniform_int_distribution<uint64_t> coef(1, max_coef);
  std::vector<std::pair<Monomial, Nat64>> terms;
  size_t n = nterms(rng);
  for (size_t i = 0; i < n; ++i) {
    std::vector<uint64_t> factors;
    size_t d = degree(rng);
    for (size_t j = 0; j < d; ++j) factors.push_back(tok(rng));
    terms.emplace_back(Monomial(std::move(factors)), Nat64::of(coef(rng)));
  }
  return Polynomial::make(std::move(terms));
}

inline SemiringValue random_value(Rng& rng, SemiringTag tag) {
  switch (tag) {
    case SemiringTag::Boolean:
      return SemiringValue::boolean(rng() % 2 == 0);
    case SemiringTag::Counting:
      return SemiringValue::counting(rng() % 7);
    case SemiringTag::Provenance:
      return SemiringValue::polynomial(random_polynomial(rng));
  }
  return SemiringValue::zero(tag);
}

}  // namespace reclift::testgen
