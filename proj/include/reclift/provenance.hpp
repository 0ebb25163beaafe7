#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace reclift {

struct SemiringError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Identifies one extensional base fact. Ids are allocated densely from 1 by
// the store; 0 is never issued.
struct Token {
  uint64_t id = 0;
  friend bool operator==(Token, Token) = default;
  friend auto operator<=>(Token, Token) = default;
};

// Natural number with 64-bit saturating arithmetic. Once saturated, stays
// saturated through plus/times.
struct Nat64 {
  uint64_t value = 0;
  bool saturated = false;

  static Nat64 of(uint64_t v) { return {v, false}; }
  static Nat64 sat() { return {UINT64_MAX, true}; }

  Nat64 plus(Nat64 o) const;
  Nat64 times(Nat64 o) const;
  bool is_zero() const { return !saturated && value == 0; }
  bool leq(Nat64 o) const;
  Nat64 max(Nat64 o) const;

  friend bool operator==(Nat64 a, Nat64 b) {
    return a.saturated == b.saturated && (a.saturated || a.value == b.value);
  }
};

// Product of tokens, kept sorted by id. Duplicates are retained: a derivation
// may use the same base fact twice. The empty monomial is the unit.
class Monomial {
 public:
  Monomial() = default;
  explicit Monomial(std::vector<uint64_t> factors);
  static Monomial unit() { return Monomial(); }
  static Monomial of(Token t) { return Monomial({t.id}); }

  const std::vector<uint64_t>& factors() const { return factors_; }
  bool is_unit() const { return factors_.empty(); }
  Monomial times(const Monomial& o) const;

  friend bool operator==(const Monomial&, const Monomial&) = default;
  friend bool operator<(const Monomial& a, const Monomial& b) {
    return a.factors_ < b.factors_;
  }

 private:
  std::vector<uint64_t> factors_;
};

// Element of N[X]: a finite sum of monomials with positive coefficients,
// stored sorted by monomial. A term cap bounds the representation size; on
// overflow the lexicographically smallest monomials are kept and the value is
// flagged capped. Nonzero-ness is never lost to capping.
class Polynomial {
 public:
  static constexpr size_t kDefaultTermCap = 4096;

  Polynomial() = default;
  static Polynomial zero() { return Polynomial(); }
  static Polynomial one();
  static Polynomial from_token(Token t);
  static Polynomial make(std::vector<std::pair<Monomial, Nat64>> terms,
                         bool capped = false);

  bool is_zero() const { return terms_.empty(); }
  bool capped() const { return capped_; }
  const std::vector<std::pair<Monomial, Nat64>>& terms() const {
    return terms_;
  }
  Nat64 coefficient(const Monomial& m) const;
  // Sum of coefficients, saturating; with an all-ones valuation this is the
  // number of recorded derivations.
  Nat64 total_count() const;
  std::vector<uint64_t> token_ids() const;

  friend bool operator==(const Polynomial&, const Polynomial&) = default;

 private:
  std::vector<std::pair<Monomial, Nat64>> terms_;
  bool capped_ = false;
};

Polynomial plus(const Polynomial& p, const Polynomial& q,
                size_t term_cap = Polynomial::kDefaultTermCap);
Polynomial times(const Polynomial& p, const Polynomial& q,
                 size_t term_cap = Polynomial::kDefaultTermCap);
bool leq(const Polynomial& p, const Polynomial& q);
Polynomial lub(const Polynomial& p, const Polynomial& q,
               size_t term_cap = Polynomial::kDefaultTermCap);

enum class SemiringTag { Boolean, Counting, Provenance };

const char* to_string(SemiringTag tag);
std::optional<SemiringTag> semiring_tag_from(const std::string& name);

// One annotation value. The three variants never mix: combining values of
// different tags throws SemiringError.
class SemiringValue {
 public:
  SemiringValue() : v_(false) {}
  static SemiringValue zero(SemiringTag tag);
  static SemiringValue one(SemiringTag tag);
  static SemiringValue boolean(bool b) { return SemiringValue(b); }
  static SemiringValue counting(Nat64 n) { return SemiringValue(n); }
  static SemiringValue counting(uint64_t n) { return SemiringValue(Nat64::of(n)); }
  static SemiringValue polynomial(Polynomial p) {
    return SemiringValue(std::move(p));
  }
  static SemiringValue from_token(Token t, SemiringTag tag);

  SemiringTag tag() const;
  bool as_bool() const;
  Nat64 as_count() const;
  const Polynomial& as_polynomial() const;

  friend bool operator==(const SemiringValue&, const SemiringValue&) = default;

 private:
  explicit SemiringValue(bool b) : v_(b) {}
  explicit SemiringValue(Nat64 n) : v_(n) {}
  explicit SemiringValue(Polynomial p) : v_(std::move(p)) {}
  std::variant<bool, Nat64, Polynomial> v_;
};

SemiringValue plus(const SemiringValue& a, const SemiringValue& b,
                   size_t term_cap = Polynomial::kDefaultTermCap);
SemiringValue times(const SemiringValue& a, const SemiringValue& b,
                    size_t term_cap = Polynomial::kDefaultTermCap);
bool is_zero(const SemiringValue& v);
// Pointwise natural order: implication for Boolean, <= for counting,
// coefficient-wise <= per monomial for N[X].
bool leq(const SemiringValue& a, const SemiringValue& b);
// Least upper bound under the natural order.
SemiringValue lub(const SemiringValue& a, const SemiringValue& b,
                  size_t term_cap = Polynomial::kDefaultTermCap);

// Stable textual rendering: "2·x1 + x3·x7" with tokens sorted by id and terms
// sorted lexicographically; "0"/"1" for the constants; capped values carry a
// " (capped)" suffix. Booleans render true/false, counts as decimals.
std::string render(const SemiringValue& v);
std::string render(const Polynomial& p);
SemiringValue parse_semiring_value(const std::string& text, SemiringTag tag);

// The universality homomorphism h_v: substitutes the valuation into every
// monomial and folds with the target semiring's operations. The valuation
// must cover every token of p and produce values of the target tag.
using Valuation = std::function<std::optional<SemiringValue>(Token)>;
SemiringValue eval_hom(const Polynomial& p, const Valuation& v,
                       SemiringTag target,
                       size_t term_cap = Polynomial::kDefaultTermCap);

}  // namespace reclift
