#include "reclift/provenance.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

namespace reclift {

Nat64 Nat64::plus(Nat64 o) const {
  if (saturated || o.saturated) return sat();
  uint64_t r = value + o.value;
  if (r < value) return sat();
  return of(r);
}

Nat64 Nat64::times(Nat64 o) const {
  if (is_zero() || o.is_zero()) return of(0);
  if (saturated || o.saturated) return sat();
  if (value != 0 && o.value > UINT64_MAX / value) return sat();
  return of(value * o.value);
}

bool Nat64::leq(Nat64 o) const {
  if (o.saturated) return true;
  if (saturated) return false;
  return value <= o.value;
}

Nat64 Nat64::max(Nat64 o) const { return leq(o) ? o : *this; }

Monomial::Monomial(std::vector<uint64_t> factors) : factors_(std::move(factors)) {
  std::sort(factors_.begin(), factors_.end());
}

Monomial Monomial::times(const Monomial& o) const {
  std::vector<uint64_t> out;
  out.reserve(factors_.size() + o.factors_.size());
  std::merge(factors_.begin(), factors_.end(), o.factors_.begin(),
             o.factors_.end(), std::back_inserter(out));
  Monomial m;
  m.factors_ = std::move(out);
  return m;
}

Polynomial Polynomial::one() {
  Polynomial p;
  p.terms_.emplace_back(Monomial::unit(), Nat64::of(1));
  return p;
}

Polynomial Polynomial::from_token(Token t) {
  Polynomial p;
  p.terms_.emplace_back(Monomial::of(t), Nat64::of(1));
  return p;
}

Polynomial Polynomial::make(std::vector<std::pair<Monomial, Nat64>> terms,
                            bool capped) {
  std::sort(terms.begin(), terms.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  Polynomial p;
  p.capped_ = capped;
  for (auto& [m, c] : terms) {
    if (c.is_zero()) continue;
    if (!p.terms_.empty() && p.terms_.back().first == m) {
      p.terms_.back().second = p.terms_.back().second.plus(c);
    } else {
      p.terms_.emplace_back(std::move(m), c);
    }
  }
  return p;
}

Nat64 Polynomial::coefficient(const Monomial& m) const {
  auto it = std::lower_bound(
      terms_.begin(), terms_.end(), m,
      [](const auto& term, const Monomial& key) { return term.first < key; });
  if (it != terms_.end() && it->first == m) return it->second;
  return Nat64::of(0);
}

Nat64 Polynomial::total_count() const {
  Nat64 n = Nat64::of(0);
  for (const auto& [m, c] : terms_) n = n.plus(c);
  return n;
}

std::vector<uint64_t> Polynomial::token_ids() const {
  std::vector<uint64_t> ids;
  for (const auto& [m, c] : terms_)
    ids.insert(ids.end(), m.factors().begin(), m.factors().end());
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

namespace {

// Keeps the lexicographically smallest monomials when the term count exceeds
// the cap. The cap never drops a nonzero value to zero.
Polynomial enforce_cap(std::vector<std::pair<Monomial, Nat64>> terms,
                       bool capped_in, size_t cap) {
  if (cap == 0) cap = 1;
  bool capped = capped_in;
  if (terms.size() > cap) {
    terms.resize(cap);
    capped = true;
  }
  return Polynomial::make(std::move(terms), capped);
}

}  // namespace

Polynomial plus(const Polynomial& p, const Polynomial& q, size_t term_cap) {
  std::vector<std::pair<Monomial, Nat64>> out;
  out.reserve(p.terms().size() + q.terms().size());
  auto a = p.terms().begin(), ae = p.terms().end();
  auto b = q.terms().begin(), be = q.terms().end();
  while (a != ae && b != be) {
    if (a->first == b->first) {
      out.emplace_back(a->first, a->second.plus(b->second));
      ++a;
      ++b;
    } else if (a->first < b->first) {
      out.push_back(*a++);
    } else {
      out.push_back(*b++);
    }
  }
  out.insert(out.end(), a, ae);
  out.insert(out.end(), b, be);
  return enforce_cap(std::move(out), p.capped() || q.capped(), term_cap);
}

Polynomial times(const Polynomial& p, const Polynomial& q, size_t term_cap) {
  std::vector<std::pair<Monomial, Nat64>> out;
  out.reserve(p.terms().size() * q.terms().size());
  for (const auto& [mp, cp] : p.terms())
    for (const auto& [mq, cq] : q.terms())
      out.emplace_back(mp.times(mq), cp.times(cq));
  return enforce_cap(std::move(out), p.capped() || q.capped(), term_cap);
}

bool leq(const Polynomial& p, const Polynomial& q) {
  for (const auto& [m, c] : p.terms())
    if (!c.leq(q.coefficient(m))) return false;
  return true;
}

Polynomial lub(const Polynomial& p, const Polynomial& q, size_t term_cap) {
  std::vector<std::pair<Monomial, Nat64>> out;
  auto a = p.terms().begin(), ae = p.terms().end();
  auto b = q.terms().begin(), be = q.terms().end();
  while (a != ae && b != be) {
    if (a->first == b->first) {
      out.emplace_back(a->first, a->second.max(b->second));
      ++a;
      ++b;
    } else if (a->first < b->first) {
      out.push_back(*a++);
    } else {
      out.push_back(*b++);
    }
  }
  out.insert(out.end(), a, ae);
  out.insert(out.end(), b, be);
  return enforce_cap(std::move(out), p.capped() || q.capped(), term_cap);
}

const char* to_string(SemiringTag tag) {
  switch (tag) {
    case SemiringTag::Boolean:
      return "bool";
    case SemiringTag::Counting:
      return "count";
    case SemiringTag::Provenance:
      return "prov";
  }
  return "?";
}

std::optional<SemiringTag> semiring_tag_from(const std::string& name) {
  if (name == "bool") return SemiringTag::Boolean;
  if (name == "count") return SemiringTag::Counting;
  if (name == "prov") return SemiringTag::Provenance;
  return std::nullopt;
}

SemiringValue SemiringValue::zero(SemiringTag tag) {
  switch (tag) {
    case SemiringTag::Boolean:
      return boolean(false);
    case SemiringTag::Counting:
      return counting(Nat64::of(0));
    case SemiringTag::Provenance:
      return polynomial(Polynomial::zero());
  }
  throw SemiringError("bad semiring tag");
}

SemiringValue SemiringValue::one(SemiringTag tag) {
  switch (tag) {
    case SemiringTag::Boolean:
      return boolean(true);
    case SemiringTag::Counting:
      return counting(Nat64::of(1));
    case SemiringTag::Provenance:
      return polynomial(Polynomial::one());
  }
  throw SemiringError("bad semiring tag");
}

SemiringValue SemiringValue::from_token(Token t, SemiringTag tag) {
  if (tag == SemiringTag::Provenance)
    return polynomial(Polynomial::from_token(t));
  return one(tag);
}

SemiringTag SemiringValue::tag() const {
  if (std::holds_alternative<bool>(v_)) return SemiringTag::Boolean;
  if (std::holds_alternative<Nat64>(v_)) return SemiringTag::Counting;
  return SemiringTag::Provenance;
}

bool SemiringValue::as_bool() const {
  if (auto* b = std::get_if<bool>(&v_)) return *b;
  throw SemiringError("value is not Boolean");
}

Nat64 SemiringValue::as_count() const {
  if (auto* n = std::get_if<Nat64>(&v_)) return *n;
  throw SemiringError("value is not a count");
}

const Polynomial& SemiringValue::as_polynomial() const {
  if (auto* p = std::get_if<Polynomial>(&v_)) return *p;
  throw SemiringError("value is not a polynomial");
}

namespace {

void check_same_tag(const SemiringValue& a, const SemiringValue& b,
                    const char* op) {
  if (a.tag() != b.tag())
    throw SemiringError(std::string(op) + ": mixed semiring variants (" +
                        to_string(a.tag()) + " vs " + to_string(b.tag()) + ")");
}

}  // namespace

SemiringValue plus(const SemiringValue& a, const SemiringValue& b,
                   size_t term_cap) {
  check_same_tag(a, b, "plus");
  switch (a.tag()) {
    case SemiringTag::Boolean:
      return SemiringValue::boolean(a.as_bool() || b.as_bool());
    case SemiringTag::Counting:
      return SemiringValue::counting(a.as_count().plus(b.as_count()));
    case SemiringTag::Provenance:
      return SemiringValue::polynomial(
          plus(a.as_polynomial(), b.as_polynomial(), term_cap));
  }
  throw SemiringError("plus: bad tag");
}

SemiringValue times(const SemiringValue& a, const SemiringValue& b,
                    size_t term_cap) {
  check_same_tag(a, b, "times");
  switch (a.tag()) {
    case SemiringTag::Boolean:
      return SemiringValue::boolean(a.as_bool() && b.as_bool());
    case SemiringTag::Counting:
      return SemiringValue::counting(a.as_count().times(b.as_count()));
    case SemiringTag::Provenance:
      return SemiringValue::polynomial(
          times(a.as_polynomial(), b.as_polynomial(), term_cap));
  }
  throw SemiringError("times: bad tag");
}

bool is_zero(const SemiringValue& v) {
  switch (v.tag()) {
    case SemiringTag::Boolean:
      return !v.as_bool();
    case SemiringTag::Counting:
      return v.as_count().is_zero();
    case SemiringTag::Provenance:
      return v.as_polynomial().is_zero();
  }
  return true;
}

bool leq(const SemiringValue& a, const SemiringValue& b) {
  check_same_tag(a, b, "leq");
  switch (a.tag()) {
    case SemiringTag::Boolean:
      return !a.as_bool() || b.as_bool();
    case SemiringTag::Counting:
      return a.as_count().leq(b.as_count());
    case SemiringTag::Provenance:
      return leq(a.as_polynomial(), b.as_polynomial());
  }
  return false;
}

SemiringValue lub(const SemiringValue& a, const SemiringValue& b,
                  size_t term_cap) {
  check_same_tag(a, b, "lub");
  switch (a.tag()) {
    case SemiringTag::Boolean:
      return SemiringValue::boolean(a.as_bool() || b.as_bool());
    case SemiringTag::Counting:
      return SemiringValue::counting(a.as_count().max(b.as_count()));
    case SemiringTag::Provenance:
      return SemiringValue::polynomial(
          lub(a.as_polynomial(), b.as_polynomial(), term_cap));
  }
  throw SemiringError("lub: bad tag");
}

namespace {

std::string render_nat(Nat64 n) {
  if (n.saturated) return "inf";
  return std::to_string(n.value);
}

}  // namespace

std::string render(const Polynomial& p) {
  if (p.is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [m, c] : p.terms()) {
    if (!first) os << " + ";
    first = false;
    bool coef_shown = false;
    if (c.saturated || c.value != 1 || m.is_unit()) {
      os << render_nat(c);
      coef_shown = true;
    }
    for (size_t i = 0; i < m.factors().size(); ++i) {
      if (coef_shown || i > 0) os << "·";
      os << "x" << m.factors()[i];
    }
  }
  if (p.capped()) os << " (capped)";
  return os.str();
}

std::string render(const SemiringValue& v) {
  switch (v.tag()) {
    case SemiringTag::Boolean:
      return v.as_bool() ? "true" : "false";
    case SemiringTag::Counting:
      return render_nat(v.as_count());
    case SemiringTag::Provenance:
      return render(v.as_polynomial());
  }
  return "?";
}

namespace {

struct PolyParser {
  const std::string& s;
  size_t i = 0;

  void skip_ws() {
    while (i < s.size() && s[i] == ' ') ++i;
  }
  bool eat(const std::string& tok) {
    if (s.compare(i, tok.size(), tok) == 0) {
      i += tok.size();
      return true;
    }
    return false;
  }
  Nat64 number() {
    if (eat("inf")) return Nat64::sat();
    uint64_t v = 0;
    auto [ptr, ec] =
        std::from_chars(s.data() + i, s.data() + s.size(), v);
    if (ec != std::errc() || ptr == s.data() + i)
      throw SemiringError("bad annotation literal: " + s);
    i = static_cast<size_t>(ptr - s.data());
    return Nat64::of(v);
  }

  Polynomial parse() {
    std::vector<std::pair<Monomial, Nat64>> terms;
    bool capped = false;
    skip_ws();
    if (eat("0")) {
      skip_ws();
      if (i == s.size()) return Polynomial::zero();
      throw SemiringError("bad polynomial: " + s);
    }
    while (true) {
      Nat64 coef = Nat64::of(1);
      std::vector<uint64_t> factors;
      skip_ws();
      if (i < s.size() && (std::isdigit(static_cast<unsigned char>(s[i])) ||
                           s.compare(i, 3, "inf") == 0)) {
        coef = number();
        if (!eat("·")) {
          terms.emplace_back(Monomial::unit(), coef);
          goto next_term;
        }
      }
      while (true) {
        if (!eat("x")) throw SemiringError("bad monomial in: " + s);
        factors.push_back(number().value);
        if (!eat("·")) break;
      }
      terms.emplace_back(Monomial(std::move(factors)), coef);
    next_term:
      skip_ws();
      if (eat("+")) continue;
      if (eat("(capped)")) {
        capped = true;
        skip_ws();
      }
      if (i != s.size()) throw SemiringError("trailing junk in: " + s);
      break;
    }
    return Polynomial::make(std::move(terms), capped);
  }
};

}  // namespace

SemiringValue parse_semiring_value(const std::string& text, SemiringTag tag) {
  switch (tag) {
    case SemiringTag::Boolean:
      if (text == "true") return SemiringValue::boolean(true);
      if (text == "false") return SemiringValue::boolean(false);
      throw SemiringError("bad Boolean annotation: " + text);
    case SemiringTag::Counting: {
      PolyParser p{text};
      Nat64 n = p.number();
      if (p.i != text.size())
        throw SemiringError("bad count annotation: " + text);
      return SemiringValue::counting(n);
    }
    case SemiringTag::Provenance: {
      PolyParser p{text};
      return SemiringValue::polynomial(p.parse());
    }
  }
  throw SemiringError("bad semiring tag");
}

SemiringValue eval_hom(const Polynomial& p, const Valuation& v,
                       SemiringTag target, size_t term_cap) {
  SemiringValue acc = SemiringValue::zero(target);
  for (const auto& [m, c] : p.terms()) {
    SemiringValue mono = SemiringValue::one(target);
    for (uint64_t id : m.factors()) {
      auto val = v(Token{id});
      if (!val)
        throw SemiringError("valuation missing token x" + std::to_string(id));
      if (val->tag() != target)
        throw SemiringError("valuation for x" + std::to_string(id) +
                            " has wrong semiring tag");
      mono = times(mono, *val, term_cap);
    }
    // Fold the coefficient: c-fold repeated plus of the monomial value.
    SemiringValue term = SemiringValue::zero(target);
    switch (target) {
      case SemiringTag::Boolean:
        term = c.is_zero() ? term : mono;
        break;
      case SemiringTag::Counting:
        term = SemiringValue::counting(c.times(mono.as_count()));
        break;
      case SemiringTag::Provenance: {
        Polynomial scaled;
        std::vector<std::pair<Monomial, Nat64>> ts;
        for (const auto& [mm, cc] : mono.as_polynomial().terms())
          ts.emplace_back(mm, cc.times(c));
        scaled = Polynomial::make(std::move(ts), mono.as_polynomial().capped());
        term = SemiringValue::polynomial(scaled);
        break;
      }
    }
    acc = plus(acc, term, term_cap);
  }
  return acc;
}

}  // namespace reclift
