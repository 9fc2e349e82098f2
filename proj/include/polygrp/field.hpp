#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace polygrp {

// A finite field F_q, q = p^e, as Z/p[x] modulo a monic irreducible of degree e.
// Elements are indices in [0, q): the index encodes the coefficient vector in base p.
// Specs are interned and immutable; all arithmetic goes through precomputed tables.
struct FieldSpec {
  uint32_t p = 0;
  uint32_t e = 0;
  uint32_t q = 0;
  std::vector<uint32_t> modulus;  // ascending coefficients, size e+1, monic

  std::vector<uint32_t> add_tab;   // q*q
  std::vector<uint32_t> mul_tab;   // q*q
  std::vector<uint32_t> neg_tab;   // q
  std::vector<uint32_t> inv_tab;   // q (inv_tab[0] unused)
  std::vector<uint32_t> frob_tab;  // q, x -> x^p
  std::vector<uint32_t> dlog_tab;  // q, dlog base gen (dlog_tab[0] unused)
  uint32_t gen = 0;                // a fixed generator of the multiplicative group

  // Interned constructor. When no modulus is given, the monic irreducible of
  // degree e with the smallest base-p integer encoding is selected.
  static std::shared_ptr<const FieldSpec> make(
      uint32_t p, uint32_t e,
      std::optional<std::vector<uint32_t>> modulus = std::nullopt);

  uint32_t add(uint32_t a, uint32_t b) const { return add_tab[a * q + b]; }
  uint32_t mul(uint32_t a, uint32_t b) const { return mul_tab[a * q + b]; }
  uint32_t neg(uint32_t a) const { return neg_tab[a]; }
  uint32_t sub(uint32_t a, uint32_t b) const { return add(a, neg(b)); }
  uint32_t inv(uint32_t a) const;
  uint32_t frob(uint32_t a) const { return frob_tab[a]; }
  uint32_t dlog(uint32_t a) const;

  std::vector<uint32_t> coeffs_of(uint32_t idx) const;
  uint32_t idx_of(const std::vector<uint32_t>& coeffs) const;
};

using FieldRef = std::shared_ptr<const FieldSpec>;

// One field element: an index plus the spec it lives in. Value-semantic, exact.
class Fq {
 public:
  Fq() : s_(nullptr), v_(0) {}
  Fq(const FieldSpec* s, uint32_t v) : s_(s), v_(v) {
    if (!s_ || v_ >= s_->q) throw std::invalid_argument("Fq: index out of range");
  }
  static Fq zero(const FieldSpec* s) { return Fq(s, 0); }
  static Fq one(const FieldSpec* s) { return Fq(s, 1); }
  static Fq generator(const FieldSpec* s) { return Fq(s, s->gen); }
  static Fq from_int(const FieldSpec* s, long long c);         // canonical image of c, i.e. c mod p
  static Fq from_digits_int(const FieldSpec* s, long long c);  // c mod q read as base-p digits
  static Fq from_coeffs(const FieldSpec* s, const std::vector<uint32_t>& coeffs);

  const FieldSpec* spec() const { return s_; }
  uint32_t idx() const { return v_; }
  std::vector<uint32_t> coeffs() const { return s_->coeffs_of(v_); }
  bool is_zero() const { return v_ == 0; }
  bool is_one() const { return v_ == 1; }
  bool in_prime_field() const { return v_ < s_->p; }

  Fq operator+(const Fq& o) const { check(o); return Fq(s_, s_->add(v_, o.v_)); }
  Fq operator-(const Fq& o) const { check(o); return Fq(s_, s_->sub(v_, o.v_)); }
  Fq operator*(const Fq& o) const { check(o); return Fq(s_, s_->mul(v_, o.v_)); }
  Fq operator/(const Fq& o) const { check(o); return Fq(s_, s_->mul(v_, s_->inv(o.v_))); }
  Fq operator-() const { return Fq(s_, s_->neg(v_)); }
  Fq inv() const { return Fq(s_, s_->inv(v_)); }
  Fq pow(long long k) const;
  Fq frobenius(uint32_t k = 1) const;  // x -> x^(p^k)
  uint32_t mult_order() const;

  bool operator==(const Fq& o) const { return s_ == o.s_ && v_ == o.v_; }
  bool operator!=(const Fq& o) const { return !(*this == o); }

  std::string to_string() const;

 private:
  void check(const Fq& o) const {
    if (s_ != o.s_) throw std::invalid_argument("Fq: mixed field specs");
  }
  const FieldSpec* s_;
  uint32_t v_;
};

}  // namespace polygrp
