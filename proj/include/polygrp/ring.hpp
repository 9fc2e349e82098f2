#pragma once
#include <optional>
#include <utility>
#include <vector>

#include "polygrp/field.hpp"

namespace polygrp {

// Two coefficient rings share one element type: F_q[t] and F_q[t, t^-1].
enum class Flavor { Poly, Laurent };

struct RingCtx {
  FieldRef field;  // shared ownership keeps the interned tables alive
  Flavor flavor = Flavor::Poly;

  const FieldSpec* spec() const { return field.get(); }
  bool operator==(const RingCtx& o) const {
    return field.get() == o.field.get() && flavor == o.flavor;
  }
};

// Dense exponent-indexed storage. Invariants:
//   Poly:    low == 0 always; coeffs trimmed of trailing zeros only.
//   Laurent: coeffs trimmed at both ends (front and back nonzero when nonempty).
//   zero:    empty coeffs, low == 0, either flavor.
class RingElem {
 public:
  RingElem() : fs_(nullptr), fl_(Flavor::Poly), low_(0) {}

  static RingElem zero(const RingCtx& ctx);
  static RingElem one(const RingCtx& ctx);
  static RingElem constant(const RingCtx& ctx, Fq c);
  static RingElem monomial(const RingCtx& ctx, Fq c, int k);
  static RingElem t_power(const RingCtx& ctx, int k);
  // coeffs[i] is the index of the coefficient of t^(low+i)
  static RingElem from_coeffs(const RingCtx& ctx, int low, std::vector<uint32_t> coeffs);

  const FieldSpec* spec() const { return fs_; }
  Flavor flavor() const { return fl_; }
  RingCtx ctx() const;

  bool is_zero() const { return c_.empty(); }
  bool is_one() const;
  bool is_constant() const;  // zero counts as constant
  bool is_unit() const;
  int low() const { return low_; }                                // exponent of lowest term (0 if zero)
  int high() const { return low_ + static_cast<int>(c_.size()) - 1; }  // low-1 if zero
  int span() const { return is_zero() ? -1 : high() - low(); }    // Euclidean measure, -1 for zero
  int degree() const;                                             // Poly degree, -1 for zero
  Fq coeff(int k) const;                                          // coefficient of t^k
  const std::vector<uint32_t>& raw_coeffs() const { return c_; }

  RingElem operator+(const RingElem& o) const;
  RingElem operator-(const RingElem& o) const;
  RingElem operator*(const RingElem& o) const;
  RingElem operator-() const;
  RingElem scalar_mul(Fq c) const;
  RingElem shifted(int k) const;  // times t^k
  RingElem pow(uint32_t k) const;
  bool operator==(const RingElem& o) const;
  bool operator!=(const RingElem& o) const { return !(*this == o); }

  // a = q*b + r. Poly: deg(r) < deg(b). Laurent: span(r) < span(b).
  // Throws on zero divisor.
  static std::pair<RingElem, RingElem> divmod(const RingElem& a, const RingElem& b);

  std::string to_string() const;

 private:
  RingElem(const FieldSpec* fs, Flavor fl, int low, std::vector<uint32_t> c)
      : fs_(fs), fl_(fl), low_(low), c_(std::move(c)) {
    normalize();
  }
  void normalize();
  void check(const RingElem& o) const;

  const FieldSpec* fs_;
  Flavor fl_;
  int low_;
  std::vector<uint32_t> c_;
};

// Ring automorphism sigma = Subst_{a,b,eps} after Frob^kappa:
// coefficients first go through x -> x^(p^kappa), then t is replaced by
//   a*t + b        (Poly flavor; eps is forced to +1)
//   a*t^eps        (Laurent flavor; b is forced to 0, eps is +1 or -1)
// Every ring automorphism of either flavor has this form.
struct RingAut {
  RingCtx ctx;
  uint32_t frob_exp = 0;  // kappa, reduced mod e
  Fq a;
  Fq b;
  int eps = +1;

  static RingAut identity(const RingCtx& ctx);
  static RingAut make(const RingCtx& ctx, uint32_t frob_exp, Fq a, Fq b, int eps);

  Fq apply_scalar(Fq c) const { return c.frobenius(frob_exp); }
  RingElem apply(const RingElem& f) const;
  RingAut compose(const RingAut& o) const;  // (*this) after o
  RingAut inverse() const;
  uint32_t order() const;
  bool is_identity() const;
  bool operator==(const RingAut& o) const;
};

// Every ring automorphism of the flavor, in a fixed deterministic order:
// frob_exp ascending, then a by index, then b by index (Poly) or eps +1,-1
// (Laurent). Size e*(q-1)*q for Poly, e*(q-1)*2 for Laurent.
std::vector<RingAut> all_ring_auts(const RingCtx& ctx);

// The element fixed by every ring automorphism:
//   Poly:    s = (t^q - t)^(q-1)
//   Laurent: s = t^(q-1) + t^(1-q)
RingElem special_s(const RingCtx& ctx);

// Writes f as c_0 + c_1*s + ... + c_d*s^d with c_i in the prime subfield,
// d forced by the top exponent of f. Empty vector for f == 0. nullopt when
// f has a coefficient outside the prime subfield or no such expansion exists.
std::optional<std::vector<uint32_t>> s_expansion(const RingElem& f);

// Degree in s, i.e. s_expansion(f).size()-1; -1 for zero, nullopt when f is
// not a prime-subfield combination of powers of s.
std::optional<int> s_degree(const RingElem& f);

// f = lambda * t^k for a unit: (lambda, k). Poly units have k == 0.
std::optional<std::pair<Fq, int>> unit_decompose(const RingElem& f);

}  // namespace polygrp
