#pragma once
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "polygrp/twisted.hpp"

namespace polygrp {

// Machinery for GL_2 over the Laurent ring: the group is generated by the
// constant subgroup GL_2(F_q) together with the shift delta(t,1) = diag(t,1).
// Everything in this header requires the Laurent flavor and n == 2.

// One factor over that generating set: either a constant invertible matrix or
// delta(t,1)^(+1/-1).
struct GenToken {
  enum class Kind { Const, Shift };
  Kind kind = Kind::Const;
  Mat mat;      // Const: entries constant, det a nonzero constant
  int exp = 0;  // Shift: +1 or -1

  static GenToken constant(Mat m);
  static GenToken shift(const RingCtx& ctx, int exp);
};

struct GeneratorWord {
  RingCtx ctx;
  std::vector<GenToken> tokens;

  Mat evaluate() const;
};

// Euclidean elimination on the exponent span factors g into elementary and
// diagonal matrices; each factor is rewritten over the token alphabet via
//   e12(c*t^k) = diag(c*t^k,1) e12(1) diag(c^-1 t^-k,1),
//   e21(x) = u e12(x) u,  diag(1,t) = u diag(t,1) u,  u = antidiag(1,1).
// The result multiplies back to g; identity factors are dropped.
GeneratorWord generator_decompose(const Mat& g);

// Outer-class label for the constant subgroup: Frobenius exponent mod e plus
// a transpose-inverse flag.
struct Phi0Label {
  uint32_t frob_exp = 0;
  bool eps = false;

  bool operator==(const Phi0Label& o) const = default;
};

// The label the probe scan reports for that pair: first match over labels in
// scan order composed with inner twists from GL_2(F_q). Collapses the
// transpose-inverse flag at q = 2 where that map is inner; identity at q >= 3.
Phi0Label phi0_label_normalize(const FieldSpec* fs, Phi0Label l);

// Type data of a torus-stabilizing map phi: phi(delta(t,1)) equals
// h * delta(t^eps, 1) when i == 0 and h * delta(1, t^eps) when i == 1, with
// h = diag(h1, h2) constant. phi0 names the induced map on GL_2(F_q).
struct AutType {
  Fq h1, h2;
  int eps = +1;
  uint32_t i = 0;
  Phi0Label phi0;

  bool operator==(const AutType& o) const;
  std::string to_string() const;
};

// Reads the type off phi(delta(t,1)) after checking that diagonals stay
// diagonal, then classifies the constant-subgroup restriction by the probe
// scan. Throws when either step fails.
AutType type_of(const GroupMap& phi);

// Type of (psi after phi). The inner factor's (eps, i) selects the twist on
// psi's torus part: invert when phi.eps == -1, swap the pair when phi.i == 1;
// psi's phi0 acts on phi's torus part entrywise. eps multiplies, u-flags add
// mod 2, labels compose componentwise.
AutType compose_types(const AutType& psi, const AutType& phi);

// Element of the finite group the type data lives in:
// T_0 extended by {+1,-1} x {0,1} x labels, multiplying like compose_types.
struct GammaElem {
  Fq h1, h2;
  int a = +1;
  uint32_t b = 0;
  Phi0Label c;

  bool operator==(const GammaElem& o) const;
};

GammaElem gamma_identity(const FieldSpec* fs);
GammaElem gamma_of_type(const AutType& ty);
AutType type_of_gamma(const GammaElem& g);
// y * x in the type-composition order: y plays the outer factor.
GammaElem gamma_mul(const GammaElem& y, const GammaElem& x);
GammaElem gamma_inverse(const GammaElem& g);

// The whole group, enumerated in a fixed order (h1, h2 by field index, then
// +1 before -1, u-flag, frob exponent, flag), with the row-major product
// table. Order (q-1)^2 * 4 * 2e.
struct GammaGroup {
  FieldRef field;
  std::vector<GammaElem> elems;
  std::vector<uint32_t> table;  // table[i*size()+j] = index of elems[i]*elems[j]

  size_t size() const { return elems.size(); }
  uint32_t index_of(const GammaElem& g) const;
  uint32_t mul_index(uint32_t i, uint32_t j) const { return table[i * elems.size() + j]; }
};

GammaGroup gamma_group_build(const FieldRef& field);

// Every type over the field, in the GammaGroup enumeration order.
std::vector<AutType> all_types(const RingCtx& ctx);

// Closed-form map of the requested type: a homothety by a determinant
// character (t-valued exactly when i == 1), an entrywise ring map
// t -> lambda*t^(+1/-1) with a Frobenius twist, and an optional
// transpose-inverse. The constant-subgroup restriction is exactly the label's
// transversal element, so type_of reproduces the request up to label
// normalization. Throws "realizability unknown" if the built map fails the
// readback check.
GroupMap build_realized_aut(const RingCtx& ctx, const AutType& ty);

// Least n >= 1 with phi^n the identity on {e12(1), e21(1), diag(gen,1),
// delta(t,1)}. Asserts the finite-order bound: k*(r+q-2) for types with
// (eps, i) = (+1, 0), twice the square's bound otherwise, where k is the
// order of the constant-subgroup restriction and r the order on T_0.
uint32_t aut_order(const GroupMap& phi);

// Fixed-subgroup verification for eps == -1 maps. For the Frobenius class the
// shears e_k = e12(t^((q-1)k)) map to e_{-k} (u-flag 0) or stay fixed
// (u-flag 1), their products e12(t^((q-1)k) + t^((1-q)k)) are fixed, and
// random words over GL_2(F_p[s]) generators are fixed. For the
// Frobenius-transpose class e12(s^k) maps to e21(-s^k) instead.
struct FixReport {
  std::string phi0_class;  // "rho" or "rho-eps"
  int eps = 0;
  uint32_t u_flag = 0;
  uint32_t k_checked = 0;
  bool ek_images_ok = false;
  bool ek_products_ok = false;
  bool s_family_ok = false;
  uint32_t words_checked = 0;
  uint32_t words_fixed = 0;
  bool no_fixed_shear = false;  // rho-eps only: e12(s) is moved
  std::string summary;

  bool ok() const;
};

FixReport fixed_subgroup_check(const GroupMap& phi, uint32_t k_max = 6,
                               uint32_t n_words = 200);

// Separation verdict dispatched on the type: eps == +1 maps report
// "separated via abelian quotient (not machine-checked)"; eps == -1 maps
// certify the witness family x_m (Frobenius class, fixed points) or
// e12(s^m) (Frobenius-transpose class, alternating orbit) with exact trace
// and degree checks, r = aut_order(phi).
TraceCertificate gl2_separation_certificate(const GroupMap& phi,
                                            const std::vector<uint32_t>& indices);

}  // namespace polygrp
