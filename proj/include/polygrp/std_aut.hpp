#pragma once
#include <optional>
#include <vector>

#include "polygrp/matrix.hpp"

namespace polygrp {

// A character of GL_n(R) factoring through det. A unit lambda*t^m maps to
//   lambda^k * (t_coeff * t^t_exp)^m.
// t_exp is 0 in every classical case, keeping the image inside F^x; the
// nonzero case (only legal when n*t_exp == -2, so n == 2) models t-valued
// characters of GL_2 over the Laurent ring.
struct UnitCharacter {
  const FieldSpec* fs = nullptr;
  uint32_t k = 0;
  Fq t_coeff;
  int t_exp = 0;

  static UnitCharacter trivial(const FieldSpec* fs);
  static UnitCharacter det_power(const FieldSpec* fs, uint32_t k);
  static UnitCharacter make(const FieldSpec* fs, uint32_t k, Fq t_coeff, int t_exp = 0);

  RingElem eval_unit(const RingCtx& ctx, const RingElem& u) const;
  bool is_trivial() const;
  bool operator==(const UnitCharacter& o) const;
};

// Character of the composite: outer is applied second. Both must live on the
// same field; n is the matrix dimension (det(scalar) contributes the n-th power).
UnitCharacter chi_combine(const UnitCharacter& outer, const UnitCharacter& inner, size_t n);
// rho . chi . rho^-1 on units; the identity for the polynomial flavor.
UnitCharacter chi_push_through(const UnitCharacter& chi, const RingAut& rho);
// inverse character w.r.t. chi_combine at dimension n
UnitCharacter chi_inverse(const UnitCharacter& chi, size_t n);

// mu_chi : a -> chi(det a) * a is bijective on GL_n exactly under this test.
bool homothety_is_automorphism(const UnitCharacter& chi, size_t n, const RingCtx& ctx);
// A central z != I with mu_chi(z) = I, if one exists (scan over F^x suffices:
// any violation by lambda*t^k*I forces k = 0, see tests). nullopt = injective.
std::optional<Mat> homothety_witness(const UnitCharacter& chi, size_t n, const RingCtx& ctx);

// transpose-inverse
Mat contragredient(const Mat& a);

// Standard automorphism in the canonical factor order
//   phi = mu_chi . rho . iota_g . eps^{use_eps}
// applied right to left: optional contragredient, conjugation by g, entrywise
// ring automorphism, then scalar multiplication by chi(det(.)).
struct StdAut {
  RingCtx ctx;
  size_t n = 0;
  std::optional<UnitCharacter> chi;  // absent = trivial
  RingAut rho;
  Mat g;
  bool use_eps = false;

  static StdAut identity(const RingCtx& ctx, size_t n);
  static StdAut make(const RingCtx& ctx, size_t n, std::optional<UnitCharacter> chi,
                     RingAut rho, Mat g, bool use_eps);
  static StdAut homothety(const RingCtx& ctx, size_t n, const UnitCharacter& chi);
  static StdAut ring_induced(const RingCtx& ctx, size_t n, const RingAut& rho);
  static StdAut inner(const RingCtx& ctx, Mat g);
  static StdAut contragredient_aut(const RingCtx& ctx, size_t n);

  Mat apply(const Mat& a) const;
  StdAut compose(const StdAut& o) const;  // (*this) after o, renormalized
  StdAut pow(uint32_t r) const;
  StdAut inverse() const;
  // canonical-form identity test: trivial chi, identity rho, central g, no eps
  bool is_identity() const;
  // pointwise identity on the probe set (elementaries and unit diagonals)
  bool probe_identity() const;
  std::vector<Mat> probe_set() const;
  bool operator==(const StdAut& o) const;
};

// Least r <= bound with phi^r the identity, requiring both the canonical-form
// test and pointwise probe identity. nullopt when no such r exists in range.
std::optional<uint32_t> std_order(const StdAut& phi, uint32_t bound);

enum class GroupKind { GL, SL };

// Outer-automorphism representative families: {rho, rho.eps} always, plus
// {iota_h(alpha).rho(.eps)} per sampled unit for SL, or {mu_chi.rho(.eps)} per
// sampled character for GL. Exact duplicates collapse. Needs n >= 3.
std::vector<StdAut> transversal_enumerate(GroupKind kind, size_t n, const RingCtx& ctx,
                                          const std::vector<RingElem>& unit_sample,
                                          const std::vector<UnitCharacter>& chi_sample);

}  // namespace polygrp
