#pragma once

#include "polygrp/matrix.hpp"
#include "polygrp/std_aut.hpp"

#include <cstdint>
#include <vector>

namespace polygrp {

// Membership oracles for the amalgam GL2(F[t]) = GL2(F) *_{B0} B and its
// SL2 variant.  factor0 = constant invertible matrices, factor1 = upper
// triangular matrices with unit diagonal entries, edge = intersection.
// SL kind additionally requires determinant 1 in every oracle.
struct AmalgamSpec {
  RingCtx ctx;
  GroupKind kind = GroupKind::GL;

  // Poly flavor only.
  static AmalgamSpec nagao(const RingCtx& ctx, GroupKind kind);

  bool in_factor0(const Mat& m) const;
  bool in_factor1(const Mat& m) const;
  bool in_edge(const Mat& m) const;
};

// One letter of a word; tag 0 selects factor0, tag 1 selects factor1.
struct WordFactor {
  int tag = 0;
  Mat m;
};

// Weakly reduced word: adjacent tags differ and every letter lies outside
// the edge subgroup.  Degenerate forms: the empty word is the identity
// (length 0); a single edge element is stored as one tag-0 letter (length 1).
struct AmalgamWord {
  AmalgamSpec spec;
  std::vector<WordFactor> factors;

  Mat product() const;
};

size_t word_length(const AmalgamWord& w);

// Rewrites an arbitrary letter sequence into weakly reduced form: absorbs
// edge letters into a neighbour, merges adjacent same-tag letters, repeats.
// The product is preserved exactly.  Throws std::invalid_argument if a raw
// letter belongs to neither factor.
AmalgamWord word_reduce(const std::vector<Mat>& raw, const AmalgamSpec& spec);

AmalgamWord word_concat(const AmalgamWord& a, const AmalgamWord& b);
AmalgamWord word_inverse(const AmalgamWord& w);

// Euclidean decomposition of g over F[t] (det a unit) into a weakly reduced
// word: while the (2,1) entry is nonzero, clear with a shear from B when
// deg(a) >= deg(c), otherwise swap rows with a constant matrix from factor0
// (antidiag(1,1) for GL, [[0,1],[-1,0]] for SL); the remainder lands in B.
AmalgamWord nagao_decompose(const Mat& g, GroupKind kind);

enum class ParityVerdict { EqualsM, Odd, HypothesisViolation };

// Length dichotomy: if l(z) = l(w) = k >= 2, the last letter of z and the
// first letter of w lie in factor0, and l(x) = m is even and >= 2, then
// l(z x w) = m or l(z x w) is odd.  Returns which branch held; hypothesis
// failures are a verdict, not an error.  Throws std::logic_error if the
// dichotomy itself fails (it cannot).
ParityVerdict lemma_length_parity(const AmalgamWord& z, const AmalgamWord& x,
                                  const AmalgamWord& w);

// Automorphism data for the unipotent coordinate F[t]: t^i is sent to
// images[i-1] for 1 <= i <= D, every monomial above degree D and every
// constant is fixed, and the map extends coefficientwise.  make() requires
// each image to have degree <= D and the induced map on coefficient vectors
// of degree <= D to be invertible.
struct ReinerMap {
  RingCtx ctx;
  uint32_t D = 0;
  std::vector<RingElem> images;

  static ReinerMap identity(const RingCtx& ctx);
  static ReinerMap make(const RingCtx& ctx, uint32_t D, std::vector<RingElem> images);

  RingElem apply_poly(const RingElem& f) const;
  bool is_identity() const;
};

// Applies the extension of nu to g in GL2(F[t]): decompose g, fix constant
// letters, send an upper triangular letter [[l, f],[0, m]] to
// [[l, l*nu(f/l)],[0, m]], multiply back.  Independent of the decomposition.
Mat reiner_apply(const ReinerMap& nu, const Mat& g);

// Degree over F_p of the subfield generated by the squares of F^x:
// the smallest d dividing e with (q-1)/gcd(2,q-1) dividing p^d - 1.
uint32_t square_subfield_degree(const FieldRef& fs);

// Linearity required for nu to extend to the group fixing the diagonal
// torus: F-linearity for GL, F'-linearity for SL where F' is the subfield
// generated by squares.  Checked by evaluation on scaled monomials.
bool reiner_valid_sl2(const ReinerMap& nu, const AmalgamSpec& spec);

}  // namespace polygrp
