#pragma once
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "polygrp/ring.hpp"

namespace polygrp {

// Square matrix over one ring context. Entries are exact RingElems; all
// operations are exact. at(r, c) is 0-based; elementary(i, j, ...) is 1-based
// to match the usual e_ij notation.
class Mat {
 public:
  Mat() : n_(0) {}

  static Mat identity(const RingCtx& ctx, size_t n);
  static Mat zero(const RingCtx& ctx, size_t n);
  static Mat from_entries(const RingCtx& ctx, size_t n, std::vector<RingElem> entries);
  static Mat elementary(const RingCtx& ctx, size_t n, size_t i, size_t j, const RingElem& x);
  static Mat diagonal(const RingCtx& ctx, const std::vector<RingElem>& d);
  static Mat scalar(const RingCtx& ctx, size_t n, const RingElem& c);
  // diag(1, ..., 1, a), the determinant-carrying corner
  static Mat corner_unit(const RingCtx& ctx, size_t n, const RingElem& a);
  // [[0, a], [b, 0]]
  static Mat antidiag2(const RingCtx& ctx, const RingElem& a, const RingElem& b);

  size_t n() const { return n_; }
  const RingCtx& ctx() const { return ctx_; }
  const RingElem& at(size_t r, size_t c) const { return e_[r * n_ + c]; }
  RingElem& at(size_t r, size_t c) { return e_[r * n_ + c]; }

  Mat operator*(const Mat& o) const;
  Mat operator+(const Mat& o) const;
  Mat operator-(const Mat& o) const;
  Mat mul_scalar(const RingElem& c) const;
  Mat transpose() const;
  RingElem trace() const;
  RingElem det() const;
  Mat inverse() const;  // throws when det is not a unit
  Mat pow(long long k) const;
  Mat map(const std::function<RingElem(const RingElem&)>& f) const;

  bool is_identity() const;
  bool operator==(const Mat& o) const;
  bool operator!=(const Mat& o) const { return !(*this == o); }

  bool gl_member() const;  // det a unit
  bool sl_member() const;  // det == 1

  std::string to_key() const;  // canonical serialization, usable as a hash key
  std::string to_string() const;

 private:
  Mat(const RingCtx& ctx, size_t n, std::vector<RingElem> e)
      : ctx_(ctx), n_(n), e_(std::move(e)) {}
  void check(const Mat& o) const;

  RingCtx ctx_;
  size_t n_;
  std::vector<RingElem> e_;
};

inline Mat commutator(const Mat& a, const Mat& b) {
  return a * b * a.inverse() * b.inverse();
}

// A perfectness certificate: the ordered product of commutators [a_i, b_i].
// Factors are stored, never the product, so the claim stays re-checkable.
struct CommutatorWord {
  RingCtx ctx;
  size_t n = 0;
  std::vector<std::pair<Mat, Mat>> pairs;

  Mat evaluate() const;
};

// x_m as a function of the base element u: [[1-u^2, u], [-u, 1]] + I_{n-2}.
Mat witness_x_u(const RingCtx& ctx, size_t n, const RingElem& u);
// The standard witness with u = s^m, m >= 1.
Mat witness_x(const RingCtx& ctx, size_t n, uint32_t m);
// diag([[1+x, x], [1, 1]], I_{n-2}): det 1, trace 2 + x + (n-2).
Mat witness_b(const RingCtx& ctx, size_t n, const RingElem& x);

// Trace of the r-th power of the 2x2 block [[1-u^2, u], [-u, 1]], by the
// two-term recurrence tr_r = (2-u^2) tr_{r-1} - tr_{r-2}, tr_0 = 2.
RingElem witness_block_trace(const RingCtx& ctx, const RingElem& u, uint32_t r);
// Specialization to u = s^m, m >= 1, r >= 1. Degree in s is exactly 2rm with
// leading coefficient (-1)^r.
RingElem trace_power(const RingCtx& ctx, uint32_t m, uint32_t r);

// e_ij(x) = [e_ik(x), e_kj(1)] for n >= 3, k the smallest index outside {i,j}.
// 1-based i, j. x == 0 gives the empty word.
CommutatorWord elem_as_commutator(const RingCtx& ctx, size_t n, size_t i, size_t j,
                                  const RingElem& x);

// e_12(x) in SL_2 as ord(u) commutators [delta(l, 1/l), e_12(.)], l a fixed
// generator of the multiplicative group and u = l^2 - 1. Partial products
// walk e_12(u^k x) up to u^ord(u) = 1. Requires q >= 4.
CommutatorWord elem_as_commutator_sl2(const RingCtx& ctx, const RingElem& x);

}  // namespace polygrp
