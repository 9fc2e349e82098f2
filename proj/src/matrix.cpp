#include "polygrp/matrix.hpp"

#include <stdexcept>

namespace polygrp {

Mat Mat::identity(const RingCtx& ctx, size_t n) {
  Mat m = zero(ctx, n);
  for (size_t i = 0; i < n; ++i) m.at(i, i) = RingElem::one(ctx);
  return m;
}

Mat Mat::zero(const RingCtx& ctx, size_t n) {
  if (n < 1) throw std::invalid_argument("Mat: dimension must be positive");
  return Mat(ctx, n, std::vector<RingElem>(n * n, RingElem::zero(ctx)));
}

Mat Mat::from_entries(const RingCtx& ctx, size_t n, std::vector<RingElem> entries) {
  if (entries.size() != n * n) throw std::invalid_argument("Mat: wrong entry count");
  for (const RingElem& e : entries)
    if (e.spec() != ctx.spec() || e.flavor() != ctx.flavor)
      throw std::invalid_argument("Mat: entry from wrong ring");
  return Mat(ctx, n, std::move(entries));
}

Mat Mat::elementary(const RingCtx& ctx, size_t n, size_t i, size_t j, const RingElem& x) {
  if (i == j) throw std::invalid_argument("Mat: elementary needs i != j");
  if (i < 1 || j < 1 || i > n || j > n) throw std::invalid_argument("Mat: index out of range");
  Mat m = identity(ctx, n);
  m.at(i - 1, j - 1) = x;
  return m;
}

Mat Mat::diagonal(const RingCtx& ctx, const std::vector<RingElem>& d) {
  Mat m = zero(ctx, d.size());
  for (size_t i = 0; i < d.size(); ++i) m.at(i, i) = d[i];
  return m;
}

Mat Mat::scalar(const RingCtx& ctx, size_t n, const RingElem& c) {
  return diagonal(ctx, std::vector<RingElem>(n, c));
}

Mat Mat::corner_unit(const RingCtx& ctx, size_t n, const RingElem& a) {
  std::vector<RingElem> d(n, RingElem::one(ctx));
  d[n - 1] = a;
  return diagonal(ctx, d);
}

Mat Mat::antidiag2(const RingCtx& ctx, const RingElem& a, const RingElem& b) {
  Mat m = zero(ctx, 2);
  m.at(0, 1) = a;
  m.at(1, 0) = b;
  return m;
}

void Mat::check(const Mat& o) const {
  if (n_ != o.n_ || !(ctx_ == o.ctx_)) throw std::invalid_argument("Mat: shape or ring mismatch");
}

Mat Mat::operator*(const Mat& o) const {
  check(o);
  Mat r = zero(ctx_, n_);
  for (size_t i = 0; i < n_; ++i)
    for (size_t k = 0; k < n_; ++k) {
      const RingElem& aik = at(i, k);
      if (aik.is_zero()) continue;
      for (size_t j = 0; j < n_; ++j) r.at(i, j) = r.at(i, j) + aik * o.at(k, j);
    }
  return r;
}

Mat Mat::operator+(const Mat& o) const {
  check(o);
  Mat r = *this;
  for (size_t i = 0; i < n_ * n_; ++i) r.e_[i] = r.e_[i] + o.e_[i];
  return r;
}

Mat Mat::operator-(const Mat& o) const {
  check(o);
  Mat r = *this;
  for (size_t i = 0; i < n_ * n_; ++i) r.e_[i] = r.e_[i] - o.e_[i];
  return r;
}

Mat Mat::mul_scalar(const RingElem& c) const {
  Mat r = *this;
  for (RingElem& e : r.e_) e = e * c;
  return r;
}

Mat Mat::transpose() const {
  Mat r = zero(ctx_, n_);
  for (size_t i = 0; i < n_; ++i)
    for (size_t j = 0; j < n_; ++j) r.at(j, i) = at(i, j);
  return r;
}

RingElem Mat::trace() const {
  RingElem t = RingElem::zero(ctx_);
  for (size_t i = 0; i < n_; ++i) t = t + at(i, i);
  return t;
}

namespace {

RingElem det_rec(const Mat& m, std::vector<size_t>& rows, std::vector<size_t>& cols,
                 const RingCtx& ctx) {
  size_t k = rows.size();
  if (k == 1) return m.at(rows[0], cols[0]);
  RingElem acc = RingElem::zero(ctx);
  size_t r0 = rows[0];
  std::vector<size_t> sub_rows(rows.begin() + 1, rows.end());
  for (size_t ci = 0; ci < k; ++ci) {
    const RingElem& pivot = m.at(r0, cols[ci]);
    if (pivot.is_zero()) continue;
    std::vector<size_t> sub_cols;
    sub_cols.reserve(k - 1);
    for (size_t cj = 0; cj < k; ++cj)
      if (cj != ci) sub_cols.push_back(cols[cj]);
    RingElem minor = det_rec(m, sub_rows, sub_cols, ctx);
    RingElem term = pivot * minor;
    acc = (ci % 2 == 0) ? acc + term : acc - term;
  }
  return acc;
}

}  // namespace

RingElem Mat::det() const {
  std::vector<size_t> rows(n_), cols(n_);
  for (size_t i = 0; i < n_; ++i) rows[i] = cols[i] = i;
  return det_rec(*this, rows, cols, ctx_);
}

Mat Mat::inverse() const {
  RingElem d = det();
  auto unit = unit_decompose(d);
  if (!unit) throw std::domain_error("Mat: not in GL_n(R)");
  RingElem d_inv = RingElem::monomial(ctx_, unit->first.inv(), -unit->second);
  Mat adj = zero(ctx_, n_);
  if (n_ == 1) {
    adj.at(0, 0) = RingElem::one(ctx_);
  } else {
    std::vector<size_t> all(n_);
    for (size_t i = 0; i < n_; ++i) all[i] = i;
    for (size_t i = 0; i < n_; ++i)
      for (size_t j = 0; j < n_; ++j) {
        std::vector<size_t> rows, cols;
        for (size_t r = 0; r < n_; ++r)
          if (r != i) rows.push_back(r);
        for (size_t c = 0; c < n_; ++c)
          if (c != j) cols.push_back(c);
        RingElem minor = det_rec(*this, rows, cols, ctx_);
        adj.at(j, i) = ((i + j) % 2 == 0) ? minor : -minor;
      }
  }
  return adj.mul_scalar(d_inv);
}

Mat Mat::pow(long long k) const {
  if (k < 0) return inverse().pow(-k);
  Mat r = identity(ctx_, n_);
  Mat b = *this;
  while (k > 0) {
    if (k & 1) r = r * b;
    if (k >>= 1) b = b * b;
  }
  return r;
}

Mat Mat::map(const std::function<RingElem(const RingElem&)>& f) const {
  Mat r = *this;
  for (RingElem& e : r.e_) e = f(e);
  return r;
}

bool Mat::is_identity() const {
  for (size_t i = 0; i < n_; ++i)
    for (size_t j = 0; j < n_; ++j) {
      if (i == j ? !at(i, j).is_one() : !at(i, j).is_zero()) return false;
    }
  return true;
}

bool Mat::operator==(const Mat& o) const {
  return n_ == o.n_ && ctx_ == o.ctx_ && e_ == o.e_;
}

bool Mat::gl_member() const { return unit_decompose(det()).has_value(); }

bool Mat::sl_member() const { return det().is_one(); }

std::string Mat::to_key() const {
  std::string key = std::to_string(n_) + ";";
  for (const RingElem& e : e_) {
    key += std::to_string(e.low()) + ":";
    for (uint32_t c : e.raw_coeffs()) key += std::to_string(c) + ",";
    key += "|";
  }
  return key;
}

std::string Mat::to_string() const {
  std::string out = "[";
  for (size_t i = 0; i < n_; ++i) {
    out += "[";
    for (size_t j = 0; j < n_; ++j) {
      out += at(i, j).to_string();
      if (j + 1 < n_) out += ", ";
    }
    out += "]";
    if (i + 1 < n_) out += ", ";
  }
  return out + "]";
}

Mat CommutatorWord::evaluate() const {
  Mat acc = Mat::identity(ctx, n);
  for (const auto& [a, b] : pairs) acc = acc * commutator(a, b);
  return acc;
}

Mat witness_x_u(const RingCtx& ctx, size_t n, const RingElem& u) {
  if (n < 2) throw std::invalid_argument("witness_x: dimension must be at least 2");
  Mat m = Mat::identity(ctx, n);
  m.at(0, 0) = RingElem::one(ctx) - u * u;
  m.at(0, 1) = u;
  m.at(1, 0) = -u;
  return m;
}

Mat witness_x(const RingCtx& ctx, size_t n, uint32_t m) {
  if (m < 1) throw std::invalid_argument("witness_x: exponent must be at least 1");
  return witness_x_u(ctx, n, special_s(ctx).pow(m));
}

Mat witness_b(const RingCtx& ctx, size_t n, const RingElem& x) {
  if (n < 2) throw std::invalid_argument("witness_b: dimension must be at least 2");
  Mat m = Mat::identity(ctx, n);
  m.at(0, 0) = RingElem::one(ctx) + x;
  m.at(0, 1) = x;
  m.at(1, 0) = RingElem::one(ctx);
  return m;
}

RingElem witness_block_trace(const RingCtx& ctx, const RingElem& u, uint32_t r) {
  Fq two = Fq::from_int(ctx.spec(), 2);
  RingElem t_prev = RingElem::constant(ctx, two);       // tr(x^0)
  RingElem mult = t_prev - u * u;                       // 2 - u^2 = tr(x^1)
  if (r == 0) return t_prev;
  RingElem t_cur = mult;
  for (uint32_t i = 2; i <= r; ++i) {
    RingElem t_next = mult * t_cur - t_prev;
    t_prev = t_cur;
    t_cur = t_next;
  }
  return t_cur;
}

RingElem trace_power(const RingCtx& ctx, uint32_t m, uint32_t r) {
  if (m < 1 || r < 1) throw std::invalid_argument("trace_power: m and r must be at least 1");
  return witness_block_trace(ctx, special_s(ctx).pow(m), r);
}

CommutatorWord elem_as_commutator(const RingCtx& ctx, size_t n, size_t i, size_t j,
                                  const RingElem& x) {
  if (n < 3) throw std::invalid_argument("elem_as_commutator: needs n >= 3");
  if (i == j || i < 1 || j < 1 || i > n || j > n)
    throw std::invalid_argument("elem_as_commutator: bad indices");
  CommutatorWord w{ctx, n, {}};
  if (x.is_zero()) return w;
  size_t k = 1;
  while (k == i || k == j) ++k;
  w.pairs.emplace_back(Mat::elementary(ctx, n, i, k, x),
                       Mat::elementary(ctx, n, k, j, RingElem::one(ctx)));
  return w;
}

CommutatorWord elem_as_commutator_sl2(const RingCtx& ctx, const RingElem& x) {
  if (ctx.spec()->q < 4)
    throw std::invalid_argument(
        "elem_as_commutator_sl2: no such certificate by this construction (needs q >= 4)");
  CommutatorWord w{ctx, 2, {}};
  if (x.is_zero()) return w;
  Fq lam = Fq::generator(ctx.spec());
  Fq u = lam * lam - Fq::one(ctx.spec());
  uint32_t d = u.mult_order();
  Mat delta = Mat::diagonal(ctx, {RingElem::constant(ctx, lam), RingElem::constant(ctx, lam.inv())});
  // partial products run e_12(u x), e_12(u^2 x), ..., ending at e_12(u^d x) = e_12(x)
  for (uint32_t k = 1; k <= d; ++k) {
    Fq c = (k == 1) ? Fq::one(ctx.spec()) : u.pow(k - 2) * (u - Fq::one(ctx.spec()));
    w.pairs.emplace_back(delta, Mat::elementary(ctx, 2, 1, 2, x.scalar_mul(c)));
  }
  return w;
}

}  // namespace polygrp
