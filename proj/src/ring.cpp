#include "polygrp/ring.hpp"

#include <algorithm>
#include <stdexcept>

namespace polygrp {

RingElem RingElem::zero(const RingCtx& ctx) {
  return RingElem(ctx.spec(), ctx.flavor, 0, {});
}

RingElem RingElem::one(const RingCtx& ctx) {
  return RingElem(ctx.spec(), ctx.flavor, 0, {1});
}

RingElem RingElem::constant(const RingCtx& ctx, Fq c) {
  if (c.spec() != ctx.spec()) throw std::invalid_argument("RingElem: coefficient from wrong field");
  return RingElem(ctx.spec(), ctx.flavor, 0, {c.idx()});
}

RingElem RingElem::monomial(const RingCtx& ctx, Fq c, int k) {
  if (c.spec() != ctx.spec()) throw std::invalid_argument("RingElem: coefficient from wrong field");
  if (k < 0 && ctx.flavor == Flavor::Poly)
    throw std::invalid_argument("RingElem: negative exponent in polynomial flavor");
  return RingElem(ctx.spec(), ctx.flavor, k, {c.idx()});
}

RingElem RingElem::t_power(const RingCtx& ctx, int k) {
  return monomial(ctx, Fq::one(ctx.spec()), k);
}

RingElem RingElem::from_coeffs(const RingCtx& ctx, int low, std::vector<uint32_t> coeffs) {
  for (uint32_t c : coeffs)
    if (c >= ctx.spec()->q) throw std::invalid_argument("RingElem: coefficient index out of range");
  if (ctx.flavor == Flavor::Poly && low < 0) {
    for (int i = 0; i < -low && i < static_cast<int>(coeffs.size()); ++i)
      if (coeffs[i] != 0)
        throw std::invalid_argument("RingElem: negative exponent in polynomial flavor");
  }
  return RingElem(ctx.spec(), ctx.flavor, low, std::move(coeffs));
}

RingCtx RingElem::ctx() const {
  if (!fs_) throw std::logic_error("RingElem: default-constructed element has no context");
  return RingCtx{FieldSpec::make(fs_->p, fs_->e, fs_->modulus), fl_};
}

void RingElem::normalize() {
  while (!c_.empty() && c_.back() == 0) c_.pop_back();
  size_t lead = 0;
  while (lead < c_.size() && c_[lead] == 0) ++lead;
  if (lead == c_.size()) {
    c_.clear();
    low_ = 0;
    return;
  }
  if (fl_ == Flavor::Laurent) {
    if (lead > 0) {
      c_.erase(c_.begin(), c_.begin() + static_cast<long>(lead));
      low_ += static_cast<int>(lead);
    }
  } else {
    if (low_ < 0) throw std::invalid_argument("RingElem: negative exponent in polynomial flavor");
    if (low_ > 0) {
      c_.insert(c_.begin(), low_, 0);
      low_ = 0;
    }
  }
}

void RingElem::check(const RingElem& o) const {
  if (fs_ != o.fs_ || fl_ != o.fl_)
    throw std::invalid_argument("RingElem: mixed ring contexts");
}

bool RingElem::is_one() const { return low_ == 0 && c_.size() == 1 && c_[0] == 1; }

bool RingElem::is_constant() const {
  return c_.empty() || (low_ == 0 && c_.size() == 1);
}

bool RingElem::is_unit() const {
  if (c_.size() != 1) return false;
  return fl_ == Flavor::Laurent || low_ == 0;
}

int RingElem::degree() const {
  if (fl_ != Flavor::Poly) throw std::logic_error("RingElem: degree is a polynomial notion");
  return high();
}

Fq RingElem::coeff(int k) const {
  if (!fs_) throw std::logic_error("RingElem: no context");
  if (k < low_ || k > high()) return Fq::zero(fs_);
  return Fq(fs_, c_[static_cast<size_t>(k - low_)]);
}

RingElem RingElem::operator+(const RingElem& o) const {
  check(o);
  if (is_zero()) return o;
  if (o.is_zero()) return *this;
  int lo = std::min(low_, o.low_);
  int hi = std::max(high(), o.high());
  std::vector<uint32_t> r(static_cast<size_t>(hi - lo + 1), 0);
  for (size_t i = 0; i < c_.size(); ++i) r[static_cast<size_t>(low_ - lo) + i] = c_[i];
  for (size_t i = 0; i < o.c_.size(); ++i) {
    size_t j = static_cast<size_t>(o.low_ - lo) + i;
    r[j] = fs_->add(r[j], o.c_[i]);
  }
  return RingElem(fs_, fl_, lo, std::move(r));
}

RingElem RingElem::operator-(const RingElem& o) const { return *this + (-o); }

RingElem RingElem::operator-() const {
  if (!fs_) return *this;
  std::vector<uint32_t> r(c_);
  for (auto& x : r) x = fs_->neg(x);
  return RingElem(fs_, fl_, low_, std::move(r));
}

RingElem RingElem::operator*(const RingElem& o) const {
  check(o);
  if (is_zero() || o.is_zero()) return RingElem(fs_, fl_, 0, {});
  std::vector<uint32_t> r(c_.size() + o.c_.size() - 1, 0);
  for (size_t i = 0; i < c_.size(); ++i) {
    if (c_[i] == 0) continue;
    for (size_t j = 0; j < o.c_.size(); ++j)
      r[i + j] = fs_->add(r[i + j], fs_->mul(c_[i], o.c_[j]));
  }
  return RingElem(fs_, fl_, low_ + o.low_, std::move(r));
}

RingElem RingElem::scalar_mul(Fq c) const {
  if (fs_ && c.spec() != fs_) throw std::invalid_argument("RingElem: coefficient from wrong field");
  std::vector<uint32_t> r(c_);
  for (auto& x : r) x = fs_->mul(x, c.idx());
  return RingElem(fs_, fl_, low_, std::move(r));
}

RingElem RingElem::shifted(int k) const {
  if (is_zero()) return *this;
  return RingElem(fs_, fl_, low_ + k, c_);
}

RingElem RingElem::pow(uint32_t k) const {
  if (!fs_) throw std::logic_error("RingElem: no context");
  RingElem r(fs_, fl_, 0, {1});
  RingElem b = *this;
  while (k > 0) {
    if (k & 1) r = r * b;
    if (k >>= 1) b = b * b;
  }
  return r;
}

bool RingElem::operator==(const RingElem& o) const {
  return fs_ == o.fs_ && fl_ == o.fl_ && low_ == o.low_ && c_ == o.c_;
}

std::pair<RingElem, RingElem> RingElem::divmod(const RingElem& a, const RingElem& b) {
  a.check(b);
  if (b.is_zero()) throw std::domain_error("RingElem: division by zero");
  const FieldSpec* fs = a.fs_;
  if (a.fl_ == Flavor::Laurent) {
    // Normalize both to polynomial position, divide there, shift back.
    int la = a.low_, lb = b.low_;
    RingElem ab(fs, Flavor::Poly, 0, a.c_);
    RingElem bb(fs, Flavor::Poly, 0, b.c_);
    auto [qb, rb] = divmod(ab, bb);
    RingElem q(fs, Flavor::Laurent, la - lb + qb.low_, qb.c_);
    RingElem r(fs, Flavor::Laurent, la + rb.low_, rb.c_);
    return {q, r};
  }
  if (a.is_zero() || a.high() < b.high())
    return {RingElem(fs, a.fl_, 0, {}), a};
  uint32_t lead_inv = fs->inv(b.c_.back());
  std::vector<uint32_t> rem(a.c_);
  std::vector<uint32_t> quo(a.c_.size() - b.c_.size() + 1, 0);
  for (int k = static_cast<int>(rem.size()) - 1;
       k >= static_cast<int>(b.c_.size()) - 1; --k) {
    if (rem[static_cast<size_t>(k)] == 0) continue;
    uint32_t f = fs->mul(rem[static_cast<size_t>(k)], lead_inv);
    size_t shift = static_cast<size_t>(k) - (b.c_.size() - 1);
    quo[shift] = f;
    for (size_t i = 0; i < b.c_.size(); ++i)
      rem[shift + i] = fs->sub(rem[shift + i], fs->mul(f, b.c_[i]));
  }
  return {RingElem(fs, a.fl_, 0, std::move(quo)), RingElem(fs, a.fl_, 0, std::move(rem))};
}

std::string RingElem::to_string() const {
  if (is_zero()) return "0";
  std::string out;
  for (int k = high(); k >= low_; --k) {
    Fq c = coeff(k);
    if (c.is_zero()) continue;
    if (!out.empty()) out += "+";
    if (k == 0) {
      out += c.to_string();
    } else {
      if (!c.is_one()) out += c.to_string() + "*";
      out += (k == 1) ? "t" : "t^" + std::to_string(k);
    }
  }
  return out;
}

RingAut RingAut::identity(const RingCtx& ctx) {
  return make(ctx, 0, Fq::one(ctx.spec()), Fq::zero(ctx.spec()), +1);
}

RingAut RingAut::make(const RingCtx& ctx, uint32_t frob_exp, Fq a, Fq b, int eps) {
  if (a.spec() != ctx.spec() || b.spec() != ctx.spec())
    throw std::invalid_argument("RingAut: parameter from wrong field");
  if (a.is_zero()) throw std::invalid_argument("RingAut: t-coefficient must be a unit");
  if (ctx.flavor == Flavor::Poly && eps != +1)
    throw std::invalid_argument("RingAut: inversion of t needs the Laurent flavor");
  if (ctx.flavor == Flavor::Laurent && !b.is_zero())
    throw std::invalid_argument("RingAut: additive part needs the polynomial flavor");
  if (eps != +1 && eps != -1) throw std::invalid_argument("RingAut: eps must be +1 or -1");
  RingAut s;
  s.ctx = ctx;
  s.frob_exp = frob_exp % ctx.spec()->e;
  s.a = a;
  s.b = b;
  s.eps = eps;
  return s;
}

RingElem RingAut::apply(const RingElem& f) const {
  if (f.spec() != ctx.spec() || f.flavor() != ctx.flavor)
    throw std::invalid_argument("RingAut: element from wrong ring");
  if (f.is_zero()) return f;
  if (ctx.flavor == Flavor::Poly) {
    RingElem image = RingElem::monomial(ctx, a, 1) + RingElem::constant(ctx, b);
    RingElem acc = RingElem::zero(ctx);
    for (int k = f.high(); k >= 0; --k)
      acc = acc * image + RingElem::constant(ctx, apply_scalar(f.coeff(k)));
    return acc;
  }
  RingElem acc = RingElem::zero(ctx);
  for (int k = f.low(); k <= f.high(); ++k) {
    Fq c = f.coeff(k);
    if (c.is_zero()) continue;
    acc = acc + RingElem::monomial(ctx, apply_scalar(c) * a.pow(k), eps * k);
  }
  return acc;
}

RingAut RingAut::compose(const RingAut& o) const {
  if (!(ctx == o.ctx)) throw std::invalid_argument("RingAut: mixed ring contexts");
  uint32_t kap = (frob_exp + o.frob_exp) % ctx.spec()->e;
  Fq oa = o.a.frobenius(frob_exp);
  if (ctx.flavor == Flavor::Poly) {
    Fq ob = o.b.frobenius(frob_exp);
    return make(ctx, kap, oa * a, oa * b + ob, +1);
  }
  return make(ctx, kap, oa * a.pow(o.eps), Fq::zero(ctx.spec()), eps * o.eps);
}

RingAut RingAut::inverse() const {
  uint32_t e = ctx.spec()->e;
  uint32_t kap = (e - frob_exp % e) % e;
  if (ctx.flavor == Flavor::Poly) {
    Fq ai = a.inv().frobenius(kap);
    Fq bi = -(a.inv() * b).frobenius(kap);
    return make(ctx, kap, ai, bi, +1);
  }
  return make(ctx, kap, a.pow(-eps).frobenius(kap), Fq::zero(ctx.spec()), eps);
}

uint32_t RingAut::order() const {
  RingAut acc = *this;
  uint32_t n = 1;
  while (!acc.is_identity()) {
    acc = acc.compose(*this);
    if (++n > 1000000) throw std::logic_error("RingAut: order runaway");
  }
  return n;
}

bool RingAut::is_identity() const {
  return frob_exp == 0 && a.is_one() && b.is_zero() && eps == +1;
}

bool RingAut::operator==(const RingAut& o) const {
  return ctx == o.ctx && frob_exp == o.frob_exp && a == o.a && b == o.b && eps == o.eps;
}

std::vector<RingAut> all_ring_auts(const RingCtx& ctx) {
  const FieldSpec* fs = ctx.spec();
  std::vector<RingAut> out;
  for (uint32_t kap = 0; kap < fs->e; ++kap)
    for (uint32_t ai = 1; ai < fs->q; ++ai) {
      Fq a(fs, ai);
      if (ctx.flavor == Flavor::Poly) {
        for (uint32_t bi = 0; bi < fs->q; ++bi)
          out.push_back(RingAut::make(ctx, kap, a, Fq(fs, bi), +1));
      } else {
        out.push_back(RingAut::make(ctx, kap, a, Fq::zero(fs), +1));
        out.push_back(RingAut::make(ctx, kap, a, Fq::zero(fs), -1));
      }
    }
  return out;
}

RingElem special_s(const RingCtx& ctx) {
  uint32_t q = ctx.spec()->q;
  if (ctx.flavor == Flavor::Poly) {
    RingElem base = RingElem::t_power(ctx, static_cast<int>(q)) - RingElem::t_power(ctx, 1);
    return base.pow(q - 1);
  }
  return RingElem::t_power(ctx, static_cast<int>(q) - 1) +
         RingElem::t_power(ctx, 1 - static_cast<int>(q));
}

namespace {

// Solves A c = y over Z/p. A is rows x cols in row-major order. Returns the
// unique solution when the system is consistent with full column rank.
std::optional<std::vector<uint32_t>> solve_mod_p(std::vector<uint32_t> A,
                                                 std::vector<uint32_t> y,
                                                 size_t rows, size_t cols, uint32_t p) {
  auto inv_mod = [p](uint32_t a) {
    for (uint32_t x = 1; x < p; ++x)
      if ((a * x) % p == 1) return x;
    throw std::logic_error("solve_mod_p: non-invertible pivot");
  };
  size_t rank = 0;
  std::vector<size_t> pivot_row(cols, SIZE_MAX);
  for (size_t col = 0; col < cols && rank < rows; ++col) {
    size_t piv = SIZE_MAX;
    for (size_t r = rank; r < rows; ++r)
      if (A[r * cols + col] != 0) { piv = r; break; }
    if (piv == SIZE_MAX) continue;
    for (size_t j = 0; j < cols; ++j) std::swap(A[rank * cols + j], A[piv * cols + j]);
    std::swap(y[rank], y[piv]);
    uint32_t inv = inv_mod(A[rank * cols + col]);
    for (size_t j = 0; j < cols; ++j) A[rank * cols + j] = (A[rank * cols + j] * inv) % p;
    y[rank] = (y[rank] * inv) % p;
    for (size_t r = 0; r < rows; ++r) {
      if (r == rank) continue;
      uint32_t f = A[r * cols + col];
      if (f == 0) continue;
      for (size_t j = 0; j < cols; ++j)
        A[r * cols + j] = (A[r * cols + j] + p - (f * A[rank * cols + j]) % p) % p;
      y[r] = (y[r] + p - (f * y[rank]) % p) % p;
    }
    pivot_row[col] = rank;
    ++rank;
  }
  for (size_t col = 0; col < cols; ++col)
    if (pivot_row[col] == SIZE_MAX) return std::nullopt;  // underdetermined
  for (size_t r = rank; r < rows; ++r)
    if (y[r] != 0) return std::nullopt;  // inconsistent
  std::vector<uint32_t> c(cols);
  for (size_t col = 0; col < cols; ++col) c[col] = y[pivot_row[col]];
  return c;
}

}  // namespace

std::optional<std::vector<uint32_t>> s_expansion(const RingElem& f) {
  if (f.is_zero()) return std::vector<uint32_t>{};
  const FieldSpec* fs = f.spec();
  uint32_t p = fs->p, q = fs->q;
  for (int k = f.low(); k <= f.high(); ++k)
    if (f.coeff(k).idx() >= p) return std::nullopt;  // outside prime subfield

  RingCtx ctx = f.ctx();
  int step = (ctx.flavor == Flavor::Poly) ? static_cast<int>(q * (q - 1))
                                          : static_cast<int>(q - 1);
  int top = f.high();
  if (top < 0 || top % step != 0) return std::nullopt;
  int d = top / step;

  int window_low = (ctx.flavor == Flavor::Poly) ? 0 : -d * step;
  int window_high = d * step;
  if (f.low() < window_low || f.high() > window_high) return std::nullopt;

  size_t rows = static_cast<size_t>(window_high - window_low + 1);
  size_t cols = static_cast<size_t>(d + 1);
  std::vector<uint32_t> A(rows * cols, 0);
  std::vector<uint32_t> y(rows, 0);

  RingElem s = special_s(ctx);
  RingElem spow = RingElem::one(ctx);
  for (size_t i = 0; i < cols; ++i) {
    for (int k = spow.low(); k <= spow.high(); ++k) {
      uint32_t c = spow.coeff(k).idx();
      if (c >= p) return std::nullopt;  // powers of s stay in the prime subfield
      A[static_cast<size_t>(k - window_low) * cols + i] = c;
    }
    if (i + 1 < cols) spow = spow * s;
  }
  for (int k = f.low(); k <= f.high(); ++k)
    y[static_cast<size_t>(k - window_low)] = f.coeff(k).idx();

  return solve_mod_p(std::move(A), std::move(y), rows, cols, p);
}

std::optional<int> s_degree(const RingElem& f) {
  auto exp = s_expansion(f);
  if (!exp) return std::nullopt;
  return static_cast<int>(exp->size()) - 1;
}

std::optional<std::pair<Fq, int>> unit_decompose(const RingElem& f) {
  if (!f.is_unit()) return std::nullopt;
  return std::make_pair(f.coeff(f.low()), f.low());
}

}  // namespace polygrp
