#include "polygrp/amalgam.hpp"

#include <numeric>
#include <stdexcept>
#include <utility>

namespace polygrp {

namespace {

void require_poly(const RingCtx& ctx, const char* who) {
  if (ctx.flavor != Flavor::Poly)
    throw std::invalid_argument(std::string(who) + ": Poly flavor required");
}

bool entries_constant(const Mat& m) {
  for (size_t r = 0; r < m.n(); ++r)
    for (size_t c = 0; c < m.n(); ++c)
      if (!m.at(r, c).is_constant()) return false;
  return true;
}

bool same_spec(const AmalgamSpec& a, const AmalgamSpec& b) {
  return a.ctx == b.ctx && a.kind == b.kind;
}

// Row-reduces a over F_q; true when the matrix is invertible.
bool invertible_fq(const FieldSpec* fs, std::vector<std::vector<uint32_t>> a) {
  const size_t n = a.size();
  for (size_t col = 0; col < n; ++col) {
    size_t piv = col;
    while (piv < n && a[piv][col] == 0) ++piv;
    if (piv == n) return false;
    std::swap(a[piv], a[col]);
    uint32_t inv = fs->inv(a[col][col]);
    for (size_t j = col; j < n; ++j) a[col][j] = fs->mul(inv, a[col][j]);
    for (size_t r = 0; r < n; ++r) {
      if (r == col || a[r][col] == 0) continue;
      uint32_t f = a[r][col];
      for (size_t j = col; j < n; ++j)
        a[r][j] = fs->add(a[r][j], fs->neg(fs->mul(f, a[col][j])));
    }
  }
  return true;
}

}  // namespace

AmalgamSpec AmalgamSpec::nagao(const RingCtx& ctx, GroupKind kind) {
  require_poly(ctx, "AmalgamSpec::nagao");
  return AmalgamSpec{ctx, kind};
}

bool AmalgamSpec::in_factor0(const Mat& m) const {
  if (m.n() != 2 || !(m.ctx() == ctx)) return false;
  if (!entries_constant(m)) return false;
  return kind == GroupKind::SL ? m.sl_member() : m.gl_member();
}

bool AmalgamSpec::in_factor1(const Mat& m) const {
  if (m.n() != 2 || !(m.ctx() == ctx)) return false;
  if (!m.at(1, 0).is_zero()) return false;
  if (!m.at(0, 0).is_unit() || !m.at(1, 1).is_unit()) return false;
  return kind == GroupKind::SL ? m.sl_member() : true;
}

bool AmalgamSpec::in_edge(const Mat& m) const {
  return in_factor0(m) && in_factor1(m);
}

Mat AmalgamWord::product() const {
  Mat acc = Mat::identity(spec.ctx, 2);
  for (const auto& f : factors) acc = acc * f.m;
  return acc;
}

size_t word_length(const AmalgamWord& w) { return w.factors.size(); }

// Invariants of the loop: the stack is weakly reduced; lead is an edge
// element and differs from the identity only while the stack is empty;
// lead times the stack product equals the prefix of raw consumed so far.
AmalgamWord word_reduce(const std::vector<Mat>& raw, const AmalgamSpec& spec) {
  std::vector<WordFactor> st;
  Mat lead = Mat::identity(spec.ctx, 2);

  for (const Mat& m : raw) {
    const bool f0 = spec.in_factor0(m);
    const bool f1 = spec.in_factor1(m);
    if (!f0 && !f1)
      throw std::invalid_argument("word_reduce: letter in neither factor");
    if (f0 && f1) {
      if (st.empty()) lead = lead * m;
      else st.back().m = st.back().m * m;
      continue;
    }
    const int tag = f0 ? 0 : 1;
    if (st.empty()) {
      st.push_back(WordFactor{tag, lead * m});
      lead = Mat::identity(spec.ctx, 2);
      continue;
    }
    if (st.back().tag != tag) {
      st.push_back(WordFactor{tag, m});
      continue;
    }
    Mat merged = st.back().m * m;
    if (!spec.in_edge(merged)) {
      st.back().m = std::move(merged);
      continue;
    }
    // The merge degenerated into the edge: absorb it into the letter below.
    st.pop_back();
    if (st.empty()) lead = std::move(merged);
    else st.back().m = st.back().m * merged;
  }

  AmalgamWord out{spec, {}};
  if (st.empty()) {
    if (!lead.is_identity()) out.factors.push_back(WordFactor{0, std::move(lead)});
  } else {
    out.factors = std::move(st);
  }
  return out;
}

AmalgamWord word_concat(const AmalgamWord& a, const AmalgamWord& b) {
  if (!same_spec(a.spec, b.spec))
    throw std::invalid_argument("word_concat: mismatched amalgam specs");
  std::vector<Mat> letters;
  letters.reserve(a.factors.size() + b.factors.size());
  for (const auto& f : a.factors) letters.push_back(f.m);
  for (const auto& f : b.factors) letters.push_back(f.m);
  return word_reduce(letters, a.spec);
}

AmalgamWord word_inverse(const AmalgamWord& w) {
  std::vector<Mat> letters;
  letters.reserve(w.factors.size());
  for (auto it = w.factors.rbegin(); it != w.factors.rend(); ++it)
    letters.push_back(it->m.inverse());
  return word_reduce(letters, w.spec);
}

AmalgamWord nagao_decompose(const Mat& g, GroupKind kind) {
  const RingCtx ctx = g.ctx();
  require_poly(ctx, "nagao_decompose");
  if (g.n() != 2) throw std::invalid_argument("nagao_decompose: 2x2 matrices only");
  if (!g.gl_member()) throw std::invalid_argument("nagao_decompose: det is not a unit");
  if (kind == GroupKind::SL && !g.sl_member())
    throw std::invalid_argument("nagao_decompose: det != 1");

  AmalgamSpec spec = AmalgamSpec::nagao(ctx, kind);
  const RingElem one = RingElem::one(ctx);
  const Mat u = kind == GroupKind::GL ? Mat::antidiag2(ctx, one, one)
                                      : Mat::antidiag2(ctx, one, -one);
  const Mat u_inv = u.inverse();

  std::vector<Mat> letters;
  Mat m = g;
  while (!m.at(1, 0).is_zero()) {
    if (m.at(0, 0).degree() >= m.at(1, 0).degree()) {
      RingElem quot = RingElem::divmod(m.at(0, 0), m.at(1, 0)).first;
      letters.push_back(Mat::elementary(ctx, 2, 1, 2, quot));
      m = Mat::elementary(ctx, 2, 1, 2, -quot) * m;
    } else {
      letters.push_back(u);
      m = u_inv * m;
    }
  }
  letters.push_back(std::move(m));
  return word_reduce(letters, spec);
}

ParityVerdict lemma_length_parity(const AmalgamWord& z, const AmalgamWord& x,
                                  const AmalgamWord& w) {
  if (!same_spec(z.spec, x.spec) || !same_spec(z.spec, w.spec))
    throw std::invalid_argument("lemma_length_parity: mismatched amalgam specs");
  const size_t k = word_length(z);
  const size_t m = word_length(x);
  const bool hyp = k >= 2 && word_length(w) == k && m >= 2 && m % 2 == 0 &&
                   z.factors.back().tag == 0 && w.factors.front().tag == 0;
  if (!hyp) return ParityVerdict::HypothesisViolation;

  std::vector<Mat> letters;
  letters.reserve(2 * k + m);
  for (const auto& f : z.factors) letters.push_back(f.m);
  for (const auto& f : x.factors) letters.push_back(f.m);
  for (const auto& f : w.factors) letters.push_back(f.m);
  const size_t l = word_length(word_reduce(letters, z.spec));
  if (l == m) return ParityVerdict::EqualsM;
  if (l % 2 == 1) return ParityVerdict::Odd;
  throw std::logic_error("lemma_length_parity: dichotomy violated");
}

ReinerMap ReinerMap::identity(const RingCtx& ctx) {
  require_poly(ctx, "ReinerMap");
  return ReinerMap{ctx, 0, {}};
}

ReinerMap ReinerMap::make(const RingCtx& ctx, uint32_t D, std::vector<RingElem> images) {
  require_poly(ctx, "ReinerMap");
  if (images.size() != D)
    throw std::invalid_argument("ReinerMap: expected one image per monomial t^1..t^D");
  for (const auto& im : images) {
    if (!(im.ctx() == ctx)) throw std::invalid_argument("ReinerMap: image context mismatch");
    if (im.degree() > static_cast<int>(D))
      throw std::invalid_argument("ReinerMap: image degree exceeds D");
  }

  // Column j holds the coefficients of the image of t^j, j = 0..D.
  const FieldSpec* fs = ctx.spec();
  const size_t n = D + 1;
  std::vector<std::vector<uint32_t>> a(n, std::vector<uint32_t>(n, 0));
  a[0][0] = 1;
  for (size_t j = 1; j < n; ++j)
    for (size_t r = 0; r < n; ++r)
      a[r][j] = images[j - 1].coeff(static_cast<int>(r)).idx();
  if (!invertible_fq(fs, std::move(a)))
    throw std::invalid_argument("ReinerMap: induced coefficient map is not invertible");
  return ReinerMap{ctx, D, std::move(images)};
}

RingElem ReinerMap::apply_poly(const RingElem& f) const {
  if (!(f.ctx() == ctx)) throw std::invalid_argument("ReinerMap: context mismatch");
  RingElem out = RingElem::zero(ctx);
  for (int k = 0; k <= f.high(); ++k) {
    Fq c = f.coeff(k);
    if (c.is_zero()) continue;
    if (k == 0 || static_cast<uint32_t>(k) > D)
      out = out + RingElem::monomial(ctx, c, k);
    else
      out = out + images[static_cast<size_t>(k) - 1].scalar_mul(c);
  }
  return out;
}

bool ReinerMap::is_identity() const {
  for (uint32_t i = 1; i <= D; ++i)
    if (images[i - 1] != RingElem::t_power(ctx, static_cast<int>(i))) return false;
  return true;
}

Mat reiner_apply(const ReinerMap& nu, const Mat& g) {
  if (!(g.ctx() == nu.ctx)) throw std::invalid_argument("reiner_apply: context mismatch");
  AmalgamWord w = nagao_decompose(g, GroupKind::GL);
  Mat acc = Mat::identity(nu.ctx, 2);
  for (const auto& f : w.factors) {
    if (f.tag == 0) {
      acc = acc * f.m;
      continue;
    }
    const RingElem& l = f.m.at(0, 0);
    Fq lam = l.coeff(0);
    RingElem y = f.m.at(0, 1).scalar_mul(lam.inv());
    Mat b = Mat::from_entries(
        nu.ctx, 2,
        {l, nu.apply_poly(y).scalar_mul(lam), RingElem::zero(nu.ctx), f.m.at(1, 1)});
    acc = acc * b;
  }
  return acc;
}

uint32_t square_subfield_degree(const FieldRef& fs) {
  const uint32_t s_ord = (fs->q - 1) / std::gcd<uint32_t>(2, fs->q - 1);
  for (uint32_t d = 1; d < fs->e; ++d) {
    if (fs->e % d != 0) continue;
    uint64_t pd = 1;
    for (uint32_t i = 0; i < d; ++i) pd *= fs->p;
    if ((pd - 1) % s_ord == 0) return d;
  }
  return fs->e;
}

bool reiner_valid_sl2(const ReinerMap& nu, const AmalgamSpec& spec) {
  if (!(nu.ctx == spec.ctx))
    throw std::invalid_argument("reiner_valid_sl2: context mismatch");
  const FieldSpec* fs = spec.ctx.spec();
  const uint32_t d =
      spec.kind == GroupKind::SL ? square_subfield_degree(spec.ctx.field) : fs->e;
  for (uint32_t v = 1; v < fs->q; ++v) {
    Fq lam(fs, v);
    if (lam.frobenius(d) != lam) continue;
    for (uint32_t i = 1; i <= nu.D + 1; ++i) {
      RingElem mono = RingElem::t_power(spec.ctx, static_cast<int>(i));
      if (nu.apply_poly(mono.scalar_mul(lam)) != nu.apply_poly(mono).scalar_mul(lam))
        return false;
    }
  }
  return true;
}

}  // namespace polygrp
