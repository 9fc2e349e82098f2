#include "polygrp/gl2_laurent.hpp"

#include <algorithm>
#include <stdexcept>
#include <utility>

#include "polygrp/random.hpp"

namespace polygrp {
namespace {

void check_gl2(const RingCtx& ctx) {
  if (ctx.flavor != Flavor::Laurent)
    throw std::invalid_argument("gl2: Laurent flavor required");
}

Mat shear12(const RingCtx& ctx, const RingElem& x) {
  return Mat::elementary(ctx, 2, 1, 2, x);
}

Mat shear21(const RingCtx& ctx, const RingElem& x) {
  return Mat::elementary(ctx, 2, 2, 1, x);
}

Mat delta_shift(const RingCtx& ctx) {
  return Mat::diagonal(ctx, {RingElem::t_power(ctx, 1), RingElem::one(ctx)});
}

Mat swap_u(const RingCtx& ctx) {
  return Mat::antidiag2(ctx, RingElem::one(ctx), RingElem::one(ctx));
}

bool constant_entries(const Mat& m) {
  for (size_t r = 0; r < m.n(); ++r)
    for (size_t c = 0; c < m.n(); ++c)
      if (!m.at(r, c).is_constant()) return false;
  return true;
}

void push_shift_pow(std::vector<GenToken>& out, const RingCtx& ctx, int k) {
  const int step = (k > 0) ? 1 : -1;
  for (int j = 0; j != k; j += step) out.push_back(GenToken::shift(ctx, step));
}

void push_const(std::vector<GenToken>& out, const Mat& m) {
  if (!m.is_identity()) out.push_back(GenToken::constant(m));
}

void push_e12_tokens(std::vector<GenToken>& out, const RingCtx& ctx, const RingElem& x) {
  const RingElem one = RingElem::one(ctx);
  for (int k = x.low(); k <= x.high(); ++k) {
    const Fq c = x.coeff(k);
    if (c.is_zero()) continue;
    push_const(out, Mat::diagonal(ctx, {RingElem::constant(ctx, c), one}));
    push_shift_pow(out, ctx, k);
    push_const(out, shear12(ctx, one));
    push_shift_pow(out, ctx, -k);
    push_const(out, Mat::diagonal(ctx, {RingElem::constant(ctx, c.inv()), one}));
  }
}

void push_e21_tokens(std::vector<GenToken>& out, const RingCtx& ctx, const RingElem& x) {
  if (x.is_zero()) return;
  push_const(out, swap_u(ctx));
  push_e12_tokens(out, ctx, x);
  push_const(out, swap_u(ctx));
}

void push_diag_tokens(std::vector<GenToken>& out, const RingCtx& ctx, const RingElem& x,
                      const RingElem& y) {
  const auto dx = unit_decompose(x);
  const auto dy = unit_decompose(y);
  push_const(out, Mat::diagonal(ctx, {RingElem::constant(ctx, dx->first),
                                      RingElem::constant(ctx, dy->first)}));
  push_shift_pow(out, ctx, dx->second);
  if (dy->second != 0) {
    push_const(out, swap_u(ctx));
    push_shift_pow(out, ctx, dy->second);
    push_const(out, swap_u(ctx));
  }
}

struct ShapeRead {
  Fq h1, h2;
  int eps = +1;
  uint32_t i = 0;
};

// Matches phi(delta(t,1)) against h*delta(t^eps,1) and h*delta(1,t^eps).
std::optional<ShapeRead> read_shape(const Mat& y) {
  if (!y.at(0, 1).is_zero() || !y.at(1, 0).is_zero()) return std::nullopt;
  const auto d1 = unit_decompose(y.at(0, 0));
  const auto d2 = unit_decompose(y.at(1, 1));
  if (!d1 || !d2) return std::nullopt;
  ShapeRead sh;
  sh.h1 = d1->first;
  sh.h2 = d2->first;
  if (d2->second == 0 && (d1->second == 1 || d1->second == -1)) {
    sh.eps = d1->second;
    sh.i = 0;
    return sh;
  }
  if (d1->second == 0 && (d2->second == 1 || d2->second == -1)) {
    sh.eps = d2->second;
    sh.i = 1;
    return sh;
  }
  return std::nullopt;
}

// Generators of the constant subgroup; agreement here decides map equality.
std::vector<Mat> g0_probes(const RingCtx& ctx) {
  const RingElem one = RingElem::one(ctx);
  const RingElem g = RingElem::constant(ctx, Fq::generator(ctx.spec()));
  return {shear12(ctx, one), shear21(ctx, one), Mat::diagonal(ctx, {g, one})};
}

Fq label_on_scalar(const Phi0Label& l, Fq x) {
  Fq y = x.frobenius(l.frob_exp);
  return l.eps ? y.inv() : y;
}

Mat label_apply(const Phi0Label& l, const Mat& m) {
  Mat r = m.map([&](const RingElem& x) {
    if (x.is_zero()) return x;
    return RingElem::constant(x.ctx(), x.coeff(0).frobenius(l.frob_exp));
  });
  return l.eps ? contragredient(r) : r;
}

std::vector<Mat> enumerate_g0(const RingCtx& ctx) {
  const FieldSpec* fs = ctx.spec();
  std::vector<Mat> out;
  out.push_back(Mat::identity(ctx, 2));
  for (uint32_t a = 0; a < fs->q; ++a)
    for (uint32_t b = 0; b < fs->q; ++b)
      for (uint32_t c = 0; c < fs->q; ++c)
        for (uint32_t d = 0; d < fs->q; ++d) {
          if (fs->sub(fs->mul(a, d), fs->mul(b, c)) == 0) continue;
          if (a == 1 && b == 0 && c == 0 && d == 1) continue;
          out.push_back(Mat::from_entries(
              ctx, 2,
              {RingElem::constant(ctx, Fq(fs, a)), RingElem::constant(ctx, Fq(fs, b)),
               RingElem::constant(ctx, Fq(fs, c)), RingElem::constant(ctx, Fq(fs, d))}));
        }
  return out;
}

// First label (frob exponent ascending, plain before transpose-inverse) whose
// inner-twisted form matches the probe images. The identity twist is tried
// first inside each label.
std::optional<Phi0Label> classify_g0(const RingCtx& ctx, const std::vector<Mat>& probes,
                                     const std::vector<Mat>& images) {
  for (const Mat& m : images)
    if (!constant_entries(m)) return std::nullopt;
  const std::vector<Mat> g0 = enumerate_g0(ctx);
  std::vector<Mat> g0inv;
  g0inv.reserve(g0.size());
  for (const Mat& w : g0) g0inv.push_back(w.inverse());
  const FieldSpec* fs = ctx.spec();
  for (uint32_t kappa = 0; kappa < fs->e; ++kappa) {
    for (uint32_t f = 0; f < 2; ++f) {
      const Phi0Label lab{kappa, f == 1};
      std::vector<Mat> base;
      base.reserve(probes.size());
      for (const Mat& m : probes) base.push_back(label_apply(lab, m));
      for (size_t wi = 0; wi < g0.size(); ++wi) {
        bool all = true;
        for (size_t j = 0; j < probes.size(); ++j) {
          if (!(images[j] == g0[wi] * base[j] * g0inv[wi])) {
            all = false;
            break;
          }
        }
        if (all) return lab;
      }
    }
  }
  return std::nullopt;
}

void check_indices(const std::vector<uint32_t>& idx) {
  if (idx.empty()) throw std::invalid_argument("certificate: no indices");
  for (size_t i = 0; i < idx.size(); ++i) {
    if (idx[i] < 1) throw std::invalid_argument("certificate: indices start at 1");
    if (i > 0 && idx[i] <= idx[i - 1])
      throw std::invalid_argument("certificate: indices must increase");
  }
}

// Least n <= cap with phi^n fixing every generator; images must stay constant
// when require_const is set.
uint32_t image_order(const GroupMap& phi, const std::vector<Mat>& gens, uint32_t cap,
                     bool require_const, const char* err) {
  std::vector<Mat> cur = gens;
  for (uint32_t n = 1; n <= cap; ++n) {
    bool back = true;
    for (size_t j = 0; j < cur.size(); ++j) {
      cur[j] = phi.apply(cur[j]);
      if (require_const && !constant_entries(cur[j]))
        throw std::invalid_argument("aut_order: map does not stabilize the constant subgroup");
      if (!(cur[j] == gens[j])) back = false;
    }
    if (back) return n;
  }
  throw std::logic_error(err);
}

Mat random_const_gl2p(const RingCtx& ctx, Rng& rng) {
  const FieldSpec* fs = ctx.spec();
  for (;;) {
    const uint32_t a = rng.below(fs->p), b = rng.below(fs->p);
    const uint32_t c = rng.below(fs->p), d = rng.below(fs->p);
    if (fs->sub(fs->mul(a, d), fs->mul(b, c)) == 0) continue;
    return Mat::from_entries(
        ctx, 2,
        {RingElem::constant(ctx, Fq(fs, a)), RingElem::constant(ctx, Fq(fs, b)),
         RingElem::constant(ctx, Fq(fs, c)), RingElem::constant(ctx, Fq(fs, d))});
  }
}

RingElem random_prime_s_arg(const RingCtx& ctx, const RingElem& s, Rng& rng) {
  const FieldSpec* fs = ctx.spec();
  const Fq c(fs, 1 + rng.below(fs->p - 1));
  return s.pow(static_cast<uint32_t>(rng.below(3))).scalar_mul(c);
}

}  // namespace

GenToken GenToken::constant(Mat m) {
  check_gl2(m.ctx());
  if (m.n() != 2) throw std::invalid_argument("GenToken: n == 2 required");
  if (!constant_entries(m) || !m.gl_member())
    throw std::invalid_argument("GenToken: constant factor must be invertible over the field");
  return GenToken{Kind::Const, std::move(m), 0};
}

GenToken GenToken::shift(const RingCtx& ctx, int exp) {
  check_gl2(ctx);
  if (exp != 1 && exp != -1)
    throw std::invalid_argument("GenToken: shift exponent must be +1 or -1");
  return GenToken{Kind::Shift, Mat::identity(ctx, 2), exp};
}

Mat GeneratorWord::evaluate() const {
  Mat acc = Mat::identity(ctx, 2);
  const Mat dt = delta_shift(ctx);
  const Mat dti = dt.inverse();
  for (const GenToken& tk : tokens) {
    if (tk.kind == GenToken::Kind::Const)
      acc = acc * tk.mat;
    else
      acc = acc * (tk.exp > 0 ? dt : dti);
  }
  return acc;
}

GeneratorWord generator_decompose(const Mat& g) {
  check_gl2(g.ctx());
  if (g.n() != 2) throw std::invalid_argument("generator_decompose: n == 2 required");
  if (!g.gl_member())
    throw std::invalid_argument("generator_decompose: determinant is not a unit");
  const RingCtx& ctx = g.ctx();
  GeneratorWord word{ctx, {}};
  if (constant_entries(g)) {
    word.tokens.push_back(GenToken::constant(g));
    return word;
  }
  const RingElem one = RingElem::one(ctx);
  struct Shear {
    bool lower;
    RingElem x;
  };
  std::vector<Shear> facs;
  Mat m = g;
  // Row operations from the left; the emitted factors are their inverses, in
  // application order, so the word multiplies back to g.
  while (!m.at(1, 0).is_zero()) {
    if (m.at(0, 0).is_zero()) {
      m = shear12(ctx, one) * m;
      facs.push_back({false, -one});
      continue;
    }
    if (m.at(1, 0).span() >= m.at(0, 0).span()) {
      const auto [qt, rem] = RingElem::divmod(m.at(1, 0), m.at(0, 0));
      m = shear21(ctx, -qt) * m;
      facs.push_back({true, qt});
    } else {
      const auto [qt, rem] = RingElem::divmod(m.at(0, 0), m.at(1, 0));
      m = shear12(ctx, -qt) * m;
      facs.push_back({false, qt});
    }
  }
  if (!m.at(0, 1).is_zero()) {
    const auto dd = unit_decompose(m.at(1, 1));
    const RingElem dinv = RingElem::monomial(ctx, dd->first.inv(), -dd->second);
    const RingElem qt = m.at(0, 1) * dinv;
    m = shear12(ctx, -qt) * m;
    facs.push_back({false, qt});
  }
  for (const Shear& f : facs) {
    if (f.x.is_zero()) continue;
    if (f.lower)
      push_e21_tokens(word.tokens, ctx, f.x);
    else
      push_e12_tokens(word.tokens, ctx, f.x);
  }
  push_diag_tokens(word.tokens, ctx, m.at(0, 0), m.at(1, 1));
  if (!(word.evaluate() == g))
    throw std::logic_error("generator_decompose: round trip failed");
  return word;
}

Phi0Label phi0_label_normalize(const FieldSpec* fs, Phi0Label l) {
  if (!fs) throw std::invalid_argument("phi0_label_normalize: null field");
  const RingCtx ctx{FieldSpec::make(fs->p, fs->e, fs->modulus), Flavor::Laurent};
  l.frob_exp %= fs->e;
  const std::vector<Mat> probes = g0_probes(ctx);
  std::vector<Mat> images;
  images.reserve(probes.size());
  for (const Mat& m : probes) images.push_back(label_apply(l, m));
  const auto lab = classify_g0(ctx, probes, images);
  if (!lab) throw std::logic_error("phi0_label_normalize: scan failed");
  return *lab;
}

bool AutType::operator==(const AutType& o) const {
  return h1 == o.h1 && h2 == o.h2 && eps == o.eps && i == o.i && phi0 == o.phi0;
}

std::string AutType::to_string() const {
  std::string out = "type (";
  out += h1.to_string();
  out += ",";
  out += h2.to_string();
  out += "; eps=";
  out += (eps == 1) ? "+1" : "-1";
  out += "; u^";
  out += std::to_string(i);
  out += "; rho^";
  out += std::to_string(phi0.frob_exp);
  if (phi0.eps) out += "*eps";
  out += ")";
  return out;
}

AutType type_of(const GroupMap& phi) {
  check_gl2(phi.ctx);
  if (phi.n != 2) throw std::invalid_argument("type_of: n == 2 required");
  const RingCtx& ctx = phi.ctx;
  const FieldSpec* fs = ctx.spec();
  const RingElem one = RingElem::one(ctx);
  const auto is_diag = [](const Mat& m) {
    return m.at(0, 1).is_zero() && m.at(1, 0).is_zero();
  };
  const Mat dt = delta_shift(ctx);
  if (!is_diag(phi.apply(dt)) ||
      !is_diag(phi.apply(Mat::diagonal(ctx, {one, RingElem::t_power(ctx, 1)}))))
    throw std::invalid_argument("does not stabilize T in normalized form");
  for (uint32_t a = 1; a < fs->q; ++a)
    for (uint32_t b = 1; b < fs->q; ++b) {
      const Mat d = Mat::diagonal(ctx, {RingElem::constant(ctx, Fq(fs, a)),
                                        RingElem::constant(ctx, Fq(fs, b))});
      if (!is_diag(phi.apply(d)))
        throw std::invalid_argument("does not stabilize T in normalized form");
    }
  const auto sh = read_shape(phi.apply(dt));
  if (!sh) throw std::invalid_argument("does not stabilize T in normalized form");
  const std::vector<Mat> probes = g0_probes(ctx);
  std::vector<Mat> images;
  images.reserve(probes.size());
  for (const Mat& m : probes) images.push_back(phi.apply(m));
  const auto lab = classify_g0(ctx, probes, images);
  if (!lab) throw std::invalid_argument("does not stabilize T in normalized form");
  return AutType{sh->h1, sh->h2, sh->eps, sh->i, *lab};
}

AutType compose_types(const AutType& psi, const AutType& phi) {
  const FieldSpec* fs = psi.h1.spec();
  if (!fs || fs != psi.h2.spec() || fs != phi.h1.spec() || fs != phi.h2.spec())
    throw std::invalid_argument("compose_types: field mismatch");
  if ((psi.eps != 1 && psi.eps != -1) || (phi.eps != 1 && phi.eps != -1) || psi.i > 1 ||
      phi.i > 1)
    throw std::invalid_argument("compose_types: type data out of range");
  Fq x1 = psi.h1, x2 = psi.h2;
  if (phi.eps == -1) {
    x1 = x1.inv();
    x2 = x2.inv();
  }
  if (phi.i == 1) std::swap(x1, x2);
  AutType out;
  out.h1 = x1 * label_on_scalar(psi.phi0, phi.h1);
  out.h2 = x2 * label_on_scalar(psi.phi0, phi.h2);
  out.eps = psi.eps * phi.eps;
  out.i = (psi.i + phi.i) % 2;
  out.phi0.frob_exp = (psi.phi0.frob_exp + phi.phi0.frob_exp) % fs->e;
  out.phi0.eps = psi.phi0.eps != phi.phi0.eps;
  return out;
}

bool GammaElem::operator==(const GammaElem& o) const {
  return h1 == o.h1 && h2 == o.h2 && a == o.a && b == o.b && c == o.c;
}

GammaElem gamma_identity(const FieldSpec* fs) {
  return GammaElem{Fq::one(fs), Fq::one(fs), +1, 0, {0, false}};
}

GammaElem gamma_of_type(const AutType& ty) {
  return GammaElem{ty.h1, ty.h2, ty.eps, ty.i, ty.phi0};
}

AutType type_of_gamma(const GammaElem& g) {
  return AutType{g.h1, g.h2, g.a, g.b, g.c};
}

GammaElem gamma_mul(const GammaElem& y, const GammaElem& x) {
  return gamma_of_type(compose_types(type_of_gamma(y), type_of_gamma(x)));
}

GammaElem gamma_inverse(const GammaElem& g) {
  const FieldSpec* fs = g.h1.spec();
  if (!fs) throw std::invalid_argument("gamma_inverse: null field");
  GammaElem x = g;
  x.c.frob_exp = (fs->e - g.c.frob_exp % fs->e) % fs->e;
  Fq t1 = g.h1, t2 = g.h2;
  if (g.a == -1) {
    t1 = t1.inv();
    t2 = t2.inv();
  }
  if (g.b == 1) std::swap(t1, t2);
  x.h1 = label_on_scalar(x.c, t1.inv());
  x.h2 = label_on_scalar(x.c, t2.inv());
  return x;
}

uint32_t GammaGroup::index_of(const GammaElem& g) const {
  const FieldSpec* fs = field.get();
  if (!fs || g.h1.spec() != fs || g.h2.spec() != fs || g.h1.is_zero() || g.h2.is_zero() ||
      (g.a != 1 && g.a != -1) || g.b > 1)
    throw std::invalid_argument("GammaGroup: element out of range");
  const uint32_t qm1 = fs->q - 1;
  const uint32_t pa = (g.a == 1) ? 0u : 1u;
  const uint32_t idx =
      ((((g.h1.idx() - 1) * qm1 + (g.h2.idx() - 1)) * 2 + pa) * 2 + g.b) * (fs->e * 2) +
      (g.c.frob_exp % fs->e) * 2 + (g.c.eps ? 1u : 0u);
  if (idx >= elems.size() || !(elems[idx] == g))
    throw std::logic_error("GammaGroup: enumeration order violated");
  return idx;
}

GammaGroup gamma_group_build(const FieldRef& field) {
  if (!field) throw std::invalid_argument("gamma_group_build: null field");
  GammaGroup g;
  g.field = field;
  const FieldSpec* fs = field.get();
  for (uint32_t h1 = 1; h1 < fs->q; ++h1)
    for (uint32_t h2 = 1; h2 < fs->q; ++h2)
      for (const int a : {+1, -1})
        for (uint32_t b = 0; b < 2; ++b)
          for (uint32_t kappa = 0; kappa < fs->e; ++kappa)
            for (uint32_t f = 0; f < 2; ++f)
              g.elems.push_back(
                  GammaElem{Fq(fs, h1), Fq(fs, h2), a, b, {kappa, f == 1}});
  const size_t s = g.elems.size();
  g.table.resize(s * s);
  for (size_t i = 0; i < s; ++i)
    for (size_t j = 0; j < s; ++j)
      g.table[i * s + j] = g.index_of(gamma_mul(g.elems[i], g.elems[j]));
  return g;
}

std::vector<AutType> all_types(const RingCtx& ctx) {
  check_gl2(ctx);
  const FieldSpec* fs = ctx.spec();
  std::vector<AutType> out;
  for (uint32_t h1 = 1; h1 < fs->q; ++h1)
    for (uint32_t h2 = 1; h2 < fs->q; ++h2)
      for (const int a : {+1, -1})
        for (uint32_t b = 0; b < 2; ++b)
          for (uint32_t kappa = 0; kappa < fs->e; ++kappa)
            for (uint32_t f = 0; f < 2; ++f)
              out.push_back(AutType{Fq(fs, h1), Fq(fs, h2), a, b, {kappa, f == 1}});
  return out;
}

GroupMap build_realized_aut(const RingCtx& ctx, const AutType& ty) {
  check_gl2(ctx);
  const FieldSpec* fs = ctx.spec();
  if (ty.h1.spec() != fs || ty.h2.spec() != fs)
    throw std::invalid_argument("build_realized_aut: field mismatch");
  if (ty.h1.is_zero() || ty.h2.is_zero())
    throw std::invalid_argument("build_realized_aut: torus part must be a unit pair");
  if (ty.eps != 1 && ty.eps != -1)
    throw std::invalid_argument("build_realized_aut: eps must be +1 or -1");
  if (ty.i > 1) throw std::invalid_argument("build_realized_aut: u-flag must be 0 or 1");
  const uint32_t kappa = ty.phi0.frob_exp % fs->e;
  const bool f = ty.phi0.eps;
  // Torus data determines the constituents: the shift image works out to
  //   diag(a^(k+1) tau^eb t^((1+m)eb), a^k tau^eb t^(m eb))
  // with k = 0, so eb, the character exponent m, tau, and lambda are solvable.
  const int ebar = (ty.i == 1) ? -ty.eps : ty.eps;
  const int mchi = (ty.i == 1) ? -1 : 0;
  const Fq tau = (ebar == 1) ? ty.h2 : ty.h2.inv();
  const Fq a = ty.h1 / ty.h2;
  const Fq lam = f ? a.inv() : a;
  const int epsr = f ? -ebar : ebar;
  const RingAut rho = RingAut::make(ctx, kappa, lam, Fq::zero(fs), epsr);
  std::optional<UnitCharacter> chi;
  if (!(tau.is_one() && mchi == 0)) chi = UnitCharacter::make(fs, 0, tau, mchi);
  StdAut aut = StdAut::make(ctx, 2, chi, rho, Mat::identity(ctx, 2), f);
  const auto sh = read_shape(aut.apply(delta_shift(ctx)));
  if (!sh || !(sh->h1 == ty.h1) || !(sh->h2 == ty.h2) || sh->eps != ty.eps || sh->i != ty.i)
    throw std::runtime_error("realizability unknown");
  return GroupMap::of(std::move(aut));
}

uint32_t aut_order(const GroupMap& phi) {
  check_gl2(phi.ctx);
  if (phi.n != 2) throw std::invalid_argument("aut_order: n == 2 required");
  const RingCtx& ctx = phi.ctx;
  const FieldSpec* fs = ctx.spec();
  const RingElem one = RingElem::one(ctx);
  const RingElem cgen = RingElem::constant(ctx, Fq::generator(fs));
  const std::vector<Mat> g0gens = {shear12(ctx, one), shear21(ctx, one),
                                   Mat::diagonal(ctx, {cgen, one})};
  const std::vector<Mat> t0gens = {Mat::diagonal(ctx, {cgen, one}),
                                   Mat::diagonal(ctx, {one, cgen})};
  const auto sh = read_shape(phi.apply(delta_shift(ctx)));
  if (!sh) throw std::invalid_argument("aut_order: does not stabilize T in normalized form");
  constexpr uint32_t kSmallCap = 4096;
  constexpr const char* kCapErr = "aut_order: constant-subgroup order exceeds cap";
  uint64_t bound = 0;
  if (sh->eps == 1 && sh->i == 0) {
    const uint32_t k = image_order(phi, g0gens, kSmallCap, true, kCapErr);
    const uint32_t r =
        (fs->q == 2) ? 1 : image_order(phi, t0gens, kSmallCap, true, kCapErr);
    bound = static_cast<uint64_t>(k) * (r + fs->q - 2);
  } else {
    // The square always lands in the plain shift-preserving shape; its bound
    // doubles.
    const GroupMap sq = phi.compose(phi);
    const uint32_t k = image_order(sq, g0gens, kSmallCap, true, kCapErr);
    const uint32_t r =
        (fs->q == 2) ? 1 : image_order(sq, t0gens, kSmallCap, true, kCapErr);
    bound = 2ull * k * (r + fs->q - 2);
  }
  std::vector<Mat> full = g0gens;
  full.push_back(delta_shift(ctx));
  const uint32_t order =
      image_order(phi, full, static_cast<uint32_t>(bound), false,
                  "aut_order: order exceeds the finite-order bound");
  if (bound % order != 0)
    throw std::logic_error("aut_order: order does not divide the finite-order bound");
  return order;
}

bool FixReport::ok() const {
  return !phi0_class.empty() && ek_images_ok && ek_products_ok && s_family_ok &&
         words_fixed == words_checked && (phi0_class == "rho" || no_fixed_shear);
}

FixReport fixed_subgroup_check(const GroupMap& phi, uint32_t k_max, uint32_t n_words) {
  check_gl2(phi.ctx);
  if (phi.n != 2) throw std::invalid_argument("fixed_subgroup_check: n == 2 required");
  if (k_max < 1) throw std::invalid_argument("fixed_subgroup_check: k_max must be positive");
  const RingCtx& ctx = phi.ctx;
  const FieldSpec* fs = ctx.spec();
  const auto sh = read_shape(phi.apply(delta_shift(ctx)));
  if (!sh || sh->eps != -1)
    throw std::invalid_argument("fixed_subgroup_check: shape mismatch");
  const RingElem one = RingElem::one(ctx);
  const Mat e12one = shear12(ctx, one);
  const Mat img = phi.apply(e12one);
  const bool rho_class = (img == e12one);
  if (!rho_class && !(img == shear21(ctx, -one)))
    throw std::invalid_argument("fixed_subgroup_check: shape mismatch");
  FixReport rep;
  rep.phi0_class = rho_class ? "rho" : "rho-eps";
  rep.eps = sh->eps;
  rep.u_flag = sh->i;
  rep.k_checked = k_max;
  const int qm1 = static_cast<int>(fs->q) - 1;
  const RingElem s = special_s(ctx);
  const auto ek = [&](int k) { return shear12(ctx, RingElem::t_power(ctx, qm1 * k)); };
  bool img_ok = true, prod_ok = true, fam_ok = true;
  if (rho_class) {
    for (int k = 1; k <= static_cast<int>(k_max); ++k) {
      const Mat a = ek(k), b = ek(-k);
      if (sh->i == 0)
        img_ok = img_ok && phi.apply(a) == b && phi.apply(b) == a;
      else
        img_ok = img_ok && phi.apply(a) == a && phi.apply(b) == b;
      const Mat prod = a * b;
      prod_ok = prod_ok &&
                prod == shear12(ctx, RingElem::t_power(ctx, qm1 * k) +
                                         RingElem::t_power(ctx, -qm1 * k)) &&
                phi.apply(prod) == prod;
      const Mat sk = shear12(ctx, s.pow(static_cast<uint32_t>(k)));
      fam_ok = fam_ok && phi.apply(sk) == sk;
    }
    Rng rng(0x5eedf18cull);
    rep.words_checked = n_words;
    for (uint32_t wi = 0; wi < n_words; ++wi) {
      Mat w = Mat::identity(ctx, 2);
      const uint32_t len = 3 + rng.below(4);
      for (uint32_t j = 0; j < len; ++j) {
        switch (rng.below(3)) {
          case 0:
            w = w * random_const_gl2p(ctx, rng);
            break;
          case 1:
            w = w * shear12(ctx, random_prime_s_arg(ctx, s, rng));
            break;
          default:
            w = w * shear21(ctx, random_prime_s_arg(ctx, s, rng));
            break;
        }
      }
      if (phi.apply(w) == w) ++rep.words_fixed;
    }
    rep.no_fixed_shear = false;
    rep.summary = "rho class, u^" + std::to_string(sh->i) + ": shear family verified, " +
                  std::to_string(rep.words_fixed) + "/" + std::to_string(rep.words_checked) +
                  " random prime-subring words fixed";
  } else {
    for (int k = 1; k <= static_cast<int>(k_max); ++k) {
      const Mat a = ek(k), b = ek(-k);
      const int ka = (sh->i == 0) ? k : -k;
      img_ok = img_ok &&
               phi.apply(a) == shear21(ctx, -RingElem::t_power(ctx, qm1 * ka)) &&
               phi.apply(b) == shear21(ctx, -RingElem::t_power(ctx, -qm1 * ka));
      const Mat primed = shear21(ctx, RingElem::t_power(ctx, qm1 * k)) *
                         shear21(ctx, RingElem::t_power(ctx, -qm1 * k));
      prod_ok = prod_ok && phi.apply(a * b) == primed.inverse();
      const RingElem skp = s.pow(static_cast<uint32_t>(k));
      fam_ok = fam_ok && phi.apply(shear12(ctx, skp)) == shear21(ctx, -skp) &&
               phi.apply(shear21(ctx, skp)) == shear12(ctx, -skp);
    }
    rep.no_fixed_shear = !(phi.apply(shear12(ctx, s)) == shear12(ctx, s));
    rep.summary = "rho-eps class, u^" + std::to_string(sh->i) +
                  ": shears map to opposite-corner inverses; no fixed shear family";
  }
  rep.ek_images_ok = img_ok;
  rep.ek_products_ok = prod_ok;
  rep.s_family_ok = fam_ok;
  return rep;
}

TraceCertificate gl2_separation_certificate(const GroupMap& phi,
                                            const std::vector<uint32_t>& indices) {
  check_gl2(phi.ctx);
  if (phi.n != 2)
    throw std::invalid_argument("gl2_separation_certificate: n == 2 required");
  check_indices(indices);
  const RingCtx& ctx = phi.ctx;
  const AutType ty = type_of(phi);
  TraceCertificate cert;
  cert.aut_desc = ty.to_string();
  cert.indices = indices;
  cert.r = aut_order(phi);
  if (ty.eps == 1) {
    cert.case_tag = "gl2-abelian-quotient";
    cert.verdict = "separated via abelian quotient (not machine-checked)";
    return cert;
  }
  const RingElem one = RingElem::one(ctx);
  const Mat e12one = shear12(ctx, one);
  const Mat img = phi.apply(e12one);
  const bool rho_class = (img == e12one);
  if (!rho_class && !(img == shear21(ctx, -one)))
    throw std::invalid_argument("gl2_separation_certificate: shape mismatch");
  cert.case_tag = rho_class ? "gl2-rho" : "gl2-rho-eps";
  const RingElem s = special_s(ctx);
  const uint32_t r = cert.r;
  for (const uint32_t m : indices) {
    const RingElem sm = s.pow(m);
    const Mat xm = witness_x(ctx, 2, m);
    Mat acc = Mat::identity(ctx, 2);
    if (rho_class) {
      if (!(phi.apply(xm) == xm))
        throw std::logic_error("gl2_separation_certificate: witness is not fixed");
      Mat cur = xm;
      for (uint32_t j = 0; j < r; ++j) {
        acc = acc * cur;
        cur = phi.apply(cur);
      }
    } else {
      const Mat ym = shear12(ctx, sm);
      if (!(phi.apply(ym) == shear21(ctx, -sm)))
        throw std::logic_error("gl2_separation_certificate: alternating image mismatch");
      Mat cur = ym;
      for (uint32_t j = 0; j < 2 * r; ++j) {
        acc = acc * cur;
        cur = phi.apply(cur);
      }
    }
    if (!(acc == xm.pow(r)))
      throw std::logic_error("gl2_separation_certificate: orbit product mismatch");
    const RingElem tau = acc.trace();
    if (!(tau == witness_block_trace(ctx, sm, r)))
      throw std::logic_error("gl2_separation_certificate: trace closed form mismatch");
    const auto deg = s_degree(tau);
    if (!deg || *deg != static_cast<int>(2 * r * m))
      throw std::logic_error("gl2_separation_certificate: trace degree mismatch");
    cert.traces.push_back(tau);
    cert.s_degrees.push_back(*deg);
  }
  bool sep = true;
  for (size_t i = 0; i < cert.traces.size(); ++i)
    for (size_t j = i + 1; j < cert.traces.size(); ++j)
      if (cert.s_degrees[i] == cert.s_degrees[j] || cert.traces[i] == cert.traces[j])
        sep = false;
  cert.verdict = sep ? "separated" : "not separated: coincident invariants";
  return cert;
}

}  // namespace polygrp
