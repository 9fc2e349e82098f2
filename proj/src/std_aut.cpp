#include "polygrp/std_aut.hpp"

#include <numeric>
#include <set>
#include <stdexcept>

namespace polygrp {

UnitCharacter UnitCharacter::trivial(const FieldSpec* fs) {
  return make(fs, 0, Fq::one(fs), 0);
}

UnitCharacter UnitCharacter::det_power(const FieldSpec* fs, uint32_t k) {
  return make(fs, k, Fq::one(fs), 0);
}

UnitCharacter UnitCharacter::make(const FieldSpec* fs, uint32_t k, Fq t_coeff, int t_exp) {
  if (!fs) throw std::invalid_argument("UnitCharacter: missing field");
  if (t_coeff.spec() != fs || t_coeff.is_zero())
    throw std::invalid_argument("UnitCharacter: t_coeff must be a nonzero field element");
  UnitCharacter c;
  c.fs = fs;
  c.k = k % (fs->q - 1);
  c.t_coeff = t_coeff;
  c.t_exp = t_exp;
  return c;
}

RingElem UnitCharacter::eval_unit(const RingCtx& ctx, const RingElem& u) const {
  auto parts = unit_decompose(u);
  if (!parts) throw std::invalid_argument("UnitCharacter: argument is not a unit");
  auto [lam, m] = *parts;
  Fq coeff = lam.pow(k) * t_coeff.pow(m);
  return RingElem::monomial(ctx, coeff, t_exp * m);
}

bool UnitCharacter::is_trivial() const {
  return k == 0 && t_coeff.is_one() && t_exp == 0;
}

bool UnitCharacter::operator==(const UnitCharacter& o) const {
  return fs == o.fs && k == o.k && t_coeff == o.t_coeff && t_exp == o.t_exp;
}

UnitCharacter chi_combine(const UnitCharacter& outer, const UnitCharacter& inner, size_t n) {
  if (outer.fs != inner.fs) throw std::invalid_argument("chi_combine: mixed fields");
  long long nn = static_cast<long long>(n);
  uint64_t qm1 = outer.fs->q - 1;
  uint64_t k = (outer.k + inner.k + static_cast<uint64_t>(n) * outer.k * inner.k) % qm1;
  Fq tau = outer.t_coeff.pow(1 + nn * inner.t_exp) *
           inner.t_coeff.pow(1 + nn * static_cast<long long>(outer.k));
  int t_exp = outer.t_exp + inner.t_exp + static_cast<int>(n) * outer.t_exp * inner.t_exp;
  return UnitCharacter::make(outer.fs, static_cast<uint32_t>(k), tau, t_exp);
}

UnitCharacter chi_push_through(const UnitCharacter& chi, const RingAut& rho) {
  if (chi.fs != rho.ctx.spec()) throw std::invalid_argument("chi_push_through: mixed fields");
  if (rho.ctx.flavor == Flavor::Poly) return chi;
  // rho: t -> a t^eta with frobenius kappa; conjugating the character twists
  // only its t_coeff.
  long long eta = rho.eps;
  long long exp_a = eta * (chi.t_exp - static_cast<long long>(chi.k));
  Fq tau = rho.a.pow(exp_a) * chi.t_coeff.frobenius(rho.frob_exp).pow(eta);
  return UnitCharacter::make(chi.fs, chi.k, tau, chi.t_exp);
}

UnitCharacter chi_inverse(const UnitCharacter& chi, size_t n) {
  uint32_t qm1 = chi.fs->q - 1;
  uint64_t nk = static_cast<uint64_t>(n);
  uint32_t k_inv = 0;
  while (k_inv < qm1 && (chi.k + k_inv + nk * chi.k * k_inv) % qm1 != 0) ++k_inv;
  if (k_inv == qm1) throw std::invalid_argument("chi_inverse: character is not invertible");
  long long nt = static_cast<long long>(n) * chi.t_exp;
  if (nt != 0 && nt != -2) throw std::invalid_argument("chi_inverse: character is not invertible");
  int t_exp_inv = (nt == 0) ? 0 : chi.t_exp;
  long long e = 1 + static_cast<long long>(n) * k_inv;
  Fq tau_inv = (nt == 0) ? chi.t_coeff.pow(-e) : chi.t_coeff.pow(e);
  return UnitCharacter::make(chi.fs, k_inv, tau_inv, t_exp_inv);
}

bool homothety_is_automorphism(const UnitCharacter& chi, size_t n, const RingCtx& ctx) {
  if (chi.fs != ctx.spec()) return false;
  long long nt = static_cast<long long>(n) * chi.t_exp;
  if (nt != 0 && nt != -2) return false;
  if (ctx.flavor == Flavor::Poly && chi.t_exp != 0) return false;
  uint64_t qm1 = chi.fs->q - 1;
  uint64_t nk1 = (static_cast<uint64_t>(n) * chi.k + 1) % qm1;
  return std::gcd(nk1, qm1) == 1;
}

std::optional<Mat> homothety_witness(const UnitCharacter& chi, size_t n, const RingCtx& ctx) {
  const FieldSpec* fs = ctx.spec();
  long long nk1 = static_cast<long long>(n) * chi.k + 1;
  for (uint32_t li = 2; li < fs->q; ++li) {
    Fq lam(fs, li);
    if (lam.pow(nk1).is_one())
      return Mat::scalar(ctx, n, RingElem::constant(ctx, lam));
  }
  return std::nullopt;
}

Mat contragredient(const Mat& a) { return a.inverse().transpose(); }

StdAut StdAut::identity(const RingCtx& ctx, size_t n) {
  return make(ctx, n, std::nullopt, RingAut::identity(ctx), Mat::identity(ctx, n), false);
}

StdAut StdAut::make(const RingCtx& ctx, size_t n, std::optional<UnitCharacter> chi,
                    RingAut rho, Mat g, bool use_eps) {
  if (n < 2) throw std::invalid_argument("StdAut: dimension must be at least 2");
  if (!(rho.ctx == ctx)) throw std::invalid_argument("StdAut: ring automorphism context mismatch");
  if (g.n() != n || !(g.ctx() == ctx)) throw std::invalid_argument("StdAut: conjugator mismatch");
  if (!g.gl_member()) throw std::invalid_argument("StdAut: conjugator is not invertible");
  if (chi) {
    if (!homothety_is_automorphism(*chi, n, ctx))
      throw std::invalid_argument("StdAut: character does not give an automorphism");
    if (chi->is_trivial()) chi = std::nullopt;
  }
  StdAut phi;
  phi.ctx = ctx;
  phi.n = n;
  phi.chi = std::move(chi);
  phi.rho = std::move(rho);
  phi.g = std::move(g);
  phi.use_eps = use_eps;
  return phi;
}

StdAut StdAut::homothety(const RingCtx& ctx, size_t n, const UnitCharacter& chi) {
  return make(ctx, n, chi, RingAut::identity(ctx), Mat::identity(ctx, n), false);
}

StdAut StdAut::ring_induced(const RingCtx& ctx, size_t n, const RingAut& rho) {
  return make(ctx, n, std::nullopt, rho, Mat::identity(ctx, n), false);
}

StdAut StdAut::inner(const RingCtx& ctx, Mat g) {
  size_t n = g.n();
  return make(ctx, n, std::nullopt, RingAut::identity(ctx), std::move(g), false);
}

StdAut StdAut::contragredient_aut(const RingCtx& ctx, size_t n) {
  return make(ctx, n, std::nullopt, RingAut::identity(ctx), Mat::identity(ctx, n), true);
}

Mat StdAut::apply(const Mat& a) const {
  if (a.n() != n || !(a.ctx() == ctx)) throw std::invalid_argument("StdAut: argument mismatch");
  if (!a.gl_member()) throw std::invalid_argument("StdAut: argument is not invertible");
  Mat r = use_eps ? contragredient(a) : a;
  r = g * r * g.inverse();
  r = r.map([this](const RingElem& f) { return rho.apply(f); });
  if (chi) r = r.mul_scalar(chi->eval_unit(ctx, r.det()));
  return r;
}

StdAut StdAut::compose(const StdAut& o) const {
  if (!(ctx == o.ctx) || n != o.n) throw std::invalid_argument("StdAut: compose mismatch");
  std::optional<UnitCharacter> inner_chi =
      o.chi ? std::optional<UnitCharacter>(chi_push_through(*o.chi, rho)) : std::nullopt;
  std::optional<UnitCharacter> chi_new;
  if (chi && inner_chi)
    chi_new = chi_combine(*chi, *inner_chi, n);
  else
    chi_new = chi ? chi : inner_chi;
  RingAut rho_new = rho.compose(o.rho);
  RingAut rho2_inv = o.rho.inverse();
  Mat g1_moved = g.map([&rho2_inv](const RingElem& f) { return rho2_inv.apply(f); });
  Mat g_new = g1_moved * (use_eps ? contragredient(o.g) : o.g);
  return make(ctx, n, std::move(chi_new), std::move(rho_new), std::move(g_new),
              use_eps != o.use_eps);
}

StdAut StdAut::pow(uint32_t r) const {
  StdAut acc = identity(ctx, n);
  for (uint32_t i = 0; i < r; ++i) acc = acc.compose(*this);
  return acc;
}

StdAut StdAut::inverse() const {
  StdAut acc = use_eps ? contragredient_aut(ctx, n) : identity(ctx, n);
  acc = acc.compose(inner(ctx, g.inverse()));
  acc = acc.compose(ring_induced(ctx, n, rho.inverse()));
  if (chi) acc = acc.compose(homothety(ctx, n, chi_inverse(*chi, n)));
  return acc;
}

bool StdAut::is_identity() const {
  if (chi && !chi->is_trivial()) return false;
  if (!rho.is_identity() || use_eps) return false;
  const RingElem& d = g.at(0, 0);
  if (!unit_decompose(d)) return false;
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) {
      if (i == j ? !(g.at(i, j) == d) : !g.at(i, j).is_zero()) return false;
    }
  return true;
}

std::vector<Mat> StdAut::probe_set() const {
  std::vector<Mat> probes;
  RingElem one = RingElem::one(ctx);
  RingElem t = RingElem::t_power(ctx, 1);
  for (size_t i = 1; i <= n; ++i)
    for (size_t j = 1; j <= n; ++j) {
      if (i == j) continue;
      probes.push_back(Mat::elementary(ctx, n, i, j, one));
      probes.push_back(Mat::elementary(ctx, n, i, j, t));
    }
  probes.push_back(Mat::corner_unit(ctx, n, RingElem::constant(ctx, Fq::generator(ctx.spec()))));
  if (ctx.flavor == Flavor::Laurent) probes.push_back(Mat::corner_unit(ctx, n, t));
  return probes;
}

bool StdAut::probe_identity() const {
  for (const Mat& m : probe_set())
    if (apply(m) != m) return false;
  return true;
}

bool StdAut::operator==(const StdAut& o) const {
  if (!(ctx == o.ctx) || n != o.n || use_eps != o.use_eps) return false;
  if (chi.has_value() != o.chi.has_value()) return false;
  if (chi && !(*chi == *o.chi)) return false;
  return rho == o.rho && g == o.g;
}

std::optional<uint32_t> std_order(const StdAut& phi, uint32_t bound) {
  StdAut acc = phi;
  for (uint32_t r = 1; r <= bound; ++r) {
    if (acc.is_identity() && acc.probe_identity()) return r;
    acc = acc.compose(phi);
  }
  return std::nullopt;
}

namespace {

std::string std_aut_key(const StdAut& phi) {
  std::string key;
  if (phi.chi)
    key += "chi:" + std::to_string(phi.chi->k) + "," + std::to_string(phi.chi->t_coeff.idx()) +
           "," + std::to_string(phi.chi->t_exp) + ";";
  else
    key += "chi:-;";
  key += "rho:" + std::to_string(phi.rho.frob_exp) + "," + std::to_string(phi.rho.a.idx()) + "," +
         std::to_string(phi.rho.b.idx()) + "," + std::to_string(phi.rho.eps) + ";";
  key += "g:" + phi.g.to_key() + ";eps:" + (phi.use_eps ? "1" : "0");
  return key;
}

}  // namespace

std::vector<StdAut> transversal_enumerate(GroupKind kind, size_t n, const RingCtx& ctx,
                                          const std::vector<RingElem>& unit_sample,
                                          const std::vector<UnitCharacter>& chi_sample) {
  if (n < 3) throw std::invalid_argument("transversal_enumerate: needs n >= 3");
  std::vector<StdAut> out;
  std::set<std::string> seen;
  auto push = [&](const StdAut& phi) {
    if (seen.insert(std_aut_key(phi)).second) out.push_back(phi);
  };
  StdAut eps = StdAut::contragredient_aut(ctx, n);
  std::vector<RingAut> rhos = all_ring_auts(ctx);
  for (const RingAut& rho : rhos) {
    StdAut base = StdAut::ring_induced(ctx, n, rho);
    push(base);
    push(base.compose(eps));
  }
  if (kind == GroupKind::SL) {
    for (const RingElem& alpha : unit_sample) {
      if (!unit_decompose(alpha))
        throw std::invalid_argument("transversal_enumerate: sample entry is not a unit");
      StdAut conj = StdAut::inner(ctx, Mat::corner_unit(ctx, n, alpha));
      for (const RingAut& rho : rhos) {
        StdAut base = conj.compose(StdAut::ring_induced(ctx, n, rho));
        push(base);
        push(base.compose(eps));
      }
    }
  } else {
    for (const UnitCharacter& chi : chi_sample) {
      StdAut mu = StdAut::homothety(ctx, n, chi);
      for (const RingAut& rho : rhos) {
        StdAut base = mu.compose(StdAut::ring_induced(ctx, n, rho));
        push(base);
        push(base.compose(eps));
      }
    }
  }
  return out;
}

}  // namespace polygrp
