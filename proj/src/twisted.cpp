#include "polygrp/twisted.hpp"

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <unordered_set>
#include <utility>

namespace polygrp {

namespace {

void check_part(const RingCtx& ctx, size_t n, const GroupMapPart& part) {
  if (std::holds_alternative<StdAut>(part)) {
    const StdAut& a = std::get<StdAut>(part);
    if (!(a.ctx == ctx) || a.n != n)
      throw std::invalid_argument("GroupMap: part context mismatch");
  } else {
    const ReinerMap& nu = std::get<ReinerMap>(part);
    if (!(nu.ctx == ctx) || n != 2)
      throw std::invalid_argument("GroupMap: unipotent-coordinate part needs n == 2");
  }
}

void validate_indices(const std::vector<uint32_t>& indices) {
  if (indices.empty()) throw std::invalid_argument("indices: empty");
  uint32_t prev = 0;
  for (uint32_t m : indices) {
    if (m < 1 || m <= prev) throw std::invalid_argument("indices: must be strictly increasing, >= 1");
    prev = m;
  }
}

// Central in GL_n(R): a unit multiple of the identity.
bool is_central_unit_scalar(const Mat& g) {
  const size_t n = g.n();
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j)
      if (i != j && !g.at(i, j).is_zero()) return false;
  for (size_t i = 1; i < n; ++i)
    if (g.at(i, i) != g.at(0, 0)) return false;
  return g.at(0, 0).is_unit();
}

// diag(1, ..., 1, a) with a a unit; returns a.
std::optional<RingElem> corner_extract(const Mat& g) {
  const size_t n = g.n();
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) {
      if (i != j && !g.at(i, j).is_zero()) return std::nullopt;
      if (i == j && i + 1 < n && !g.at(i, i).is_one()) return std::nullopt;
    }
  if (!g.at(n - 1, n - 1).is_unit()) return std::nullopt;
  return g.at(n - 1, n - 1);
}

RingElem unit_inverse(const RingElem& a) {
  auto dec = unit_decompose(a);
  if (!dec) throw std::invalid_argument("unit expected");
  return RingElem::monomial(a.ctx(), dec->first.inv(), -dec->second);
}

// prod_{0 <= j < count} f^j(x)
Mat iterate_product(const std::function<Mat(const Mat&)>& f, const Mat& x, uint32_t count) {
  Mat acc = x;
  Mat y = x;
  for (uint32_t j = 1; j < count; ++j) {
    y = f(y);
    acc = acc * y;
  }
  return acc;
}

// Coefficients must lie in the prime subfield, where the index encoding is
// shared between a field and its extensions.
RingElem embed_prime(const RingElem& f, const RingCtx& big) {
  const uint32_t p = big.spec()->p;
  for (uint32_t c : f.raw_coeffs())
    if (c >= p) throw std::logic_error("embed: coefficient outside the prime subfield");
  return RingElem::from_coeffs(big, f.low(), f.raw_coeffs());
}

long long egcd(long long a, long long b, long long& x, long long& y) {
  if (b == 0) {
    x = (a >= 0) ? 1 : -1;
    y = 0;
    return std::llabs(a);
  }
  long long x1 = 0, y1 = 0;
  long long g = egcd(b, a % b, x1, y1);
  x = y1;
  y = x1 - (a / b) * y1;
  return g;
}

long long pos_mod(long long a, long long m) {
  long long r = a % m;
  return r < 0 ? r + m : r;
}

}  // namespace

GroupMap GroupMap::identity(const RingCtx& ctx, size_t n) {
  GroupMap m;
  m.ctx = ctx;
  m.n = n;
  m.known_order = 1;
  return m;
}

GroupMap GroupMap::of(StdAut a) {
  GroupMap m;
  m.ctx = a.ctx;
  m.n = a.n;
  m.known_order = std_order(a, 64);
  m.parts.emplace_back(std::move(a));
  return m;
}

GroupMap GroupMap::of(ReinerMap nu) {
  GroupMap m;
  m.ctx = nu.ctx;
  m.n = 2;
  // Iterates on the monomial basis through degree D; above D the map is the
  // identity, so this is the order of the induced group map.
  std::vector<RingElem> basis;
  for (uint32_t i = 1; i <= nu.D; ++i) basis.push_back(RingElem::t_power(nu.ctx, static_cast<int>(i)));
  std::vector<RingElem> cur = basis;
  for (uint32_t r = 1; r <= 4096; ++r) {
    bool ident = true;
    for (size_t i = 0; i < cur.size(); ++i) {
      cur[i] = nu.apply_poly(cur[i]);
      if (cur[i] != basis[i]) ident = false;
    }
    if (ident) {
      m.known_order = r;
      break;
    }
  }
  m.parts.emplace_back(std::move(nu));
  return m;
}

Mat GroupMap::apply(const Mat& x) const {
  if (x.n() != n || !(x.ctx() == ctx)) throw std::invalid_argument("GroupMap: argument mismatch");
  Mat y = x;
  for (auto it = parts.rbegin(); it != parts.rend(); ++it) {
    if (std::holds_alternative<StdAut>(*it))
      y = std::get<StdAut>(*it).apply(y);
    else
      y = reiner_apply(std::get<ReinerMap>(*it), y);
  }
  return y;
}

GroupMap GroupMap::compose(const GroupMap& o) const {
  if (!(ctx == o.ctx) || n != o.n) throw std::invalid_argument("GroupMap: compose mismatch");
  GroupMap m;
  m.ctx = ctx;
  m.n = n;
  m.parts = parts;
  m.parts.insert(m.parts.end(), o.parts.begin(), o.parts.end());
  for (const GroupMapPart& part : m.parts) check_part(ctx, n, part);
  if (parts.empty())
    m.known_order = o.known_order;
  else if (o.parts.empty())
    m.known_order = known_order;
  return m;
}

GroupMap GroupMap::with_order(uint32_t r) const {
  if (r == 0) throw std::invalid_argument("GroupMap: order must be positive");
  GroupMap m = *this;
  m.known_order = r;
  return m;
}

Mat twist_act(const GroupMap& phi, const Mat& g, const Mat& x) {
  if (g.n() != phi.n || x.n() != phi.n) throw std::invalid_argument("twist_act: size mismatch");
  return g * x * phi.apply(g.inverse());
}

Mat orbit_invariant(const GroupMap& phi, const Mat& x) {
  if (!phi.known_order) throw std::invalid_argument("orbit_invariant: order of the map is not known");
  return iterate_product([&phi](const Mat& y) { return phi.apply(y); }, x, *phi.known_order);
}

namespace {
constexpr const char* kSepNames[] = {"rho",    "eps",        "rho-eps",    "mu-rho",
                                     "mu-rho-eps", "iota-h", "iota-h-rho", "iota-h-rho-eps"};
}

const char* sep_case_name(SepCase c) { return kSepNames[static_cast<int>(c)]; }

std::optional<SepCase> sep_case_from_name(const std::string& name) {
  for (int i = 0; i < 8; ++i)
    if (name == kSepNames[i]) return static_cast<SepCase>(i);
  return std::nullopt;
}

TraceCertificate certify_separation(const GroupMap& phi, SepCase tag,
                                    const std::vector<uint32_t>& indices) {
  validate_indices(indices);
  if (phi.parts.size() != 1 || !std::holds_alternative<StdAut>(phi.parts[0]))
    throw std::invalid_argument("certify_separation: a single standard-shaped part is required");
  const StdAut& aut = std::get<StdAut>(phi.parts[0]);
  const RingCtx& ctx = aut.ctx;
  const size_t n = aut.n;

  const bool chi_eff = aut.chi.has_value() && !aut.chi->is_trivial();
  const bool eps = aut.use_eps;
  const bool rho_id = aut.rho.is_identity();
  const bool central = is_central_unit_scalar(aut.g);
  const std::optional<RingElem> corner = corner_extract(aut.g);

  auto need = [](bool cond, const char* what) {
    if (!cond)
      throw std::invalid_argument(std::string("certify_separation: shape mismatch: ") + what);
  };

  bool iota = false;
  switch (tag) {
    case SepCase::Rho:
      need(!chi_eff, "no homothety part allowed");
      need(!eps, "no transpose-inverse part allowed");
      need(central, "conjugator must be central");
      break;
    case SepCase::Eps:
      need(!chi_eff, "no homothety part allowed");
      need(eps, "transpose-inverse part required");
      need(rho_id, "ring part must be the identity");
      need(central, "conjugator must be central");
      break;
    case SepCase::RhoEps:
      need(!chi_eff, "no homothety part allowed");
      need(eps, "transpose-inverse part required");
      need(central, "conjugator must be central");
      break;
    case SepCase::MuRho:
      need(n >= 3, "n >= 3 required");
      need(chi_eff, "nontrivial homothety part required");
      need(!eps, "no transpose-inverse part allowed");
      need(central, "conjugator must be central");
      break;
    case SepCase::MuRhoEps:
      need(n >= 3, "n >= 3 required");
      need(chi_eff, "nontrivial homothety part required");
      need(eps, "transpose-inverse part required");
      need(central, "conjugator must be central");
      break;
    case SepCase::IotaH:
      iota = true;
      need(n >= 3, "n >= 3 required");
      need(!chi_eff, "no homothety part allowed");
      need(!eps, "no transpose-inverse part allowed");
      need(rho_id, "ring part must be the identity");
      need(corner.has_value(), "conjugator must be a determinant corner");
      break;
    case SepCase::IotaHRho:
      iota = true;
      need(n >= 3, "n >= 3 required");
      need(!chi_eff, "no homothety part allowed");
      need(!eps, "no transpose-inverse part allowed");
      need(corner.has_value(), "conjugator must be a determinant corner");
      break;
    case SepCase::IotaHRhoEps:
      iota = true;
      need(n >= 3, "n >= 3 required");
      need(!chi_eff, "no homothety part allowed");
      need(eps, "transpose-inverse part required");
      need(corner.has_value(), "conjugator must be a determinant corner");
      break;
  }

  const uint32_t r = aut.rho.order();
  const RingElem s = special_s(ctx);
  const Fq shift = Fq::from_int(ctx.spec(), static_cast<long long>(n) - (iota ? 3 : 2));

  TraceCertificate cert;
  cert.case_tag = sep_case_name(tag);
  cert.indices = indices;
  cert.r = r;

  {
    std::ostringstream os;
    os << sep_case_name(tag) << " over F_" << ctx.spec()->q
       << (ctx.flavor == Flavor::Laurent ? "[t,1/t]" : "[t]") << ", n=" << n << ", r=" << r;
    if (iota) os << ", a=" << corner->to_string();
    cert.aut_desc = os.str();
  }

  auto fail = [](const char* what) { return std::logic_error(std::string("certify_separation: ") + what); };

  for (uint32_t m : indices) {
    const RingElem sm = s.pow(m);
    const Mat xm = witness_x(ctx, n, m);
    Mat v = Mat::identity(ctx, n);
    RingElem tau;

    switch (tag) {
      case SepCase::Rho:
      case SepCase::MuRho: {
        // The witness is fixed, so the orbit product collapses to a power.
        if (aut.apply(xm) != xm) throw fail("witness not fixed by the map");
        v = iterate_product([&aut](const Mat& y) { return aut.apply(y); }, xm, r);
        if (v != xm.pow(r)) throw fail("orbit product is not the expected power");
        tau = v.trace();
        break;
      }
      case SepCase::Eps:
      case SepCase::RhoEps:
      case SepCase::MuRhoEps: {
        // Every orbit element has determinant one, so a homothety part never
        // contributes; the 2r-fold product telescopes to a witness power.
        const Mat x = Mat::elementary(ctx, n, 1, 2, sm);
        v = iterate_product([&aut](const Mat& y) { return aut.apply(y); }, x, 2 * r);
        if (v != xm.pow(r)) throw fail("orbit product is not the expected power");
        tau = v.trace();
        break;
      }
      case SepCase::IotaH: {
        const Mat h = Mat::corner_unit(ctx, n, *corner);
        v = xm * h;
        tau = v.trace() - *corner;
        break;
      }
      case SepCase::IotaHRho: {
        // Twisted classes of x_m map to plain conjugacy classes of x_m h, and
        // the inner ring part alone drives the orbit of those.
        const Mat h = Mat::corner_unit(ctx, n, *corner);
        const StdAut inner = StdAut::ring_induced(ctx, n, aut.rho);
        v = iterate_product([&inner](const Mat& y) { return inner.apply(y); }, xm * h, r);
        RingElem b = RingElem::one(ctx);
        RingElem pa = *corner;
        for (uint32_t j = 0; j < r; ++j) {
          b = b * pa;
          pa = aut.rho.apply(pa);
        }
        if (v != xm.pow(r) * Mat::corner_unit(ctx, n, b)) throw fail("orbit product is not the expected power");
        tau = v.trace() - b;
        break;
      }
      case SepCase::IotaHRhoEps: {
        const Mat h = Mat::corner_unit(ctx, n, *corner);
        const StdAut inner =
            StdAut::make(ctx, n, std::nullopt, aut.rho, Mat::identity(ctx, n), true);
        const Mat x = Mat::elementary(ctx, n, 1, 2, sm) * h;
        v = iterate_product([&inner](const Mat& y) { return inner.apply(y); }, x, 2 * r);
        // The corner accumulates a, rho(a^-1), rho^2(a), ... over 2r steps.
        RingElem b = RingElem::one(ctx);
        RingElem pa = *corner;
        RingElem pi = unit_inverse(*corner);
        for (uint32_t j = 0; j < 2 * r; ++j) {
          b = b * (j % 2 == 0 ? pa : pi);
          pa = aut.rho.apply(pa);
          pi = aut.rho.apply(pi);
        }
        if (v != xm.pow(r) * Mat::corner_unit(ctx, n, b)) throw fail("orbit product is not the expected power");
        tau = v.trace() - b;
        break;
      }
    }

    const RingElem expected = witness_block_trace(ctx, sm, r) + RingElem::constant(ctx, shift);
    if (tau != expected) throw fail("trace does not match the block recurrence");
    auto deg = s_degree(tau);
    if (!deg) throw fail("trace has no expansion in powers of s");
    if (*deg != static_cast<int>(2 * r * m)) throw fail("trace has unexpected s-degree");
    cert.traces.push_back(tau);
    cert.s_degrees.push_back(*deg);
  }

  // A uniform unit scalar cannot change an s-degree and a unit summand was
  // already removed, so pairwise distinct degrees separate the classes.
  cert.verdict = "separated";
  for (size_t i = 0; i < cert.traces.size(); ++i)
    for (size_t j = i + 1; j < cert.traces.size(); ++j) {
      if (cert.s_degrees[i] == cert.s_degrees[j]) cert.verdict = "not separated: equal s-degrees";
      if (cert.traces[i] == cert.traces[j]) cert.verdict = "not separated: equal traces";
    }
  return cert;
}

TraceCertificate certify_h0(const StdAut& phi_small, uint32_t d,
                            const std::vector<uint32_t>& indices) {
  validate_indices(indices);
  if (d == 0) throw std::invalid_argument("certify_h0: d must be positive");
  const RingCtx& ctx = phi_small.ctx;
  const FieldSpec* fs = ctx.spec();
  const size_t n = phi_small.n;
  if (n < 3) throw std::invalid_argument("certify_h0: n >= 3 required");
  if (phi_small.chi.has_value() && !phi_small.chi->is_trivial())
    throw std::invalid_argument("certify_h0: no homothety part allowed");
  if (phi_small.use_eps) throw std::invalid_argument("certify_h0: no transpose-inverse part allowed");
  const std::optional<RingElem> corner = corner_extract(phi_small.g);
  if (!corner) throw std::invalid_argument("certify_h0: conjugator must be a determinant corner");

  const uint32_t N = 2 * d * fs->e;
  uint64_t qd = 1;
  for (uint32_t i = 0; i < d; ++i) {
    qd *= fs->q;
    if (qd > 4096) throw std::invalid_argument("certify_h0: extension field too large");
  }
  const RingCtx big{FieldSpec::make(fs->p, d * fs->e), ctx.flavor};

  // The base element s of F_q, rebuilt over the extension.
  const RingElem s_small = special_s(ctx);
  RingElem s_big;
  if (ctx.flavor == Flavor::Laurent) {
    s_big = RingElem::t_power(big, static_cast<int>(fs->q) - 1) +
            RingElem::t_power(big, 1 - static_cast<int>(fs->q));
  } else {
    s_big = (RingElem::t_power(big, static_cast<int>(fs->q)) - RingElem::t_power(big, 1)).pow(fs->q - 1);
  }

  TraceCertificate cert;
  cert.case_tag = "h0-torsion";
  cert.indices = indices;
  cert.r = N;
  {
    std::ostringstream os;
    os << "iota-h-rho over F_" << fs->q << (ctx.flavor == Flavor::Laurent ? "[t,1/t]" : "[t]")
       << ", n=" << n << ", d=" << d << ", N=" << N << ", a=" << corner->to_string();
    cert.aut_desc = os.str();
  }

  auto fail = [](const char* what) { return std::logic_error(std::string("certify_h0: ") + what); };

  std::vector<RingElem> big_traces;
  for (uint32_t k : indices) {
    const RingElem tr = witness_block_trace(ctx, s_small.pow(k), N);
    auto deg = s_degree(tr);
    if (!deg) throw fail("trace has no expansion in powers of s");
    if (*deg != static_cast<int>(2 * k * N)) throw fail("trace has unexpected s-degree");
    const RingElem tr_big = witness_block_trace(big, s_big.pow(k), N);
    if (tr_big != embed_prime(tr, big)) throw fail("trace disagrees across the extension");
    cert.traces.push_back(tr);
    cert.s_degrees.push_back(*deg);
    big_traces.push_back(tr_big);
  }

  // tr(x_k^N) + u = tr(x_m^N) + v would force the trace difference to be a
  // constant; the s-degree gap rules that out, and the scan replays it.
  cert.verdict = "separated";
  for (size_t i = 0; i < big_traces.size(); ++i)
    for (size_t j = i + 1; j < big_traces.size(); ++j) {
      if (cert.s_degrees[i] == cert.s_degrees[j]) {
        cert.verdict = "not separated: equal s-degrees";
        continue;
      }
      const RingElem diff = big_traces[i] - big_traces[j];
      for (uint64_t u = 1; u < qd; ++u) {
        const RingElem shifted =
            diff + RingElem::constant(big, Fq(big.spec(), static_cast<uint32_t>(u)));
        for (uint64_t v = 1; v < qd; ++v)
          if (shifted == RingElem::constant(big, Fq(big.spec(), static_cast<uint32_t>(v))))
            cert.verdict = "not separated: unit shift matches traces";
      }
    }
  return cert;
}

std::vector<Mat> bounded_orbit_bfs(const GroupMap& phi, const Mat& x,
                                   const std::vector<Mat>& generators, uint32_t radius) {
  if (x.n() != phi.n) throw std::invalid_argument("bounded_orbit_bfs: size mismatch");
  struct Move {
    Mat g;
    Mat phig_inv;
  };
  std::vector<Move> moves;
  for (const Mat& g : generators) {
    if (g.n() != phi.n) throw std::invalid_argument("bounded_orbit_bfs: generator size mismatch");
    Mat gi = g.inverse();
    moves.push_back(Move{g, phi.apply(gi)});
    moves.push_back(Move{gi, phi.apply(g)});
  }

  std::vector<Mat> out{x};
  std::unordered_set<std::string> seen{x.to_key()};
  size_t lo = 0;
  for (uint32_t depth = 0; depth < radius; ++depth) {
    const size_t hi = out.size();
    for (size_t i = lo; i < hi; ++i)
      for (const Move& mv : moves) {
        Mat y = mv.g * out[i] * mv.phig_inv;
        std::string key = y.to_key();
        if (seen.insert(std::move(key)).second) out.push_back(std::move(y));
      }
    lo = hi;
  }
  return out;
}

DetSubgroup DetSubgroup::make(const RingCtx& ctx, std::vector<RingElem> gens) {
  DetSubgroup d;
  d.ctx = ctx;
  const long long qm1 = ctx.spec()->q - 1;
  long long g = 0, beta = 0;
  long long tor = qm1;  // subgroup of Z/(q-1) reachable at t-exponent zero
  for (const RingElem& u : gens) {
    auto dec = unit_decompose(u);
    if (!dec) throw std::invalid_argument("DetSubgroup: generator is not a unit");
    const long long a = dec->second;
    const long long b = ctx.spec()->dlog(dec->first.idx());
    if (a == 0) {
      tor = std::gcd(tor, pos_mod(b, qm1));
      continue;
    }
    if (g == 0) {
      g = a;
      beta = pos_mod(b, qm1);
      continue;
    }
    long long x = 0, y = 0;
    const long long g2 = egcd(g, a, x, y);
    // The one new combination with t-exponent zero.
    const long long syz = (a / g2) * beta - (g / g2) * b;
    tor = std::gcd(tor, pos_mod(syz, qm1));
    beta = pos_mod(x * beta + y * b, qm1);
    g = g2;
  }
  d.gens = std::move(gens);
  d.pivot_texp = g;
  d.pivot_dlog = beta;
  d.torsion_step = tor;
  return d;
}

bool DetSubgroup::contains_unit(const RingElem& u) const {
  auto dec = unit_decompose(u);
  if (!dec) return false;
  const long long qm1 = ctx.spec()->q - 1;
  const long long a = dec->second;
  const long long b = ctx.spec()->dlog(dec->first.idx());
  long long residual = 0;
  if (pivot_texp == 0) {
    if (a != 0) return false;
    residual = b;
  } else {
    if (a % pivot_texp != 0) return false;
    residual = b - (a / pivot_texp) * pivot_dlog;
  }
  if (qm1 == 1) return true;
  return pos_mod(residual, qm1) % torsion_step == 0;
}

DetSubgroup DetSubgroup::torsion_part() const {
  const Fq c = Fq::generator(ctx.spec()).pow(torsion_step);
  return make(ctx, {RingElem::constant(ctx, c)});
}

bool det_subgroup_member(const DetSubgroup& d, const Mat& g) {
  return d.contains_unit(g.det());
}

}  // namespace polygrp
