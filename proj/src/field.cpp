#include "polygrp/field.hpp"

#include <algorithm>
#include <map>
#include <mutex>

namespace polygrp {

namespace {

constexpr uint32_t kMaxQ = 4096;  // table-backed; desk scale never approaches this

bool is_prime(uint32_t p) {
  if (p < 2) return false;
  for (uint32_t d = 2; d * d <= p; ++d)
    if (p % d == 0) return false;
  return true;
}

// Dense polynomials over Z/p, ascending coefficients, no trailing zeros.
using ZpPoly = std::vector<uint32_t>;

void zp_trim(ZpPoly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

ZpPoly zp_mul(const ZpPoly& a, const ZpPoly& b, uint32_t p) {
  if (a.empty() || b.empty()) return {};
  ZpPoly r(a.size() + b.size() - 1, 0);
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j)
      r[i + j] = (r[i + j] + a[i] * b[j]) % p;
  zp_trim(r);
  return r;
}

// Remainder of a by monic b.
ZpPoly zp_mod(ZpPoly a, const ZpPoly& b, uint32_t p) {
  zp_trim(a);
  while (a.size() >= b.size()) {
    uint32_t c = a.back();  // b monic
    size_t shift = a.size() - b.size();
    for (size_t i = 0; i < b.size(); ++i) {
      uint32_t t = (c * b[i]) % p;
      a[shift + i] = (a[shift + i] + p - t) % p;
    }
    zp_trim(a);
  }
  return a;
}

bool zp_divides(const ZpPoly& d, const ZpPoly& a, uint32_t p) {
  if (d.empty()) return false;
  // scale d monic
  ZpPoly dm = d;
  uint32_t lc = dm.back();
  if (lc != 1) {
    // inverse of lc mod p
    uint32_t inv = 1;
    for (uint32_t x = 1; x < p; ++x)
      if ((x * lc) % p == 1) { inv = x; break; }
    for (auto& c : dm) c = (c * inv) % p;
  }
  return zp_mod(a, dm, p).empty();
}

bool zp_irreducible(const ZpPoly& f, uint32_t p) {
  size_t e = f.size() - 1;
  if (e == 0) return false;
  if (e == 1) return true;
  // trial division by all monic polynomials of degree 1..e/2
  for (size_t d = 1; 2 * d <= e; ++d) {
    uint64_t count = 1;
    for (size_t i = 0; i < d; ++i) count *= p;
    for (uint64_t m = 0; m < count; ++m) {
      ZpPoly div(d + 1, 0);
      uint64_t mm = m;
      for (size_t i = 0; i < d; ++i) { div[i] = mm % p; mm /= p; }
      div[d] = 1;
      if (zp_divides(div, f, p)) return false;
    }
  }
  return true;
}

struct InternKey {
  uint32_t p, e;
  std::vector<uint32_t> modulus;
  bool operator<(const InternKey& o) const {
    if (p != o.p) return p < o.p;
    if (e != o.e) return e < o.e;
    return modulus < o.modulus;
  }
};

std::mutex g_intern_mutex;
std::map<InternKey, FieldRef>& intern_table() {
  static std::map<InternKey, FieldRef> t;
  return t;
}

}  // namespace

FieldRef FieldSpec::make(uint32_t p, uint32_t e,
                         std::optional<std::vector<uint32_t>> modulus_opt) {
  if (!is_prime(p)) throw std::invalid_argument("fq_make: p is not prime");
  if (e < 1) throw std::invalid_argument("fq_make: e must be >= 1");
  uint64_t q64 = 1;
  for (uint32_t i = 0; i < e; ++i) q64 *= p;
  if (q64 > kMaxQ) throw std::invalid_argument("fq_make: field too large for table backend");
  uint32_t q = static_cast<uint32_t>(q64);

  ZpPoly mod;
  if (modulus_opt) {
    mod = *modulus_opt;
    if (mod.size() != e + 1 || mod.back() % p != 1)
      throw std::invalid_argument("fq_make: modulus must be monic of degree e");
    for (auto& c : mod) c %= p;
    if (!zp_irreducible(mod, p)) throw std::invalid_argument("fq_make: reducible modulus");
  } else {
    // smallest base-p integer encoding among monic irreducibles of degree e
    for (uint32_t m = 0; m < q; ++m) {
      ZpPoly cand(e + 1, 0);
      uint32_t mm = m;
      for (uint32_t i = 0; i < e; ++i) { cand[i] = mm % p; mm /= p; }
      cand[e] = 1;
      if (zp_irreducible(cand, p)) { mod = cand; break; }
    }
  }

  InternKey key{p, e, mod};
  {
    std::lock_guard<std::mutex> lk(g_intern_mutex);
    auto it = intern_table().find(key);
    if (it != intern_table().end()) return it->second;
  }

  auto spec = std::make_shared<FieldSpec>();
  spec->p = p;
  spec->e = e;
  spec->q = q;
  spec->modulus = mod;

  auto coeffs_of = [&](uint32_t idx) {
    ZpPoly c(e, 0);
    for (uint32_t i = 0; i < e; ++i) { c[i] = idx % p; idx /= p; }
    return c;
  };
  auto idx_of = [&](const ZpPoly& c) {
    uint32_t idx = 0;
    for (size_t i = c.size(); i-- > 0;) idx = idx * p + (i < c.size() ? c[i] : 0);
    return idx;
  };

  spec->add_tab.resize(static_cast<size_t>(q) * q);
  spec->mul_tab.resize(static_cast<size_t>(q) * q);
  spec->neg_tab.resize(q);
  spec->inv_tab.assign(q, 0);
  spec->frob_tab.resize(q);
  spec->dlog_tab.assign(q, 0);

  for (uint32_t a = 0; a < q; ++a) {
    ZpPoly ca = coeffs_of(a);
    ZpPoly nc(e, 0);
    for (uint32_t i = 0; i < e; ++i) nc[i] = (p - ca[i]) % p;
    spec->neg_tab[a] = idx_of(nc);
    for (uint32_t b = 0; b < q; ++b) {
      ZpPoly cb = coeffs_of(b);
      ZpPoly sum(e, 0);
      for (uint32_t i = 0; i < e; ++i) sum[i] = (ca[i] + cb[i]) % p;
      spec->add_tab[a * q + b] = idx_of(sum);
      ZpPoly prod = zp_mod(zp_mul(ca, cb, p), mod, p);
      prod.resize(e, 0);
      spec->mul_tab[a * q + b] = idx_of(prod);
    }
  }
  for (uint32_t a = 0; a < q; ++a) {
    uint32_t f = a;
    for (uint32_t i = 1; i < p; ++i) f = spec->mul_tab[f * q + a];  // a^p
    spec->frob_tab[a] = f;
  }
  // inverses by scanning (q small)
  for (uint32_t a = 1; a < q; ++a)
    for (uint32_t b = 1; b < q; ++b)
      if (spec->mul_tab[a * q + b] == 1) { spec->inv_tab[a] = b; break; }
  // generator: smallest index of multiplicative order q-1
  for (uint32_t g = 1; g < q; ++g) {
    uint32_t x = g, ord = 1;
    while (x != 1) { x = spec->mul_tab[x * q + g]; ++ord; }
    if (ord == q - 1) { spec->gen = g; break; }
  }
  {
    uint32_t x = 1;
    for (uint32_t j = 0; j + 1 < q; ++j) {
      spec->dlog_tab[x] = j;
      x = spec->mul_tab[x * q + spec->gen];
    }
  }

  std::lock_guard<std::mutex> lk(g_intern_mutex);
  auto [it, inserted] = intern_table().emplace(key, spec);
  return it->second;
}

uint32_t FieldSpec::inv(uint32_t a) const {
  if (a == 0) throw std::domain_error("Fq: division by zero");
  return inv_tab[a];
}

uint32_t FieldSpec::dlog(uint32_t a) const {
  if (a == 0) throw std::domain_error("Fq: dlog of zero");
  return dlog_tab[a];
}

std::vector<uint32_t> FieldSpec::coeffs_of(uint32_t idx) const {
  std::vector<uint32_t> c(e, 0);
  for (uint32_t i = 0; i < e; ++i) { c[i] = idx % p; idx /= p; }
  return c;
}

uint32_t FieldSpec::idx_of(const std::vector<uint32_t>& coeffs) const {
  if (coeffs.size() > e) {
    for (size_t i = e; i < coeffs.size(); ++i)
      if (coeffs[i] % p != 0) throw std::invalid_argument("Fq: coefficient vector too long");
  }
  uint32_t idx = 0;
  for (size_t i = std::min<size_t>(coeffs.size(), e); i-- > 0;)
    idx = idx * p + coeffs[i] % p;
  return idx;
}

Fq Fq::from_int(const FieldSpec* s, long long c) {
  long long m = c % static_cast<long long>(s->p);
  if (m < 0) m += s->p;
  return Fq(s, static_cast<uint32_t>(m));
}

Fq Fq::from_digits_int(const FieldSpec* s, long long c) {
  long long m = c % static_cast<long long>(s->q);
  if (m < 0) m += s->q;
  return Fq(s, static_cast<uint32_t>(m));
}

Fq Fq::from_coeffs(const FieldSpec* s, const std::vector<uint32_t>& coeffs) {
  return Fq(s, s->idx_of(coeffs));
}

Fq Fq::pow(long long k) const {
  if (v_ == 0) {
    if (k < 0) throw std::domain_error("Fq: negative power of zero");
    return k == 0 ? one(s_) : *this;
  }
  long long m = k % static_cast<long long>(s_->q - 1);
  if (m < 0) m += s_->q - 1;
  Fq r = one(s_), b = *this;
  while (m > 0) {
    if (m & 1) r = r * b;
    b = b * b;
    m >>= 1;
  }
  return r;
}

Fq Fq::frobenius(uint32_t k) const {
  uint32_t v = v_;
  for (uint32_t i = 0; i < k % s_->e; ++i) v = s_->frob(v);
  return Fq(s_, v);
}

uint32_t Fq::mult_order() const {
  if (v_ == 0) throw std::domain_error("Fq: order of zero");
  uint32_t ord = 1;
  Fq x = *this;
  while (!x.is_one()) { x = x * *this; ++ord; }
  return ord;
}

std::string Fq::to_string() const {
  if (s_->e == 1) return std::to_string(v_);
  return "#" + std::to_string(v_);
}

}  // namespace polygrp
