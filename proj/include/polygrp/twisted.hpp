#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "polygrp/amalgam.hpp"
#include "polygrp/matrix.hpp"
#include "polygrp/std_aut.hpp"

namespace polygrp {

// One constituent of a group map: a standard-shaped automorphism or a map of
// the unipotent coordinate (2x2, polynomial flavor only).
using GroupMapPart = std::variant<StdAut, ReinerMap>;

// Composition of constituents, applied right to left: parts.back() acts
// first.  known_order is optional bookkeeping for callers that need the
// orbit product; factories fill it in when a bounded search finds it.
struct GroupMap {
  RingCtx ctx;
  size_t n = 0;
  std::vector<GroupMapPart> parts;
  std::optional<uint32_t> known_order;

  static GroupMap identity(const RingCtx& ctx, size_t n);
  static GroupMap of(StdAut a);
  static GroupMap of(ReinerMap nu);

  Mat apply(const Mat& x) const;
  GroupMap compose(const GroupMap& o) const;  // (*this) after o
  GroupMap with_order(uint32_t r) const;
};

// g . x = g x phi(g^-1).  Left action: (gh).x = g.(h.x).
Mat twist_act(const GroupMap& phi, const Mat& g, const Mat& x);

// prod_{0 <= j < r} phi^j(x) with r = known_order.  Twisted-conjugate inputs
// give conjugate products, so equal traces; distinct traces separate classes.
// Throws std::invalid_argument when the order is not known.
Mat orbit_invariant(const GroupMap& phi, const Mat& x);

// The case split of the separation proof; names follow the factor shapes
// mu_chi . rho . iota_h . eps of the automorphism.
enum class SepCase { Rho, Eps, RhoEps, MuRho, MuRhoEps, IotaH, IotaHRho, IotaHRhoEps };

const char* sep_case_name(SepCase c);
std::optional<SepCase> sep_case_from_name(const std::string& name);

// Replayable record: which elements were compared, the invariant traces with
// the corner-unit summand removed in the conjugator cases (so every stored
// trace is a prime-subfield combination of powers of s), their s-degrees
// (always 2 r m), and the verdict.
struct TraceCertificate {
  std::string aut_desc;
  std::string case_tag;
  std::vector<uint32_t> indices;
  uint32_t r = 1;
  std::vector<RingElem> traces;
  std::vector<int> s_degrees;
  std::string verdict;

  bool separated() const { return verdict == "separated"; }
};

// Certifies that the case's elements (x_m, e_12(s^m), or x_m h) lie in
// pairwise distinct phi-twisted classes for the given indices: computes the
// case-appropriate invariant, checks the closed form it must equal, and
// separates by s-degree, which neither an unknown central scalar in F^x
// (homothety cases) nor an additive unit summand (conjugator cases) can
// equalize.  phi must consist of a single standard-shaped part matching the
// case; throws std::invalid_argument on shape mismatch, std::logic_error if
// an invariant trace fails its expansion or degree check.
TraceCertificate certify_separation(const GroupMap& phi, SepCase tag,
                                    const std::vector<uint32_t>& indices);

// Torsion-determinant subgroup bookkeeping: with N = 2 d e, the equation
//   tr(x_k^N) + u = tr(x_m^N) + v
// has no solution with u, v in the degree-d extension of F_q when k != m.
// Certified twice: by the s-degree gap (2kN vs 2mN), and by exhaustively
// scanning all (u, v) pairs over the extension field, with the traces
// rebuilt there from the base element s of F_q.  phi_small fixes q, the
// flavor, n, and must have the conjugator-times-ring-map shape.
TraceCertificate certify_h0(const StdAut& phi_small, uint32_t d,
                            const std::vector<uint32_t>& indices);

// All twist_act(phi, w, x) over words w of length <= radius in the given
// generators and their inverses, in deterministic BFS discovery order.
std::vector<Mat> bounded_orbit_bfs(const GroupMap& phi, const Mat& x,
                                   const std::vector<Mat>& generators, uint32_t radius);

// Subgroup D of R^x given by unit generators.  A unit factors as a constant
// times a power of t, so membership is a check in Z x Z/(q-1): the t-exponent
// lattice plus the discrete logs reachable with t-exponent zero.
struct DetSubgroup {
  RingCtx ctx;
  std::vector<RingElem> gens;

  // Reduction data: t-exponents generate pivot_texp * Z, reached together
  // with pivot_dlog; torsion_step generates the dlogs reachable at t-exp 0.
  long long pivot_texp = 0;
  long long pivot_dlog = 0;
  long long torsion_step = 0;

  static DetSubgroup make(const RingCtx& ctx, std::vector<RingElem> gens);

  bool contains_unit(const RingElem& u) const;
  DetSubgroup torsion_part() const;
};

bool det_subgroup_member(const DetSubgroup& d, const Mat& g);

}  // namespace polygrp
