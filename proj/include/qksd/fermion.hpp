#pragma once

#include <array>
#include <map>

#include "qksd/integrals.hpp"

namespace qksd {

using PairKey = std::array<int, 2>;
/// (p, q, r, s) standing for E_pq E_rs + h.c.
using QuadKey = std::array<int, 4>;
/// (q, r, s) standing for E_rs n_q with q outside {r, s} and r <= s.
using TripleKey = std::array<int, 3>;

/// Orders a two-body index quadruple into the canonical representative:
/// p <= q, r <= s and (p, q) <= (r, s).
QuadKey canonical_quad(int p, int q, int r, int s);

/// Second-quantized Hermitian operator in symmetric-excitation form
///
///   sum_{r<=s} one_body[r,s] E_rs + sum_{P} two_body[P] (E_pq E_rs + h.c.) + scalar
///
/// with E_rs = a_r^dag a_s + a_s^dag a_r (so E_rr = 2 n_r). Two-body keys are
/// canonical; the fully diagonal key (p,p,p,p) is never stored because
/// n_p^2 = n_p folds it into one_body.
class FermionSum {
 public:
  FermionSum() = default;
  explicit FermionSum(int n_orb) : n_orb_(n_orb) {}

  int n_orb() const { return n_orb_; }
  double scalar() const { return scalar_; }
  const std::map<PairKey, double>& one_body() const { return one_body_; }
  const std::map<QuadKey, double>& two_body() const { return two_body_; }

  void add_scalar(double c) { scalar_ += c; }
  /// Adds c * E_rs; the pair is reordered to r <= s.
  void add_one_body(int r, int s, double c);
  /// Adds c * (E_pq E_rs + h.c.); indices are canonicalized first and a fully
  /// diagonal quadruple becomes 4c on one_body[p,p].
  void add_two_body(int p, int q, int r, int s, double c);

  FermionSum chopped(double tol) const;

 private:
  void check_index(int p) const;

  int n_orb_ = 0;
  double scalar_ = 0.0;
  std::map<PairKey, double> one_body_;
  std::map<QuadKey, double> two_body_;
};

/// Electronic Hamiltonian over spin orbitals in FermionSum form. The core
/// energy is the scalar part.
FermionSum build_fermionic_hamiltonian(const IntegralSet& ints);

/// Operator-exact regrouping of a FermionSum into the term families that the
/// shift operator acts on:
///
///   scalar + sum_r number[r] n_r + sum_{r<s} excitation[r,s] E_rs
///          + sum_{q; r<=s; q not in {r,s}} exc_number[q,r,s] E_rs n_q
///          + rest (two-body terms on four distinct orbitals)
///
/// For r = s the operators E_rr n_q and E_qq n_r coincide; the regrouping
/// splits such contributions evenly between the two keys.
struct ShiftForm {
  int n_orb = 0;
  double scalar = 0.0;
  std::map<int, double> number;
  std::map<PairKey, double> excitation;
  std::map<TripleKey, double> exc_number;
  std::map<QuadKey, double> rest;

  static ShiftForm from_fermion(const FermionSum& f);
  FermionSum to_fermion() const;
  ShiftForm chopped(double tol) const;
};

}  // namespace qksd
