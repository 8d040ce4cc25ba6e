#include "qksd/fermion.hpp"

#include <algorithm>
#include <cmath>

#include "qksd/errors.hpp"

namespace qksd {

namespace {

template <class Map>
void accumulate(Map& m, const typename Map::key_type& key, double c) {
  if (c == 0.0) return;
  auto [it, inserted] = m.try_emplace(key, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0.0) m.erase(it);
  }
}

template <class Map>
Map chop_map(const Map& m, double tol) {
  Map out;
  for (const auto& [k, v] : m) {
    if (std::abs(v) > tol) out.emplace_hint(out.end(), k, v);
  }
  return out;
}

PairKey ordered(int a, int b) { return a <= b ? PairKey{a, b} : PairKey{b, a}; }

}  // namespace

QuadKey canonical_quad(int p, int q, int r, int s) {
  PairKey a = ordered(p, q);
  PairKey b = ordered(r, s);
  if (b < a) std::swap(a, b);
  return {a[0], a[1], b[0], b[1]};
}

void FermionSum::check_index(int p) const {
  if (p < 0 || p >= n_orb_) {
    throw IndexError("orbital index " + std::to_string(p) + " outside [0, " +
                     std::to_string(n_orb_) + ")");
  }
}

void FermionSum::add_one_body(int r, int s, double c) {
  check_index(r);
  check_index(s);
  accumulate(one_body_, ordered(r, s), c);
}

void FermionSum::add_two_body(int p, int q, int r, int s, double c) {
  for (int i : {p, q, r, s}) check_index(i);
  const QuadKey key = canonical_quad(p, q, r, s);
  if (key[0] == key[1] && key[1] == key[2] && key[2] == key[3]) {
    // E_pp E_pp + h.c. = 8 n_p = 4 E_pp
    accumulate(one_body_, PairKey{p, p}, 4.0 * c);
    return;
  }
  accumulate(two_body_, key, c);
}

FermionSum FermionSum::chopped(double tol) const {
  FermionSum out(n_orb_);
  out.scalar_ = scalar_;
  out.one_body_ = chop_map(one_body_, tol);
  out.two_body_ = chop_map(two_body_, tol);
  return out;
}

FermionSum build_fermionic_hamiltonian(const IntegralSet& ints) {
  const int n = ints.n_orb();
  FermionSum f(n);
  f.add_scalar(ints.e_core());

  // a_p^dag a_r^dag a_s a_q = e_pq e_rs - delta_qr e_ps
  for (int p = 0; p < n; ++p) {
    for (int q = p; q < n; ++q) {
      double k = ints.h(p, q);
      for (int r = 0; r < n; ++r) k -= 0.5 * ints.g(p, r, r, q);
      f.add_one_body(p, q, p == q ? 0.5 * k : k);
    }
  }

  std::vector<PairKey> pairs;
  for (int p = 0; p < n; ++p)
    for (int q = p; q < n; ++q) pairs.push_back({p, q});
  for (std::size_t a = 0; a < pairs.size(); ++a) {
    const auto [p, q] = pairs[a];
    const double wa = p == q ? 0.5 : 1.0;
    for (std::size_t b = a; b < pairs.size(); ++b) {
      const auto [r, s] = pairs[b];
      const double v = ints.g(p, q, r, s);
      if (v == 0.0) continue;
      const double wb = r == s ? 0.5 : 1.0;
      f.add_two_body(p, q, r, s, (a == b ? 0.25 : 0.5) * v * wa * wb);
    }
  }
  return f;
}

ShiftForm ShiftForm::from_fermion(const FermionSum& f) {
  ShiftForm sf;
  sf.n_orb = f.n_orb();
  sf.scalar = f.scalar();
  for (const auto& [key, c] : f.one_body()) {
    const auto [r, s] = key;
    if (r == s) {
      accumulate(sf.number, r, 2.0 * c);
    } else {
      accumulate(sf.excitation, key, c);
    }
  }
  for (const auto& [key, g] : f.two_body()) {
    const auto [p, q, r, s] = key;
    const bool a_diag = p == q;
    const bool b_diag = r == s;
    if (p == r && q == s) {
      // 2 E_pq^2 = 2 (n_p + n_q - 2 n_p n_q)
      accumulate(sf.number, p, 2.0 * g);
      accumulate(sf.number, q, 2.0 * g);
      accumulate(sf.exc_number, TripleKey{q, p, p}, -g);
      accumulate(sf.exc_number, TripleKey{p, q, q}, -g);
    } else if (a_diag && b_diag) {
      // 8 n_p n_r
      accumulate(sf.exc_number, TripleKey{r, p, p}, 2.0 * g);
      accumulate(sf.exc_number, TripleKey{p, r, r}, 2.0 * g);
    } else if (a_diag || b_diag) {
      const int d = a_diag ? p : r;
      const int u = a_diag ? r : p;
      const int v = a_diag ? s : q;
      if (d != u && d != v) {
        // 4 E_uv n_d
        accumulate(sf.exc_number, TripleKey{d, u, v}, 4.0 * g);
      } else {
        // 2 {n_d, E_dv} = 2 E_dv
        accumulate(sf.excitation, PairKey{u, v}, 2.0 * g);
      }
    } else {
      int shared = -1, a = -1, b = -1;
      if (p == r) shared = p, a = q, b = s;
      else if (p == s) shared = p, a = q, b = r;
      else if (q == r) shared = q, a = p, b = s;
      else if (q == s) shared = q, a = p, b = r;
      if (shared < 0) {
        accumulate(sf.rest, key, g);
      } else {
        // {E_ac, E_bc} = E_ab (1 - 2 n_c)
        const PairKey ab = ordered(a, b);
        accumulate(sf.excitation, ab, g);
        accumulate(sf.exc_number, TripleKey{shared, ab[0], ab[1]}, -2.0 * g);
      }
    }
  }
  return sf;
}

FermionSum ShiftForm::to_fermion() const {
  FermionSum f(n_orb);
  f.add_scalar(scalar);
  for (const auto& [r, c] : number) f.add_one_body(r, r, 0.5 * c);
  for (const auto& [key, c] : excitation) f.add_one_body(key[0], key[1], c);
  // E_rs n_q = (E_rs E_qq + h.c.) / 4 since the two factors commute
  for (const auto& [key, c] : exc_number) f.add_two_body(key[1], key[2], key[0], key[0], 0.25 * c);
  for (const auto& [key, c] : rest) f.add_two_body(key[0], key[1], key[2], key[3], c);
  return f;
}

ShiftForm ShiftForm::chopped(double tol) const {
  ShiftForm out;
  out.n_orb = n_orb;
  out.scalar = scalar;
  out.number = chop_map(number, tol);
  out.excitation = chop_map(excitation, tol);
  out.exc_number = chop_map(exc_number, tol);
  out.rest = chop_map(rest, tol);
  return out;
}

}  // namespace qksd
