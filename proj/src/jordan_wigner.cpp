#include "qksd/jordan_wigner.hpp"

#include <cmath>
#include <complex>
#include <map>

#include "qksd/errors.hpp"

namespace qksd {

namespace {

using ComplexTerms = std::map<PauliWord, std::complex<double>>;

void add_product(ComplexTerms& acc, const PauliSum& a, const PauliSum& b, double scale) {
  for (const auto& [pa, ca] : a.terms()) {
    for (const auto& [pb, cb] : b.terms()) {
      const auto prod = pauli_product(pa, pb);
      acc[prod.word] += scale * ca * cb * prod.phase.value();
    }
  }
}

PauliSum realize(const ComplexTerms& acc, int n_qubits, double imag_tol, double chop) {
  PauliSum out(n_qubits);
  for (const auto& [w, c] : acc) {
    if (std::abs(c.imag()) > imag_tol) {
      throw NumericalError("imaginary residue " + std::to_string(c.imag()) + " on " +
                           w.to_string());
    }
    if (std::abs(c.real()) > chop) out.add(w, c.real());
  }
  return out;
}

}  // namespace

PauliSum jw_number(int n_qubits, int q) {
  PauliSum out(n_qubits);
  out.add(PauliWord::identity(n_qubits), 0.5);
  out.add(PauliWord::single(n_qubits, q, 'Z'), -0.5);
  return out;
}

PauliSum jw_excitation(int n_qubits, int r, int s) {
  if (r < 0 || s < 0 || r >= n_qubits || s >= n_qubits) throw IndexError("orbital index out of range");
  if (r == s) return 2.0 * jw_number(n_qubits, r);
  if (r > s) std::swap(r, s);
  // 1/2 (X_r Z..Z X_s + Y_r Z..Z Y_s)
  std::uint64_t string = 0;
  for (int k = r + 1; k < s; ++k) string |= 1ULL << k;
  const std::uint64_t ends = (1ULL << r) | (1ULL << s);
  PauliSum out(n_qubits);
  out.add(PauliWord(n_qubits, ends, string), 0.5);
  out.add(PauliWord(n_qubits, ends, string | ends), 0.5);
  return out;
}

PauliSum hermitian_product(const PauliSum& a, const PauliSum& b, double imag_tol) {
  if (a.n_qubits() != b.n_qubits()) throw DimensionError("PauliSum qubit counts differ");
  ComplexTerms acc;
  add_product(acc, a, b, 1.0);
  return realize(acc, a.n_qubits(), imag_tol, 0.0);
}

PauliSum jordan_wigner(const FermionSum& f) {
  const int n = f.n_orb();
  std::map<PairKey, PauliSum> cache;
  auto excitation = [&](int r, int s) -> const PauliSum& {
    auto it = cache.find({r, s});
    if (it == cache.end()) it = cache.emplace(PairKey{r, s}, jw_excitation(n, r, s)).first;
    return it->second;
  };

  ComplexTerms acc;
  acc[PauliWord::identity(n)] += f.scalar();
  for (const auto& [key, c] : f.one_body()) {
    for (const auto& [w, a] : excitation(key[0], key[1]).terms()) acc[w] += c * a;
  }
  for (const auto& [key, c] : f.two_body()) {
    const PauliSum& ea = excitation(key[0], key[1]);
    const PauliSum& eb = excitation(key[2], key[3]);
    add_product(acc, ea, eb, c);
    add_product(acc, eb, ea, c);
  }
  return realize(acc, n, 1e-12, 1e-14);
}

}  // namespace qksd
