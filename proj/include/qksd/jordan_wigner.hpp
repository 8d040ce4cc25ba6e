#pragma once

#include "qksd/fermion.hpp"
#include "qksd/pauli.hpp"

namespace qksd {

/// Qubit image of E_rs = a_r^dag a_s + a_s^dag a_r under Jordan-Wigner.
PauliSum jw_excitation(int n_qubits, int r, int s);

/// Qubit image of n_q = (I - Z_q) / 2.
PauliSum jw_number(int n_qubits, int q);

/// Jordan-Wigner image of a FermionSum. Coefficients below 1e-14 are dropped;
/// an imaginary residue above 1e-12 raises NumericalError.
PauliSum jordan_wigner(const FermionSum& f);

/// Product a * b of two real Pauli sums whose result is known to be
/// Hermitian (e.g. a product of commuting Hermitian operators). Throws
/// NumericalError when the imaginary part exceeds `imag_tol`.
PauliSum hermitian_product(const PauliSum& a, const PauliSum& b, double imag_tol = 1e-12);

}  // namespace qksd
