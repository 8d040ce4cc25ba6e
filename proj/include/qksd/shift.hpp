#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "qksd/fermion.hpp"
#include "qksd/grouping.hpp"
#include "qksd/reference.hpp"

namespace qksd {

/// Parameters of the shift operator
///
///   T = sum_q tau1[q] n_q + sum_q sum_{(r,s) in E_q} tau2[q,r,s] E_rs (n_q - [q in occ])
///
/// with E_q = {(r,s) : r <= s, q not in {r,s}}. T annihilates-up-to-scalar the
/// reference determinant: T|phi0> = t|phi0>.
struct ShiftParams {
  int n_orb = 0;
  std::vector<int> occ;
  std::map<int, double> tau1;
  std::map<TripleKey, double> tau2;
  double t = 0.0;

  /// Recomputes t from tau1 over the occupied orbitals.
  void update_t();
  bool is_occupied(int q) const;
};

ShiftParams zero_shift(const Occupation& ref);

/// The part of H that a shift can reach (number, excitation and
/// excitation-number families) and the untouched four-index remainder.
struct PartialHamiltonian {
  ShiftForm partial;
  ShiftForm complement;
  FermionSum total() const;
};

PartialHamiltonian effective_partial_hamiltonian(const FermionSum& f);
PartialHamiltonian effective_partial_hamiltonian(const IntegralSet& ints);

/// Shift operator T(tau) in operator normal form (t is not subtracted).
ShiftForm shift_operator(const ShiftParams& sp);

/// Optimal parameters for the term-wise norm: tau2 cancels every
/// excitation-number term and tau1 cancels every number term.
ShiftParams closed_form_shift(const FermionSum& f, const Occupation& ref);
ShiftParams closed_form_shift(const IntegralSet& ints, const Occupation& ref);

/// H - T(tau). The scalar t is carried separately and is not subtracted.
FermionSum apply_shift(const FermionSum& f, const ShiftParams& sp);

/// || (T - t) |phi0> ||_2 evaluated on the statevector of the reference.
double annihilation_check(const ShiftParams& sp, const Occupation& ref, int n_qubits);

/// Norm of the decomposition of H - T(tau) under the given grouping mode
/// (Jordan-Wigner plus SORTED INSERTION for LCU / FH).
double shifted_norm(const FermionSum& f, const ShiftParams& sp, GroupingMode mode);

struct RefineOptions {
  double initial_step = 0.05;
  double min_step = 1e-6;
  int max_evaluations = 20000;
  std::uint64_t seed = 1;
};

/// Derivative-free pattern search over tau (coordinate moves followed by
/// random-direction probes, step halved when neither improves). Only strictly
/// improving moves are accepted, so the objective never increases.
ShiftParams refine_shift(const FermionSum& f, const ShiftParams& sp0, GroupingMode mode,
                         const RefineOptions& opt = {});

}  // namespace qksd
