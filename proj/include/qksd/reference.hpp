#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "qksd/integrals.hpp"
#include "qksd/pauli.hpp"
#include "qksd/statevector.hpp"

namespace qksd {

/// Occupied / virtual split of spin orbitals for a single determinant.
struct Occupation {
  int n_orb = 0;
  std::vector<int> occ;
  std::vector<int> virt;

  bool is_occupied(int p) const;
  /// Computational-basis index of the determinant (bit p set for p in occ).
  std::uint64_t mask() const;
  /// Twice the spin projection for interleaved spin orbitals.
  int two_sz() const;
};

Occupation hf_reference(const IntegralSet& ints);
Occupation hf_reference(int n_orb, int n_elec);

StateVector reference_state(const Occupation& ref);

/// <ref| h |ref> for a single determinant; only Z-type words contribute.
double determinant_energy(const PauliSum& h, const Occupation& ref);

/// Basis indices with `n_particles` set bits and, if given, fixed 2*Sz under
/// the interleaved alpha/beta convention. Sorted ascending.
std::vector<std::uint64_t> sector_basis(int n_qubits, int n_particles,
                                        std::optional<int> two_sz = std::nullopt);

/// Projection of h onto the span of the given basis states.
Eigen::MatrixXcd restricted_matrix(const PauliSum& h, const std::vector<std::uint64_t>& basis);

struct SectorSpectrum {
  std::vector<std::uint64_t> basis;
  Eigen::VectorXd eigenvalues;  // ascending
  StateVector ground_state;     // embedded into the full space
  double e0 = 0.0;
  /// First gap above the ground level; levels within `degeneracy_tol` of e0
  /// count as degenerate with it. Zero when the sector has a single level.
  double gap = 0.0;
};

/// Dense diagonalization of h inside the (N, Sz) sector of the reference.
SectorSpectrum sector_spectrum(const PauliSum& h, const Occupation& ref,
                               double degeneracy_tol = 1e-8);

struct CisdResult {
  StateVector state;
  double energy = 0.0;
  std::vector<std::uint64_t> basis;
};

/// Lowest eigenpair of h restricted to determinants with the reference's
/// particle number and excitation level at most two.
CisdResult cisd_ground_state(const PauliSum& h, const Occupation& ref);

std::vector<std::uint64_t> cisd_basis(int n_qubits, const Occupation& ref);

}  // namespace qksd
