#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <vector>

#include "qksd/pauli.hpp"

namespace qksd {

using cplx = std::complex<double>;
/// Amplitudes over the computational basis; bit q of the index is qubit q.
using StateVector = Eigen::VectorXcd;

inline constexpr int kMaxStatevectorQubits = 26;

StateVector basis_state(int n_qubits, std::uint64_t index);

/// out = P |psi>.
void apply_word(const PauliWord& p, const StateVector& psi, StateVector& out);
StateVector apply_word(const PauliWord& p, const StateVector& psi);

/// <a| P |b>.
cplx word_matrix_element(const PauliWord& p, const StateVector& a, const StateVector& b);

/// Matrix-free H |psi> for a PauliSum, with terms grouped by X-mask so each
/// group costs one pass over the state.
class CompiledPauliSum {
 public:
  CompiledPauliSum() = default;
  explicit CompiledPauliSum(const PauliSum& h, std::size_t memory_limit_bytes = std::size_t{1} << 30);

  int n_qubits() const { return n_qubits_; }
  std::size_t dim() const { return std::size_t{1} << n_qubits_; }

  /// out = H in. `out` is resized as needed and must not alias `in`.
  void apply(const StateVector& in, StateVector& out) const;
  StateVector apply(const StateVector& in) const;

  cplx matrix_element(const StateVector& a, const StateVector& b) const;

 private:
  struct Term {
    std::uint64_t z;
    cplx coef;  // alpha * i^{|x & z|}
  };
  struct Group {
    std::uint64_t x = 0;
    std::vector<Term> terms;
    std::vector<double> re;  // precomputed diagonal, empty when not cached
    std::vector<double> im;  // empty when every phase is real
  };

  int n_qubits_ = 0;
  std::vector<Group> groups_;
};

/// Dense 2^n x 2^n matrix of a PauliSum. Intended for oracles on small systems.
Eigen::MatrixXcd dense_matrix(const PauliSum& h);
Eigen::MatrixXcd dense_matrix(const PauliWord& p);

}  // namespace qksd
