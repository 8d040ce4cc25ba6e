#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "qksd/grouping.hpp"
#include "qksd/statevector.hpp"

namespace qksd {

struct EvolveOptions {
  double tol = 1e-10;
  /// Lanczos iterations allowed for one accepted substep (retries included).
  int iteration_cap = 200;
  int max_krylov_dim = 40;
};

/// exp(-i h t)|psi> by Lanczos with full reorthogonalization and adaptive
/// substeps. Throws NumericalError when a substep cannot meet the tolerance
/// within the iteration cap.
StateVector evolve(const CompiledPauliSum& h, const StateVector& psi, double t,
                   const EvolveOptions& opt = {});
StateVector evolve(const PauliSum& h, const StateVector& psi, double t, const EvolveOptions& opt = {});

/// [phi0, B phi0, ..., B^{n-1} phi0] with B = exp(-i h dt).
std::vector<StateVector> krylov_states(const CompiledPauliSum& h, const StateVector& phi0, double dt,
                                       int n, const EvolveOptions& opt = {});
std::vector<StateVector> krylov_states(const PauliSum& h, const StateVector& phi0, double dt, int n,
                                       const EvolveOptions& opt = {});

struct FirstRow {
  std::vector<cplx> s;  // <phi0|phi_k>
  std::vector<cplx> h;  // <phi0|H|phi_k>
};

FirstRow exact_first_row(const CompiledPauliSum& h, const std::vector<StateVector>& states);
FirstRow exact_first_row(const PauliSum& h, const std::vector<StateVector>& states);

enum class Part { R = 0, I = 1 };

/// Exact per-fragment estimator moments for one matrix element <phi0|N_j|phi_k>.
struct VarianceTable {
  GroupingMode mode = GroupingMode::FH;
  std::vector<cplx> amplitude;                 // <phi0|N_j|phi_k>
  std::vector<std::array<double, 2>> variance;  // [R, I]

  std::size_t size() const { return amplitude.size(); }
  cplx total_amplitude() const;
};

/// Hadamard-test variances beta_j^2 (1 - part(<phi0|U_j|phi_k>)^2) with U_j = N_j / beta_j.
/// Zero-norm groups get zero variance.
VarianceTable lcu_variances(const FragmentSet& fs, const StateVector& phi0, const StateVector& phik);

/// Extended-swap-test variances: 1/2(<phi0|H_j^2|phi0> + <phi_k|H_j^2|phi_k>) - part(<phi0|H_j|phi_k>)^2.
VarianceTable fh_variances(const FragmentSet& fs, const StateVector& phi0, const StateVector& phik);

/// Dispatches on fs.mode.
VarianceTable fragment_variances(const FragmentSet& fs, const StateVector& phi0, const StateVector& phik);

/// (1/M)((1 - Re^2)/mR + (1 - Im^2)/mI).
double overlap_variance(cplx s0k, double m_r, double m_i, double shots);

/// Shot fractions m[j][X] summing to one, plus the total budget M.
struct ShotAllocation {
  std::vector<std::array<double, 2>> m;
  double shots = 0.0;
};

enum class AllocationStrategy { Optimal, Subopt, Uniform };

/// Optimal: m ~ sqrt(Var). Subopt: m ~ group norm with an even R/I split.
/// Uniform: equal fractions. All-zero optimal weights fall back to uniform.
ShotAllocation allocate_shots(const VarianceTable& vt, AllocationStrategy s,
                              const std::vector<double>& group_norms = {});

/// sum_jX Var_jX / m_jX, i.e. M times the estimator variance. Entries with
/// zero variance are skipped; a zero fraction on a nonzero variance raises
/// InfeasibleError naming the fragment.
double cost_times_shots(const VarianceTable& vt, const ShotAllocation& alloc);

struct HaarCost {
  double v_times_m = 0.0;  // 2 |zeta|^2 (2 - 1/d)
  double m_eps2 = 0.0;     // 4 |zeta|^2
};

HaarCost haar_expected_cost(const FragmentSet& fs, double d);

/// Deterministic 64-bit stream seed from a master seed and stream labels.
std::uint64_t stream_seed(std::uint64_t master, std::initializer_list<std::uint64_t> labels);

enum class NoiseMode { Gaussian, Projective };

/// Gaussian moment-matched estimate sum_j (R_j + i I_j). Each (j, X) draws
/// from its own stream seeded by (seed, j, X).
cplx sample_matrix_element(const VarianceTable& vt, const ShotAllocation& alloc, std::uint64_t seed);

/// Exact projective sampling of the Hadamard / extended swap test on an
/// ancilla-extended statevector. Outcome distributions of each fragment come
/// from sequential projections onto the eigenspaces of the measured words.
/// If `shot_variance` is given it receives the per-shot sample variance of
/// every (j, X).
cplx sample_matrix_element_projective(const FragmentSet& fs, const StateVector& phi0,
                                      const StateVector& phik, const ShotAllocation& alloc,
                                      std::uint64_t seed,
                                      std::vector<std::array<double, 2>>* shot_variance = nullptr);

/// Estimator value -> probability for one fragment and part, used by the
/// projective sampler and exposed for tests.
struct OutcomeDistribution {
  std::vector<double> values;
  std::vector<double> probabilities;
  double mean() const;
  double variance() const;
};

OutcomeDistribution hadamard_test_distribution(const PauliFragment& g, int n_qubits,
                                               const StateVector& phi0, const StateVector& phik,
                                               Part part);
OutcomeDistribution swap_test_distribution(const PauliFragment& g, int n_qubits,
                                           const StateVector& phi0, const StateVector& phik,
                                           Part part);

}  // namespace qksd
