#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "qksd/gevp.hpp"
#include "qksd/ics.hpp"
#include "qksd/shift.hpp"
#include "qksd/sim.hpp"

namespace qksd {

enum class ShiftKind { None, ClosedForm, Refined };
enum class IcsKind { Off, Cisd, TrueState };

std::string to_string(ShiftKind s);
std::string to_string(IcsKind s);
ShiftKind shift_kind_from_string(const std::string& s);
IcsKind ics_kind_from_string(const std::string& s);

/// How dt is chosen when not given explicitly: pi over the first gap above
/// the ground level, or pi over the full width of the sector spectrum.
enum class DtPolicy { FirstGap, SpectralRange };

std::string to_string(DtPolicy p);
DtPolicy dt_policy_from_string(const std::string& s);

/// A molecule ready for Krylov experiments: integrals, mapped Hamiltonian,
/// reference, dense-sector ground energy and Krylov settings.
struct Problem {
  std::string name;
  IntegralSet ints;
  FermionSum fermion;
  Occupation ref;
  PauliSum h;
  double e_fci = 0.0;
  double gap = 0.0;
  double spectral_range = 0.0;
  int n = 0;
  double dt = 0.0;
};

/// Largest qubit count for which the dense sector gap is computed.
inline constexpr int kMaxAutoGapQubits = 14;

struct ProblemOptions {
  /// Defaults to N_q + 1.
  std::optional<int> n;
  /// Overrides the policy when set.
  std::optional<double> dt;
  DtPolicy dt_policy = DtPolicy::FirstGap;
};

Problem load_problem(const std::filesystem::path& fcidump, const ProblemOptions& opt = {});
Problem make_problem(std::string name, const IntegralSet& ints, const ProblemOptions& opt = {});

/// [phi0, ..., phi_{n-1}] for the problem's reference, dt and order.
std::vector<StateVector> krylov_basis(const Problem& p, const EvolveOptions& opt = {});

/// The operator whose first row is measured: H or H - T, with t restored later.
struct MeasuredOperator {
  PauliSum op;
  ShiftParams shift;
  double t = 0.0;
};

MeasuredOperator measured_operator(const Problem& p, ShiftKind s, GroupingMode mode,
                                   const RefineOptions& refine = {});

/// Everything needed to estimate <phi0|N|phi_k> for one k: the (possibly
/// split) fragments, the shot fractions and the exact fragment moments on
/// the true Krylov states.
struct ElementPlan {
  FragmentSet fragments;
  ShotAllocation allocation;
  VarianceTable exact;
  std::vector<double> ics_trace;
};

struct MeasurementPlan {
  GroupingMode mode = GroupingMode::FH;
  ShiftKind shift = ShiftKind::None;
  IcsKind ics = IcsKind::Off;
  MeasuredOperator op;
  std::vector<ElementPlan> elements;
  /// Identity coefficient of the measured operator plus t.
  double scalar = 0.0;
  /// M epsilon^2 per element and its average over k.
  std::vector<double> cost;
  double mean_cost() const;
};

struct PlanOptions {
  IcsOptions ics;
  RefineOptions refine;
  /// Shot fractions when ICS is off; ICS supplies its own.
  AllocationStrategy allocation = AllocationStrategy::Subopt;
  /// Skip the imaginary part of the k = 0 element, which is known to vanish.
  bool drop_k0_imaginary = false;
};

MeasurementPlan plan_measurement(const Problem& p, const std::vector<StateVector>& states, GroupingMode mode,
                                 ShiftKind shift, IcsKind ics, const PlanOptions& opt = {});

struct CostRow {
  std::string method;
  double cost = 0.0;
  std::vector<double> per_k;
};

/// SI, ICS(True), ICS(CISD), Shift and Shift+ICS rows for one grouping mode.
std::vector<CostRow> cost_table(const Problem& p, const std::vector<StateVector>& states, GroupingMode mode,
                                const PlanOptions& opt = {});

struct SimulationConfig {
  /// Shots per first-row element of H and of S; infinity means exact rows.
  double shots = 1e8;
  int trials = 200;
  std::uint64_t seed = 1;
  double threshold_c = 1.0;
};

struct TrialResult {
  double energy = 0.0;
  double error_mha = 0.0;
  int kept = 0;
};

struct SimulationResult {
  std::vector<TrialResult> trials;
  double threshold = 0.0;
};

/// Noisy first rows per trial (Gaussian moment matching), thresholded GEVP,
/// lowest eigenvalue compared to the sector ground energy.
SimulationResult simulate(const Problem& p, const std::vector<StateVector>& states, const MeasurementPlan& plan,
                          const SimulationConfig& cfg);

/// Exact first rows of the plan's measured operator and S at the true states.
KrylovEnsemble exact_ensemble(const Problem& p, const std::vector<StateVector>& states,
                              const MeasurementPlan& plan);

/// Empirical quantile with linear interpolation, q in [0, 1].
double quantile(std::vector<double> v, double q);

/// (bin centre in mHa, count) rows with the given bin width.
std::string histogram_csv(const std::vector<double>& errors_mha, double bin_width);
std::string trials_csv(const SimulationResult& r);

}  // namespace qksd
