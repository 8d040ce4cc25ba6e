#include "qksd/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

#include "qksd/errors.hpp"
#include "qksd/jordan_wigner.hpp"
#include "qksd/parallel.hpp"

namespace qksd {

std::string to_string(ShiftKind s) {
  switch (s) {
    case ShiftKind::None: return "none";
    case ShiftKind::ClosedForm: return "closed-form";
    case ShiftKind::Refined: return "refined";
  }
  return "none";
}

std::string to_string(IcsKind s) {
  switch (s) {
    case IcsKind::Off: return "off";
    case IcsKind::Cisd: return "cisd";
    case IcsKind::TrueState: return "true-state";
  }
  return "off";
}

ShiftKind shift_kind_from_string(const std::string& s) {
  if (s == "none") return ShiftKind::None;
  if (s == "closed-form") return ShiftKind::ClosedForm;
  if (s == "refined") return ShiftKind::Refined;
  throw ConfigError("unknown shift '" + s + "' (expected none, closed-form or refined)");
}

IcsKind ics_kind_from_string(const std::string& s) {
  if (s == "off") return IcsKind::Off;
  if (s == "cisd") return IcsKind::Cisd;
  if (s == "true-state") return IcsKind::TrueState;
  throw ConfigError("unknown ics '" + s + "' (expected off, cisd or true-state)");
}

std::string to_string(DtPolicy p) { return p == DtPolicy::FirstGap ? "gap" : "range"; }

DtPolicy dt_policy_from_string(const std::string& s) {
  if (s == "gap") return DtPolicy::FirstGap;
  if (s == "range") return DtPolicy::SpectralRange;
  throw ConfigError("unknown dt policy '" + s + "' (expected gap or range)");
}

Problem make_problem(std::string name, const IntegralSet& ints, const ProblemOptions& opt) {
  Problem p;
  p.name = std::move(name);
  p.ints = ints;
  p.fermion = build_fermionic_hamiltonian(ints);
  p.ref = hf_reference(ints);
  p.h = jordan_wigner(p.fermion);
  const int nq = ints.n_orb();
  p.n = opt.n.value_or(nq + 1);
  if (p.n < 1) throw ConfigError("Krylov order must be at least 1");
  const SectorSpectrum spec = sector_spectrum(p.h, p.ref);
  p.e_fci = spec.e0;
  p.gap = spec.gap;
  p.spectral_range = spec.eigenvalues[spec.eigenvalues.size() - 1] - spec.e0;
  if (opt.dt) {
    if (!(*opt.dt > 0.0) || !std::isfinite(*opt.dt)) throw ConfigError("time step must be positive");
    p.dt = *opt.dt;
  } else {
    if (nq > kMaxAutoGapQubits)
      throw ConfigError("automatic time step needs at most " + std::to_string(kMaxAutoGapQubits) +
                        " qubits; pass --dt");
    const double width = opt.dt_policy == DtPolicy::FirstGap ? p.gap : p.spectral_range;
    if (!(width > 0.0)) throw InfeasibleError("sector has a single level; no gap to set the time step");
    p.dt = std::numbers::pi / width;
  }
  return p;
}

Problem load_problem(const std::filesystem::path& fcidump, const ProblemOptions& opt) {
  return make_problem(fcidump.stem().string(), load_fcidump(fcidump), opt);
}

std::vector<StateVector> krylov_basis(const Problem& p, const EvolveOptions& opt) {
  return krylov_states(p.h, reference_state(p.ref), p.dt, p.n, opt);
}

MeasuredOperator measured_operator(const Problem& p, ShiftKind s, GroupingMode mode, const RefineOptions& refine) {
  MeasuredOperator m;
  if (s == ShiftKind::None) {
    m.op = p.h;
    m.shift = zero_shift(p.ref);
    return m;
  }
  m.shift = closed_form_shift(p.fermion, p.ref);
  if (s == ShiftKind::Refined) m.shift = refine_shift(p.fermion, m.shift, mode, refine);
  m.op = jordan_wigner(apply_shift(p.fermion, m.shift));
  m.t = m.shift.t;
  return m;
}

double MeasurementPlan::mean_cost() const {
  if (cost.empty()) return 0.0;
  double s = 0.0;
  for (double c : cost) s += c;
  return s / static_cast<double>(cost.size());
}

MeasurementPlan plan_measurement(const Problem& p, const std::vector<StateVector>& states, GroupingMode mode,
                                 ShiftKind shift, IcsKind ics, const PlanOptions& opt) {
  if (mode == GroupingMode::TERMWISE) throw ConfigError("measurement plans need lcu or fh grouping");
  if (states.empty()) throw DimensionError("no Krylov states");
  MeasurementPlan plan;
  plan.mode = mode;
  plan.shift = shift;
  plan.ics = ics;
  plan.op = measured_operator(p, shift, mode, opt.refine);
  const FragmentSet fs = sorted_insertion(plan.op.op, mode);
  plan.scalar = fs.identity + plan.op.t;

  std::optional<SplitProblem> sp;
  std::optional<CisdResult> cisd;
  if (ics != IcsKind::Off && !fs.groups.empty()) sp = extend_groups(fs);
  if (sp && ics == IcsKind::Cisd) cisd = cisd_ground_state(p.h, p.ref);

  std::vector<double> norms;
  for (const auto& g : fs.groups) norms.push_back(g.norm());

  const StateVector& phi0 = states[0];
  plan.elements.resize(states.size());
  plan.cost.resize(states.size());
  for (std::size_t k = 0; k < states.size(); ++k) {
    ElementPlan& el = plan.elements[k];
    const bool drop_imag = opt.drop_k0_imaginary && k == 0;
    if (fs.groups.empty()) {
      el.fragments = fs;
      el.exact.mode = mode;
      plan.cost[k] = 0.0;
      continue;
    }
    if (!sp) {
      el.fragments = fs;
      el.exact = fragment_variances(fs, phi0, states[k]);
      if (drop_imag)
        for (auto& v : el.exact.variance) v[1] = 0.0;
      el.allocation = allocate_shots(el.exact, opt.allocation, norms);
      if (drop_imag) {
        double total = 0.0;
        for (auto& m : el.allocation.m) total += (m[1] = 0.0, m[0]);
        if (total > 0.0)
          for (auto& m : el.allocation.m) m[0] /= total;
      }
    } else {
      CovarianceSet cs;
      if (ics == IcsKind::TrueState) {
        cs = build_group_covariances(*sp, phi0, states[k]);
      } else {
        const ProxyPair proxy = cisd_proxy_pair(*cisd, p.ref, static_cast<int>(k), p.dt);
        cs = build_group_covariances(*sp, proxy.phi0, proxy.phik);
      }
      if (drop_imag)
        for (auto& c : cs.cov) c[1].setZero();
      SplitSolution sol = ics_optimize(*sp, cs, opt.ics);
      el.fragments = split_fragments(*sp, sol.alpha);
      el.exact = fragment_variances(el.fragments, phi0, states[k]);
      if (drop_imag)
        for (auto& v : el.exact.variance) v[1] = 0.0;
      el.allocation = sol.m;
      el.ics_trace = std::move(sol.objective_trace);
    }
    plan.cost[k] = cost_times_shots(el.exact, el.allocation);
  }
  return plan;
}

std::vector<CostRow> cost_table(const Problem& p, const std::vector<StateVector>& states, GroupingMode mode,
                                const PlanOptions& opt) {
  struct Method {
    const char* name;
    ShiftKind shift;
    IcsKind ics;
  };
  static constexpr Method methods[] = {
      {"SI", ShiftKind::None, IcsKind::Off},
      {"ICS(True)", ShiftKind::None, IcsKind::TrueState},
      {"ICS(CISD)", ShiftKind::None, IcsKind::Cisd},
      {"Shift", ShiftKind::ClosedForm, IcsKind::Off},
      {"Shift+ICS", ShiftKind::ClosedForm, IcsKind::Cisd},
  };
  std::vector<CostRow> rows;
  for (const Method& m : methods) {
    const MeasurementPlan plan = plan_measurement(p, states, mode, m.shift, m.ics, opt);
    rows.push_back({m.name, plan.mean_cost(), plan.cost});
  }
  return rows;
}

KrylovEnsemble exact_ensemble(const Problem& p, const std::vector<StateVector>& states,
                              const MeasurementPlan& plan) {
  const FirstRow row = exact_first_row(plan.op.op.without_identity(), states);
  KrylovEnsemble e;
  e.n = static_cast<int>(states.size());
  e.dt = p.dt;
  e.s_row = row.s;
  e.h_row = row.h;
  e.s_row[0] = 1.0;
  e.h_row[0] = e.h_row[0].real();
  e.t_shift = plan.scalar;
  e.shots = std::numeric_limits<double>::infinity();
  return e;
}

namespace {

// Threshold for exact rows: only numerically null overlap directions go.
constexpr double kExactThreshold = 1e-12;

enum StreamKind : std::uint64_t { kHamiltonianRow = 0, kOverlapRow = 1 };

}  // namespace

SimulationResult simulate(const Problem& p, const std::vector<StateVector>& states, const MeasurementPlan& plan,
                          const SimulationConfig& cfg) {
  if (plan.elements.size() != states.size()) throw DimensionError("plan does not match the Krylov states");
  const bool exact = std::isinf(cfg.shots);
  if (!exact && !(cfg.shots >= static_cast<double>(states.size())))
    throw ConfigError("shot budget must be at least the Krylov order");
  if (cfg.trials < 1) throw ConfigError("need at least one trial");

  const KrylovEnsemble base = exact_ensemble(p, states, plan);
  SimulationResult result;
  result.threshold = exact ? kExactThreshold : default_threshold(base.n, cfg.shots, cfg.threshold_c);
  const int trials = exact ? 1 : cfg.trials;
  result.trials.resize(static_cast<std::size_t>(trials));

  parallel_for(static_cast<std::size_t>(trials), [&](std::size_t trial) {
    KrylovEnsemble e = base;
    e.seed = cfg.seed;
    e.shots = cfg.shots;
    if (!exact) {
      e.noise = "gaussian";
      for (std::size_t k = 0; k < states.size(); ++k) {
        ShotAllocation alloc = plan.elements[k].allocation;
        alloc.shots = cfg.shots;
        e.h_row[k] =
            sample_matrix_element(plan.elements[k].exact, alloc, stream_seed(cfg.seed, {trial, k, kHamiltonianRow}));
        if (k == 0) {
          e.h_row[0] = e.h_row[0].real();
          continue;
        }
        // overlap measured with half the budget on each part
        std::mt19937_64 rng(stream_seed(cfg.seed, {trial, k, kOverlapRow}));
        std::normal_distribution<double> nd;
        const cplx s = base.s_row[k];
        const double sd_r = std::sqrt(std::max(0.0, 1.0 - s.real() * s.real()) / (0.5 * cfg.shots));
        const double sd_i = std::sqrt(std::max(0.0, 1.0 - s.imag() * s.imag()) / (0.5 * cfg.shots));
        const double nr = nd(rng);
        const double ni = nd(rng);
        e.s_row[k] = {s.real() + sd_r * nr, s.imag() + sd_i * ni};
      }
    }
    const GevpResult g = solve_ensemble(e, result.threshold);
    TrialResult& t = result.trials[trial];
    t.energy = g.eigenvalues[0];
    t.error_mha = 1e3 * (t.energy - p.e_fci);
    t.kept = g.kept;
  });
  return result;
}

double quantile(std::vector<double> v, double q) {
  if (v.empty()) throw InfeasibleError("quantile of an empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw ConfigError("quantile outside [0, 1]");
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

std::string histogram_csv(const std::vector<double>& errors_mha, double bin_width) {
  if (!(bin_width > 0.0)) throw ConfigError("histogram bin width must be positive");
  std::map<long long, int> bins;
  for (double e : errors_mha) ++bins[std::llround(e / bin_width)];
  std::string out = "error_mHa,count\n";
  char buf[64];
  for (const auto& [b, c] : bins) {
    std::snprintf(buf, sizeof buf, "%.6f,%d\n", static_cast<double>(b) * bin_width, c);
    out += buf;
  }
  return out;
}

std::string trials_csv(const SimulationResult& r) {
  std::string out = "trial,error_mHa,kept\n";
  char buf[96];
  for (std::size_t i = 0; i < r.trials.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%zu,%.12e,%d\n", i, r.trials[i].error_mha, r.trials[i].kept);
    out += buf;
  }
  return out;
}

}  // namespace qksd
