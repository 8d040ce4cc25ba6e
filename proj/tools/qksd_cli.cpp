#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "qksd/errors.hpp"
#include "qksd/experiment.hpp"
#include "qksd/jordan_wigner.hpp"
#include "qksd/serialize.hpp"

using namespace qksd;

namespace {

enum ExitCode { kOk = 0, kOther = 1, kConfig = 2, kInput = 3, kNumerical = 4 };

struct Config {
  std::string command;
  std::string input;
  std::string mode = "fh";
  std::string shift = "none";
  std::string ics = "off";
  int order = 0;
  std::string dt = "gap";
  std::string shots = "1e8";
  int trials = 200;
  std::uint64_t seed = 1;
  double threshold_c = 1.0;
  std::string out;

  std::string canonical() const {
    std::ostringstream os;
    os << command << "|mode=" << mode << "|shift=" << shift << "|ics=" << ics << "|order=" << order << "|dt=" << dt
       << "|shots=" << shots << "|trials=" << trials << "|seed=" << seed << "|threshold_c=" << threshold_c;
    return os.str();
  }
};

double parse_shots(const std::string& s) {
  if (s == "inf" || s == "infinity") return std::numeric_limits<double>::infinity();
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size() || !(v >= 1.0)) throw ConfigError("");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("--shots must be a number >= 1 or 'inf', got '" + s + "'");
  }
}

ProblemOptions problem_options(const Config& c) {
  ProblemOptions o;
  if (c.order > 0) o.n = c.order;
  if (c.dt == "gap" || c.dt == "range") {
    o.dt_policy = dt_policy_from_string(c.dt);
  } else {
    try {
      std::size_t pos = 0;
      o.dt = std::stod(c.dt, &pos);
      if (pos != c.dt.size()) throw ConfigError("");
    } catch (const std::exception&) {
      throw ConfigError("--dt must be 'gap', 'range' or a positive number, got '" + c.dt + "'");
    }
  }
  return o;
}

GroupingMode pauli_mode(const Config& c) {
  const GroupingMode m = grouping_mode_from_string(c.mode);
  if (m == GroupingMode::TERMWISE) throw ConfigError("--mode termwise is only available for decompose and shift");
  return m;
}

Json meta(const Config& c) {
  Json j;
  j["version"] = kLibraryVersion;
  j["command"] = c.command;
  j["config_hash"] = hex64(fnv1a64(c.canonical()));
  j["fixture_hash"] = file_hash(c.input);
  j["config"] = c.canonical();
  return j;
}

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw ParseError("cannot write '" + p.string() + "'");
  f << text;
}

/// Writes `name` into the output directory, or to stdout when there is none.
void emit(const Config& c, const std::string& name, const std::string& text, bool to_stdout) {
  if (!c.out.empty()) {
    std::filesystem::create_directories(c.out);
    write_file(std::filesystem::path(c.out) / name, text);
  }
  if (to_stdout) std::cout << text;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

Json reduction(double raw, double shifted) {
  if (raw == 0.0) return "n/a";
  return 100.0 * (1.0 - shifted / raw);
}

struct Decomposition {
  FragmentSet raw;
  FragmentSet shifted;
  ShiftParams shift;
};

Decomposition decompose(const IntegralSet& ints, GroupingMode mode, ShiftKind kind) {
  const FermionSum f = build_fermionic_hamiltonian(ints);
  const Occupation ref = hf_reference(ints);
  Decomposition d;
  d.shift = zero_shift(ref);
  if (kind != ShiftKind::None) {
    d.shift = closed_form_shift(f, ref);
    if (kind == ShiftKind::Refined) d.shift = refine_shift(f, d.shift, mode);
  }
  const FermionSum g = apply_shift(f, d.shift);
  if (mode == GroupingMode::TERMWISE) {
    d.raw = termwise_fermionic_grouping(f);
    d.shifted = termwise_fermionic_grouping(g);
  } else {
    d.raw = sorted_insertion(jordan_wigner(f), mode);
    d.shifted = sorted_insertion(jordan_wigner(g), mode);
  }
  return d;
}

int cmd_decompose(const Config& c) {
  const GroupingMode mode = grouping_mode_from_string(c.mode);
  const ShiftKind kind = shift_kind_from_string(c.shift);
  const Decomposition d = decompose(load_fcidump(c.input), mode, kind);
  const double raw = decomposition_norm(d.raw);
  const double shifted = decomposition_norm(d.shifted);
  Json j;
  j["kind"] = "decomposition";
  j["meta"] = meta(c);
  j["mode"] = c.mode;
  j["shift"] = c.shift;
  j["raw_norm"] = raw;
  j["shifted_norm"] = shifted;
  j["reduction_percent"] = reduction(raw, shifted);
  j["raw_groups"] = d.raw.size();
  j["shifted_groups"] = d.shifted.size();
  j["t"] = d.shift.t;
  emit(c, "decompose.json", dump(j), true);
  if (!c.out.empty()) {
    Json fr = to_json(d.raw);
    fr["kind"] = "fragments";
    Json fs = to_json(d.shifted);
    fs["kind"] = "fragments";
    emit(c, "fragments.json", dump(fr), false);
    emit(c, "fragments_shifted.json", dump(fs), false);
  }
  return kOk;
}

int cmd_shift(const Config& c) {
  const GroupingMode mode = grouping_mode_from_string(c.mode);
  ShiftKind kind = shift_kind_from_string(c.shift);
  if (kind == ShiftKind::None) kind = ShiftKind::ClosedForm;
  const IntegralSet ints = load_fcidump(c.input);
  const Decomposition d = decompose(ints, mode, kind);
  Json j;
  j["kind"] = "shift";
  j["meta"] = meta(c);
  j["shift"] = to_string(kind);
  j["params"] = to_json(d.shift);
  j["annihilation_residual"] = annihilation_check(d.shift, hf_reference(ints), ints.n_orb());
  j["raw_norm"] = decomposition_norm(d.raw);
  j["shifted_norm"] = decomposition_norm(d.shifted);
  j["reduction_percent"] = reduction(decomposition_norm(d.raw), decomposition_norm(d.shifted));
  emit(c, "shift.json", dump(j), true);
  return kOk;
}

int cmd_ics(const Config& c) {
  const GroupingMode mode = pauli_mode(c);
  IcsKind ics = ics_kind_from_string(c.ics);
  if (ics == IcsKind::Off) ics = IcsKind::Cisd;
  const ShiftKind shift = shift_kind_from_string(c.shift);
  const Problem p = load_problem(c.input, problem_options(c));
  const auto states = krylov_basis(p);
  const MeasurementPlan base = plan_measurement(p, states, mode, shift, IcsKind::Off);
  const MeasurementPlan plan = plan_measurement(p, states, mode, shift, ics);

  Json j;
  j["kind"] = "ics";
  j["meta"] = meta(c);
  j["mode"] = c.mode;
  j["shift"] = to_string(shift);
  j["proxy"] = to_string(ics);
  if (ics == IcsKind::Cisd) {
    const CisdResult cisd = cisd_ground_state(p.h, p.ref);
    j["e_cisd"] = cisd.energy;
    j["hf_overlap"] = std::abs(cisd.state[static_cast<Eigen::Index>(p.ref.mask())]);
  }
  Json elements = Json::array();
  for (std::size_t k = 0; k < states.size(); ++k) {
    const auto& el = plan.elements[k];
    const double predicted = el.ics_trace.back();
    const double baseline = el.ics_trace.front();
    Json e;
    e["k"] = k;
    e["si_cost"] = base.cost[k];
    e["ics_cost"] = plan.cost[k];
    e["predicted"] = predicted;
    e["predicted_baseline"] = baseline;
    e["decision"] = plan.cost[k] <= base.cost[k] ? "ics" : "si";
    e["objective_trace"] = el.ics_trace;
    e["allocation"] = to_json(el.allocation);
    e["fragments"] = el.fragments.size();
    elements.push_back(std::move(e));
  }
  j["elements"] = std::move(elements);
  j["si_mean_cost"] = base.mean_cost();
  j["ics_mean_cost"] = plan.mean_cost();
  if (mode == GroupingMode::LCU) j["advisory"] = "LCU splitting is advisory; the lower of the two costs is kept";
  emit(c, "ics.json", dump(j), true);
  return kOk;
}

int cmd_cost(const Config& c) {
  const GroupingMode mode = pauli_mode(c);
  const Problem p = load_problem(c.input, problem_options(c));
  const auto states = krylov_basis(p);
  const auto rows = cost_table(p, states, mode);
  std::ostringstream csv;
  csv << "method,cost";
  for (std::size_t k = 0; k < states.size(); ++k) csv << ",k" << k;
  csv << "\n";
  char buf[64];
  Json j;
  j["kind"] = "cost";
  j["meta"] = meta(c);
  j["mode"] = c.mode;
  j["n"] = p.n;
  j["dt"] = p.dt;
  Json jr = Json::array();
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%.10g", r.cost);
    csv << r.method << "," << buf;
    for (double v : r.per_k) {
      std::snprintf(buf, sizeof buf, ",%.10g", v);
      csv << buf;
    }
    csv << "\n";
    jr.push_back({{"method", r.method}, {"cost", r.cost}, {"per_k", r.per_k}});
  }
  j["rows"] = std::move(jr);
  emit(c, "cost.csv", csv.str(), true);
  emit(c, "cost.json", dump(j), false);
  return kOk;
}

int cmd_simulate(const Config& c) {
  const GroupingMode mode = pauli_mode(c);
  const ShiftKind shift = shift_kind_from_string(c.shift);
  const IcsKind ics = ics_kind_from_string(c.ics);
  SimulationConfig sc;
  sc.shots = parse_shots(c.shots);
  sc.trials = c.trials;
  sc.seed = c.seed;
  sc.threshold_c = c.threshold_c;
  if (!(sc.threshold_c > 0.0)) throw ConfigError("--threshold-c must be positive");
  const Problem p = load_problem(c.input, problem_options(c));
  if (!std::isinf(sc.shots) && sc.shots < p.n) throw ConfigError("--shots must be at least the Krylov order");
  const auto states = krylov_basis(p);
  PlanOptions po;
  po.drop_k0_imaginary = true;
  const MeasurementPlan plan = plan_measurement(p, states, mode, shift, ics, po);
  const SimulationResult r = simulate(p, states, plan, sc);

  std::vector<double> errors;
  std::map<int, int> kept;
  int within = 0;
  for (const auto& t : r.trials) {
    errors.push_back(t.error_mha);
    ++kept[t.kept];
    if (std::abs(t.error_mha) <= 1.6) ++within;
  }
  Json j;
  j["kind"] = "simulation";
  j["meta"] = meta(c);
  j["n"] = p.n;
  j["dt"] = p.dt;
  j["e_fci"] = p.e_fci;
  j["threshold"] = r.threshold;
  j["mean_cost"] = plan.mean_cost();
  j["trials"] = r.trials.size();
  Json q;
  for (double x : {0.05, 0.25, 0.5, 0.75, 0.95}) q[std::to_string(static_cast<int>(std::lround(100 * x)))] = quantile(errors, x);
  j["quantiles_mHa"] = q;
  j["iqr_mHa"] = quantile(errors, 0.75) - quantile(errors, 0.25);
  j["within_chemical_accuracy"] = static_cast<double>(within) / static_cast<double>(errors.size());
  Json jk;
  for (const auto& [n, cnt] : kept) jk[std::to_string(n)] = cnt;
  j["kept_counts"] = jk;
  const std::string csv = trials_csv(r);
  emit(c, "trials.csv", csv, c.out.empty());
  emit(c, "histogram.csv", histogram_csv(errors, 0.1), false);
  emit(c, "summary.json", dump(j), !c.out.empty());
  return kOk;
}

int cmd_report(const Config& c) {
  std::ifstream in(c.input);
  if (!in) throw ParseError("cannot open '" + c.input + "'");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("not a JSON artifact: ") + e.what());
  }
  const std::string kind = j.value("kind", j.contains("groups") ? "fragments" : "unknown");
  std::ostringstream os;
  os << "kind: " << kind << "\n";
  if (kind == "fragments") {
    const FragmentSet fs = fragment_set_from_json(j);
    std::size_t terms = 0, largest = 0;
    for (const auto& g : fs.groups) {
      terms += g.terms.size();
      largest = std::max(largest, g.terms.size());
    }
    const std::size_t n_groups = fs.mode == GroupingMode::TERMWISE ? fs.fermion_groups.size() : fs.groups.size();
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", decomposition_norm(fs));
    os << "mode: " << to_string(fs.mode) << "\nqubits: " << fs.n_qubits << "\ngroups: " << n_groups
       << "\nterms: " << terms << "\nlargest group: " << largest << "\nnorm: " << buf << "\n";
  } else {
    for (const auto& [key, value] : j.items()) {
      if (key != "kind" && value.is_primitive()) os << key << ": " << value.dump() << "\n";
    }
  }
  std::cout << os.str();
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sampling-cost analysis for quantum Krylov subspace diagonalization"};
  app.require_subcommand(1);
  Config cfg;

  auto add_common = [&](CLI::App* sub, bool krylov) {
    sub->add_option("--input", cfg.input, "FCIDUMP file")->required();
    sub->add_option("--mode", cfg.mode, "Grouping mode: lcu, fh or termwise")->capture_default_str();
    sub->add_option("--out", cfg.out, "Output directory");
    if (krylov) {
      sub->add_option("--order", cfg.order, "Krylov order n (default: qubits + 1)");
      sub->add_option("--dt", cfg.dt, "Time step: gap, range or a number")->capture_default_str();
    }
  };

  auto* dec = app.add_subcommand("decompose", "Decomposition norms with and without shift");
  add_common(dec, false);
  dec->add_option("--shift", cfg.shift, "none, closed-form or refined")->default_str("closed-form");
  auto* sh = app.add_subcommand("shift", "Shift parameters and norm reduction");
  add_common(sh, false);
  sh->add_option("--shift", cfg.shift, "closed-form or refined")->default_str("closed-form");
  auto* ic = app.add_subcommand("ics", "Iterative coefficient splitting per Krylov element");
  add_common(ic, true);
  ic->add_option("--shift", cfg.shift, "none, closed-form or refined")->capture_default_str();
  ic->add_option("--ics", cfg.ics, "cisd or true-state")->default_str("cisd");
  auto* co = app.add_subcommand("cost", "Measurement cost table");
  add_common(co, true);
  auto* si = app.add_subcommand("simulate", "Seeded noisy Krylov trials");
  add_common(si, true);
  si->add_option("--shift", cfg.shift, "none, closed-form or refined")->capture_default_str();
  si->add_option("--ics", cfg.ics, "off, cisd or true-state")->capture_default_str();
  si->add_option("--shots", cfg.shots, "Shots per matrix element, or inf")->capture_default_str();
  si->add_option("--trials", cfg.trials, "Number of trials")->capture_default_str()->check(CLI::PositiveNumber);
  si->add_option("--seed", cfg.seed, "Master seed")->capture_default_str();
  si->add_option("--threshold-c", cfg.threshold_c, "Threshold constant c")->capture_default_str();
  auto* re = app.add_subcommand("report", "Summarize a JSON artifact");
  re->add_option("--input", cfg.input, "Artifact JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfig;
  }

  cfg.command = app.get_subcommands().front()->get_name();
  if (cfg.command == "decompose" && dec->count("--shift") == 0) cfg.shift = "closed-form";
  if (cfg.command == "shift" && sh->count("--shift") == 0) cfg.shift = "closed-form";
  if (cfg.command == "ics" && ic->count("--ics") == 0) cfg.ics = "cisd";

  try {
    if (cfg.command == "decompose") return cmd_decompose(cfg);
    if (cfg.command == "shift") return cmd_shift(cfg);
    if (cfg.command == "ics") return cmd_ics(cfg);
    if (cfg.command == "cost") return cmd_cost(cfg);
    if (cfg.command == "simulate") return cmd_simulate(cfg);
    return cmd_report(cfg);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const ParseError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kInput;
  } catch (const DimensionError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kInput;
  } catch (const IndexError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kInput;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kInput;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumerical;
  } catch (const InfeasibleError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kOther;
  }
}
