#include <cstdlib>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "qksd/errors.hpp"
#include "qksd/experiment.hpp"
#include "qksd/serialize.hpp"

using namespace qksd;

namespace {

Problem fixture_problem(const std::string& name) { return load_problem(oracle::fixture(name, ".fcidump")); }

// Variance of sigma (x) O on (|0>a + |1>b)/sqrt(2), with sigma = X or Y and
// O given by its eigendecomposition: the spectrum is {+-lambda} on the
// products of sigma's eigenvectors with O's.
double spectral_variance(const Eigen::SelfAdjointEigenSolver<oracle::Mat>& o, char basis,
                         const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
  Eigen::SelfAdjointEigenSolver<oracle::Mat> sigma(oracle::single(basis));
  const Eigen::VectorXcd va = o.eigenvectors().adjoint() * a;
  const Eigen::VectorXcd vb = o.eigenvectors().adjoint() * b;
  double mean = 0.0, second = 0.0;
  for (int s = 0; s < 2; ++s) {
    const cplx e0 = std::conj(sigma.eigenvectors()(0, s));
    const cplx e1 = std::conj(sigma.eigenvectors()(1, s));
    for (Eigen::Index i = 0; i < va.size(); ++i) {
      const double p = std::norm(e0 * va[i] + e1 * vb[i]) / 2.0;
      const double value = sigma.eigenvalues()[s] * o.eigenvalues()[i];
      mean += p * value;
      second += p * value * value;
    }
  }
  return second - mean * mean;
}

// Sub-optimally allocated M * Var per element, built from dense matrices.
std::vector<double> direct_costs(const FragmentSet& fs, const std::vector<StateVector>& states) {
  double norm_sum = 0.0;
  for (const auto& g : fs.groups) norm_sum += g.norm();
  const auto d = states[0].size();
  const Eigen::SelfAdjointEigenSolver<oracle::Mat> identity(oracle::Mat::Identity(d, d));
  std::vector<double> cost(states.size(), 0.0);
  for (const auto& g : fs.groups) {
    const double beta = g.norm();
    if (beta == 0.0) continue;
    const oracle::Mat hj = oracle::sum(g.as_sum(fs.n_qubits));
    const Eigen::SelfAdjointEigenSolver<oracle::Mat> eig(hj);
    const double m = beta / (2.0 * norm_sum);
    for (std::size_t k = 0; k < states.size(); ++k) {
      for (char basis : {'X', 'Y'}) {
        double v;
        if (fs.mode == GroupingMode::FH) {
          v = spectral_variance(eig, basis, states[0], states[k]);
        } else {
          // Hadamard test on b = U phik, scaled by beta
          const Eigen::VectorXcd b = hj * states[k] / beta;
          v = beta * beta * spectral_variance(identity, basis, states[0], b);
        }
        cost[k] += v / m;
      }
    }
  }
  return cost;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run(const std::string& args) {
  const std::string cmd = std::string(QKSD_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("qksd_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

IntegralSet identity_only(double e_core) {
  IntegralSet ints(4, 2);
  ints.set_e_core(e_core);
  return ints;
}

}  // namespace

TEST_CASE("cost table SI row against direct dense evaluation") {
  for (const char* name : {"h2", "h4"}) {
    CAPTURE(name);
    const Problem p = fixture_problem(name);
    const auto states = krylov_basis(p);
    for (GroupingMode mode : {GroupingMode::FH, GroupingMode::LCU}) {
      const auto rows = cost_table(p, states, mode);
      REQUIRE(rows[0].method == "SI");
      const FragmentSet fs = sorted_insertion(p.h, mode);
      const std::vector<double> direct = direct_costs(fs, states);
      double mean = 0.0;
      for (std::size_t k = 0; k < states.size(); ++k) {
        CHECK(std::abs(rows[0].per_k[k] - direct[k]) <= 1e-10 * direct[k]);
        mean += direct[k] / static_cast<double>(states.size());
      }
      CHECK(std::abs(rows[0].cost - mean) <= 1e-10 * mean);
    }
  }
}

TEST_CASE("identity-only Hamiltonian costs nothing") {
  ProblemOptions opt;
  opt.dt = 1.0;
  const Problem p = make_problem("identity", identity_only(0.7), opt);
  const auto states = krylov_basis(p);
  for (GroupingMode mode : {GroupingMode::FH, GroupingMode::LCU})
    for (const auto& r : cost_table(p, states, mode)) CHECK(r.cost == 0.0);
  // a single level leaves no gap for the automatic step
  CHECK_THROWS_AS(make_problem("identity", identity_only(0.7)), InfeasibleError);
}

TEST_CASE("cost ordering and ICS bookkeeping on small fixtures") {
  for (const char* name : {"h2", "h4", "lih"}) {
    CAPTURE(name);
    const Problem p = fixture_problem(name);
    const auto states = krylov_basis(p);
    const MeasurementPlan si = plan_measurement(p, states, GroupingMode::FH, ShiftKind::None, IcsKind::Off);
    const MeasurementPlan best =
        plan_measurement(p, states, GroupingMode::FH, ShiftKind::ClosedForm, IcsKind::Cisd);
    CHECK(best.mean_cost() <= si.mean_cost());

    // with true-state covariances the ICS objective is the true cost and
    // starts from the SI plan
    const MeasurementPlan truth =
        plan_measurement(p, states, GroupingMode::FH, ShiftKind::None, IcsKind::TrueState);
    for (std::size_t k = 0; k < states.size(); ++k) {
      const auto& trace = truth.elements[k].ics_trace;
      CHECK(std::abs(trace.front() - si.cost[k]) <= 1e-8 * si.cost[k]);
      CHECK(std::abs(trace.back() - truth.cost[k]) <= 1e-8 * truth.cost[k]);
      CHECK(truth.cost[k] <= si.cost[k] * (1 + 1e-12));
    }
  }
}

TEST_CASE("dropping the k = 0 imaginary part") {
  const Problem p = fixture_problem("h2");
  const auto states = krylov_basis(p);
  PlanOptions po;
  po.drop_k0_imaginary = true;
  const MeasurementPlan plan = plan_measurement(p, states, GroupingMode::FH, ShiftKind::None, IcsKind::Off, po);
  double total = 0.0;
  for (const auto& m : plan.elements[0].allocation.m) {
    CHECK(m[1] == 0.0);
    total += m[0];
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
  const MeasurementPlan full = plan_measurement(p, states, GroupingMode::FH, ShiftKind::None, IcsKind::Off);
  CHECK(plan.cost[0] < full.cost[0]);
  CHECK(plan.cost[1] == doctest::Approx(full.cost[1]).epsilon(1e-14));
}

TEST_CASE("simulation") {
  const Problem p = fixture_problem("h2");
  const auto states = krylov_basis(p);
  PlanOptions po;
  po.drop_k0_imaginary = true;
  const MeasurementPlan plan = plan_measurement(p, states, GroupingMode::FH, ShiftKind::ClosedForm, IcsKind::Off, po);

  SUBCASE("noiseless mode gives the exact Krylov energy once") {
    SimulationConfig cfg;
    cfg.shots = std::numeric_limits<double>::infinity();
    const SimulationResult r = simulate(p, states, plan, cfg);
    REQUIRE(r.trials.size() == 1);
    CHECK(std::abs(r.trials[0].error_mha) < 1e-6);
  }
  SUBCASE("seeded runs are reproducible") {
    SimulationConfig cfg;
    cfg.shots = 1e6;
    cfg.trials = 40;
    cfg.seed = 99;
    const std::string a = trials_csv(simulate(p, states, plan, cfg));
    const std::string b = trials_csv(simulate(p, states, plan, cfg));
    CHECK(a == b);
    cfg.seed = 100;
    CHECK(trials_csv(simulate(p, states, plan, cfg)) != a);
  }
  SUBCASE("noise shrinks with the budget") {
    SimulationConfig cfg;
    cfg.trials = 100;
    std::vector<double> lo, hi;
    cfg.shots = 1e5;
    for (const auto& t : simulate(p, states, plan, cfg).trials) lo.push_back(t.error_mha);
    cfg.shots = 1e9;
    for (const auto& t : simulate(p, states, plan, cfg).trials) hi.push_back(t.error_mha);
    CHECK(quantile(hi, 0.75) - quantile(hi, 0.25) < quantile(lo, 0.75) - quantile(lo, 0.25));
  }
  SUBCASE("configuration errors") {
    SimulationConfig cfg;
    cfg.shots = 2.0;
    CHECK_THROWS_AS(simulate(p, states, plan, cfg), ConfigError);
    cfg.shots = 1e6;
    cfg.trials = 0;
    CHECK_THROWS_AS(simulate(p, states, plan, cfg), ConfigError);
    cfg.trials = 1;
    cfg.threshold_c = 1e9;
    CHECK_THROWS_AS(simulate(p, states, plan, cfg), InfeasibleError);
  }
}

TEST_CASE("quantiles and histograms") {
  CHECK(quantile({3.0, 1.0, 2.0}, 0.5) == 2.0);
  CHECK(quantile({1.0, 2.0}, 0.25) == doctest::Approx(1.25));
  CHECK(quantile({5.0}, 0.9) == 5.0);
  CHECK_THROWS_AS(quantile({}, 0.5), InfeasibleError);
  CHECK(histogram_csv({0.04, -0.04, 0.12, 1.0}, 0.1) ==
        "error_mHa,count\n0.000000,2\n0.100000,1\n1.000000,1\n");
}

TEST_CASE("fragment set JSON round trip") {
  const Problem p = fixture_problem("h2");
  for (GroupingMode mode : {GroupingMode::FH, GroupingMode::LCU}) {
    const FragmentSet fs = sorted_insertion(p.h, mode);
    const FragmentSet back = fragment_set_from_json(Json::parse(to_json(fs).dump()));
    CHECK(back.mode == fs.mode);
    CHECK(back.identity == fs.identity);
    CHECK(verify_partition(back, p.h));
    CHECK(decomposition_norm(back) == decomposition_norm(fs));
  }
  CHECK_THROWS_AS(fragment_set_from_json(Json::parse(R"({"mode":"fh"})")), ParseError);
  CHECK(hex64(fnv1a64("")) == "cbf29ce484222325");
  CHECK(hex64(fnv1a64("a")) == "af63dc4c8601ec8c");
}

TEST_CASE("command-line driver") {
  const std::string h2 = oracle::fixture("h2", ".fcidump").string();

  SUBCASE("exit codes") {
    CHECK(run("decompose --input " + h2) == 0);
    CHECK(run("decompose --input /nonexistent.fcidump") == 3);
    CHECK(run("decompose --input " + h2 + " --mode bogus") == 2);
    CHECK(run("simulate --input " + h2 + " --shots nope") == 2);
    CHECK(run("simulate --input " + h2 + " --trials 2 --threshold-c 1e9") == 4);
    CHECK(run("frobnicate") == 2);
    const auto dir = scratch_dir("bad");
    std::ofstream(dir / "bad.fcidump") << "&FCI NORB=2,NELEC=2,\n&END\n1.0 1 x 1 1\n";
    CHECK(run("decompose --input " + (dir / "bad.fcidump").string()) == 3);
  }

  SUBCASE("zero Hamiltonian reports no reduction") {
    const auto dir = scratch_dir("zero");
    std::ofstream(dir / "zero.fcidump") << "&FCI NORB=2,NELEC=2,MS2=0,\n&END\n0.0 0 0 0 0\n";
    REQUIRE(run("decompose --input " + (dir / "zero.fcidump").string() + " --out " + dir.string()) == 0);
    const Json j = Json::parse(slurp(dir / "decompose.json"));
    CHECK(j["raw_norm"].get<double>() == 0.0);
    CHECK(j["shifted_norm"].get<double>() == 0.0);
    CHECK(j["reduction_percent"] == "n/a");
  }

  SUBCASE("decompose artifacts feed report") {
    const auto dir = scratch_dir("decompose");
    REQUIRE(run("decompose --input " + h2 + " --mode fh --out " + dir.string()) == 0);
    const Json j = Json::parse(slurp(dir / "decompose.json"));
    CHECK(j["shifted_norm"].get<double>() <= j["raw_norm"].get<double>());
    CHECK(j["meta"]["version"] == kLibraryVersion);
    CHECK(j["meta"]["fixture_hash"] == file_hash(h2));
    const FragmentSet fs = fragment_set_from_json(Json::parse(slurp(dir / "fragments.json")));
    CHECK(decomposition_norm(fs) == doctest::Approx(j["raw_norm"].get<double>()).epsilon(1e-15));
    CHECK(run("report --input " + (dir / "fragments.json").string()) == 0);
    CHECK(run("report --input " + h2) == 3);
  }

  SUBCASE("cost command matches the library") {
    const auto dir = scratch_dir("cost");
    REQUIRE(run("cost --input " + h2 + " --out " + dir.string()) == 0);
    const Json j = Json::parse(slurp(dir / "cost.json"));
    const Problem p = fixture_problem("h2");
    const auto rows = cost_table(p, krylov_basis(p), GroupingMode::FH);
    REQUIRE(j["rows"].size() == rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) CHECK(j["rows"][i]["cost"].get<double>() == rows[i].cost);
  }

  SUBCASE("simulate writes identical bytes for identical seeds") {
    const auto a = scratch_dir("sim_a");
    const auto b = scratch_dir("sim_b");
    const std::string args = "simulate --input " + h2 + " --shift closed-form --shots 1e6 --trials 30 --seed 5 --out ";
    REQUIRE(run(args + a.string()) == 0);
    REQUIRE(run(args + b.string()) == 0);
    CHECK(slurp(a / "trials.csv") == slurp(b / "trials.csv"));
    CHECK(slurp(a / "histogram.csv") == slurp(b / "histogram.csv"));
    CHECK(slurp(a / "summary.json") == slurp(b / "summary.json"));
    CHECK(slurp(a / "trials.csv").rfind("trial,error_mHa,kept\n", 0) == 0);
  }
}
