#include <cmath>
#include <random>

#include "qksd/errors.hpp"
#include "qksd/sim.hpp"

namespace qksd {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double part(cplx z, std::size_t x) { return x == 0 ? z.real() : z.imag(); }

std::string starved(std::size_t j, std::size_t x) {
  return "fragment " + std::to_string(j) + (x == 0 ? " R" : " I") +
         " has nonzero variance but fewer than one shot";
}

// |Phi> = (|0>|a> + |1>|b>)/sqrt(2) with the ancilla as qubit n
StateVector ancilla_state(const StateVector& a, const StateVector& b) {
  const Eigen::Index d = a.size();
  StateVector phi(2 * d);
  phi.head(d) = a / std::sqrt(2.0);
  phi.tail(d) = b / std::sqrt(2.0);
  return phi;
}

void project_tree(const std::vector<std::pair<PauliWord, double>>& obs, std::size_t depth,
                  const StateVector& state, double value, double floor, OutcomeDistribution& out) {
  if (depth == obs.size()) {
    out.values.push_back(value);
    out.probabilities.push_back(state.squaredNorm());
    return;
  }
  const auto& [w, c] = obs[depth];
  const StateVector ps = apply_word(w, state);
  for (double sign : {1.0, -1.0}) {
    const StateVector branch = 0.5 * (state + sign * ps);
    if (branch.squaredNorm() <= floor) continue;
    project_tree(obs, depth + 1, branch, value + sign * c, floor, out);
  }
}

}  // namespace

std::uint64_t stream_seed(std::uint64_t master, std::initializer_list<std::uint64_t> labels) {
  std::uint64_t h = splitmix64(master);
  for (std::uint64_t l : labels) h = splitmix64(h ^ splitmix64(l + 0x632be59bd9b4e019ULL));
  return h;
}

cplx sample_matrix_element(const VarianceTable& vt, const ShotAllocation& alloc, std::uint64_t seed) {
  if (alloc.m.size() != vt.size()) throw DimensionError("allocation does not match the table");
  double est[2] = {0.0, 0.0};
  for (std::size_t j = 0; j < vt.size(); ++j) {
    for (std::size_t x = 0; x < 2; ++x) {
      double v = part(vt.amplitude[j], x);
      const double var = vt.variance[j][x];
      if (var > 0.0) {
        const double shots = alloc.m[j][x] * alloc.shots;
        if (shots < 1.0) throw InfeasibleError(starved(j, x));
        std::mt19937_64 rng(stream_seed(seed, {j, x}));
        std::normal_distribution<double> nd(0.0, std::sqrt(var / shots));
        v += nd(rng);
      }
      est[x] += v;
    }
  }
  return {est[0], est[1]};
}

double OutcomeDistribution::mean() const {
  double m = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) m += values[i] * probabilities[i];
  return m;
}

double OutcomeDistribution::variance() const {
  const double m = mean();
  double v = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) v += (values[i] - m) * (values[i] - m) * probabilities[i];
  return v;
}

OutcomeDistribution hadamard_test_distribution(const PauliFragment& g, int n_qubits,
                                               const StateVector& phi0, const StateVector& phik,
                                               Part which) {
  OutcomeDistribution d;
  const double beta = g.norm();
  if (beta == 0.0) {
    d.values = {0.0};
    d.probabilities = {1.0};
    return d;
  }
  StateVector uk = StateVector::Zero(phik.size());
  for (const auto& [w, c] : g.terms) uk += (c / beta) * apply_word(w, phik);
  // ancilla X (or Y) eigen-projection of (|0>phi0 + |1>U phik)/sqrt(2)
  const PauliWord a = which == Part::R ? PauliWord::single(n_qubits + 1, n_qubits, 'X')
                                       : PauliWord::single(n_qubits + 1, n_qubits, 'Y');
  project_tree({{a, beta}}, 0, ancilla_state(phi0, uk), 0.0, 0.0, d);
  return d;
}

OutcomeDistribution swap_test_distribution(const PauliFragment& g, int n_qubits,
                                           const StateVector& phi0, const StateVector& phik,
                                           Part which) {
  OutcomeDistribution d;
  const std::uint64_t anc = std::uint64_t{1} << n_qubits;
  std::vector<std::pair<PauliWord, double>> obs;
  for (const auto& [w, c] : g.terms) {
    obs.push_back({PauliWord(n_qubits + 1, w.x() | anc, w.z() | (which == Part::I ? anc : 0)), c});
  }
  project_tree(obs, 0, ancilla_state(phi0, phik), 0.0, 1e-26, d);
  return d;
}

cplx sample_matrix_element_projective(const FragmentSet& fs, const StateVector& phi0,
                                      const StateVector& phik, const ShotAllocation& alloc,
                                      std::uint64_t seed,
                                      std::vector<std::array<double, 2>>* shot_variance) {
  if (fs.mode == GroupingMode::TERMWISE) throw ConfigError("term-wise fragments cannot be sampled");
  if (alloc.m.size() != fs.groups.size()) throw DimensionError("allocation does not match the fragments");
  if (fs.n_qubits + 1 > kMaxStatevectorQubits) throw DimensionError("too many qubits for projective sampling");
  double est[2] = {0.0, 0.0};
  if (shot_variance) shot_variance->assign(fs.groups.size(), {0.0, 0.0});
  for (std::size_t j = 0; j < fs.groups.size(); ++j) {
    for (std::size_t x = 0; x < 2; ++x) {
      const Part p = x == 0 ? Part::R : Part::I;
      const OutcomeDistribution dist =
          fs.mode == GroupingMode::LCU ? hadamard_test_distribution(fs.groups[j], fs.n_qubits, phi0, phik, p)
                                       : swap_test_distribution(fs.groups[j], fs.n_qubits, phi0, phik, p);
      const auto shots = static_cast<long long>(std::llround(alloc.m[j][x] * alloc.shots));
      if (shots < 1) {
        if (dist.variance() > 1e-15) throw InfeasibleError(starved(j, x));
        est[x] += dist.mean();
        continue;
      }
      std::mt19937_64 rng(stream_seed(seed, {j, x}));
      std::discrete_distribution<std::size_t> pick(dist.probabilities.begin(), dist.probabilities.end());
      double sum = 0.0, sum2 = 0.0;
      for (long long s = 0; s < shots; ++s) {
        const double v = dist.values[pick(rng)];
        sum += v;
        sum2 += v * v;
      }
      const double n = static_cast<double>(shots);
      est[x] += sum / n;
      if (shot_variance && shots > 1) (*shot_variance)[j][x] = (sum2 - sum * sum / n) / (n - 1.0);
    }
  }
  return {est[0], est[1]};
}

}  // namespace qksd
