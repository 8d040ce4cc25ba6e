#include "qksd/sim.hpp"

#include <Eigen/Eigenvalues>
#include <bit>
#include <cmath>
#include <sstream>

#include "qksd/errors.hpp"
#include "qksd/parallel.hpp"

namespace qksd {

namespace {

cplx i_power(int k) {
  switch (k & 3) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

// out += c P psi
void add_word(const PauliWord& p, double c, const StateVector& psi, StateVector& out) {
  const cplx phase = c * i_power(p.y_count());
  const std::uint64_t x = p.x(), z = p.z();
  const std::size_t dim = static_cast<std::size_t>(psi.size());
  const cplx* src = psi.data();
  cplx* dst = out.data();
  for (std::size_t b = 0; b < dim; ++b) {
    const double s = (std::popcount(z & b) & 1) ? -1.0 : 1.0;
    dst[b ^ x] += phase * s * src[b];
  }
}

StateVector apply_fragment(const PauliFragment& g, const StateVector& psi) {
  StateVector out = StateVector::Zero(psi.size());
  for (const auto& [w, c] : g.terms) add_word(w, c, psi, out);
  return out;
}

void check_states(const FragmentSet& fs, const StateVector& phi0, const StateVector& phik) {
  const auto dim = static_cast<Eigen::Index>(std::size_t{1} << fs.n_qubits);
  if (phi0.size() != dim || phik.size() != dim) throw DimensionError("state size does not match fragments");
  if (fs.mode == GroupingMode::TERMWISE) {
    throw ConfigError("term-wise fragments have no qubit measurement model");
  }
}

double part(cplx z, int x) { return x == 0 ? z.real() : z.imag(); }

// exp(-i s T) e1 for the Lanczos tridiagonal T of size m
Eigen::VectorXcd small_exp(const std::vector<double>& alpha, const std::vector<double>& beta, int m,
                           double s) {
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    t(i, i) = alpha[static_cast<std::size_t>(i)];
    if (i + 1 < m) t(i, i + 1) = t(i + 1, i) = beta[static_cast<std::size_t>(i)];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
  const Eigen::MatrixXd& q = es.eigenvectors();
  Eigen::VectorXcd c(m);
  Eigen::VectorXcd w(m);
  for (int i = 0; i < m; ++i) w[i] = std::exp(cplx(0.0, -s * es.eigenvalues()[i])) * q(0, i);
  c = q.cast<cplx>() * w;
  return c;
}

}  // namespace

StateVector evolve(const CompiledPauliSum& h, const StateVector& psi, double t, const EvolveOptions& opt) {
  if (!std::isfinite(t)) throw NumericalError("evolution time is not finite");
  if (static_cast<std::size_t>(psi.size()) != h.dim()) throw DimensionError("state size mismatch");
  const double nrm = psi.norm();
  if (t == 0.0 || nrm == 0.0) return psi;

  StateVector v = psi / nrm;
  const double sign = t < 0 ? -1.0 : 1.0;
  const double total = std::abs(t);
  double remaining = total;
  double tau = total;
  const int m_max = std::max(2, opt.max_krylov_dim);

  std::vector<StateVector> basis;
  std::vector<double> alpha, beta;
  StateVector w;
  while (remaining > 0.0) {
    tau = std::min(tau, remaining);
    int iterations = 0;
    bool done = false;
    // the Krylov space does not depend on tau, so a failed check only
    // shrinks tau and reuses the basis built so far
    basis.assign(1, v);
    alpha.clear();
    beta.clear();
    int used = 0;
    Eigen::VectorXcd c;
    while (!done) {
      const int j = static_cast<int>(alpha.size());
      if (j < m_max && j == static_cast<int>(basis.size()) - 1) {
        h.apply(basis.back(), w);
        ++iterations;
        const double a = basis.back().dot(w).real();
        w -= a * basis.back();
        if (j > 0) w -= beta.back() * basis[static_cast<std::size_t>(j - 1)];
        for (int pass = 0; pass < 2; ++pass) {
          for (const auto& u : basis) w -= u.dot(w) * u;
        }
        alpha.push_back(a);
        const double b = w.norm();
        beta.push_back(b);
        if (b > 1e-14) basis.push_back(w / b);
      }
      const int m = static_cast<int>(alpha.size());
      const bool breakdown = beta.back() <= 1e-14;
      c = small_exp(alpha, beta, m, sign * tau);
      const double err = breakdown ? 0.0 : beta.back() * std::abs(c[m - 1]);
      if (err <= 0.5 * opt.tol * tau / total) {
        used = m;
        done = true;
      } else if (m >= m_max || breakdown) {
        tau *= 0.5;
        ++iterations;
      }
      if (!done && iterations > opt.iteration_cap) {
        std::ostringstream os;
        os << "Krylov exponential did not converge within " << opt.iteration_cap
           << " iterations (substep " << tau << ", remaining " << remaining << ", residual estimate "
           << err << ")";
        throw NumericalError(os.str());
      }
    }
    StateVector next = StateVector::Zero(v.size());
    for (int i = 0; i < used; ++i) next += c[i] * basis[static_cast<std::size_t>(i)];
    v = next / next.norm();
    remaining -= tau;
    if (remaining < 1e-15 * total) remaining = 0.0;
    if (used < m_max / 2) tau *= 2.0;
  }
  return nrm * v;
}

StateVector evolve(const PauliSum& h, const StateVector& psi, double t, const EvolveOptions& opt) {
  return evolve(CompiledPauliSum(h), psi, t, opt);
}

std::vector<StateVector> krylov_states(const CompiledPauliSum& h, const StateVector& phi0, double dt,
                                       int n, const EvolveOptions& opt) {
  if (n < 1) throw ConfigError("Krylov dimension must be at least 1");
  std::vector<StateVector> out;
  out.reserve(static_cast<std::size_t>(n));
  out.push_back(phi0);
  for (int k = 1; k < n; ++k) out.push_back(evolve(h, out.back(), dt, opt));
  return out;
}

std::vector<StateVector> krylov_states(const PauliSum& h, const StateVector& phi0, double dt, int n,
                                       const EvolveOptions& opt) {
  return krylov_states(CompiledPauliSum(h), phi0, dt, n, opt);
}

FirstRow exact_first_row(const CompiledPauliSum& h, const std::vector<StateVector>& states) {
  FirstRow row;
  if (states.empty()) return row;
  const StateVector h0 = h.apply(states.front());
  for (const auto& s : states) {
    row.s.push_back(states.front().dot(s));
    row.h.push_back(h0.dot(s));
  }
  return row;
}

FirstRow exact_first_row(const PauliSum& h, const std::vector<StateVector>& states) {
  return exact_first_row(CompiledPauliSum(h), states);
}

cplx VarianceTable::total_amplitude() const {
  cplx s = 0.0;
  for (const cplx& a : amplitude) s += a;
  return s;
}

VarianceTable lcu_variances(const FragmentSet& fs, const StateVector& phi0, const StateVector& phik) {
  check_states(fs, phi0, phik);
  if (fs.mode != GroupingMode::LCU) throw ConfigError("lcu_variances needs an LCU fragment set");
  VarianceTable vt;
  vt.mode = GroupingMode::LCU;
  vt.amplitude.resize(fs.groups.size());
  vt.variance.resize(fs.groups.size());
  parallel_for(fs.groups.size(), [&](std::size_t j) {
    const PauliFragment& g = fs.groups[j];
    const double beta = g.norm();
    if (beta == 0.0) {
      vt.amplitude[j] = 0.0;
      vt.variance[j] = {0.0, 0.0};
      return;
    }
    const cplx amp = phi0.dot(apply_fragment(g, phik));
    vt.amplitude[j] = amp;
    for (int x = 0; x < 2; ++x) {
      const double u = part(amp, x) / beta;
      vt.variance[j][static_cast<std::size_t>(x)] = std::max(0.0, beta * beta * (1.0 - u * u));
    }
  });
  return vt;
}

VarianceTable fh_variances(const FragmentSet& fs, const StateVector& phi0, const StateVector& phik) {
  check_states(fs, phi0, phik);
  if (fs.mode != GroupingMode::FH) throw ConfigError("fh_variances needs an FH fragment set");
  VarianceTable vt;
  vt.mode = GroupingMode::FH;
  vt.amplitude.resize(fs.groups.size());
  vt.variance.resize(fs.groups.size());
  parallel_for(fs.groups.size(), [&](std::size_t j) {
    const PauliFragment& g = fs.groups[j];
    const StateVector h0 = apply_fragment(g, phi0);
    const StateVector hk = apply_fragment(g, phik);
    const cplx amp = phi0.dot(hk);
    const double second = 0.5 * (h0.squaredNorm() + hk.squaredNorm());
    vt.amplitude[j] = amp;
    for (int x = 0; x < 2; ++x) {
      const double p = part(amp, x);
      vt.variance[j][static_cast<std::size_t>(x)] = std::max(0.0, second - p * p);
    }
  });
  return vt;
}

VarianceTable fragment_variances(const FragmentSet& fs, const StateVector& phi0, const StateVector& phik) {
  return fs.mode == GroupingMode::LCU ? lcu_variances(fs, phi0, phik) : fh_variances(fs, phi0, phik);
}

double overlap_variance(cplx s0k, double m_r, double m_i, double shots) {
  if (shots < 1.0) throw InfeasibleError("shot budget below one");
  double v = 0.0;
  const double need[2] = {1.0 - s0k.real() * s0k.real(), 1.0 - s0k.imag() * s0k.imag()};
  const double m[2] = {m_r, m_i};
  for (int x = 0; x < 2; ++x) {
    if (need[x] <= 0.0) continue;
    if (m[x] <= 0.0) {
      throw InfeasibleError(std::string("overlap ") + (x == 0 ? "real" : "imaginary") +
                            " part has no shots");
    }
    v += need[x] / m[x];
  }
  return v / shots;
}

ShotAllocation allocate_shots(const VarianceTable& vt, AllocationStrategy s,
                              const std::vector<double>& group_norms) {
  if (vt.size() == 0) throw InfeasibleError("empty variance table");
  ShotAllocation a;
  a.m.assign(vt.size(), {0.0, 0.0});
  double total = 0.0;
  if (s == AllocationStrategy::Optimal) {
    for (std::size_t j = 0; j < vt.size(); ++j)
      for (std::size_t x = 0; x < 2; ++x) total += (a.m[j][x] = std::sqrt(vt.variance[j][x]));
  } else if (s == AllocationStrategy::Subopt) {
    if (group_norms.size() != vt.size()) throw DimensionError("group norms do not match the table");
    for (std::size_t j = 0; j < vt.size(); ++j) {
      a.m[j] = {group_norms[j], group_norms[j]};
      total += 2.0 * group_norms[j];
    }
  }
  if (total <= 0.0) {
    for (auto& m : a.m) m = {1.0, 1.0};
    total = 2.0 * static_cast<double>(vt.size());
  }
  for (auto& m : a.m) {
    m[0] /= total;
    m[1] /= total;
  }
  return a;
}

double cost_times_shots(const VarianceTable& vt, const ShotAllocation& alloc) {
  if (alloc.m.size() != vt.size()) throw DimensionError("allocation does not match the table");
  double c = 0.0;
  for (std::size_t j = 0; j < vt.size(); ++j) {
    for (std::size_t x = 0; x < 2; ++x) {
      const double v = vt.variance[j][x];
      if (v == 0.0) continue;
      if (alloc.m[j][x] <= 0.0) {
        throw InfeasibleError("fragment " + std::to_string(j) + (x == 0 ? " R" : " I") +
                              " has nonzero variance and no shots");
      }
      c += v / alloc.m[j][x];
    }
  }
  return c;
}

HaarCost haar_expected_cost(const FragmentSet& fs, double d) {
  const double z = decomposition_norm(fs);
  return {2.0 * z * z * (2.0 - 1.0 / d), 4.0 * z * z};
}

}  // namespace qksd
