#include "qksd/ics.hpp"

#include <Eigen/Eigenvalues>
#include <bit>
#include <cmath>
#include <limits>
#include <map>
#include <unordered_map>

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

double part_of(cplx z, Part p) { return p == Part::R ? z.real() : z.imag(); }

void fwht(std::vector<cplx>& w) {
  const std::size_t n = w.size();
  for (std::size_t len = 1; len < n; len <<= 1) {
    for (std::size_t i = 0; i < n; i += len << 1) {
      for (std::size_t j = i; j < i + len; ++j) {
        const cplx u = w[j], v = w[j + len];
        w[j] = u + v;
        w[j + len] = u - v;
      }
    }
  }
}

bool compatible(GroupingMode mode, const PauliWord& a, const PauliWord& b) {
  return mode == GroupingMode::LCU ? !commutes(a, b) : commutes(a, b);
}

struct WordHash {
  std::size_t operator()(const std::pair<std::uint64_t, std::uint64_t>& k) const {
    return std::hash<std::uint64_t>()(k.first * 0x9e3779b97f4a7c15ULL ^ k.second);
  }
};

}  // namespace

double pauli_covariance(const PauliWord& p, const PauliWord& q, const StateVector& phi0,
                        const StateVector& phik, Part part) {
  if (p.n_qubits() != q.n_qubits()) throw DimensionError("words act on different qubit counts");
  double first = 0.0;
  if (commutes(p, q)) {
    const PauliProduct pq = pauli_product(p, q);
    const double sign = pq.phase.sign();
    first = sign * 0.5 *
            (word_matrix_element(pq.word, phi0, phi0) + word_matrix_element(pq.word, phik, phik)).real();
  }
  return first - part_of(word_matrix_element(p, phi0, phik), part) *
                     part_of(word_matrix_element(q, phi0, phik), part);
}

std::vector<cplx> pauli_expectations(const std::vector<PauliWord>& words, const StateVector& a,
                                     const StateVector& b) {
  std::vector<cplx> out(words.size());
  if (words.empty()) return out;
  const int n = words.front().n_qubits();
  const std::size_t d = std::size_t{1} << n;
  if (static_cast<std::size_t>(a.size()) != d || static_cast<std::size_t>(b.size()) != d) {
    throw DimensionError("state size mismatch");
  }
  std::vector<std::uint64_t> support;
  for (std::size_t i = 0; i < d; ++i)
    if (b[static_cast<Eigen::Index>(i)] != 0.0) support.push_back(i);

  std::map<std::uint64_t, std::vector<std::size_t>> by_x;
  for (std::size_t i = 0; i < words.size(); ++i) by_x[words[i].x()].push_back(i);
  std::vector<std::pair<std::uint64_t, std::vector<std::size_t>>> batches(by_x.begin(), by_x.end());

  parallel_for(batches.size(), [&](std::size_t bi) {
    const auto& [x, idx] = batches[bi];
    const double direct = static_cast<double>(idx.size()) * static_cast<double>(support.size());
    const double transform = static_cast<double>(d) * (n + 1);
    if (direct <= transform) {
      for (std::size_t i : idx) {
        const std::uint64_t z = words[i].z();
        cplx s = 0.0;
        for (std::uint64_t k : support) {
          const double sign = (std::popcount(z & k) & 1) ? -1.0 : 1.0;
          s += std::conj(a[static_cast<Eigen::Index>(k ^ x)]) * sign * b[static_cast<Eigen::Index>(k)];
        }
        out[i] = i_power(words[i].y_count()) * s;
      }
    } else {
      std::vector<cplx> w(d, 0.0);
      for (std::uint64_t k : support) {
        w[k] = std::conj(a[static_cast<Eigen::Index>(k ^ x)]) * b[static_cast<Eigen::Index>(k)];
      }
      fwht(w);
      for (std::size_t i : idx) out[i] = i_power(words[i].y_count()) * w[words[i].z()];
    }
  });
  return out;
}

SplitProblem extend_groups(const FragmentSet& fs) {
  if (fs.mode == GroupingMode::TERMWISE) throw ConfigError("term-wise fragments cannot be split");
  SplitProblem sp;
  sp.mode = fs.mode;
  sp.n_qubits = fs.n_qubits;
  sp.identity = fs.identity;

  // term table in SORTED INSERTION visiting order
  std::vector<std::pair<PauliWord, double>> all;
  for (const auto& g : fs.groups)
    for (const auto& t : g.terms) all.push_back(t);
  std::stable_sort(all.begin(), all.end(),
                   [](const auto& a, const auto& b) { return std::abs(a.second) > std::abs(b.second); });
  std::map<PauliWord, int> index;
  for (const auto& [w, c] : all) {
    if (index.count(w)) throw ConfigError("word " + w.to_string() + " appears in two SI groups");
    index[w] = static_cast<int>(sp.words.size());
    sp.words.push_back(w);
    sp.target.push_back(c);
  }
  for (const auto& g : fs.groups) {
    std::vector<int> mem;
    Eigen::VectorXd init = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(g.terms.size()));
    for (std::size_t i = 0; i < g.terms.size(); ++i) {
      mem.push_back(index.at(g.terms[i].first));
      init[static_cast<Eigen::Index>(i)] = g.terms[i].second;
    }
    const std::size_t own = mem.size();
    std::vector<bool> in(sp.words.size(), false);
    for (int m : mem) in[static_cast<std::size_t>(m)] = true;
    for (std::size_t t = 0; t < sp.words.size(); ++t) {
      if (in[t]) continue;
      bool ok = true;
      for (int m : mem) {
        if (!compatible(sp.mode, sp.words[t], sp.words[static_cast<std::size_t>(m)])) {
          ok = false;
          break;
        }
      }
      if (ok) mem.push_back(static_cast<int>(t));
    }
    Eigen::VectorXd full = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(mem.size()));
    full.head(static_cast<Eigen::Index>(own)) = init;
    sp.members.push_back(std::move(mem));
    sp.initial.push_back(std::move(full));
  }
  return sp;
}

CovarianceSet build_group_covariances(const SplitProblem& sp, const StateVector& proxy0,
                                      const StateVector& proxyk) {
  // distinct products P_a P_b of commuting members across all groups
  std::unordered_map<std::pair<std::uint64_t, std::uint64_t>, std::size_t, WordHash> product_index;
  std::vector<PauliWord> products;
  struct Entry {
    std::size_t product;
    double sign;
  };
  std::vector<std::vector<Entry>> entries(sp.members.size());
  for (std::size_t j = 0; j < sp.members.size(); ++j) {
    const auto& mem = sp.members[j];
    const std::size_t n = mem.size();
    entries[j].assign(n * n, {0, 0.0});
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = a + 1; b < n; ++b) {
        const PauliWord& pa = sp.words[static_cast<std::size_t>(mem[a])];
        const PauliWord& pb = sp.words[static_cast<std::size_t>(mem[b])];
        if (!commutes(pa, pb)) continue;
        const PauliProduct pr = pauli_product(pa, pb);
        const auto key = std::make_pair(pr.word.x(), pr.word.z());
        auto [it, fresh] = product_index.try_emplace(key, products.size());
        if (fresh) products.push_back(pr.word);
        entries[j][a * n + b] = {it->second, pr.phase.sign()};
      }
    }
  }
  const std::vector<cplx> e0 = pauli_expectations(products, proxy0, proxy0);
  const std::vector<cplx> ek = pauli_expectations(products, proxyk, proxyk);
  const std::vector<cplx> cross = pauli_expectations(sp.words, proxy0, proxyk);

  CovarianceSet cs;
  cs.cov.resize(sp.members.size());
  parallel_for(sp.members.size(), [&](std::size_t j) {
    const auto& mem = sp.members[j];
    const auto n = static_cast<Eigen::Index>(mem.size());
    for (int x = 0; x < 2; ++x) {
      const Part part = x == 0 ? Part::R : Part::I;
      Eigen::MatrixXd c(n, n);
      for (Eigen::Index a = 0; a < n; ++a) {
        const double ra = part_of(cross[static_cast<std::size_t>(mem[static_cast<std::size_t>(a)])], part);
        c(a, a) = 1.0 - ra * ra;
        for (Eigen::Index b = a + 1; b < n; ++b) {
          const double rb = part_of(cross[static_cast<std::size_t>(mem[static_cast<std::size_t>(b)])], part);
          const Entry& e = entries[j][static_cast<std::size_t>(a * n + b)];
          const double first = e.sign == 0.0 ? 0.0 : e.sign * 0.5 * (e0[e.product] + ek[e.product]).real();
          c(a, b) = c(b, a) = first - ra * rb;
        }
      }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(c);
      if (es.eigenvalues().minCoeff() < 0.0) {
        const Eigen::VectorXd lam = es.eigenvalues().cwiseMax(0.0);
        c = es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
        c = 0.5 * (c + c.transpose()).eval();
      }
      cs.cov[j][static_cast<std::size_t>(x)] = std::move(c);
    }
  });
  return cs;
}

std::vector<std::array<double, 2>> split_variances(const CovarianceSet& cs, const Split& alpha) {
  if (alpha.size() != cs.cov.size()) throw DimensionError("split does not match the covariance set");
  std::vector<std::array<double, 2>> v(cs.cov.size());
  for (std::size_t j = 0; j < cs.cov.size(); ++j)
    for (std::size_t x = 0; x < 2; ++x)
      v[j][x] = std::max(0.0, alpha[j].dot(cs.cov[j][x] * alpha[j]));
  return v;
}

double ics_objective(const CovarianceSet& cs, const Split& alpha, const ShotAllocation& m) {
  const auto v = split_variances(cs, alpha);
  if (m.m.size() != v.size()) throw DimensionError("allocation does not match the covariance set");
  double f = 0.0;
  for (std::size_t j = 0; j < v.size(); ++j) {
    for (std::size_t x = 0; x < 2; ++x) {
      if (v[j][x] == 0.0) continue;
      if (m.m[j][x] <= 0.0) return std::numeric_limits<double>::infinity();
      f += v[j][x] / m.m[j][x];
    }
  }
  return f;
}

Split split_qp_step(const SplitProblem& sp, const CovarianceSet& cs, const ShotAllocation& m,
                    KktReport* report) {
  const std::size_t groups = sp.members.size();
  if (cs.cov.size() != groups || m.m.size() != groups) throw DimensionError("inconsistent split inputs");
  double m_max = 0.0;
  for (const auto& mj : m.m) m_max = std::max({m_max, mj[0], mj[1]});
  if (m_max <= 0.0) throw InfeasibleError("allocation has no shots");
  const double m_floor = 1e-10 * m_max;

  std::vector<Eigen::MatrixXd> q(groups);
  double global = 0.0;
  std::size_t count = 0;
  for (std::size_t j = 0; j < groups; ++j) {
    q[j] = cs.cov[j][0] / std::max(m.m[j][0], m_floor) + cs.cov[j][1] / std::max(m.m[j][1], m_floor);
    global += q[j].diagonal().sum();
    count += static_cast<std::size_t>(q[j].rows());
  }
  global = count ? global / static_cast<double>(count) : 1.0;
  if (global <= 0.0) global = 1.0;

  const auto t = static_cast<Eigen::Index>(sp.words.size());
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(t, t);
  std::vector<Eigen::MatrixXd> qinv(groups);
  for (std::size_t j = 0; j < groups; ++j) {
    const Eigen::Index n = q[j].rows();
    if (n == 0) continue;
    const double mean = q[j].diagonal().mean();
    const double ridge = 1e-10 * std::max(mean, 1e-4 * global);
    Eigen::MatrixXd qr = q[j] + ridge * Eigen::MatrixXd::Identity(n, n);
    Eigen::LLT<Eigen::MatrixXd> llt(qr);
    if (llt.info() != Eigen::Success) throw NumericalError("group " + std::to_string(j) + " form is singular");
    qinv[j] = llt.solve(Eigen::MatrixXd::Identity(n, n));
    const auto& mem = sp.members[j];
    for (Eigen::Index a = 0; a < n; ++a)
      for (Eigen::Index b = 0; b < n; ++b)
        s(mem[static_cast<std::size_t>(a)], mem[static_cast<std::size_t>(b)]) += qinv[j](a, b);
  }
  const Eigen::VectorXd c = Eigen::Map<const Eigen::VectorXd>(sp.target.data(), t);
  Eigen::LLT<Eigen::MatrixXd> sl(s);
  Eigen::VectorXd mu;
  if (sl.info() == Eigen::Success) {
    mu = sl.solve(c);
  } else {
    Eigen::LDLT<Eigen::MatrixXd> alt(s);
    if (alt.info() != Eigen::Success) throw NumericalError("KKT system is singular after regularization");
    mu = alt.solve(c);
  }
  if (!mu.allFinite()) throw NumericalError("KKT solve produced non-finite multipliers");

  Split alpha(groups);
  for (std::size_t j = 0; j < groups; ++j) {
    const auto& mem = sp.members[j];
    Eigen::VectorXd local(static_cast<Eigen::Index>(mem.size()));
    for (std::size_t a = 0; a < mem.size(); ++a) local[static_cast<Eigen::Index>(a)] = mu[mem[a]];
    alpha[j] = mem.empty() ? Eigen::VectorXd() : Eigen::VectorXd(qinv[j] * local);
  }

  // residual of the constraints, then pushed onto the owning SI group
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(t);
  for (std::size_t j = 0; j < groups; ++j)
    for (std::size_t a = 0; a < sp.members[j].size(); ++a) sum[sp.members[j][a]] += alpha[j][static_cast<Eigen::Index>(a)];
  if (report) {
    report->constraint_residual = (sum - c).cwiseAbs().maxCoeff();
    double st = 0.0;
    for (std::size_t j = 0; j < groups; ++j) {
      const auto& mem = sp.members[j];
      if (mem.empty()) continue;
      Eigen::VectorXd local(static_cast<Eigen::Index>(mem.size()));
      for (std::size_t a = 0; a < mem.size(); ++a) local[static_cast<Eigen::Index>(a)] = mu[mem[a]];
      const Eigen::Index n = q[j].rows();
      const double mean = q[j].diagonal().mean();
      const double ridge = 1e-10 * std::max(mean, 1e-4 * global);
      const Eigen::VectorXd g = (q[j] + ridge * Eigen::MatrixXd::Identity(n, n)) * alpha[j] - local;
      st = std::max(st, g.cwiseAbs().maxCoeff() / std::max(1.0, local.cwiseAbs().maxCoeff()));
    }
    report->stationarity_residual = st;
  }
  std::vector<bool> fixed(static_cast<std::size_t>(t), false);
  for (std::size_t j = 0; j < groups; ++j) {
    for (std::size_t a = 0; a < sp.members[j].size(); ++a) {
      const int p = sp.members[j][a];
      if (fixed[static_cast<std::size_t>(p)] || a >= static_cast<std::size_t>(sp.initial[j].size())) continue;
      if (sp.initial[j][static_cast<Eigen::Index>(a)] == 0.0) continue;
      alpha[j][static_cast<Eigen::Index>(a)] += c[p] - sum[p];
      fixed[static_cast<std::size_t>(p)] = true;
    }
  }
  return alpha;
}

ShotAllocation reallocate(const CovarianceSet& cs, const Split& alpha) {
  const auto v = split_variances(cs, alpha);
  double vmax = 0.0;
  for (const auto& vj : v) vmax = std::max({vmax, vj[0], vj[1]});
  ShotAllocation m;
  m.m.assign(v.size(), {0.0, 0.0});
  double total = 0.0;
  if (vmax > 0.0) {
    // a floor far below the fraction of any measurable part keeps every
    // entry strictly positive so later splits stay feasible
    const double floor = 1e-16 * vmax;
    for (std::size_t j = 0; j < v.size(); ++j)
      for (std::size_t x = 0; x < 2; ++x) total += (m.m[j][x] = std::sqrt(std::max(v[j][x], floor)));
  } else {
    for (auto& mj : m.m) mj = {1.0, 1.0};
    total = 2.0 * static_cast<double>(v.size());
  }
  for (auto& mj : m.m) {
    mj[0] /= total;
    mj[1] /= total;
  }
  return m;
}

SplitSolution ics_optimize(const SplitProblem& sp, const CovarianceSet& cs, const IcsOptions& opt) {
  if (opt.iterations < 1) throw ConfigError("ICS needs at least one iteration");
  SplitSolution sol;
  sol.alpha = sp.initial;
  sol.m.m.resize(sp.members.size());
  double total = 0.0;
  for (std::size_t j = 0; j < sp.members.size(); ++j) {
    const double w = sp.initial[j].norm();
    sol.m.m[j] = {w, w};
    total += 2.0 * w;
  }
  if (total <= 0.0) {
    sol.m = reallocate(cs, sol.alpha);
  } else {
    for (auto& mj : sol.m.m) {
      mj[0] /= total;
      mj[1] /= total;
    }
  }
  double f = ics_objective(cs, sol.alpha, sol.m);
  sol.objective_trace.push_back(f);
  for (int it = 0; it < opt.iterations; ++it) {
    const Split alpha = split_qp_step(sp, cs, sol.m);
    const double fa = ics_objective(cs, alpha, sol.m);
    if (fa <= f) sol.alpha = alpha;
    const double f_mid = std::min(fa, f);
    const ShotAllocation m = reallocate(cs, sol.alpha);
    const double fb = ics_objective(cs, sol.alpha, m);
    if (fb <= f_mid) sol.m = m;
    const double next = std::min(fb, f_mid);
    sol.objective_trace.push_back(next);
    ++sol.iterations;
    const bool small = std::abs(f - next) <= opt.tol * std::abs(f);
    f = next;
    if (small) {
      sol.converged = true;
      break;
    }
  }
  return sol;
}

double reconstruction_error(const SplitProblem& sp, const Split& alpha) {
  std::vector<double> sum(sp.words.size(), 0.0);
  for (std::size_t j = 0; j < sp.members.size(); ++j)
    for (std::size_t a = 0; a < sp.members[j].size(); ++a)
      sum[static_cast<std::size_t>(sp.members[j][a])] += alpha[j][static_cast<Eigen::Index>(a)];
  double e = 0.0;
  for (std::size_t p = 0; p < sum.size(); ++p) e = std::max(e, std::abs(sum[p] - sp.target[p]));
  return e;
}

FragmentSet split_fragments(const SplitProblem& sp, const Split& alpha) {
  FragmentSet fs;
  fs.mode = sp.mode;
  fs.n_qubits = sp.n_qubits;
  fs.identity = sp.identity;
  for (std::size_t j = 0; j < sp.members.size(); ++j) {
    PauliFragment g;
    for (std::size_t a = 0; a < sp.members[j].size(); ++a) {
      const double v = alpha[j][static_cast<Eigen::Index>(a)];
      if (v != 0.0) g.terms.push_back({sp.words[static_cast<std::size_t>(sp.members[j][a])], v});
    }
    fs.groups.push_back(std::move(g));
  }
  return fs;
}

ProxyPair cisd_proxy_pair(const CisdResult& cisd, const Occupation& ref, int k, double dt) {
  ProxyPair out;
  out.e_cisd = cisd.energy;
  out.phi0 = reference_state(ref);
  StateVector c = cisd.state;
  const cplx ov = c[static_cast<Eigen::Index>(ref.mask())];
  if (std::abs(ov) > 0.0) c *= std::conj(ov) / std::abs(ov);
  out.phik = std::exp(cplx(0.0, -cisd.energy * static_cast<double>(k) * dt)) * c;
  return out;
}

ProxyPair cisd_proxy_pair(const PauliSum& h, const Occupation& ref, int k, double dt) {
  return cisd_proxy_pair(cisd_ground_state(h, ref), ref, k, dt);
}

}  // namespace qksd
