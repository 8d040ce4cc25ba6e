#include "qksd/shift.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "qksd/errors.hpp"
#include "qksd/jordan_wigner.hpp"

namespace qksd {

namespace {

template <class Map>
void accumulate(Map& m, const typename Map::key_type& key, double c) {
  if (c == 0.0) return;
  auto [it, inserted] = m.try_emplace(key, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0.0) m.erase(it);
  }
}

void check_params(const ShiftParams& sp, int n_orb) {
  auto bad = [&](int i) { return i < 0 || i >= n_orb; };
  for (const auto& [q, v] : sp.tau1) {
    if (bad(q)) throw IndexError("tau1 index " + std::to_string(q) + " outside the orbital range");
  }
  for (const auto& [key, v] : sp.tau2) {
    const auto [q, r, s] = key;
    if (bad(q) || bad(r) || bad(s)) {
      throw IndexError("tau2 index (" + std::to_string(q) + "," + std::to_string(r) + "," +
                       std::to_string(s) + ") outside the orbital range");
    }
    if (r > s || q == r || q == s) throw IndexError("tau2 index outside the admissible pair set");
  }
  for (int q : sp.occ) {
    if (bad(q)) throw IndexError("occupied orbital outside the orbital range");
  }
}

ShiftForm subtract(ShiftForm a, const ShiftForm& b) {
  a.scalar -= b.scalar;
  for (const auto& [k, v] : b.number) accumulate(a.number, k, -v);
  for (const auto& [k, v] : b.excitation) accumulate(a.excitation, k, -v);
  for (const auto& [k, v] : b.exc_number) accumulate(a.exc_number, k, -v);
  for (const auto& [k, v] : b.rest) accumulate(a.rest, k, -v);
  return a;
}

}  // namespace

void ShiftParams::update_t() {
  t = 0.0;
  for (int q : occ) {
    auto it = tau1.find(q);
    if (it != tau1.end()) t += it->second;
  }
}

bool ShiftParams::is_occupied(int q) const {
  return std::find(occ.begin(), occ.end(), q) != occ.end();
}

ShiftParams zero_shift(const Occupation& ref) {
  ShiftParams sp;
  sp.n_orb = ref.n_orb;
  sp.occ = ref.occ;
  return sp;
}

FermionSum PartialHamiltonian::total() const {
  FermionSum f = partial.to_fermion();
  const FermionSum c = complement.to_fermion();
  f.add_scalar(c.scalar());
  for (const auto& [k, v] : c.one_body()) f.add_one_body(k[0], k[1], v);
  for (const auto& [k, v] : c.two_body()) f.add_two_body(k[0], k[1], k[2], k[3], v);
  return f;
}

PartialHamiltonian effective_partial_hamiltonian(const FermionSum& f) {
  ShiftForm sf = ShiftForm::from_fermion(f);
  PartialHamiltonian out;
  out.complement.n_orb = sf.n_orb;
  out.complement.rest = std::move(sf.rest);
  sf.rest.clear();
  out.partial = std::move(sf);
  return out;
}

PartialHamiltonian effective_partial_hamiltonian(const IntegralSet& ints) {
  return effective_partial_hamiltonian(build_fermionic_hamiltonian(ints));
}

ShiftForm shift_operator(const ShiftParams& sp) {
  check_params(sp, sp.n_orb);
  ShiftForm t;
  t.n_orb = sp.n_orb;
  for (const auto& [q, v] : sp.tau1) accumulate(t.number, q, v);
  for (const auto& [key, v] : sp.tau2) {
    const auto [q, r, s] = key;
    accumulate(t.exc_number, key, v);
    if (sp.is_occupied(q)) {
      if (r == s) {
        accumulate(t.number, r, -2.0 * v);  // E_rr = 2 n_r
      } else {
        accumulate(t.excitation, PairKey{r, s}, -v);
      }
    }
  }
  return t;
}

ShiftParams closed_form_shift(const FermionSum& f, const Occupation& ref) {
  if (f.n_orb() != ref.n_orb) throw DimensionError("reference and Hamiltonian sizes differ");
  const ShiftForm sf = ShiftForm::from_fermion(f);
  ShiftParams sp = zero_shift(ref);
  for (const auto& [key, v] : sf.exc_number) sp.tau2[key] = v;
  for (int r = 0; r < sf.n_orb; ++r) {
    double v = 0.0;
    if (auto it = sf.number.find(r); it != sf.number.end()) v = it->second;
    for (int q : ref.occ) {
      if (q == r) continue;
      if (auto it = sp.tau2.find({q, r, r}); it != sp.tau2.end()) v += 2.0 * it->second;
    }
    if (v != 0.0) sp.tau1[r] = v;
  }
  sp.update_t();
  return sp;
}

ShiftParams closed_form_shift(const IntegralSet& ints, const Occupation& ref) {
  return closed_form_shift(build_fermionic_hamiltonian(ints), ref);
}

FermionSum apply_shift(const FermionSum& f, const ShiftParams& sp) {
  check_params(sp, f.n_orb());
  if (sp.n_orb != f.n_orb()) throw IndexError("shift parameters sized for a different orbital count");
  return subtract(ShiftForm::from_fermion(f), shift_operator(sp)).to_fermion();
}

double annihilation_check(const ShiftParams& sp, const Occupation& ref, int n_qubits) {
  if (n_qubits != sp.n_orb || ref.n_orb != n_qubits) throw DimensionError("size mismatch");
  PauliSum t = jordan_wigner(shift_operator(sp).to_fermion());
  t.add(PauliWord::identity(n_qubits), -sp.t);
  const StateVector phi0 = reference_state(ref);
  const StateVector r = CompiledPauliSum(t).apply(phi0);
  return r.norm();
}

double shifted_norm(const FermionSum& f, const ShiftParams& sp, GroupingMode mode) {
  const FermionSum shifted = apply_shift(f, sp);
  if (mode == GroupingMode::TERMWISE) {
    return decomposition_norm(termwise_fermionic_grouping(shifted));
  }
  return decomposition_norm(sorted_insertion(jordan_wigner(shifted), mode));
}

ShiftParams refine_shift(const FermionSum& f, const ShiftParams& sp0, GroupingMode mode,
                         const RefineOptions& opt) {
  check_params(sp0, f.n_orb());

  // parameter vector: every tau1 over all orbitals, every tau2 over E_q
  std::vector<int> t1_keys;
  std::vector<TripleKey> t2_keys;
  for (int q = 0; q < f.n_orb(); ++q) {
    t1_keys.push_back(q);
    for (int r = 0; r < f.n_orb(); ++r)
      for (int s = r; s < f.n_orb(); ++s)
        if (r != q && s != q) t2_keys.push_back({q, r, s});
  }
  const std::size_t dim = t1_keys.size() + t2_keys.size();
  std::vector<double> x(dim, 0.0);
  for (std::size_t i = 0; i < t1_keys.size(); ++i) {
    if (auto it = sp0.tau1.find(t1_keys[i]); it != sp0.tau1.end()) x[i] = it->second;
  }
  for (std::size_t i = 0; i < t2_keys.size(); ++i) {
    if (auto it = sp0.tau2.find(t2_keys[i]); it != sp0.tau2.end()) x[t1_keys.size() + i] = it->second;
  }
  auto to_params = [&](const std::vector<double>& v) {
    ShiftParams sp;
    sp.n_orb = sp0.n_orb;
    sp.occ = sp0.occ;
    for (std::size_t i = 0; i < t1_keys.size(); ++i)
      if (v[i] != 0.0) sp.tau1[t1_keys[i]] = v[i];
    for (std::size_t i = 0; i < t2_keys.size(); ++i)
      if (v[t1_keys.size() + i] != 0.0) sp.tau2[t2_keys[i]] = v[t1_keys.size() + i];
    sp.update_t();
    return sp;
  };

  int evals = 0;
  auto objective = [&](const std::vector<double>& v) {
    ++evals;
    return shifted_norm(f, to_params(v), mode);
  };

  double best = objective(x);
  double step = opt.initial_step;
  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> nd;
  while (step >= opt.min_step && evals < opt.max_evaluations) {
    bool improved = false;
    for (std::size_t i = 0; i < dim && evals < opt.max_evaluations; ++i) {
      for (double dir : {1.0, -1.0}) {
        std::vector<double> y = x;
        y[i] += dir * step;
        const double v = objective(y);
        if (v < best) {
          best = v;
          x = std::move(y);
          improved = true;
          break;
        }
      }
    }
    for (int probe = 0; probe < 2 * static_cast<int>(dim) && evals < opt.max_evaluations; ++probe) {
      std::vector<double> d(dim);
      double nrm = 0.0;
      for (double& di : d) {
        di = nd(rng);
        nrm += di * di;
      }
      nrm = std::sqrt(nrm);
      std::vector<double> y = x;
      for (std::size_t i = 0; i < dim; ++i) y[i] += step * d[i] / nrm;
      const double v = objective(y);
      if (v < best) {
        best = v;
        x = std::move(y);
        improved = true;
      }
    }
    if (!improved) step *= 0.5;
  }
  ShiftParams out = to_params(x);
  // no accepted move: hand back the input untouched
  if (best >= shifted_norm(f, sp0, mode)) return sp0;
  return out;
}

}  // namespace qksd
