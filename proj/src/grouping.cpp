#include "qksd/grouping.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qksd/errors.hpp"

namespace qksd {

std::string to_string(GroupingMode m) {
  switch (m) {
    case GroupingMode::LCU: return "lcu";
    case GroupingMode::FH: return "fh";
    default: return "termwise";
  }
}

GroupingMode grouping_mode_from_string(const std::string& s) {
  if (s == "lcu") return GroupingMode::LCU;
  if (s == "fh") return GroupingMode::FH;
  if (s == "termwise") return GroupingMode::TERMWISE;
  throw ConfigError("unknown grouping mode '" + s + "'");
}

double PauliFragment::norm() const {
  double s = 0.0;
  for (const auto& [w, c] : terms) s += c * c;
  return std::sqrt(s);
}

PauliSum PauliFragment::as_sum(int n_qubits) const {
  PauliSum out(n_qubits);
  for (const auto& [w, c] : terms) out.add(w, c);
  return out;
}

double FermionFragment::norm() const { return std::abs(coefficient) * unit_weight; }

std::size_t FragmentSet::size() const {
  return mode == GroupingMode::TERMWISE ? fermion_groups.size() : groups.size();
}

std::vector<double> FragmentSet::weights() const {
  std::vector<double> w;
  if (mode == GroupingMode::TERMWISE) {
    for (const auto& f : fermion_groups) w.push_back(f.norm());
  } else {
    for (const auto& g : groups) w.push_back(g.norm());
  }
  return w;
}

PauliSum FragmentSet::reconstruct() const {
  if (mode == GroupingMode::TERMWISE) {
    throw std::logic_error("term-wise fragments have no Pauli reconstruction");
  }
  PauliSum out(n_qubits);
  out.add(PauliWord::identity(n_qubits), identity);
  for (const auto& g : groups)
    for (const auto& [w, c] : g.terms) out.add(w, c);
  return out;
}

std::vector<std::pair<PauliWord, double>> insertion_order(const PauliSum& h) {
  std::vector<std::pair<PauliWord, double>> terms;
  for (const auto& [w, c] : h.terms()) {
    if (!w.is_identity()) terms.emplace_back(w, c);
  }
  // map iteration is already in canonical order, so a stable sort keeps the tie-break
  std::stable_sort(terms.begin(), terms.end(), [](const auto& a, const auto& b) {
    return std::abs(a.second) > std::abs(b.second);
  });
  return terms;
}

FragmentSet sorted_insertion(const PauliSum& h, Compatibility c) {
  FragmentSet fs;
  fs.mode = c == Compatibility::Commuting ? GroupingMode::FH : GroupingMode::LCU;
  fs.n_qubits = h.n_qubits();
  fs.identity = h.identity_coefficient();
  const bool want_commute = c == Compatibility::Commuting;
  for (const auto& [w, coef] : insertion_order(h)) {
    bool placed = false;
    for (auto& g : fs.groups) {
      bool fits = true;
      for (const auto& [m, mc] : g.terms) {
        if (commutes(w, m) != want_commute) {
          fits = false;
          break;
        }
      }
      if (fits) {
        g.terms.emplace_back(w, coef);
        placed = true;
        break;
      }
    }
    if (!placed) fs.groups.push_back(PauliFragment{{{w, coef}}});
  }
  return fs;
}

FragmentSet termwise_fermionic_grouping(const ShiftForm& sf) {
  FragmentSet fs;
  fs.mode = GroupingMode::TERMWISE;
  fs.n_qubits = sf.n_orb;
  fs.identity = sf.scalar;
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (const auto& [r, c] : sf.number) {
    fs.fermion_groups.push_back({"n" + std::to_string(r), c, inv_sqrt2});
  }
  for (const auto& [key, c] : sf.excitation) {
    fs.fermion_groups.push_back(
        {"E" + std::to_string(key[0]) + "," + std::to_string(key[1]), c, inv_sqrt2});
  }
  for (const auto& [key, c] : sf.exc_number) {
    const auto [q, r, s] = key;
    const double w = std::sqrt((3.0 * (r == s ? 1.0 : 0.0) + 1.0) / 2.0);
    fs.fermion_groups.push_back({"E" + std::to_string(r) + "," + std::to_string(s) + "n" +
                                     std::to_string(q),
                                 c, w});
  }
  for (const auto& [key, c] : sf.rest) {
    fs.fermion_groups.push_back({"EE" + std::to_string(key[0]) + "," + std::to_string(key[1]) +
                                     "," + std::to_string(key[2]) + "," + std::to_string(key[3]),
                                 c, 1.0});
  }
  return fs;
}

FragmentSet termwise_fermionic_grouping(const FermionSum& f) {
  return termwise_fermionic_grouping(ShiftForm::from_fermion(f));
}

double decomposition_norm(const FragmentSet& fs) {
  double s = 0.0;
  for (double w : fs.weights()) s += w;
  return s;
}

PartitionCheck verify_partition(const FragmentSet& fs, const PauliSum& h, double tol) {
  PartitionCheck out;
  std::ostringstream diag;
  if (fs.mode == GroupingMode::TERMWISE) {
    out.ok = false;
    out.diagnostic = "term-wise fragments are not a Pauli partition";
    return out;
  }
  if (fs.n_qubits != h.n_qubits()) {
    out.ok = false;
    out.diagnostic = "qubit counts differ";
    return out;
  }
  const bool want_commute = fs.mode == GroupingMode::FH;
  for (std::size_t j = 0; j < fs.groups.size(); ++j) {
    const auto& t = fs.groups[j].terms;
    for (std::size_t a = 0; a < t.size(); ++a) {
      if (t[a].first.is_identity()) {
        out.ok = false;
        diag << "group " << j << " contains the identity\n";
      }
      for (std::size_t b = a + 1; b < t.size(); ++b) {
        if (t[a].first == t[b].first) {
          out.ok = false;
          diag << "group " << j << " repeats " << t[a].first.to_string() << "\n";
        } else if (commutes(t[a].first, t[b].first) != want_commute) {
          out.ok = false;
          diag << "group " << j << ": " << t[a].first.to_string() << " and "
               << t[b].first.to_string() << (want_commute ? " anticommute" : " commute") << "\n";
        }
      }
    }
  }
  PauliSum sum(h.n_qubits());
  for (const auto& g : fs.groups)
    for (const auto& [w, c] : g.terms) sum.add(w, c);
  for (const auto& [w, c] : h.terms()) {
    if (w.is_identity()) continue;
    if (std::abs(sum.coefficient(w) - c) > tol) {
      out.ok = false;
      diag << "term " << w.to_string() << ": splits sum to " << sum.coefficient(w)
           << ", expected " << c << "\n";
    }
  }
  for (const auto& [w, c] : sum.terms()) {
    if (std::abs(h.coefficient(w)) == 0.0 && std::abs(c) > tol) {
      out.ok = false;
      diag << "term " << w.to_string() << " absent from the Hamiltonian has weight " << c << "\n";
    }
  }
  if (std::abs(fs.identity - h.identity_coefficient()) > tol) {
    out.ok = false;
    diag << "identity scalar " << fs.identity << " differs from " << h.identity_coefficient() << "\n";
  }
  out.diagnostic = diag.str();
  return out;
}

}  // namespace qksd
