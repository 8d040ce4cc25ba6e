#pragma once

#include <string>
#include <utility>
#include <vector>

#include "qksd/fermion.hpp"
#include "qksd/pauli.hpp"

namespace qksd {

enum class GroupingMode { LCU, FH, TERMWISE };

std::string to_string(GroupingMode m);
GroupingMode grouping_mode_from_string(const std::string& s);

/// Insertion predicate used by SORTED INSERTION.
enum class Compatibility { Commuting, Anticommuting };

/// One measurable group: Pauli words with (split) coefficients.
struct PauliFragment {
  std::vector<std::pair<PauliWord, double>> terms;

  /// L2 norm of the coefficients; equals (Tr[N^2]/d)^{1/2} for distinct words.
  double norm() const;
  PauliSum as_sum(int n_qubits) const;
};

/// One term-wise fermionic fragment: a single operator family member with
/// its coefficient and the per-unit trace weight.
struct FermionFragment {
  std::string label;
  double coefficient = 0.0;
  double unit_weight = 0.0;
  double norm() const;
};

struct FragmentSet {
  GroupingMode mode = GroupingMode::FH;
  int n_qubits = 0;
  /// Identity coefficient carried beside the groups, never grouped.
  double identity = 0.0;
  std::vector<PauliFragment> groups;           // LCU / FH
  std::vector<FermionFragment> fermion_groups;  // TERMWISE

  std::size_t size() const;
  std::vector<double> weights() const;
  /// Sum of all group operators, identity included.
  PauliSum reconstruct() const;
};

/// Greedy SORTED INSERTION. Terms are visited by descending |alpha| with ties
/// broken by canonical word order and placed into the first group whose
/// members are all compatible, else into a new group.
FragmentSet sorted_insertion(const PauliSum& h, Compatibility c);
inline FragmentSet sorted_insertion(const PauliSum& h, GroupingMode m) {
  return sorted_insertion(h, m == GroupingMode::LCU ? Compatibility::Anticommuting
                                                     : Compatibility::Commuting);
}

/// Words of h (identity excluded) in SORTED INSERTION visiting order.
std::vector<std::pair<PauliWord, double>> insertion_order(const PauliSum& h);

/// One fragment per term of the shift normal form with the term-wise weights:
/// n_r and E_rs (r<s) at 1/sqrt(2), E_rs n_q at sqrt((3 delta_rs + 1)/2) and
/// four-index two-body terms at 1.
FragmentSet termwise_fermionic_grouping(const FermionSum& f);
FragmentSet termwise_fermionic_grouping(const ShiftForm& sf);

double decomposition_norm(const FragmentSet& fs);

struct PartitionCheck {
  bool ok = true;
  std::string diagnostic;
  explicit operator bool() const { return ok; }
};

/// Checks reconstruction of h within `tol` and the pairwise relation required
/// by the mode inside every group.
PartitionCheck verify_partition(const FragmentSet& fs, const PauliSum& h, double tol = 1e-12);

}  // namespace qksd
