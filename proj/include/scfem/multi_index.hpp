#ifndef SCFEM_MULTI_INDEX_HPP
#define SCFEM_MULTI_INDEX_HPP

#include <span>
#include <string>
#include <vector>

namespace scfem {

/// Multi-index nu = [nu_1,...,nu_M] with every entry >= 1.
using MultiIndex = std::vector<int>;

std::string to_string(const MultiIndex& nu);

/// Downward-closed (monotone) finite set of multi-indices of fixed dimension.
///
/// Invariants enforced at construction: contains the root [1,...,1] when
/// nonempty, no duplicates, and nu in I implies nu - e_m in I for every m
/// with nu_m > 1. Indices are kept in ascending lexicographic order, which
/// fixes tie-breaking everywhere downstream.
class IndexSet {
 public:
  /// Builds the singleton {[1,...,1]} in dimension m.
  explicit IndexSet(int dim);
  /// Builds from an explicit list; throws ContractError if not monotone.
  IndexSet(int dim, std::vector<MultiIndex> indices);

  int dim() const { return dim_; }
  std::size_t size() const { return indices_.size(); }
  const std::vector<MultiIndex>& indices() const { return indices_; }
  const MultiIndex& operator[](std::size_t i) const { return indices_[i]; }
  bool contains(const MultiIndex& nu) const;

 private:
  int dim_;
  std::vector<MultiIndex> indices_;  // lexicographically sorted
};

/// True iff the collection is downward closed (and contains the root when
/// nonempty). Throws ContractError on mismatched dimensions.
bool is_monotone(std::span<const MultiIndex> indices);

/// Reduced margin of I: indices outside I whose backward neighbours all lie
/// in I. Adding any subset of the result to I preserves monotonicity.
std::vector<MultiIndex> reduced_margin(const IndexSet& I);

/// I union added; `added` must be a subset of reduced_margin(I).
IndexSet enrich(const IndexSet& I, std::span<const MultiIndex> added);

/// ||nu||_1.
int one_norm(const MultiIndex& nu);

}  // namespace scfem

#endif
