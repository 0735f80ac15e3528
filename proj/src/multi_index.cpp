#include "scfem/multi_index.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "scfem/errors.hpp"

namespace scfem {

std::string to_string(const MultiIndex& nu) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < nu.size(); ++i) {
    if (i) os << ',';
    os << nu[i];
  }
  os << ')';
  return os.str();
}

int one_norm(const MultiIndex& nu) {
  int s = 0;
  for (int v : nu) s += v;
  return s;
}

namespace {

void check_entries(const MultiIndex& nu, int dim) {
  if (static_cast<int>(nu.size()) != dim)
    throw ContractError("multi-index dimension mismatch: " + to_string(nu));
  for (int v : nu)
    if (v < 1) throw ContractError("multi-index entry < 1: " + to_string(nu));
}

}  // namespace

bool is_monotone(std::span<const MultiIndex> indices) {
  if (indices.empty()) return true;
  const int dim = static_cast<int>(indices.front().size());
  std::set<MultiIndex> members;
  for (const auto& nu : indices) {
    check_entries(nu, dim);
    members.insert(nu);
  }
  MultiIndex root(dim, 1);
  if (!members.count(root)) return false;
  for (const auto& nu : members) {
    MultiIndex back = nu;
    for (int m = 0; m < dim; ++m) {
      if (nu[m] > 1) {
        back[m] -= 1;
        const bool found = members.count(back) != 0;
        back[m] += 1;
        if (!found) return false;
      }
    }
  }
  return true;
}

IndexSet::IndexSet(int dim) : dim_(dim) {
  if (dim < 1) throw ContractError("index set dimension must be >= 1");
  indices_.push_back(MultiIndex(dim, 1));
}

IndexSet::IndexSet(int dim, std::vector<MultiIndex> indices) : dim_(dim) {
  for (const auto& nu : indices) check_entries(nu, dim);
  std::sort(indices.begin(), indices.end());
  indices.erase(std::unique(indices.begin(), indices.end()), indices.end());
  if (!is_monotone(indices))
    throw ContractError("index set is not downward closed");
  if (indices.empty()) throw ContractError("index set must contain the root");
  indices_ = std::move(indices);
}

bool IndexSet::contains(const MultiIndex& nu) const {
  return std::binary_search(indices_.begin(), indices_.end(), nu);
}

std::vector<MultiIndex> reduced_margin(const IndexSet& I) {
  // Scan nu + e_m for nu in I and keep candidates all of whose backward
  // neighbours are members.
  std::set<MultiIndex> candidates;
  for (const auto& nu : I.indices()) {
    MultiIndex fwd = nu;
    for (int m = 0; m < I.dim(); ++m) {
      fwd[m] += 1;
      if (!I.contains(fwd)) candidates.insert(fwd);
      fwd[m] -= 1;
    }
  }
  std::vector<MultiIndex> result;
  for (const auto& nu : candidates) {
    bool admissible = true;
    MultiIndex back = nu;
    for (int m = 0; m < I.dim() && admissible; ++m) {
      if (nu[m] > 1) {
        back[m] -= 1;
        admissible = I.contains(back);
        back[m] += 1;
      }
    }
    if (admissible) result.push_back(nu);
  }
  return result;  // std::set iteration is already lexicographic
}

IndexSet enrich(const IndexSet& I, std::span<const MultiIndex> added) {
  const auto margin = reduced_margin(I);
  for (const auto& nu : added) {
    if (!std::binary_search(margin.begin(), margin.end(), nu))
      throw ContractError("enrich: index " + to_string(nu) +
                          " is not in the reduced margin");
  }
  std::vector<MultiIndex> merged = I.indices();
  merged.insert(merged.end(), added.begin(), added.end());
  return IndexSet(I.dim(), std::move(merged));
}

}  // namespace scfem
