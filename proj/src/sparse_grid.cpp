#include "scfem/sparse_grid.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "scfem/errors.hpp"

namespace scfem {

SparseGrid::SparseGrid(IndexSet index_set, NodeFamily family)
    : index_set_(std::move(index_set)), family_(family) {
  const int M = index_set_.dim();
  std::set<PointKey> keys;
  for (const auto& nu : index_set_.indices()) {
    std::vector<int> counts(M);
    for (int m = 0; m < M; ++m) counts[m] = growth(family_, nu[m]);
    PointKey key(M, 0);
    // enumerate the tensor grid of node ordinals [0, counts_m)
    while (true) {
      keys.insert(key);
      int m = M - 1;
      while (m >= 0) {
        if (++key[m] < counts[m]) break;
        key[m] = 0;
        --m;
      }
      if (m < 0) break;
    }
  }
  points_.assign(keys.begin(), keys.end());
  for (std::size_t i = 0; i < points_.size(); ++i)
    lookup_[points_[i]] = static_cast<int>(i);
}

int SparseGrid::find(const PointKey& key) const {
  auto it = lookup_.find(key);
  return it == lookup_.end() ? -1 : it->second;
}

std::vector<double> SparseGrid::coords(std::size_t i) const {
  const PointKey& key = points_.at(i);
  std::vector<double> x(key.size());
  for (std::size_t m = 0; m < key.size(); ++m)
    x[m] = sequence_node(family_, key[m]);
  return x;
}

std::shared_ptr<const SparseGrid> build_grid(const IndexSet& I, NodeFamily family) {
  return std::make_shared<SparseGrid>(I, family);
}

GridFunction make_scalar_grid_function(std::shared_ptr<const SparseGrid> grid,
                                       std::span<const double> values) {
  if (values.size() != grid->size())
    throw ContractError("grid function: one value per grid point required");
  GridFunction f;
  f.grid = std::move(grid);
  f.values.reserve(values.size());
  for (double v : values) f.values.push_back(Eigen::VectorXd::Constant(1, v));
  return f;
}

SurplusExpansion expand_surpluses(std::shared_ptr<const SparseGrid> grid) {
  SurplusExpansion e;
  e.grid = grid;
  e.origins = grid->index_set().indices();
  const int M = grid->dim();
  const NodeFamily fam = grid->family();
  for (std::size_t oi = 0; oi < e.origins.size(); ++oi) {
    const MultiIndex& nu = e.origins[oi];
    // Delta^{m(nu)} = sum over s in {0,1}^M of (-1)^{|s|} tensor L^{mf(nu_m - s_m)}
    for (int s = 0; s < (1 << M); ++s) {
      std::vector<int> counts(M);
      bool vanishes = false;
      int bits = 0;
      for (int m = 0; m < M; ++m) {
        const int drop = (s >> m) & 1;
        bits += drop;
        counts[m] = growth(fam, nu[m] - drop);
        if (counts[m] == 0) vanishes = true;  // L^0 = 0
      }
      if (vanishes) continue;
      const double sign = (bits % 2 == 0) ? 1.0 : -1.0;
      PointKey key(M, 0);
      while (true) {
        SurplusTerm t;
        t.sign = sign;
        t.counts = counts;
        t.nodes = key;
        t.point = grid->find(key);
        t.origin = static_cast<int>(oi);
        if (t.point < 0)
          throw ContractError("surplus term references a point outside the grid");
        e.terms.push_back(std::move(t));
        int m = M - 1;
        while (m >= 0) {
          if (++key[m] < counts[m]) break;
          key[m] = 0;
          --m;
        }
        if (m < 0) break;
      }
    }
  }
  return e;
}

SurplusExpansion restrict_to_indices(const SurplusExpansion& expansion,
                                     std::span<const MultiIndex> J) {
  std::set<MultiIndex> wanted(J.begin(), J.end());
  for (const auto& nu : wanted) {
    if (std::find(expansion.origins.begin(), expansion.origins.end(), nu) ==
        expansion.origins.end())
      throw ContractError("restrict_to_indices: " + to_string(nu) +
                          " is not an origin of the expansion");
  }
  SurplusExpansion out;
  out.grid = expansion.grid;
  std::vector<int> remap(expansion.origins.size(), -1);
  for (std::size_t oi = 0; oi < expansion.origins.size(); ++oi) {
    if (wanted.count(expansion.origins[oi])) {
      remap[oi] = static_cast<int>(out.origins.size());
      out.origins.push_back(expansion.origins[oi]);
    }
  }
  for (const auto& t : expansion.terms) {
    if (remap[t.origin] >= 0) {
      out.terms.push_back(t);
      out.terms.back().origin = remap[t.origin];
    }
  }
  return out;
}

namespace {

// Per-dimension tables of 1D basis values at the evaluation point, one row
// per distinct count appearing in the expansion.
class BasisTable {
 public:
  BasisTable(const SurplusExpansion& e, std::span<const double> y) {
    const int M = e.dim();
    tables_.resize(M);
    for (const auto& t : e.terms)
      for (int m = 0; m < M; ++m)
        if (!tables_[m].count(t.counts[m])) tables_[m][t.counts[m]] = {};
    for (int m = 0; m < M; ++m) {
      for (auto& [count, vals] : tables_[m]) {
        vals.resize(count);
        lagrange_eval_all(sequence_nodes(e.family(), count), y[m], vals);
      }
    }
  }

  double weight(const SurplusTerm& t) const {
    double w = t.sign;
    for (std::size_t m = 0; m < t.counts.size(); ++m)
      w *= tables_[m].at(t.counts[m])[t.nodes[m]];
    return w;
  }

 private:
  std::vector<std::map<int, std::vector<double>>> tables_;
};

}  // namespace

double evaluate(const SurplusExpansion& expansion, std::span<const double> values,
                std::span<const double> y) {
  if (values.size() != expansion.grid->size())
    throw ContractError("evaluate: one value per grid point required");
  BasisTable table(expansion, y);
  double acc = 0.0;
  for (const auto& t : expansion.terms) acc += table.weight(t) * values[t.point];
  return acc;
}

Eigen::VectorXd evaluate(const SurplusExpansion& expansion,
                         std::span<const Eigen::VectorXd> values,
                         std::span<const double> y) {
  if (values.size() != expansion.grid->size())
    throw ContractError("evaluate: one value per grid point required");
  BasisTable table(expansion, y);
  Eigen::VectorXd acc;
  for (const auto& t : expansion.terms) {
    const double w = table.weight(t);
    if (acc.size() == 0)
      acc = w * values[t.point];
    else
      acc += w * values[t.point];
  }
  return acc;
}

Eigen::VectorXd evaluate(const SurplusExpansion& expansion, const GridFunction& f,
                         std::span<const double> y) {
  if (f.grid.get() != expansion.grid.get())
    throw ContractError("evaluate: grid function lives on a different grid");
  return evaluate(expansion, std::span<const Eigen::VectorXd>(f.values), y);
}

namespace {

double term_pair_mass(const SurplusTerm& a, const SurplusTerm& b, NodeFamily fam,
                      int M) {
  double w = a.sign * b.sign;
  for (int m = 0; m < M; ++m) {
    w *= lagrange_mass_1d(fam, a.counts[m], b.counts[m])(a.nodes[m], b.nodes[m]);
    if (w == 0.0) return 0.0;
  }
  return w;
}

}  // namespace

Eigen::MatrixXd parametric_gram(const SurplusExpansion& a,
                                const SurplusExpansion& b) {
  if (a.dim() != b.dim() || a.family() != b.family())
    throw ContractError("parametric_gram: incompatible expansions");
  const int M = a.dim();
  const NodeFamily fam = a.family();
  Eigen::MatrixXd lambda =
      Eigen::MatrixXd::Zero(static_cast<int>(a.grid->size()),
                            static_cast<int>(b.grid->size()));
  for (const auto& ta : a.terms)
    for (const auto& tb : b.terms)
      lambda(ta.point, tb.point) += term_pair_mass(ta, tb, fam, M);
  return lambda;
}

Eigen::VectorXd parametric_gram_diagonal(const SurplusExpansion& a) {
  // Pairs of terms hitting the same grid point only.
  const int M = a.dim();
  const NodeFamily fam = a.family();
  std::vector<std::vector<const SurplusTerm*>> by_point(a.grid->size());
  for (const auto& t : a.terms) by_point[t.point].push_back(&t);
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(static_cast<int>(a.grid->size()));
  for (std::size_t p = 0; p < by_point.size(); ++p) {
    double acc = 0.0;
    for (const auto* ta : by_point[p])
      for (const auto* tb : by_point[p]) acc += term_pair_mass(*ta, *tb, fam, M);
    diag[static_cast<int>(p)] = acc;
  }
  return diag;
}

double bochner_norm_sq(const Eigen::MatrixXd& lambda, std::span<const double> values) {
  Eigen::Map<const Eigen::VectorXd> v(values.data(), values.size());
  return v.dot(lambda * v);
}

double bochner_norm_sq(const Eigen::MatrixXd& lambda,
                       std::span<const Eigen::VectorXd> values,
                       const Eigen::SparseMatrix<double>& K) {
  // Restrict the K-multiplies to points actually touched by the pairing.
  const int n = static_cast<int>(values.size());
  std::vector<char> active(n, 0);
  for (int i = 0; i < n; ++i)
    if (lambda.row(i).cwiseAbs().maxCoeff() > 0.0 ||
        lambda.col(i).cwiseAbs().maxCoeff() > 0.0)
      active[i] = 1;
  std::vector<Eigen::VectorXd> kv(n);
  for (int i = 0; i < n; ++i)
    if (active[i]) kv[i] = K * values[i];
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    if (!active[i]) continue;
    for (int j = 0; j < n; ++j) {
      const double l = lambda(i, j);
      if (l != 0.0 && active[j]) acc += l * values[i].dot(kv[j]);
    }
  }
  return acc;
}

double lebesgue_bound(const MultiIndex& nu, NodeFamily family) {
  double b = 1.0;
  for (int v : nu) {
    if (v < 1) throw ContractError("lebesgue_bound: entries must be >= 1");
    if (family == NodeFamily::ClenshawCurtis)
      b *= v;
    else
      b *= static_cast<double>(v) * v * std::max(1.0, std::log(static_cast<double>(v)));
  }
  return b;
}

}  // namespace scfem
