#ifndef SCFEM_SPARSE_GRID_HPP
#define SCFEM_SPARSE_GRID_HPP

#include <map>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "scfem/multi_index.hpp"
#include "scfem/nodes.hpp"

namespace scfem {

/// Collocation points are identified by per-dimension node ordinals in the
/// family's canonical sequence, never by floating-point coordinates. The
/// prefix property of the node sequences makes the ordinal of a 1D node equal
/// to its index within every level that contains it.
using PointKey = std::vector<int>;

/// Sparse grid of collocation points for a monotone index set: the
/// deduplicated union of the tensor grids of all members, ordered
/// lexicographically by node ordinals.
class SparseGrid {
 public:
  SparseGrid(IndexSet index_set, NodeFamily family);

  const IndexSet& index_set() const { return index_set_; }
  NodeFamily family() const { return family_; }
  int dim() const { return index_set_.dim(); }
  std::size_t size() const { return points_.size(); }
  const std::vector<PointKey>& points() const { return points_; }
  /// Ordinal of a point key; -1 if absent.
  int find(const PointKey& key) const;
  /// Coordinates of point i in [-1,1]^M.
  std::vector<double> coords(std::size_t i) const;

 private:
  IndexSet index_set_;
  NodeFamily family_;
  std::vector<PointKey> points_;
  std::map<PointKey, int> lookup_;
};

std::shared_ptr<const SparseGrid> build_grid(const IndexSet& I, NodeFamily family);

/// Values attached to the points of a sparse grid; scalars are stored as
/// vectors of length one. FE coefficient vectors are tagged with the id of
/// the mesh they live on (mesh_id < 0 for plain scalar data).
struct GridFunction {
  std::shared_ptr<const SparseGrid> grid;
  std::vector<Eigen::VectorXd> values;
  int mesh_id = -1;
};

GridFunction make_scalar_grid_function(std::shared_ptr<const SparseGrid> grid,
                                       std::span<const double> values);

/// One term of the inclusion-exclusion expansion of a sum of hierarchical
/// surplus operators: sign * (tensor of 1D Lagrange basis functions) * value
/// at a grid point.
struct SurplusTerm {
  double sign;
  std::vector<int> counts;  // per-dimension 1D node count of the factor
  std::vector<int> nodes;   // per-dimension node ordinal (= index in level)
  int point;                // ordinal of the referenced grid point
  int origin;               // position of the originating index in `origins`
};

/// Expansion of sum_{nu in origins} Delta^{m(nu)} applied to grid data.
/// The structure is independent of the attached values; evaluation and Gram
/// pairings take the value array separately.
struct SurplusExpansion {
  std::shared_ptr<const SparseGrid> grid;
  std::vector<MultiIndex> origins;
  std::vector<SurplusTerm> terms;

  NodeFamily family() const { return grid->family(); }
  int dim() const { return grid->dim(); }
};

/// Expansion of the full collocation operator S_I over the grid's index set.
SurplusExpansion expand_surpluses(std::shared_ptr<const SparseGrid> grid);

/// Keeps only the terms originating from indices in J (J must be a subset of
/// the expansion's origins).
SurplusExpansion restrict_to_indices(const SurplusExpansion& expansion,
                                     std::span<const MultiIndex> J);

/// Value of the expansion applied to scalar data at y in [-1,1]^M.
double evaluate(const SurplusExpansion& expansion, std::span<const double> values,
                std::span<const double> y);

/// Value of the expansion applied to vector data at y.
Eigen::VectorXd evaluate(const SurplusExpansion& expansion,
                         std::span<const Eigen::VectorXd> values,
                         std::span<const double> y);

/// Value of the expansion applied to a grid function's data at y.
Eigen::VectorXd evaluate(const SurplusExpansion& expansion, const GridFunction& f,
                         std::span<const double> y);

/// Matrix of pairing coefficients Lambda with
///   <A u, B v>_{L2_pi} = sum_{z,z'} Lambda(z,z') <u_z, v_z'>,
/// indexed by the point ordinals of the two grids. When both expansions carry
/// unit values at single points this is the Gram matrix of the Lagrange basis.
Eigen::MatrixXd parametric_gram(const SurplusExpansion& a,
                                const SurplusExpansion& b);

/// Diagonal of parametric_gram(a, a): squared L2_pi norms of the Lagrange
/// basis functions of a's grid when a is a full collocation expansion.
Eigen::VectorXd parametric_gram_diagonal(const SurplusExpansion& a);

/// sum_{z,z'} Lambda(z,z') v_z v_z'   (scalar data).
double bochner_norm_sq(const Eigen::MatrixXd& lambda, std::span<const double> values);

/// sum_{z,z'} Lambda(z,z') (v_z)^T K v_z'   (FE data with X-inner-product K).
double bochner_norm_sq(const Eigen::MatrixXd& lambda,
                       std::span<const Eigen::VectorXd> values,
                       const Eigen::SparseMatrix<double>& K);

/// Diagnostic upper-bound proxy for the Lebesgue constant of the surplus
/// operator: prod nu_m for CC, prod nu_m^2 max(1, ln nu_m) for Leja.
double lebesgue_bound(const MultiIndex& nu, NodeFamily family);

}  // namespace scfem

#endif
