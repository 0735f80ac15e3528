#ifndef SCFEM_MESH_HPP
#define SCFEM_MESH_HPP

#include <array>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace scfem {

struct MeshVertex {
  double x = 0.0;
  double y = 0.0;
  bool boundary = false;
  // endpoints of the bisected edge this vertex is the midpoint of,
  // or -1/-1 for vertices of the root mesh
  int parent_a = -1;
  int parent_b = -1;
};

/// Conforming 2D triangulation with newest-vertex-bisection state.
///
/// Triangles are stored as (v0, v1, v2) with positive orientation and the
/// reference edge fixed as (v0, v1). Refinement appends vertices, so every
/// descendant shares its ancestors' vertex numbering as a prefix; that makes
/// prolongation between related meshes a walk over midpoint parents.
/// Meshes are immutable once built.
class SimplexMesh {
 public:
  /// Builds a root mesh. Reference edges are set to the longest edge (ties
  /// broken by the lexicographically smallest vertex-index pair), triangles
  /// are reoriented counterclockwise, and boundary flags are derived from
  /// the edge audit (an edge on one triangle only is boundary).
  static std::shared_ptr<const SimplexMesh> create(
      std::vector<std::array<double, 2>> vertices,
      std::vector<std::array<int, 3>> triangles);

  int id() const { return id_; }
  int generation() const { return generation_; }
  const std::vector<MeshVertex>& vertices() const { return vertices_; }
  const std::vector<std::array<int, 3>>& triangles() const { return triangles_; }
  std::size_t vertex_count() const { return vertices_.size(); }
  std::size_t triangle_count() const { return triangles_.size(); }
  const SimplexMesh* parent() const { return parent_.get(); }
  std::shared_ptr<const SimplexMesh> parent_ptr() const { return parent_; }

  /// Vertex ids of the interior (non-boundary) vertices, ascending.
  const std::vector<int>& interior_vertices() const { return interior_; }

  double triangle_area(std::size_t t) const;
  double min_angle() const;

  /// Uniform refinement: every triangle split into four children by three
  /// bisections. Cached; repeated calls return the same mesh object.
  std::shared_ptr<const SimplexMesh> refined() const;

  /// Interior vertices of refined() that are not vertices of this mesh.
  std::vector<int> new_interior_vertices() const;

  /// Minimal NVB refinement (with conformity closure) making every marked
  /// vertex of refined() a mesh vertex. Marked ids must belong to
  /// new_interior_vertices(). An empty marking returns this mesh unchanged.
  std::shared_ptr<const SimplexMesh> refine_with_marked(
      std::span<const int> marked) const;

  /// True if `ancestor` appears on this mesh's parent chain (or is this mesh).
  bool derived_from(const SimplexMesh& ancestor) const;

  /// Canonical content hash (vertices, triangles, flags); equal inputs give
  /// equal meshes.
  std::uint64_t content_hash() const;

 private:
  SimplexMesh() = default;
  static std::shared_ptr<const SimplexMesh> bisect(
      const std::shared_ptr<const SimplexMesh>& self,
      const std::vector<std::array<bool, 3>>& marked_edges);
  void finalize_interior();

  std::vector<MeshVertex> vertices_;
  std::vector<std::array<int, 3>> triangles_;
  std::vector<int> interior_;
  std::shared_ptr<const SimplexMesh> parent_;
  int id_ = 0;
  int generation_ = 0;

  mutable std::mutex refine_mutex_;
  mutable std::shared_ptr<const SimplexMesh> refined_cache_;
  mutable std::weak_ptr<const SimplexMesh> self_;
};

/// Free-function spelling of SimplexMesh::refined().
std::shared_ptr<const SimplexMesh> uniform_refine(
    const std::shared_ptr<const SimplexMesh>& mesh);

/// Nodal interpolation of a P1 function (full vertex values, boundary
/// included) from a mesh onto a descendant. Exact embedding.
Eigen::VectorXd prolong_full(const SimplexMesh& coarse, const SimplexMesh& fine,
                             const Eigen::VectorXd& coarse_values);

/// Uniform right-triangle mesh of the unit square with n x n cells
/// (diagonals from bottom-left to top-right); 2 n^2 triangles.
std::shared_ptr<const SimplexMesh> unit_square_mesh(int n);

/// Uniform right-triangle mesh of the L-shape (-1,1)^2 minus (-1,0]^2 with
/// n x n cells per unit square; 6 n^2 triangles.
std::shared_ptr<const SimplexMesh> l_shape_mesh(int n);

}  // namespace scfem

#endif
