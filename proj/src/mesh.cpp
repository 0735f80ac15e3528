#include "scfem/mesh.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>
#include <map>
#include <set>

#include "scfem/errors.hpp"

namespace scfem {

namespace {

std::atomic<int> next_mesh_id{1};

std::pair<int, int> edge_key(int a, int b) { return {std::min(a, b), std::max(a, b)}; }

double edge_length_sq(const std::vector<MeshVertex>& v, int a, int b) {
  const double dx = v[a].x - v[b].x;
  const double dy = v[a].y - v[b].y;
  return dx * dx + dy * dy;
}

double signed_area(const std::vector<MeshVertex>& v, const std::array<int, 3>& t) {
  return 0.5 * ((v[t[1]].x - v[t[0]].x) * (v[t[2]].y - v[t[0]].y) -
                (v[t[2]].x - v[t[0]].x) * (v[t[1]].y - v[t[0]].y));
}

}  // namespace

std::shared_ptr<const SimplexMesh> SimplexMesh::create(
    std::vector<std::array<double, 2>> vertices,
    std::vector<std::array<int, 3>> triangles) {
  auto mesh = std::shared_ptr<SimplexMesh>(new SimplexMesh());
  mesh->id_ = next_mesh_id.fetch_add(1);
  mesh->vertices_.reserve(vertices.size());
  for (const auto& p : vertices)
    mesh->vertices_.push_back(MeshVertex{p[0], p[1], false, -1, -1});

  const int nv = static_cast<int>(vertices.size());
  for (auto& t : triangles) {
    for (int k = 0; k < 3; ++k)
      if (t[k] < 0 || t[k] >= nv) throw ContractError("triangle vertex out of range");
    if (signed_area(mesh->vertices_, t) == 0.0)
      throw ContractError("degenerate triangle in root mesh");
    if (signed_area(mesh->vertices_, t) < 0.0) std::swap(t[1], t[2]);
    // cyclic rotation so that the reference edge (t0,t1) is the longest edge,
    // ties broken by the smallest sorted vertex-index pair
    int best = 0;
    double best_len = -1.0;
    std::pair<int, int> best_key{0, 0};
    for (int r = 0; r < 3; ++r) {
      const int a = t[r], b = t[(r + 1) % 3];
      const double len = edge_length_sq(mesh->vertices_, a, b);
      const auto key = edge_key(a, b);
      if (len > best_len + 1e-15 * (1.0 + best_len) ||
          (std::abs(len - best_len) <= 1e-15 * (1.0 + best_len) && key < best_key)) {
        best = r;
        best_len = len;
        best_key = key;
      }
    }
    t = {t[best], t[(best + 1) % 3], t[(best + 2) % 3]};
  }
  mesh->triangles_ = std::move(triangles);

  // boundary = edges used by exactly one triangle
  std::map<std::pair<int, int>, int> edge_use;
  for (const auto& t : mesh->triangles_)
    for (int k = 0; k < 3; ++k) edge_use[edge_key(t[k], t[(k + 1) % 3])] += 1;
  for (const auto& [e, uses] : edge_use) {
    if (uses == 1) {
      mesh->vertices_[e.first].boundary = true;
      mesh->vertices_[e.second].boundary = true;
    } else if (uses > 2) {
      throw ContractError("non-manifold edge in root mesh");
    }
  }
  mesh->finalize_interior();
  mesh->self_ = mesh;
  return mesh;
}

void SimplexMesh::finalize_interior() {
  interior_.clear();
  for (int i = 0; i < static_cast<int>(vertices_.size()); ++i)
    if (!vertices_[i].boundary) interior_.push_back(i);
}

double SimplexMesh::triangle_area(std::size_t t) const {
  return std::abs(signed_area(vertices_, triangles_[t]));
}

double SimplexMesh::min_angle() const {
  double best = M_PI;
  for (const auto& t : triangles_) {
    for (int k = 0; k < 3; ++k) {
      const auto& a = vertices_[t[k]];
      const auto& b = vertices_[t[(k + 1) % 3]];
      const auto& c = vertices_[t[(k + 2) % 3]];
      const double ux = b.x - a.x, uy = b.y - a.y;
      const double vx = c.x - a.x, vy = c.y - a.y;
      const double dot = ux * vx + uy * vy;
      const double nu = std::hypot(ux, uy), nv = std::hypot(vx, vy);
      best = std::min(best, std::acos(std::clamp(dot / (nu * nv), -1.0, 1.0)));
    }
  }
  return best;
}

// Bisection refinement for a compatible set of marked edges. After closure,
// every triangle with any marked edge has its reference edge marked; each
// triangle is then split into 2, 3 or 4 children by successive reference-edge
// bisections. Children inherit the NVB convention: the new vertex is last,
// the reference edge of a child is its (v0, v1) edge.
std::shared_ptr<const SimplexMesh> SimplexMesh::bisect(
    const std::shared_ptr<const SimplexMesh>& self,
    const std::vector<std::array<bool, 3>>& marked_edges) {
  auto mesh = std::shared_ptr<SimplexMesh>(new SimplexMesh());
  mesh->id_ = next_mesh_id.fetch_add(1);
  mesh->generation_ = self->generation_ + 1;
  mesh->parent_ = self;
  mesh->vertices_ = self->vertices_;

  std::map<std::pair<int, int>, int> midpoint;
  auto midpoint_of = [&](int a, int b) {
    const auto key = edge_key(a, b);
    auto it = midpoint.find(key);
    if (it != midpoint.end()) return it->second;
    MeshVertex mv;
    mv.x = 0.5 * (mesh->vertices_[a].x + mesh->vertices_[b].x);
    mv.y = 0.5 * (mesh->vertices_[a].y + mesh->vertices_[b].y);
    mv.boundary = false;  // fixed after the edge audit
    mv.parent_a = key.first;
    mv.parent_b = key.second;
    const int id = static_cast<int>(mesh->vertices_.size());
    mesh->vertices_.push_back(mv);
    midpoint[key] = id;
    return id;
  };

  for (std::size_t ti = 0; ti < self->triangles_.size(); ++ti) {
    const auto& t = self->triangles_[ti];
    const auto& m = marked_edges[ti];
    if (!m[0] && !m[1] && !m[2]) {
      mesh->triangles_.push_back(t);
      continue;
    }
    if (!m[0])
      throw ContractError("bisect: closure invariant violated (unmarked reference edge)");
    const int z1 = t[0], z2 = t[1], z3 = t[2];
    const int m12 = midpoint_of(z1, z2);
    // first bisection: children (z3, z1, m12) and (z2, z3, m12)
    if (m[2]) {  // edge (z3, z1)
      const int m31 = midpoint_of(z3, z1);
      mesh->triangles_.push_back({m12, z3, m31});
      mesh->triangles_.push_back({z1, m12, m31});
    } else {
      mesh->triangles_.push_back({z3, z1, m12});
    }
    if (m[1]) {  // edge (z2, z3)
      const int m23 = midpoint_of(z2, z3);
      mesh->triangles_.push_back({m12, z2, m23});
      mesh->triangles_.push_back({z3, m12, m23});
    } else {
      mesh->triangles_.push_back({z2, z3, m12});
    }
  }

  // boundary audit on the refined mesh
  {
    std::map<std::pair<int, int>, int> edge_use;
    for (const auto& t : mesh->triangles_)
      for (int k = 0; k < 3; ++k) edge_use[edge_key(t[k], t[(k + 1) % 3])] += 1;
    for (auto& v : mesh->vertices_) v.boundary = false;
    for (const auto& [e, uses] : edge_use) {
      if (uses == 1) {
        mesh->vertices_[e.first].boundary = true;
        mesh->vertices_[e.second].boundary = true;
      } else if (uses > 2) {
        throw ContractError("bisect produced a non-manifold edge");
      }
    }
  }
  mesh->finalize_interior();
  mesh->self_ = mesh;
  return mesh;
}

std::shared_ptr<const SimplexMesh> SimplexMesh::refined() const {
  std::lock_guard<std::mutex> lock(refine_mutex_);
  if (refined_cache_) return refined_cache_;
  auto self = self_.lock();
  if (!self) throw ContractError("mesh not owned by shared_ptr");
  std::vector<std::array<bool, 3>> all(triangles_.size(), {true, true, true});
  refined_cache_ = bisect(self, all);
  return refined_cache_;
}

std::shared_ptr<const SimplexMesh> uniform_refine(
    const std::shared_ptr<const SimplexMesh>& mesh) {
  return mesh->refined();
}

std::vector<int> SimplexMesh::new_interior_vertices() const {
  const auto fine = refined();
  std::vector<int> result;
  for (int i = static_cast<int>(vertices_.size());
       i < static_cast<int>(fine->vertices_.size()); ++i)
    if (!fine->vertices()[i].boundary) result.push_back(i);
  return result;
}

std::shared_ptr<const SimplexMesh> SimplexMesh::refine_with_marked(
    std::span<const int> marked) const {
  auto self = self_.lock();
  if (!self) throw ContractError("mesh not owned by shared_ptr");
  if (marked.empty()) return self;

  const auto fine = refined();
  const auto nplus = new_interior_vertices();
  std::set<std::pair<int, int>> marked_edges;
  for (int id : marked) {
    if (!std::binary_search(nplus.begin(), nplus.end(), id))
      throw ContractError("refine_with_marked: vertex " + std::to_string(id) +
                          " is not a new interior vertex");
    const auto& v = fine->vertices()[id];
    marked_edges.insert(edge_key(v.parent_a, v.parent_b));
  }

  // conformity closure: a triangle with any marked edge gets its reference
  // edge marked too; iterate to the fixed point
  std::vector<std::array<bool, 3>> flags(triangles_.size(), {false, false, false});
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t ti = 0; ti < triangles_.size(); ++ti) {
      const auto& t = triangles_[ti];
      for (int k = 0; k < 3; ++k)
        flags[ti][k] = marked_edges.count(edge_key(t[k], t[(k + 1) % 3])) != 0;
      if ((flags[ti][1] || flags[ti][2]) && !flags[ti][0]) {
        marked_edges.insert(edge_key(t[0], t[1]));
        flags[ti][0] = true;
        changed = true;
      }
    }
  }
  return bisect(self, flags);
}

bool SimplexMesh::derived_from(const SimplexMesh& ancestor) const {
  const SimplexMesh* m = this;
  while (m) {
    if (m->id_ == ancestor.id_) return true;
    m = m->parent_.get();
  }
  return false;
}

std::uint64_t SimplexMesh::content_hash() const {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](std::uint64_t v) {
    h ^= v;
    h *= 1099511628211ull;
  };
  auto mix_double = [&](double d) {
    std::uint64_t bits;
    static_assert(sizeof(bits) == sizeof(d));
    std::memcpy(&bits, &d, sizeof(bits));
    mix(bits);
  };
  for (const auto& v : vertices_) {
    mix_double(v.x);
    mix_double(v.y);
    mix(v.boundary ? 1 : 0);
  }
  for (const auto& t : triangles_) {
    mix(static_cast<std::uint64_t>(t[0]));
    mix(static_cast<std::uint64_t>(t[1]));
    mix(static_cast<std::uint64_t>(t[2]));
  }
  return h;
}

Eigen::VectorXd prolong_full(const SimplexMesh& coarse, const SimplexMesh& fine,
                             const Eigen::VectorXd& coarse_values) {
  if (!fine.derived_from(coarse))
    throw ContractError("prolong: meshes are not related by refinement");
  if (coarse_values.size() != static_cast<Eigen::Index>(coarse.vertex_count()))
    throw ContractError("prolong: value count does not match the coarse mesh");
  Eigen::VectorXd out(fine.vertex_count());
  out.head(coarse_values.size()) = coarse_values;
  for (std::size_t i = coarse.vertex_count(); i < fine.vertex_count(); ++i) {
    const auto& v = fine.vertices()[i];
    out[static_cast<Eigen::Index>(i)] = 0.5 * (out[v.parent_a] + out[v.parent_b]);
  }
  return out;
}

std::shared_ptr<const SimplexMesh> unit_square_mesh(int n) {
  if (n < 1) throw ContractError("unit_square_mesh: n must be >= 1");
  std::vector<std::array<double, 2>> vertices;
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i)
      vertices.push_back({static_cast<double>(i) / n, static_cast<double>(j) / n});
  auto vid = [n](int i, int j) { return j * (n + 1) + i; };
  std::vector<std::array<int, 3>> tris;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      // diagonal from bottom-left to top-right
      tris.push_back({vid(i, j), vid(i + 1, j), vid(i + 1, j + 1)});
      tris.push_back({vid(i, j), vid(i + 1, j + 1), vid(i, j + 1)});
    }
  }
  return SimplexMesh::create(std::move(vertices), std::move(tris));
}

std::shared_ptr<const SimplexMesh> l_shape_mesh(int n) {
  if (n < 1) throw ContractError("l_shape_mesh: n must be >= 1");
  // grid over [-1,1]^2 at spacing 1/n, keeping cells outside (-1,0]^2
  std::map<std::pair<int, int>, int> ids;
  std::vector<std::array<double, 2>> vertices;
  auto vid = [&](int i, int j) {
    const auto key = std::make_pair(i, j);
    auto it = ids.find(key);
    if (it != ids.end()) return it->second;
    const int id = static_cast<int>(vertices.size());
    vertices.push_back({static_cast<double>(i) / n, static_cast<double>(j) / n});
    ids[key] = id;
    return id;
  };
  std::vector<std::array<int, 3>> tris;
  for (int j = -n; j < n; ++j) {
    for (int i = -n; i < n; ++i) {
      if (i < 0 && j < 0) continue;  // removed quadrant
      const int a = vid(i, j), b = vid(i + 1, j), c = vid(i + 1, j + 1), d = vid(i, j + 1);
      tris.push_back({a, b, c});
      tris.push_back({a, c, d});
    }
  }
  return SimplexMesh::create(std::move(vertices), std::move(tris));
}

}  // namespace scfem
