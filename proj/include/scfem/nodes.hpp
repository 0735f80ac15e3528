#ifndef SCFEM_NODES_HPP
#define SCFEM_NODES_HPP

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace scfem {

/// Nested 1D collocation point families on [-1,1].
enum class NodeFamily { Leja, ClenshawCurtis };

const char* family_name(NodeFamily f);

/// Level-to-count growth function: identity for Leja; 0, 1, 2^(i-1)+1 for
/// Clenshaw-Curtis.
int growth(NodeFamily family, int level);

/// Clenshaw-Curtis nodes for a valid count (1 or 2^(i-1)+1), sorted ascending.
std::vector<double> cc_nodes(int count);

/// First `count` points of the greedy Leja sequence started at 0 (ties broken
/// toward +1), in sequence order. leja_nodes(n) is a prefix of leja_nodes(n+1).
std::vector<double> leja_nodes(int count);

/// First `count` nodes of the family in canonical (first-appearance) order.
/// For either family, the level-`i` node set equals the prefix of length
/// growth(family, i), so the position in this sequence is a stable node id.
std::span<const double> sequence_nodes(NodeFamily family, int count);

/// Single node of the canonical sequence by ordinal (any ordinal >= 0).
double sequence_node(NodeFamily family, int ordinal);

/// Nodes and weights integrating g against the uniform probability measure
/// dy/2 on [-1,1]; exact for polynomials of degree <= 2n-1. Weights sum to 1.
struct Quadrature {
  std::vector<double> nodes;
  std::vector<double> weights;
};
const Quadrature& gauss_legendre(int n);

/// Value of the j-th Lagrange basis polynomial for the given nodes at y.
/// Nodes must be distinct. Uses the barycentric form.
double lagrange_eval(std::span<const double> nodes, int j, double y);

/// All basis values l_0(y)..l_{n-1}(y) at once (one barycentric sweep).
void lagrange_eval_all(std::span<const double> nodes, double y,
                       std::span<double> out);

/// Exact integrals  integral l_i^A(y) l_j^B(y) dy/2  for the level node sets
/// of sizes countA and countB (canonical sequence order). Memoized.
const Eigen::MatrixXd& lagrange_mass_1d(NodeFamily family, int countA,
                                        int countB);

}  // namespace scfem

#endif
