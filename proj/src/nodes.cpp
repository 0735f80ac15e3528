#include "scfem/nodes.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

#include "scfem/errors.hpp"

namespace scfem {

const char* family_name(NodeFamily f) {
  return f == NodeFamily::Leja ? "leja" : "cc";
}

int growth(NodeFamily family, int level) {
  if (level < 0) throw ContractError("growth: negative level");
  if (family == NodeFamily::Leja) return level;
  if (level <= 1) return level;
  return (1 << (level - 1)) + 1;
}

std::vector<double> cc_nodes(int count) {
  bool valid = (count == 1);
  for (int i = 2; !valid && growth(NodeFamily::ClenshawCurtis, i) <= count; ++i)
    valid = growth(NodeFamily::ClenshawCurtis, i) == count;
  if (!valid) throw ContractError("cc_nodes: invalid count " + std::to_string(count));
  if (count == 1) return {0.0};
  std::vector<double> nodes(count);
  for (int j = 0; j < count; ++j)
    nodes[j] = std::cos(M_PI * static_cast<double>(j) / (count - 1));
  std::sort(nodes.begin(), nodes.end());
  nodes.front() = -1.0;
  nodes.back() = 1.0;
  if (count % 2 == 1) nodes[count / 2] = 0.0;
  return nodes;
}

namespace {

template <class F>
double golden_max(double a, double b, F objective) {
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - gr * (b - a);
  double d = a + gr * (b - a);
  double fc = objective(c), fd = objective(d);
  while (b - a > 1e-12) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = objective(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = objective(d);
    }
  }
  return 0.5 * (a + b);
}

// Greedy Leja step: maximize prod |y - xi_j| over [-1,1]. A coarse scan
// locates the global maximum; golden-section refinement runs in each
// sub-interval between current nodes and around the scan winner. Between
// consecutive nodes the product has a single interior extremum, and beyond
// the outermost nodes it is increasing toward the endpoints. Ties resolve
// toward the largest y.
double next_leja(const std::vector<double>& nodes) {
  auto objective = [&](double y) {
    double p = 1.0;
    for (double x : nodes) p *= std::abs(y - x);
    return p;
  };
  std::vector<double> sorted(nodes);
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> candidates;
  if (sorted.front() > -1.0) candidates.push_back(-1.0);
  if (sorted.back() < 1.0) candidates.push_back(1.0);
  for (std::size_t g = 0; g + 1 < sorted.size(); ++g) {
    if (sorted[g + 1] - sorted[g] < 1e-14) continue;
    candidates.push_back(golden_max(sorted[g], sorted[g + 1], objective));
  }
  constexpr int kScan = 4096;
  int best_k = 0;
  double best_scan = -1.0;
  for (int k = 0; k <= kScan; ++k) {
    const double y = -1.0 + 2.0 * k / kScan;
    const double v = objective(y);
    if (v > best_scan) {
      best_scan = v;
      best_k = k;
    }
  }
  candidates.push_back(golden_max(-1.0 + 2.0 * std::max(0, best_k - 1) / kScan,
                                  -1.0 + 2.0 * std::min(kScan, best_k + 1) / kScan,
                                  objective));
  double best_y = candidates.front();
  double best_v = objective(best_y);
  for (double y : candidates) {
    const double v = objective(y);
    if (v > best_v * (1.0 + 1e-9) || (v >= best_v * (1.0 - 1e-9) && y > best_y)) {
      best_v = std::max(v, best_v);
      best_y = y;
    }
  }
  return best_y;
}

struct FamilyCache {
  std::mutex mutex;
  std::vector<double> sequence;
};

FamilyCache& cache_for(NodeFamily family) {
  static FamilyCache leja, cc;
  return family == NodeFamily::Leja ? leja : cc;
}

// Extends the canonical node sequence so that its length is >= count.
// Leja: greedy order. CC: nodes of each level appended in ascending order at
// the level where they first appear; each level's node set is then exactly
// the sequence prefix of the level's count.
void ensure_sequence(NodeFamily family, int count) {
  FamilyCache& fc = cache_for(family);
  std::lock_guard<std::mutex> lock(fc.mutex);
  auto& seq = fc.sequence;
  if (static_cast<int>(seq.size()) >= count) return;
  if (family == NodeFamily::Leja) {
    if (seq.empty()) seq.push_back(0.0);
    while (static_cast<int>(seq.size()) < count) seq.push_back(next_leja(seq));
  } else {
    if (seq.empty()) seq.push_back(0.0);
    // resume at the first incomplete level (whole levels are appended at once)
    int level = 2;
    while (growth(NodeFamily::ClenshawCurtis, level) <= static_cast<int>(seq.size()))
      ++level;
    while (static_cast<int>(seq.size()) < count) {
      const int n = growth(NodeFamily::ClenshawCurtis, level);
      if (level == 2) {
        seq.push_back(-1.0);
        seq.push_back(1.0);
      } else {
        // new nodes of the doubling rule are the odd cosine indices
        for (int j = n - 2; j >= 1; j -= 2)
          seq.push_back(std::cos(M_PI * static_cast<double>(j) / (n - 1)));
      }
      ++level;
    }
  }
}

}  // namespace

std::vector<double> leja_nodes(int count) {
  if (count < 1) throw ContractError("leja_nodes: count must be >= 1");
  ensure_sequence(NodeFamily::Leja, count);
  const auto& seq = cache_for(NodeFamily::Leja).sequence;
  return std::vector<double>(seq.begin(), seq.begin() + count);
}

std::span<const double> sequence_nodes(NodeFamily family, int count) {
  if (count < 1) throw ContractError("sequence_nodes: count must be >= 1");
  if (family == NodeFamily::ClenshawCurtis && count > 1) {
    bool valid = false;
    for (int i = 2; growth(family, i) <= count; ++i)
      valid = valid || growth(family, i) == count;
    if (!valid)
      throw ContractError("sequence_nodes: invalid CC count " + std::to_string(count));
  }
  ensure_sequence(family, count);
  const auto& seq = cache_for(family).sequence;
  return {seq.data(), static_cast<std::size_t>(count)};
}

double sequence_node(NodeFamily family, int ordinal) {
  if (ordinal < 0) throw ContractError("sequence_node: negative ordinal");
  ensure_sequence(family, ordinal + 1);
  return cache_for(family).sequence[ordinal];
}

const Quadrature& gauss_legendre(int n) {
  if (n < 1) throw ContractError("gauss_legendre: n must be >= 1");
  static std::mutex mutex;
  static std::map<int, Quadrature> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  // Newton iteration on P_n with the usual Chebyshev-flavored initial guess.
  Quadrature q;
  q.nodes.resize(n);
  q.weights.resize(n);
  for (int k = 0; k < (n + 1) / 2; ++k) {
    double x = std::cos(M_PI * (k + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int j = 2; j <= n; ++j) {
        double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    q.nodes[k] = -x;
    q.nodes[n - 1 - k] = x;
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    q.weights[k] = 0.5 * w;  // normalize for the probability measure dy/2
    q.weights[n - 1 - k] = 0.5 * w;
  }
  if (n % 2 == 1) q.nodes[n / 2] = 0.0;
  return cache.emplace(n, std::move(q)).first->second;
}

double lagrange_eval(std::span<const double> nodes, int j, double y) {
  const int n = static_cast<int>(nodes.size());
  if (j < 0 || j >= n) throw ContractError("lagrange_eval: index out of range");
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      if (nodes[a] == nodes[b]) throw ContractError("lagrange_eval: duplicate nodes");
  std::vector<double> vals(n);
  lagrange_eval_all(nodes, y, vals);
  return vals[j];
}

void lagrange_eval_all(std::span<const double> nodes, double y,
                       std::span<double> out) {
  const int n = static_cast<int>(nodes.size());
  for (int k = 0; k < n; ++k) {
    if (y == nodes[k]) {  // exact hit: cardinal value
      std::fill(out.begin(), out.end(), 0.0);
      out[k] = 1.0;
      return;
    }
  }
  // barycentric weights; n stays small enough that recomputation is cheap
  double denom_sum = 0.0;
  for (int k = 0; k < n; ++k) {
    double w = 1.0;
    for (int m = 0; m < n; ++m)
      if (m != k) w /= (nodes[k] - nodes[m]);
    out[k] = w / (y - nodes[k]);
    denom_sum += out[k];
  }
  for (int k = 0; k < n; ++k) out[k] /= denom_sum;
}

const Eigen::MatrixXd& lagrange_mass_1d(NodeFamily family, int countA,
                                        int countB) {
  static std::mutex mutex;
  static std::map<std::tuple<int, int, int>, Eigen::MatrixXd> cache;
  const auto key = std::make_tuple(static_cast<int>(family), countA, countB);
  {
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  const auto a = sequence_nodes(family, countA);
  const auto b = sequence_nodes(family, countB);
  const int order = (countA + countB + 1) / 2;
  const Quadrature& q = gauss_legendre(order);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(countA, countB);
  std::vector<double> la(countA), lb(countB);
  for (std::size_t k = 0; k < q.nodes.size(); ++k) {
    lagrange_eval_all(a, q.nodes[k], la);
    lagrange_eval_all(b, q.nodes[k], lb);
    for (int i = 0; i < countA; ++i)
      for (int j = 0; j < countB; ++j) m(i, j) += q.weights[k] * la[i] * lb[j];
  }
  std::lock_guard<std::mutex> lock(mutex);
  return cache.emplace(key, std::move(m)).first->second;
}

}  // namespace scfem
