#include "levelgauss/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>

#include "levelgauss/error.hpp"
#include "levelgauss/stats.hpp"

namespace levelgauss {

double pair_cost(const Eigen::VectorXd& s, const Eigen::VectorXd& t) {
  if (s.size() != t.size()) throw InvalidInput("pair_cost: dimension mismatch");
  const double base = s.squaredNorm() + t.squaredNorm() + 1.0;
  return base * base * base * (s - t).squaredNorm();
}

double folded_pair_cost(const Eigen::VectorXd& s, const Eigen::VectorXd& t) {
  return std::min(pair_cost(s, t), pair_cost(s, -t));
}

namespace {

struct Problem {
  std::size_t rows = 0, cols = 0;
  std::vector<double> supply, demand;
  std::vector<double> cost;    // row-major
  std::vector<bool> negate;    // use -t for this cell

  double c(std::size_t i, std::size_t j) const { return cost[i * cols + j]; }
};

Problem build_problem(const SpectralMeasure& m1, const SpectralMeasure& m2) {
  if (m1.dim() != m2.dim()) throw InvalidInput("optimal_coupling: dimension mismatch");
  if (m1.size() > 512 || m2.size() > 512)
    throw InvalidInput("optimal_coupling: at most 512 atoms per measure");
  Problem p;
  p.rows = m1.size();
  p.cols = m2.size();
  p.supply.assign(m1.weights().data(), m1.weights().data() + p.rows);
  p.demand.assign(m2.weights().data(), m2.weights().data() + p.cols);
  if (std::abs(pairwise_sum(p.supply) - pairwise_sum(p.demand)) > 1e-10)
    throw InvalidInput("optimal_coupling: measures have unequal total mass");
  p.cost.resize(p.rows * p.cols);
  p.negate.resize(p.rows * p.cols);
  for (std::size_t i = 0; i < p.rows; ++i) {
    const Eigen::VectorXd s = m1.atom(i);
    for (std::size_t j = 0; j < p.cols; ++j) {
      const Eigen::VectorXd t = m2.atom(j);
      const double plus = pair_cost(s, t);
      const double minus = pair_cost(s, -t);
      p.cost[i * p.cols + j] = std::min(plus, minus);
      p.negate[i * p.cols + j] = minus < plus;
    }
  }
  return p;
}

struct Cell {
  std::size_t i = 0, j = 0;
  double flow = 0.0;
};

// Spanning-tree adjacency over row nodes [0, rows) and column nodes
// [rows, rows + cols); each edge stores the index of its basic cell.
struct Tree {
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> adj;

  Tree(const Problem& p, const std::vector<Cell>& basis) : adj(p.rows + p.cols) {
    for (std::size_t e = 0; e < basis.size(); ++e) {
      adj[basis[e].i].push_back({p.rows + basis[e].j, e});
      adj[p.rows + basis[e].j].push_back({basis[e].i, e});
    }
  }
};

std::vector<Cell> northwest_corner(const Problem& p) {
  std::vector<double> rs = p.supply, rd = p.demand;
  std::vector<Cell> basis;
  basis.reserve(p.rows + p.cols - 1);
  std::size_t i = 0, j = 0;
  while (true) {
    const double q = std::min(rs[i], rd[j]);
    basis.push_back({i, j, q});
    rs[i] -= q;
    rd[j] -= q;
    if (i + 1 == p.rows && j + 1 == p.cols) break;
    if ((rs[i] <= 0.0 && i + 1 < p.rows) || j + 1 == p.cols)
      ++i;
    else
      ++j;
  }
  return basis;
}

void potentials(const Problem& p, const std::vector<Cell>& basis, const Tree& tree,
                std::vector<double>& u, std::vector<double>& v) {
  const std::size_t n = p.rows + p.cols;
  std::vector<double> pot(n, 0.0);
  std::vector<bool> seen(n, false);
  std::queue<std::size_t> q;
  q.push(0);
  seen[0] = true;
  while (!q.empty()) {
    const std::size_t a = q.front();
    q.pop();
    for (auto [b, e] : tree.adj[a]) {
      if (seen[b]) continue;
      seen[b] = true;
      // u_i + v_j = c_ij
      pot[b] = p.c(basis[e].i, basis[e].j) - pot[a];
      q.push(b);
    }
  }
  u.assign(pot.begin(), pot.begin() + static_cast<std::ptrdiff_t>(p.rows));
  v.assign(pot.begin() + static_cast<std::ptrdiff_t>(p.rows), pot.end());
}

// Edges (basic cell indices) on the tree path from node `from` to node `to`.
std::vector<std::size_t> tree_path(const Tree& tree, std::size_t from, std::size_t to) {
  const std::size_t n = tree.adj.size();
  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> parent(n, kNone), via(n, kNone);
  std::queue<std::size_t> q;
  q.push(from);
  parent[from] = from;
  while (!q.empty()) {
    const std::size_t a = q.front();
    q.pop();
    if (a == to) break;
    for (auto [b, e] : tree.adj[a]) {
      if (parent[b] != kNone) continue;
      parent[b] = a;
      via[b] = e;
      q.push(b);
    }
  }
  std::vector<std::size_t> edges;
  for (std::size_t x = to; x != from; x = parent[x]) edges.push_back(via[x]);
  std::reverse(edges.begin(), edges.end());
  return edges;
}

std::vector<Cell> solve_transportation(const Problem& p) {
  std::vector<Cell> basis = northwest_corner(p);
  const double cmax = *std::max_element(p.cost.begin(), p.cost.end());
  const double tol = 1e-12 * (1.0 + cmax);
  std::vector<double> u, v;
  const std::size_t max_iter = 50 * (p.rows + p.cols) * (p.rows + p.cols) + 1000;

  for (std::size_t iter = 0; iter < max_iter; ++iter) {
    const Tree tree(p, basis);
    potentials(p, basis, tree, u, v);

    // Bland: first improving cell in row-major order.
    std::size_t ei = p.rows, ej = p.cols;
    for (std::size_t i = 0; i < p.rows && ei == p.rows; ++i)
      for (std::size_t j = 0; j < p.cols; ++j)
        if (p.c(i, j) - u[i] - v[j] < -tol) {
          ei = i;
          ej = j;
          break;
        }
    if (ei == p.rows) return basis;

    // Path from column node ej back to row node ei closes the cycle; its
    // edges alternate -, +, -, ... starting next to the entering cell.
    const std::vector<std::size_t> path = tree_path(tree, p.rows + ej, ei);
    double theta = std::numeric_limits<double>::infinity();
    std::size_t leave = basis.size();
    for (std::size_t k = 0; k < path.size(); k += 2) {
      const Cell& c = basis[path[k]];
      const std::size_t key = c.i * p.cols + c.j;
      if (c.flow < theta ||
          (c.flow == theta && key < basis[leave].i * p.cols + basis[leave].j)) {
        theta = c.flow;
        leave = path[k];
      }
    }
    for (std::size_t k = 0; k < path.size(); ++k) {
      Cell& c = basis[path[k]];
      c.flow = (k % 2 == 0) ? c.flow - theta : c.flow + theta;
    }
    basis[leave].flow = 0.0;
    basis[leave] = Cell{ei, ej, theta};
  }
  throw NumericalFlag("optimal_coupling: simplex iteration limit reached");
}

CouplingPlan plan_from_cells(const Problem& p, const SpectralMeasure& m1,
                             const SpectralMeasure& m2, std::vector<Cell> cells) {
  std::sort(cells.begin(), cells.end(), [](const Cell& a, const Cell& b) {
    return a.i != b.i ? a.i < b.i : a.j < b.j;
  });
  CouplingPlan plan;
  std::vector<double> terms;
  for (const Cell& c : cells) {
    if (!(c.flow > 0.0)) continue;
    const bool neg = p.negate[c.i * p.cols + c.j];
    plan.pairs.push_back({m1.atom(c.i), neg ? Eigen::VectorXd(-m2.atom(c.j)) : m2.atom(c.j), c.flow});
    terms.push_back(c.flow * p.c(c.i, c.j));
  }
  plan.cost = pairwise_sum(terms);
  return plan;
}

}  // namespace

CouplingPlan optimal_coupling(const SpectralMeasure& m1, const SpectralMeasure& m2) {
  const Problem p = build_problem(m1, m2);
  return plan_from_cells(p, m1, m2, solve_transportation(p));
}

CouplingPlan index_coupling(const SpectralMeasure& m1, const SpectralMeasure& m2) {
  if (m1.dim() != m2.dim() || m1.size() != m2.size())
    throw InvalidInput("index_coupling: measures must have the same shape");
  CouplingPlan plan;
  std::vector<double> terms;
  for (std::size_t k = 0; k < m1.size(); ++k) {
    if (std::abs(m1.weight(k) - m2.weight(k)) > 1e-12)
      throw InvalidInput("index_coupling: weights differ");
    plan.pairs.push_back({m1.atom(k), m2.atom(k), m1.weight(k)});
    terms.push_back(m1.weight(k) * pair_cost(m1.atom(k), m2.atom(k)));
  }
  plan.cost = pairwise_sum(terms);
  return plan;
}

double sigma_bound_proxy(const CouplingPlan& plan, double R, int d) {
  return (std::pow(R, d) + 1.0) * plan.cost;
}

void validate_plan(const CouplingPlan& plan, const SpectralMeasure& m1, const SpectralMeasure& m2,
                   double tol) {
  std::vector<double> mass1(m1.size(), 0.0), mass2(m2.size(), 0.0);
  for (const PlanPair& p : plan.pairs) {
    if (!(p.w > 0.0)) throw InvalidInput("coupling plan: pair weights must be positive");
    const std::size_t i = m1.find(p.s, 1e-12);
    const std::size_t j = m2.find(p.t, 1e-12);
    if (i == m1.size()) throw InvalidInput("coupling plan: source atom not in the first measure");
    if (j == m2.size()) throw InvalidInput("coupling plan: target atom not in the second measure");
    mass1[i] += p.w;
    mass2[j] += p.w;
  }
  for (std::size_t i = 0; i < m1.size(); ++i)
    if (std::abs(mass1[i] - m1.weight(i)) > tol)
      throw InvalidInput("coupling plan: first marginal does not match");
  for (std::size_t j = 0; j < m2.size(); ++j)
    if (std::abs(mass2[j] - m2.weight(j)) > tol)
      throw InvalidInput("coupling plan: second marginal does not match");
}

double brute_force_coupling_cost(const SpectralMeasure& m1, const SpectralMeasure& m2) {
  const Problem p = build_problem(m1, m2);
  const std::size_t cells = p.rows * p.cols;
  const std::size_t k = p.rows + p.cols - 1;
  if (cells > 20) throw InvalidInput("brute_force_coupling_cost: instance too large");

  double best = std::numeric_limits<double>::infinity();
  std::vector<bool> pick(cells, false);
  std::fill(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(k), true);
  do {
    // A basis is a spanning tree of the bipartite row/column graph; its
    // flows follow by repeatedly peeling leaves.
    std::vector<std::size_t> chosen;
    for (std::size_t c = 0; c < cells; ++c)
      if (pick[c]) chosen.push_back(c);
    const std::size_t n = p.rows + p.cols;
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto root = [&](std::size_t x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    bool tree = true;
    for (std::size_t c : chosen) {
      const std::size_t a = root(c / p.cols), b = root(p.rows + c % p.cols);
      if (a == b) {
        tree = false;
        break;
      }
      parent[a] = b;
    }
    if (!tree) continue;

    std::vector<double> rem(n);
    for (std::size_t i = 0; i < p.rows; ++i) rem[i] = p.supply[i];
    for (std::size_t j = 0; j < p.cols; ++j) rem[p.rows + j] = p.demand[j];
    std::vector<bool> done(chosen.size(), false);
    std::vector<double> flow(chosen.size(), 0.0);
    for (std::size_t round = 0; round < chosen.size(); ++round) {
      std::vector<int> degree(n, 0);
      for (std::size_t e = 0; e < chosen.size(); ++e)
        if (!done[e]) {
          ++degree[chosen[e] / p.cols];
          ++degree[p.rows + chosen[e] % p.cols];
        }
      for (std::size_t e = 0; e < chosen.size(); ++e) {
        if (done[e]) continue;
        const std::size_t a = chosen[e] / p.cols, b = p.rows + chosen[e] % p.cols;
        const std::size_t leaf = degree[a] == 1 ? a : (degree[b] == 1 ? b : n);
        if (leaf == n) continue;
        flow[e] = rem[leaf];
        rem[a] -= flow[e];
        rem[b] -= flow[e];
        done[e] = true;
        break;
      }
    }
    bool feasible = true;
    double cost = 0.0;
    for (std::size_t e = 0; e < chosen.size(); ++e) {
      if (flow[e] < -1e-14) feasible = false;
      cost += std::max(flow[e], 0.0) * p.cost[chosen[e]];
    }
    if (feasible) best = std::min(best, cost);
  } while (std::prev_permutation(pick.begin(), pick.end()));
  return best;
}

}  // namespace levelgauss
