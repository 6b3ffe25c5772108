#include "crested/chain.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "crested/errors.hpp"
#include "crested/util.hpp"

namespace crested {

std::size_t ReversibleChain::index_of(std::string_view label) const {
  for (std::size_t i = 0; i < states.size(); ++i)
    if (states[i] == label) return i;
  throw UnknownStateError(std::string(label));
}

void validate_chain(const ReversibleChain& c, double eps_row, double eps_db) {
  const std::size_t n = c.states.size();
  if (n == 0) throw InputError("chain has no states");
  if (c.P.rows() != n || c.P.cols() != n || c.pi.size() != n)
    throw InputError("chain: P/pi shape does not match state count");
  double pi_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (c.pi[i] <= 0.0) throw ModelError("chain: stationary measure is not strict");
    pi_sum += c.pi[i];
    double row = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double p = c.P(i, j);
      if (p < -eps_row || p > 1.0 + eps_row)
        throw InputError("chain: transition probability outside [0,1]");
      row += p;
    }
    if (std::fabs(row - 1.0) > eps_row) throw InputError("chain: row does not sum to 1");
  }
  if (std::fabs(pi_sum - 1.0) > eps_row) throw InputError("chain: pi does not sum to 1");
  if (!check_detailed_balance(c.P, c.pi, eps_db))
    throw ModelError("chain: detailed balance violated");
}

ReversibleChain make_chain(std::vector<std::string> states, Matrix p, Vec pi,
                           double eps_row, double eps_db) {
  ReversibleChain c{std::move(states), std::move(p), std::move(pi)};
  validate_chain(c, eps_row, eps_db);
  return c;
}

static std::vector<std::string> default_labels(int m) {
  std::vector<std::string> s(m);
  for (int i = 0; i < m; ++i) s[i] = std::to_string(i);
  return s;
}

ReversibleChain uniform_chain(int m) {
  return {default_labels(m), Matrix::uniform(m), Vec(m, 1.0 / m)};
}

ReversibleChain flip_chain(double a) {
  Matrix p(2, 2);
  p(0, 0) = 1.0 - a;
  p(0, 1) = a;
  p(1, 0) = a;
  p(1, 1) = 1.0 - a;
  return {default_labels(2), p, Vec(2, 0.5)};
}

ReversibleChain complete_graph_chain(int m) {
  Matrix p(m, m, 1.0 / (m - 1));
  for (int i = 0; i < m; ++i) p(i, i) = 0.0;
  return {default_labels(m), p, Vec(m, 1.0 / m)};
}

ReversibleChain chain_from_weights(const WeightedGraph& g) {
  const std::size_t n = g.vertices.size();
  Vec wx(n, 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (g.w(i, j) < 0.0) throw InputError("weighted graph: negative weight");
      if (std::fabs(g.w(i, j) - g.w(j, i)) > 0.0)
        throw InputError("weighted graph: weight function not symmetric");
      wx[i] += g.w(i, j);
    }
    if (wx[i] <= 0.0) throw InputError("weighted graph: isolated vertex " + g.vertices[i]);
    total += wx[i];
  }
  Matrix p(n, n);
  Vec pi(n);
  for (std::size_t i = 0; i < n; ++i) {
    pi[i] = wx[i] / total;
    for (std::size_t j = 0; j < n; ++j) p(i, j) = g.w(i, j) / wx[i];
  }
  return {g.vertices, std::move(p), std::move(pi)};
}

WeightedGraph weights_from_chain(const ReversibleChain& c, double eps_db) {
  if (!check_detailed_balance(c.P, c.pi, eps_db))
    throw ModelError("weights_from_chain: detailed balance violated");
  const std::size_t n = c.size();
  Matrix w(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      // Symmetrize the rounding noise so the graph is exactly symmetric.
      w(i, j) = 0.5 * (c.pi[i] * c.P(i, j) + c.pi[j] * c.P(j, i));
    }
  return {c.states, std::move(w)};
}

int count_components(const WeightedGraph& g) {
  const std::size_t n = g.vertices.size();
  std::vector<int> comp(n, -1);
  int count = 0;
  std::vector<std::size_t> stack;
  for (std::size_t s = 0; s < n; ++s) {
    if (comp[s] >= 0) continue;
    stack.push_back(s);
    comp[s] = count;
    while (!stack.empty()) {
      const std::size_t v = stack.back();
      stack.pop_back();
      for (std::size_t u = 0; u < n; ++u) {
        if (comp[u] < 0 && g.w(v, u) > 0.0) {
          comp[u] = count;
          stack.push_back(u);
        }
      }
    }
    ++count;
  }
  return count;
}

bool check_detailed_balance(const Matrix& p, const Vec& pi, double eps) {
  return detailed_balance_residual(p, pi) <= eps;
}

double detailed_balance_residual(const Matrix& p, const Vec& pi) {
  if (p.rows() != p.cols() || p.rows() != pi.size())
    throw InputError("detailed balance: dimension mismatch");
  double worst = 0.0;
  for (std::size_t i = 0; i < p.rows(); ++i)
    for (std::size_t j = i + 1; j < p.cols(); ++j)
      worst = std::max(worst, std::fabs(pi[i] * p(i, j) - pi[j] * p(j, i)));
  return worst;
}

double eigen_equation_residual(const Matrix& p, const SpectralData& s) {
  const std::size_t n = s.size();
  double worst = 0.0;
  for (std::size_t z = 0; z < n; ++z) {
    const Vec u = s.U.col(z);
    const Vec pu = matvec(p, u);
    for (std::size_t x = 0; x < n; ++x)
      worst = std::max(worst, std::fabs(pu[x] - s.lambdas[z] * u[x]));
  }
  return worst;
}

double orthonormality_residual(const SpectralData& s) {
  const std::size_t n = s.size();
  double worst = 0.0;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a; b < n; ++b) {
      double acc = 0.0;
      for (std::size_t x = 0; x < n; ++x) acc += s.U(x, a) * s.U(x, b) * s.pi[x];
      worst = std::max(worst, std::fabs(acc - (a == b ? 1.0 : 0.0)));
    }
  return worst;
}

void validate_spectral(const Matrix& p, const SpectralData& s, double eps) {
  if (s.U.rows() != s.size() || s.U.cols() != s.size() || s.lambdas.size() != s.size() ||
      s.pi.size() != s.size())
    throw InputError("spectral data: shape mismatch");
  for (double l : s.lambdas)
    if (std::fabs(l) > 1.0 + eps) throw ModelError("spectral data: eigenvalue outside [-1,1]");
  if (eigen_equation_residual(p, s) > eps)
    throw ModelError("spectral data: PU = U Lambda violated");
  if (orthonormality_residual(s) > eps)
    throw ModelError("spectral data: U^T D U = I violated");
}

double kstep_probability(const SpectralData& s, unsigned k, std::size_t x, std::size_t y) {
  const std::size_t n = s.size();
  if (x >= n || y >= n) throw UnknownStateError("state index out of range");
  double acc = 0.0;
  for (std::size_t z = 0; z < n; ++z)
    acc += s.U(x, z) * ipow(s.lambdas[z], k) * s.U(y, z);
  return s.pi[y] * acc;
}

const char* to_string(Ergodicity e) {
  switch (e) {
    case Ergodicity::Ergodic: return "ergodic";
    case Ergodicity::Reducible: return "reducible";
    case Ergodicity::Periodic: return "periodic";
  }
  return "?";
}

Ergodicity classify_ergodicity(const SpectralData& s, double eps) {
  int mult_one = 0;
  bool minus_one = false;
  for (double l : s.lambdas) {
    if (l >= 1.0 - eps) ++mult_one;
    if (l <= -1.0 + eps) minus_one = true;
  }
  if (mult_one > 1) return Ergodicity::Reducible;
  if (minus_one) return Ergodicity::Periodic;
  return Ergodicity::Ergodic;
}

std::vector<EigenvalueCluster> cluster_eigenvalues(const Vec& lambdas, double tol) {
  std::vector<std::size_t> order(lambdas.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return lambdas[a] > lambdas[b]; });
  std::vector<EigenvalueCluster> clusters;
  double anchor = 0.0;
  for (std::size_t idx : order) {
    const double l = lambdas[idx];
    if (clusters.empty() || l < anchor - tol) {
      clusters.push_back({l, 0, {}});
      anchor = l;
    }
    EigenvalueCluster& c = clusters.back();
    c.value = (c.value * c.multiplicity + l) / (c.multiplicity + 1);
    ++c.multiplicity;
    c.columns.push_back(idx);
  }
  return clusters;
}

}  // namespace crested
