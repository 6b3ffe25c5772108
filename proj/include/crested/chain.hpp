#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "crested/matrix.hpp"

namespace crested {

// Float tolerances for the exact-arithmetic identities of the theory.
// All are overridable per call.
inline constexpr double kRowSumTol = 1e-12;           // row sums of stochastic matrices
inline constexpr double kDetailedBalanceTol = 1e-10;  // pi(x)p(x,y) = pi(y)p(y,x)
inline constexpr double kEigenTol = 1e-9;             // PU = U Lambda, U^T D U = I
inline constexpr double kClusterTol = 1e-7;           // eigenvalue multiplicity clustering

// A finite Markov chain together with a strict stationary measure in detailed
// balance with it. Immutable after construction; all operations on it are pure.
struct ReversibleChain {
  std::vector<std::string> states;
  Matrix P;   // row-stochastic transition matrix, rows ordered like `states`
  Vec pi;     // strict probability vector, detailed balance with P

  std::size_t size() const { return states.size(); }
  std::size_t index_of(std::string_view label) const;  // throws UnknownStateError
};

// Validates shapes, row sums (eps_row), strictness and normalization of pi,
// and detailed balance (eps_db). Throws InputError / ModelError.
void validate_chain(const ReversibleChain& c, double eps_row = kRowSumTol,
                    double eps_db = kDetailedBalanceTol);

ReversibleChain make_chain(std::vector<std::string> states, Matrix p, Vec pi,
                           double eps_row = kRowSumTol, double eps_db = kDetailedBalanceTol);

// Common factor chains.
ReversibleChain uniform_chain(int m);                 // J_m, uniform measure
ReversibleChain flip_chain(double a);                 // [[1-a, a], [a, 1-a]]
ReversibleChain complete_graph_chain(int m);          // off-diagonal 1/(m-1)

struct WeightedGraph {
  std::vector<std::string> vertices;
  Matrix w;  // symmetric, nonnegative; w(x,y) > 0 iff edge {x,y}
};

// p(x,y) = w(x,y)/W(x), pi(x) = W(x)/W; detailed balance holds by construction.
ReversibleChain chain_from_weights(const WeightedGraph& g);

// w(x,y) = pi(x) p(x,y); requires detailed balance within eps_db.
WeightedGraph weights_from_chain(const ReversibleChain& c, double eps_db = kDetailedBalanceTol);

int count_components(const WeightedGraph& g);

bool check_detailed_balance(const Matrix& p, const Vec& pi, double eps = kDetailedBalanceTol);
double detailed_balance_residual(const Matrix& p, const Vec& pi);

// Full eigendata of a reversible chain: P U = U diag(lambdas) and
// U^T diag(pi) U = I, columns of U orthonormal in the pi-weighted inner product.
struct SpectralData {
  std::vector<std::string> states;
  Vec lambdas;
  Matrix U;
  Vec pi;

  std::size_t size() const { return states.size(); }
};

// Residuals of the two defining identities; both must stay below eps.
double eigen_equation_residual(const Matrix& p, const SpectralData& s);
double orthonormality_residual(const SpectralData& s);
void validate_spectral(const Matrix& p, const SpectralData& s, double eps = kEigenTol);

// p^(k)(x,y) = pi(y) sum_z u(x,z) lambda_z^k u(y,z).
double kstep_probability(const SpectralData& s, unsigned k, std::size_t x, std::size_t y);

enum class Ergodicity { Ergodic, Reducible, Periodic };
const char* to_string(Ergodicity e);

// Reducible iff eigenvalue 1 has multiplicity > 1 (within eps); periodic iff
// some eigenvalue <= -1 + eps; ergodic otherwise.
Ergodicity classify_ergodicity(const SpectralData& s, double eps = kEigenTol);

struct EigenvalueCluster {
  double value;                       // representative (mean of members)
  int multiplicity;
  std::vector<std::size_t> columns;   // column indices into U
};

// Greedy clustering of eigenvalues sorted descending; a new cluster starts when
// the value drops more than tol below the current cluster's first member.
std::vector<EigenvalueCluster> cluster_eigenvalues(const Vec& lambdas, double tol = kClusterTol);

}  // namespace crested
