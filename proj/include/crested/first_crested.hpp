#pragma once

#include <vector>

#include "crested/chain.hpp"
#include "crested/descriptors.hpp"

namespace crested {

// Partition tag of a coordinate: Crossed coordinates update alone, Nested
// coordinates additionally randomize every later coordinate uniformly.
enum class PartTag { Crossed, Nested };

// A crested product specification: n factor chains, a partition of the
// coordinates, and the mixing weights p_i^0 (strictly positive, summing to 1).
struct CrestedSpec {
  std::vector<ReversibleChain> factors;
  std::vector<PartTag> partition;
  Vec weights;

  std::size_t arity() const { return factors.size(); }
  std::vector<int> factor_sizes() const;
  long long product_size() const;
};

// Shape/weight checks plus irreducibility of every factor (eigenvalue 1 must
// be simple). Throws InputError on violations.
void validate_spec(const CrestedSpec& spec);

// Least nested coordinate i1 (1-based); arity+1 when the partition has no
// nested coordinate, which makes the crossed product a true special case.
int first_nested_index(const CrestedSpec& spec);

// Product state labels: factor labels joined with '.', coordinate 1 first.
std::vector<std::string> product_state_labels(const CrestedSpec& spec);

// Transition matrix of the crested product. Always well defined (row
// stochastic) whether or not the product is reversible.
Matrix assemble_crested_matrix(const CrestedSpec& spec);

struct ReversibilityCheck {
  bool reversible;
  Vec pi;       // sigma_1 x ... x sigma_i1 / (m_{i1+1} ... m_n) when reversible
  int witness;  // least k > i1 with asymmetric P_k, 1-based; 0 when reversible
};

// The product is reversible iff every P_k with k > i1 is symmetric.
ReversibilityCheck check_crested_reversibility(const CrestedSpec& spec,
                                               double eps = kDetailedBalanceTol);

// Builds the product as a validated reversible chain. Throws
// NotReversibleError (with the witness index) when the symmetry condition
// fails.
ReversibleChain assemble_first_crested(const CrestedSpec& spec);

// Numeric eigendata for every factor, normalized so that column 0 is exactly
// the constant eigenvector of eigenvalue 1 (the convention the analytic
// assembly relies on).
std::vector<SpectralData> factor_spectra(const CrestedSpec& spec);

// The complete analytic eigenspace decomposition of the product. Family A
// runs over k in {i1+1, ..., n} with a nontrivial eigenspace at coordinate k,
// full function spaces L(X_i) at earlier nested coordinates, eigenspace
// choices at earlier crossed coordinates, and trivial spaces later. Family B
// runs over eigenspace choices at coordinates 1..i1 with trivial tails.
// Dimensions always sum to the product size. Bases are materialized only on
// request; their columns are orthonormal in the product pi-inner product.
std::vector<EigenspaceDescriptor> analytic_spectrum_first(
    const CrestedSpec& spec, const std::vector<SpectralData>& spectra,
    bool with_bases = false);

// Explicit basis of one descriptor (tensor product of per-coordinate blocks).
Matrix materialize_descriptor_basis(const CrestedSpec& spec,
                                    const std::vector<SpectralData>& spectra,
                                    const EigenspaceDescriptor& d);

// Full eigensystem of the product: sparse eigenvector matrix (identity-like
// blocks at nested coordinates before the pivot), stationary weights, and the
// diagonal of eigenvalues, column z of U carrying eigenvalue lambda[z].
struct EigenSystem {
  std::vector<std::string> states;
  Matrix U;
  Vec d;       // stationary weights (diagonal of D)
  Vec lambda;  // diagonal of the eigenvalue matrix
};

EigenSystem assemble_U_D_Delta(const CrestedSpec& spec,
                               const std::vector<SpectralData>& spectra);

// The dense alternative: the plain tensor product of the factor eigenvector
// matrices, which diagonalizes the same operator.
Matrix tensor_eigenvector_matrix(const std::vector<SpectralData>& spectra);

// k-step transition probability evaluated from the analytic eigensystem.
double kstep_first(const EigenSystem& es, unsigned k, std::size_t x, std::size_t y);
double kstep_first(const CrestedSpec& spec, const std::vector<SpectralData>& spectra,
                   unsigned k, std::size_t x, std::size_t y);

// Multinomial census of the crossed product of n equal factors with uniform
// weights: one row per eigenvalue pattern (r_0, ..., r_k) counting how many
// factor eigenspaces of each distinct eigenvalue appear.
struct CensusRow {
  std::vector<int> pattern;
  double eigenvalue;
  long long count;
};

std::vector<CensusRow> crossed_dimension_census(const std::vector<SpectralData>& spectra);

}  // namespace crested
