#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "crested/chain.hpp"
#include "crested/descriptors.hpp"
#include "crested/insect.hpp"

namespace crested {

// An element of Theta_h: a function from an h-subset of X = {1..n} into Y.
// Domains are stored 0-based and ascending; images[i] is the value at
// domain[i].
struct PartialFunction {
  std::vector<int> domain;
  std::vector<int> images;
};

// Enumeration of Theta_h, ordered lexicographically by domain and then by
// image word (first domain element most significant). Index arithmetic is
// closed-form: domain rank times ysize^h plus the image rank, so each domain
// occupies one contiguous block.
class ThetaSpace {
 public:
  ThetaSpace(int n, int h, int ysize);

  int n() const { return n_; }
  int h() const { return h_; }
  int ysize() const { return ysize_; }
  std::size_t size() const { return states_.size(); }
  std::size_t block_size() const { return block_; }  // ysize^h
  std::size_t domain_count() const { return domains_.size(); }

  const PartialFunction& state(std::size_t idx) const { return states_[idx]; }
  const std::vector<int>& domain(std::size_t rank) const { return domains_[rank]; }

  std::size_t domain_rank(std::span<const int> domain) const;
  std::size_t index_of(std::span<const int> domain, std::span<const int> images) const;

  std::string label(std::size_t idx, const std::vector<std::string>& y_labels) const;

 private:
  int n_, h_, ysize_;
  std::size_t block_;
  std::vector<std::vector<int>> domains_;
  std::vector<PartialFunction> states_;
};

// Domain-exchange operator: 1 between functions whose domains meet in h-1
// points and agree there. Symmetric 0/1 with constant row sum
// ysize (n-h) h. Throws DegenerateDeltaError when h = n.
Matrix build_delta(const ThetaSpace& space);
long long delta_norm(const ThetaSpace& space);

// Image-update operator: block diagonal per domain, each block the uniform
// crossed product of h copies of Q. Q must be symmetric.
Matrix build_M(const ThetaSpace& space, const ReversibleChain& q);

// P = p0 M + (1 - p0) Delta / norm(Delta); detailed balance with the uniform
// measure. Requires 0 < p0 < 1.
ReversibleChain build_P(double p0, const ThetaSpace& space, const Matrix& m,
                        const Matrix& delta, long long norm,
                        const std::vector<std::string>& y_labels);

// Convenience assembly; routes h = n to the pure image-update operator, which
// is the crossed product on Y^n (the exchange move does not exist there).
ReversibleChain second_crested_chain(int n, int h, const ReversibleChain& q, double p0);

// The urn formulation with s ball labels: identical process, named preset.
ReversibleChain crested_bernoulli_laplace(int n, int h, const ReversibleChain& q, double p0);

// Differential operators between adjacent levels:
// (D F)(phi) = sum of F over extensions of phi, mapping level k to k-1;
// (D* F)(theta) = sum of F over restrictions of theta, mapping k-1 to k.
Vec apply_D(const ThetaSpace& upper, const ThetaSpace& lower, const Vec& f);
Vec apply_Dstar(const ThetaSpace& lower, const ThetaSpace& upper, const Vec& f);

// Distinct eigenvalues, multiplicities and counting-orthonormal eigenbases of
// the symmetric kernel Q on Y. Index 0 is the simple eigenvalue 1.
struct QEigenstructure {
  int ysize = 0;
  Vec lambdas;
  std::vector<int> dims;
  std::vector<Matrix> bases;

  int eigenspace_count() const { return static_cast<int>(lambdas.size()); }
};

QEigenstructure q_eigenstructure(const ReversibleChain& q);

// A fundamental function: per-domain-slot eigenspace indices and basis
// columns; evaluates to the product of the chosen vectors at the images.
struct FundamentalFunction {
  std::vector<int> domain;
  std::vector<int> eigenspace;  // index into QEigenstructure, one per slot
  std::vector<int> basis_col;   // column within the eigenspace basis
};

Vec fundamental_vector(const ThetaSpace& space, const QEigenstructure& q,
                       const FundamentalFunction& f);

// Counting-orthonormal basis of the span of all fundamental functions of the
// given type vector (a_0, ..., a_m).
Matrix fundamental_basis(const ThetaSpace& space, const QEigenstructure& q,
                         std::span<const int> type);

long long type_space_dimension(int n, int k, std::span<const int> type,
                               const std::vector<int>& wdims);

// Dimension of the eigenspace triple (h, a, k):
// (n + l + 1 - 2k)/(n - k + 1) C(n,k) C(k,l) multinom(l; a_1..a_m)
// prod dim(W_j)^{a_j}, an exact integer.
long long triple_dimension(int n, int h, std::span<const int> type, int k,
                           const std::vector<int>& wdims);

// Valid range of k for a type vector at level h.
int triple_k_min(std::span<const int> type, int h);
int triple_k_max(int n, int h, std::span<const int> type);

// Eigenvalue components of the triple.
double m_part_eigenvalue(int h, std::span<const int> type, const Vec& lambdas);
double delta_part_eigenvalue(int n, int h, std::span<const int> type, int k);
double triple_eigenvalue(double p0, int n, int h, std::span<const int> type, int k,
                               const Vec& lambdas);

// Shared state for eigenspace construction: Theta levels 0..h plus Q data.
class SecondContext {
 public:
  SecondContext(int n, int h, QEigenstructure q);

  int n() const { return n_; }
  int h() const { return h_; }
  const QEigenstructure& q() const { return q_; }
  const ThetaSpace& level(int k) const;

 private:
  int n_, h_;
  QEigenstructure q_;
  std::vector<std::unique_ptr<ThetaSpace>> levels_;
};

// Explicit counting-orthonormal basis of the eigenspace triple: the kernel of
// D at level k (the complement of the lifted level-(k-1) space inside the
// type block, via modified Gram-Schmidt), raised back to level h by repeated
// D* with the norm growth of each lift divided out.
Matrix eigenspace_basis(const SecondContext& ctx, std::span<const int> type, int k);

struct EigenTriple {
  std::vector<int> type;
  int level_k = 0;
  double m_part = 0.0;
  double delta_part = 0.0;
  double eigenvalue = 0.0;
  long long dimension = 0;
  std::optional<Matrix> basis;  // counting-orthonormal columns

  std::string label() const;
};

// The complete eigenspace census of the second crested product. Requires
// h < n (the exchange operator must exist). Dimensions always sum to
// C(n,h) ysize^h.
std::vector<EigenTriple> second_spectrum(int n, int h, const QEigenstructure& q, double p0,
                                         bool with_bases = false);

// Adapts triples for the oracle comparison: bases are rescaled from counting
// to pi-weighted orthonormality (pi uniform on Theta_h).
std::vector<EigenspaceDescriptor> triples_to_descriptors(const std::vector<EigenTriple>& triples,
                                                         std::size_t space_size);

// Two insects at maximal distance on the q-ary tree of depth m-1: the second
// crested product with h = 2 and Q the insect kernel on Y. Eigenvalues of Q
// enter analytically through the alpha products.
QEigenstructure bi_insect_q_structure(int q, int m);
std::vector<EigenTriple> bi_insect_spectrum(int n, int q, int m, double p0,
                                            bool with_bases = false);
ReversibleChain bi_insect_chain(int n, int q, int m, double p0);

}  // namespace crested
