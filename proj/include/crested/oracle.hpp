#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "crested/chain.hpp"
#include "crested/descriptors.hpp"

namespace crested {

// Independent numeric verification machinery. Nothing here reuses analytic
// product-assembly code paths: the eigensolver below works on one dense
// symmetric matrix at a time and knows nothing about tensor structure.

struct JacobiResult {
  Vec eigenvalues;  // descending
  Matrix vectors;   // orthonormal columns, ordered like eigenvalues
  int sweeps = 0;
};

// Cyclic Jacobi rotations on a symmetric matrix. Deterministic: fixed sweep
// order, eigenvalues sorted descending (stable), each eigenvector scaled so
// its first coordinate of nonnegligible size is positive.
JacobiResult jacobi_eigensymm(Matrix s, double tol = 1e-14, int max_sweeps = 60);

// Diagonalizes a reversible chain through the symmetrization
// S = D^{1/2} P D^{-1/2}; returns U = D^{-1/2} V with exact pi-orthonormality
// up to solver accuracy. Throws ModelError if detailed balance fails.
SpectralData numeric_spectrum(const ReversibleChain& c);

struct OracleReport {
  std::vector<std::pair<double, long long>> claimed;  // (eigenvalue, multiplicity)
  std::vector<std::pair<double, long long>> numeric;
  double max_projector_gap = 0.0;
  bool projectors_checked = false;
  bool pass = false;
  std::vector<std::string> notes;
};

// Matches the analytic spectrum against a numeric one as multisets of
// (eigenvalue, multiplicity) clustered within eps_cluster. Descriptors whose
// eigenvalues collide within eps_cluster are merged before matching. When all
// descriptors of a cluster carry explicit bases, the pi-weighted orthogonal
// projectors are compared entrywise and the worst gap must stay below
// eps_eig * dimension. A dimension-sum mismatch is reported, never clipped.
OracleReport compare_spectra(const std::vector<EigenspaceDescriptor>& analytic,
                             const SpectralData& numeric,
                             double eps_cluster = kClusterTol,
                             double eps_eig = kEigenTol);

// Empirical per-step state distributions from `replicas` independent walks of
// `steps` steps each. Row t holds the relative frequencies after t steps.
// Deterministic under a fixed seed: replica r uses substream(seed, r).
Matrix simulate_chain(const ReversibleChain& c, std::size_t start, unsigned steps,
                      unsigned replicas, std::uint64_t seed);

}  // namespace crested
