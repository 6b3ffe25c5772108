#pragma once

#include <cstdint>

#include "crested/chain.hpp"
#include "crested/descriptors.hpp"
#include "crested/first_crested.hpp"

namespace crested {

// Rooted tree of depth n: the root has branching[0] children, every vertex of
// level i has branching[i] children. Leaves are the mixed-radix words
// x_1 ... x_n with coordinate 1 at the top level.
struct TreeShape {
  std::vector<int> branching;

  int depth() const { return static_cast<int>(branching.size()); }
  long long leaf_count() const;
};

void validate_shape(const TreeShape& shape);  // every m_i >= 2, depth >= 1

// n minus the longest common prefix of two leaf words.
int ultrametric_distance(std::span<const int> x, std::span<const int> y);

// Return probabilities alpha_0..alpha_n of the simple random walk on the tree:
// alpha_j is the chance of climbing one more level before falling back to the
// leaves. alpha_0 = 1 and alpha_n = 0; the interior values come from the
// closed form with partial sums of m_n m_{n-1} ... .
Vec compute_alphas(const TreeShape& shape);
// Same values from the one-step recursion (kept separate as a cross-check).
Vec compute_alphas_recursive(const TreeShape& shape);

// Leaf-to-leaf kernel of the walk: entry depends only on the ultrametric
// distance; uniform stationary measure.
ReversibleChain insect_kernel(const TreeShape& shape);

// Kernel value as a function of distance j = 0..n.
Vec insect_kernel_by_distance(const TreeShape& shape);

// The fully nested crested product with uniform factors and the alpha-derived
// weights, which reproduces insect_kernel entrywise.
CrestedSpec insect_as_nested(const TreeShape& shape);

// Analytic spectrum: eigenvalue 1, then 1 - alpha_1...alpha_{n-j} on the
// spaces of functions of the first j coordinates that sum to zero in the last
// one (dimension m_1...m_{j-1}(m_j - 1)), down to eigenvalue 0.
std::vector<EigenspaceDescriptor> insect_spectrum(const TreeShape& shape);

// Crossed product of n_balls uniform factors on n_urns states with uniform
// weights: the m-urn Ehrenfest diffusion.
CrestedSpec ehrenfest_preset(int n_balls, int n_urns);

// Fully nested product of uniform factors with the given weights (uniform
// weights when empty).
CrestedSpec nested_uniform_preset(const TreeShape& shape, Vec weights = {});

// Ground-truth Monte Carlo for the kernel: simple random walk excursions on
// the tree graph, started at each leaf, run until the walk re-enters the leaf
// level. Returns the empirical kernel (row = start leaf). Deterministic per
// seed; excursions for leaf x use substream(seed, x).
Matrix insect_excursion_frequencies(const TreeShape& shape, long long excursions_per_leaf,
                                    std::uint64_t seed);

// A uniformly random wreath element: independent child permutations at every
// internal vertex, returned as the induced permutation of leaf indices.
std::vector<std::size_t> random_tree_automorphism(const TreeShape& shape, std::uint64_t seed);

}  // namespace crested
