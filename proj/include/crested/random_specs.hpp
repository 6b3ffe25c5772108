#pragma once

#include <cstdint>

#include "crested/first_crested.hpp"

namespace crested {

// Seeded generators for the verification corpus. Every chain they produce is
// ergodic by construction (connected with at least one self-loop, or strictly
// positive symmetric rows), so spectral claims about ergodic factors can be
// tested across the whole corpus.

// Random walk on a random connected weighted graph with self-loops; reversible
// and in general asymmetric.
ReversibleChain random_reversible_chain(std::uint64_t seed, int m);

// Symmetric doubly stochastic chain with strictly positive entries.
ReversibleChain random_symmetric_chain(std::uint64_t seed, int m);

// Random crested spec with n <= max_n factors of size 2..max_m, a random
// partition, and random strictly positive weights. Factors beyond the first
// nested coordinate are symmetric, so the product is always reversible.
CrestedSpec random_crested_spec(std::uint64_t seed, int max_n = 4, int max_m = 4);

}  // namespace crested
