#pragma once

#include <stdexcept>
#include <string>

namespace crested {

// Malformed input: bad dimensions, unknown labels, out-of-range parameters,
// unreadable spec files. CLI exit code 2.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Well-formed input that violates a model property (detailed balance,
// reversibility condition, degenerate operator). CLI exit code 3.
struct ModelError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct UnknownStateError : InputError {
  explicit UnknownStateError(const std::string& label)
      : InputError("unknown state label: " + label) {}
};

// Thrown when a crested product with N nonempty has an asymmetric factor P_k
// with k > i1; `witness` is the least offending factor index (1-based).
struct NotReversibleError : ModelError {
  int witness;
  explicit NotReversibleError(int k)
      : ModelError("product is not reversible: factor " + std::to_string(k) +
                    " beyond the first nested index is not symmetric"),
        witness(k) {}
};

// The domain-exchange operator is identically zero when h = n.
struct DegenerateDeltaError : ModelError {
  DegenerateDeltaError() : ModelError("delta operator is degenerate for h = n") {}
};

}  // namespace crested
