#pragma once

#include <optional>
#include <string>
#include <vector>

#include "crested/matrix.hpp"

namespace crested {

// Per-coordinate tag of a tensor-factor eigenspace: the whole function space
// L(X_i), one eigenspace V^i_j of the factor, or the trivial eigenspace V^i_0.
struct CoordTag {
  enum class Kind { Full, Eig, Trivial };
  Kind kind;
  int factor;   // 1-based coordinate
  int cluster;  // eigenvalue-cluster index within the factor (Eig only)
};

// One analytic eigenspace: symbolic label, eigenvalue, dimension, and an
// optional explicit basis whose columns are orthonormal in the pi-weighted
// inner product of the product chain.
struct EigenspaceDescriptor {
  std::string label;
  double eigenvalue = 0.0;
  long long dimension = 0;
  std::vector<CoordTag> coords;
  std::optional<Matrix> basis;
};

std::string coord_tag_label(const CoordTag& t);
std::string descriptor_label(const std::vector<CoordTag>& coords);

}  // namespace crested
