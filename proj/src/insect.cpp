#include "crested/insect.hpp"

#include <cmath>

#include "crested/errors.hpp"
#include "crested/rng.hpp"
#include "crested/util.hpp"

namespace crested {

long long TreeShape::leaf_count() const {
  long long c = 1;
  for (int m : branching) c *= m;
  return c;
}

void validate_shape(const TreeShape& shape) {
  if (shape.branching.empty()) throw InputError("tree shape: depth must be at least 1");
  for (int m : shape.branching)
    if (m < 2) throw InputError("tree shape: branching degrees must be at least 2");
}

int ultrametric_distance(std::span<const int> x, std::span<const int> y) {
  const int n = static_cast<int>(x.size());
  for (int i = 0; i < n; ++i)
    if (x[i] != y[i]) return n - i;
  return 0;
}

Vec compute_alphas(const TreeShape& shape) {
  validate_shape(shape);
  const int n = shape.depth();
  const auto& m = shape.branching;
  // S_j = 1 + m_n + m_n m_{n-1} + ... + m_n ... m_{n-j+1};  alpha_j = S_{j-1}/S_j.
  Vec alpha(n + 1, 0.0);
  alpha[0] = 1.0;
  double term = 1.0;
  double s_prev = 1.0;
  for (int j = 1; j <= n - 1; ++j) {
    term *= static_cast<double>(m[n - j]);
    const double s = s_prev + term;
    alpha[j] = s_prev / s;
    s_prev = s;
  }
  alpha[n] = 0.0;
  return alpha;
}

Vec compute_alphas_recursive(const TreeShape& shape) {
  validate_shape(shape);
  const int n = shape.depth();
  const auto& m = shape.branching;
  Vec alpha(n + 1, 0.0);
  alpha[0] = 1.0;
  if (n >= 2) alpha[1] = 1.0 / (m[n - 1] + 1.0);  // from xi_1 a step down ends the excursion
  for (int j = 2; j <= n - 1; ++j) {
    // alpha_j = 1/(m+1) + alpha_{j-1} alpha_j m/(m+1), solved for alpha_j.
    const double mj = static_cast<double>(m[n - j]);  // m_{n+1-j}, 1-based
    alpha[j] = 1.0 / (mj + 1.0 - alpha[j - 1] * mj);
  }
  alpha[n] = 0.0;
  return alpha;
}

Vec insect_kernel_by_distance(const TreeShape& shape) {
  const int n = shape.depth();
  const auto& m = shape.branching;
  const Vec alpha = compute_alphas(shape);

  // Prefix products of alpha and suffix products of m.
  Vec aprod(n + 1, 1.0);
  for (int t = 1; t <= n; ++t) aprod[t] = aprod[t - 1] * alpha[t];
  Vec tail(n + 1, 1.0);  // tail[t] = m_n m_{n-1} ... m_{n-t+1}
  for (int t = 1; t <= n; ++t) tail[t] = tail[t - 1] * static_cast<double>(m[n - t]);

  // f(j) = sum over climb heights t >= max(j,1) of the chance of topping out
  // exactly at level t times the uniform landing weight under that vertex.
  Vec f(n + 1, 0.0);
  for (int j = n; j >= 0; --j) {
    const int t0 = std::max(j, 1);
    double acc = 0.0;
    for (int t = t0; t <= n; ++t) acc += aprod[t - 1] * (1.0 - alpha[t]) / tail[t];
    f[j] = acc;
  }
  return f;
}

ReversibleChain insect_kernel(const TreeShape& shape) {
  validate_shape(shape);
  const MixedRadix mr{shape.branching};
  const std::size_t total = mr.size();
  const Vec f = insect_kernel_by_distance(shape);

  Matrix p(total, total);
  std::vector<std::string> labels(total);
  std::vector<std::vector<int>> words(total);
  for (std::size_t i = 0; i < total; ++i) {
    words[i] = mr.word(i);
    std::string s;
    for (std::size_t c = 0; c < words[i].size(); ++c) {
      if (c > 0) s += '.';
      s += std::to_string(words[i][c]);
    }
    labels[i] = std::move(s);
  }
  for (std::size_t i = 0; i < total; ++i)
    for (std::size_t j = 0; j < total; ++j)
      p(i, j) = f[ultrametric_distance(words[i], words[j])];

  return {std::move(labels), std::move(p), Vec(total, 1.0 / static_cast<double>(total))};
}

CrestedSpec insect_as_nested(const TreeShape& shape) {
  validate_shape(shape);
  const int n = shape.depth();
  const Vec alpha = compute_alphas(shape);
  Vec aprod(n + 1, 1.0);
  for (int t = 1; t <= n; ++t) aprod[t] = aprod[t - 1] * alpha[t];

  CrestedSpec spec;
  for (int i = 0; i < n; ++i) {
    spec.factors.push_back(uniform_chain(shape.branching[i]));
    spec.partition.push_back(PartTag::Nested);
  }
  spec.weights.resize(n);
  for (int i = 1; i <= n - 1; ++i)
    spec.weights[i - 1] = aprod[n - i] * (1.0 - alpha[n - i + 1]);
  spec.weights[n - 1] = 1.0 - alpha[1];
  return spec;
}

std::vector<EigenspaceDescriptor> insect_spectrum(const TreeShape& shape) {
  validate_shape(shape);
  const int n = shape.depth();
  const auto& m = shape.branching;
  const Vec alpha = compute_alphas(shape);
  Vec aprod(n + 1, 1.0);
  for (int t = 1; t <= n; ++t) aprod[t] = aprod[t - 1] * alpha[t];

  std::vector<EigenspaceDescriptor> out;
  {
    EigenspaceDescriptor z0;
    z0.eigenvalue = 1.0;
    z0.dimension = 1;
    for (int i = 1; i <= n; ++i) z0.coords.push_back({CoordTag::Kind::Trivial, i, 0});
    z0.label = "Z0:" + descriptor_label(z0.coords);
    out.push_back(std::move(z0));
  }
  for (int j = 1; j <= n; ++j) {
    EigenspaceDescriptor zj;
    zj.eigenvalue = 1.0 - aprod[n - j];  // gives 0 at j = n since aprod[0] = 1
    zj.dimension = 1;
    for (int i = 1; i < j; ++i) {
      zj.coords.push_back({CoordTag::Kind::Full, i, 0});
      zj.dimension *= m[i - 1];
    }
    zj.coords.push_back({CoordTag::Kind::Eig, j, 1});
    zj.dimension *= m[j - 1] - 1;
    for (int i = j + 1; i <= n; ++i) zj.coords.push_back({CoordTag::Kind::Trivial, i, 0});
    zj.label = "Z" + std::to_string(j) + ":" + descriptor_label(zj.coords);
    out.push_back(std::move(zj));
  }
  return out;
}

CrestedSpec ehrenfest_preset(int n_balls, int n_urns) {
  if (n_balls < 1) throw InputError("ehrenfest: need at least one ball");
  if (n_urns < 2) throw InputError("ehrenfest: need at least two urns");
  CrestedSpec spec;
  for (int i = 0; i < n_balls; ++i) {
    spec.factors.push_back(uniform_chain(n_urns));
    spec.partition.push_back(PartTag::Crossed);
  }
  spec.weights = Vec(n_balls, 1.0 / n_balls);
  return spec;
}

CrestedSpec nested_uniform_preset(const TreeShape& shape, Vec weights) {
  validate_shape(shape);
  const int n = shape.depth();
  if (weights.empty()) weights = Vec(n, 1.0 / n);
  if (static_cast<int>(weights.size()) != n)
    throw InputError("nested-uniform: weight count does not match depth");
  CrestedSpec spec;
  for (int i = 0; i < n; ++i) {
    spec.factors.push_back(uniform_chain(shape.branching[i]));
    spec.partition.push_back(PartTag::Nested);
  }
  spec.weights = std::move(weights);
  return spec;
}

Matrix insect_excursion_frequencies(const TreeShape& shape, long long excursions_per_leaf,
                                    std::uint64_t seed) {
  validate_shape(shape);
  const int n = shape.depth();
  const auto& m = shape.branching;
  const MixedRadix mr{shape.branching};
  const std::size_t total = mr.size();

  Matrix freq(total, total);
  std::vector<int> path(n);
  for (std::size_t start = 0; start < total; ++start) {
    SplitMix64 rng = substream(seed, start);
    const auto word = mr.word(start);
    for (long long e = 0; e < excursions_per_leaf; ++e) {
      std::copy(word.begin(), word.end(), path.begin());
      int level = n - 1;  // the first move, leaf to parent, is forced
      while (true) {
        if (level == 0) {
          path[0] = rng.below(m[0]);
          level = 1;
        } else {
          // Vertex of level `level` has m[level] children and one parent.
          const int deg = m[level] + 1;
          const int move = rng.below(deg);
          if (move == 0) {
            --level;
          } else {
            path[level] = move - 1;
            ++level;
          }
        }
        if (level == n) break;
      }
      freq(start, mr.index(path)) += 1.0;
    }
  }
  freq *= 1.0 / static_cast<double>(excursions_per_leaf);
  return freq;
}

std::vector<std::size_t> random_tree_automorphism(const TreeShape& shape, std::uint64_t seed) {
  validate_shape(shape);
  const int n = shape.depth();
  const auto& m = shape.branching;
  const MixedRadix mr{shape.branching};
  const std::size_t total = mr.size();

  // Global ids for internal vertices: level offsets, then mixed-radix rank of
  // the prefix within the level.
  std::vector<std::size_t> offset(n, 0);
  for (int level = 1; level < n; ++level) {
    std::size_t width = 1;
    for (int i = 0; i < level - 1; ++i) width *= static_cast<std::size_t>(m[i]);
    offset[level] = offset[level - 1] + width;
  }

  auto child_permutation = [&](int level, std::size_t prefix_rank) {
    // level = length of the prefix; the vertex's children use m[level].
    SplitMix64 rng = substream(seed, 0x7EE5ULL + offset[level] + prefix_rank);
    std::vector<int> perm(m[level]);
    for (int i = 0; i < m[level]; ++i) perm[i] = i;
    for (int i = m[level] - 1; i > 0; --i) std::swap(perm[i], perm[rng.below(i + 1)]);
    return perm;
  };

  std::vector<std::size_t> leaf_perm(total);
  std::vector<int> image(n);
  for (std::size_t idx = 0; idx < total; ++idx) {
    const auto x = mr.word(idx);
    std::size_t prefix_rank = 0;
    for (int i = 0; i < n; ++i) {
      image[i] = child_permutation(i, prefix_rank)[x[i]];
      prefix_rank = prefix_rank * static_cast<std::size_t>(m[i]) + static_cast<std::size_t>(x[i]);
    }
    leaf_perm[idx] = mr.index(image);
  }
  return leaf_perm;
}

}  // namespace crested
