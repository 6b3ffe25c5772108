#include "crested/random_specs.hpp"

#include "crested/rng.hpp"

namespace crested {

ReversibleChain random_reversible_chain(std::uint64_t seed, int m) {
  SplitMix64 rng = substream(seed, 0x12EEULL);
  Matrix w(m, m);
  // random spanning tree keeps the graph connected
  for (int v = 1; v < m; ++v) {
    const int u = rng.below(v);
    w(u, v) = w(v, u) = 0.25 + rng.uniform();
  }
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      if (w(i, j) == 0.0 && rng.uniform() < 0.35) w(i, j) = w(j, i) = 0.25 + rng.uniform();
  bool any_loop = false;
  for (int i = 0; i < m; ++i) {
    if (rng.uniform() < 0.5) {
      w(i, i) = 0.25 + rng.uniform();
      any_loop = true;
    }
  }
  if (!any_loop) w(0, 0) = 0.5;  // aperiodicity

  std::vector<std::string> labels(m);
  for (int i = 0; i < m; ++i) labels[i] = std::to_string(i);
  return chain_from_weights({std::move(labels), std::move(w)});
}

ReversibleChain random_symmetric_chain(std::uint64_t seed, int m) {
  SplitMix64 rng = substream(seed, 0x577CULL);
  Matrix b(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = i; j < m; ++j) b(i, j) = b(j, i) = 0.05 + rng.uniform();
  Vec rowsum(m, 0.0);
  double top = 0.0;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) rowsum[i] += b(i, j);
    top = std::max(top, rowsum[i]);
  }
  Matrix p(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) p(i, j) = b(i, j) / top;
    p(i, i) += (top - rowsum[i]) / top;
  }
  std::vector<std::string> labels(m);
  for (int i = 0; i < m; ++i) labels[i] = std::to_string(i);
  return {std::move(labels), std::move(p), Vec(m, 1.0 / m)};
}

CrestedSpec random_crested_spec(std::uint64_t seed, int max_n, int max_m) {
  SplitMix64 rng = substream(seed, 0xC4E5ULL);
  const int n = 1 + rng.below(max_n);
  CrestedSpec spec;
  spec.partition.resize(n);
  for (int i = 0; i < n; ++i)
    spec.partition[i] = rng.uniform() < 0.5 ? PartTag::Nested : PartTag::Crossed;
  int i1 = n + 1;
  for (int i = 0; i < n; ++i) {
    if (spec.partition[i] == PartTag::Nested) {
      i1 = i + 1;
      break;
    }
  }
  for (int i = 1; i <= n; ++i) {
    const int m = 2 + rng.below(max_m - 1);
    const std::uint64_t sub = SplitMix64::mix(seed) + static_cast<std::uint64_t>(i);
    if (i <= i1)
      spec.factors.push_back(random_reversible_chain(sub, m));
    else
      spec.factors.push_back(random_symmetric_chain(sub, m));
  }
  spec.weights.resize(n);
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    spec.weights[i] = 0.2 + rng.uniform();
    sum += spec.weights[i];
  }
  for (int i = 0; i < n; ++i) spec.weights[i] /= sum;
  return spec;
}

}  // namespace crested
