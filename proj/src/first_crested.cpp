#include "crested/first_crested.hpp"

#include <algorithm>
#include <cmath>

#include "crested/errors.hpp"
#include "crested/oracle.hpp"
#include "crested/util.hpp"

namespace crested {

std::vector<int> CrestedSpec::factor_sizes() const {
  std::vector<int> m(factors.size());
  for (std::size_t i = 0; i < factors.size(); ++i) m[i] = static_cast<int>(factors[i].size());
  return m;
}

long long CrestedSpec::product_size() const {
  long long s = 1;
  for (const auto& f : factors) s *= static_cast<long long>(f.size());
  return s;
}

void validate_spec(const CrestedSpec& spec) {
  const std::size_t n = spec.arity();
  if (n == 0) throw InputError("crested spec: no factors");
  if (spec.partition.size() != n || spec.weights.size() != n)
    throw InputError("crested spec: partition/weights length mismatch");
  double sum = 0.0;
  for (double w : spec.weights) {
    if (w <= 0.0) throw InputError("crested spec: weights must be strictly positive");
    sum += w;
  }
  if (std::fabs(sum - 1.0) > kRowSumTol)
    throw InputError("crested spec: weights do not sum to 1");
  for (const auto& f : spec.factors) {
    validate_chain(f);
    // Irreducibility: the product theorems assume a simple eigenvalue 1.
    SpectralData s = numeric_spectrum(f);
    const auto clusters = cluster_eigenvalues(s.lambdas);
    if (clusters.empty() || std::fabs(clusters[0].value - 1.0) > kClusterTol ||
        clusters[0].multiplicity != 1)
      throw InputError("crested spec: factor is not irreducible");
  }
}

int first_nested_index(const CrestedSpec& spec) {
  for (std::size_t i = 0; i < spec.partition.size(); ++i)
    if (spec.partition[i] == PartTag::Nested) return static_cast<int>(i) + 1;
  return static_cast<int>(spec.arity()) + 1;
}

std::vector<std::string> product_state_labels(const CrestedSpec& spec) {
  const MixedRadix mr{spec.factor_sizes()};
  const std::size_t total = mr.size();
  std::vector<std::string> labels(total);
  for (std::size_t idx = 0; idx < total; ++idx) {
    const auto w = mr.word(idx);
    std::string s;
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (i > 0) s += '.';
      s += spec.factors[i].states[w[i]];
    }
    labels[idx] = std::move(s);
  }
  return labels;
}

Matrix assemble_crested_matrix(const CrestedSpec& spec) {
  const std::size_t n = spec.arity();
  Matrix p;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<Matrix> parts;
    parts.reserve(n);
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t m = spec.factors[j].size();
      if (j < i) {
        parts.push_back(Matrix::identity(m));
      } else if (j == i) {
        parts.push_back(spec.factors[j].P);
      } else {
        parts.push_back(spec.partition[i] == PartTag::Nested ? Matrix::uniform(m)
                                                             : Matrix::identity(m));
      }
    }
    Matrix term = kron(std::span<const Matrix>(parts));
    term *= spec.weights[i];
    if (i == 0)
      p = std::move(term);
    else
      p += term;
  }
  return p;
}

ReversibilityCheck check_crested_reversibility(const CrestedSpec& spec, double eps) {
  const int n = static_cast<int>(spec.arity());
  const int i1 = first_nested_index(spec);
  for (int k = i1 + 1; k <= n; ++k) {
    const Matrix& pk = spec.factors[k - 1].P;
    if (max_abs_diff(pk, pk.transposed()) > eps) return {false, {}, k};
  }
  const MixedRadix mr{spec.factor_sizes()};
  double tail = 1.0;
  for (int i = i1 + 1; i <= n; ++i) tail *= static_cast<double>(spec.factors[i - 1].size());
  Vec pi(mr.size());
  for (std::size_t idx = 0; idx < pi.size(); ++idx) {
    const auto w = mr.word(idx);
    double v = 1.0;
    for (int i = 1; i <= std::min(i1, n); ++i) v *= spec.factors[i - 1].pi[w[i - 1]];
    pi[idx] = v / tail;
  }
  return {true, std::move(pi), 0};
}

ReversibleChain assemble_first_crested(const CrestedSpec& spec) {
  validate_spec(spec);
  ReversibilityCheck rc = check_crested_reversibility(spec);
  if (!rc.reversible) throw NotReversibleError(rc.witness);
  ReversibleChain chain{product_state_labels(spec), assemble_crested_matrix(spec),
                        std::move(rc.pi)};
  validate_chain(chain);
  return chain;
}

std::vector<SpectralData> factor_spectra(const CrestedSpec& spec) {
  std::vector<SpectralData> out;
  out.reserve(spec.arity());
  for (const auto& f : spec.factors) {
    SpectralData s = numeric_spectrum(f);
    if (std::fabs(s.lambdas[0] - 1.0) > 1e-6)
      throw ModelError("factor spectra: leading eigenvalue is not 1");
    // Column 0 is the constant eigenvector with sigma-norm 1, exactly.
    s.lambdas[0] = 1.0;
    for (std::size_t x = 0; x < s.size(); ++x) s.U(x, 0) = 1.0;
    out.push_back(std::move(s));
  }
  return out;
}

std::string coord_tag_label(const CoordTag& t) {
  switch (t.kind) {
    case CoordTag::Kind::Full:
      return "L(X" + std::to_string(t.factor) + ")";
    case CoordTag::Kind::Eig:
      return "V" + std::to_string(t.factor) + "[" + std::to_string(t.cluster) + "]";
    case CoordTag::Kind::Trivial:
      return "V" + std::to_string(t.factor) + "[0]";
  }
  return "?";
}

std::string descriptor_label(const std::vector<CoordTag>& coords) {
  std::string s;
  for (std::size_t i = 0; i < coords.size(); ++i) {
    if (i > 0) s += "*";
    s += coord_tag_label(coords[i]);
  }
  return s;
}

namespace {

// Eigenvalue clusters per factor; cluster 0 is always the simple eigenvalue 1.
std::vector<std::vector<EigenvalueCluster>> factor_clusters(
    const std::vector<SpectralData>& spectra) {
  std::vector<std::vector<EigenvalueCluster>> out;
  out.reserve(spectra.size());
  for (const auto& s : spectra) out.push_back(cluster_eigenvalues(s.lambdas));
  return out;
}

EigenspaceDescriptor finish_descriptor(
    std::vector<CoordTag> coords, double eigenvalue,
    const std::vector<std::vector<EigenvalueCluster>>& clusters,
    const std::vector<SpectralData>& spectra) {
  EigenspaceDescriptor d;
  d.coords = std::move(coords);
  d.eigenvalue = eigenvalue;
  d.dimension = 1;
  for (const auto& t : d.coords) {
    switch (t.kind) {
      case CoordTag::Kind::Full:
        d.dimension *= static_cast<long long>(spectra[t.factor - 1].size());
        break;
      case CoordTag::Kind::Eig:
        d.dimension *= clusters[t.factor - 1][t.cluster].multiplicity;
        break;
      case CoordTag::Kind::Trivial:
        break;
    }
  }
  d.label = descriptor_label(d.coords);
  return d;
}

// Enumerates cluster choices for the coordinates listed in `slots`, invoking
// `emit` with the per-slot cluster indices (lexicographic order).
template <typename F>
void for_each_choice(const std::vector<int>& slots,
                     const std::vector<std::vector<EigenvalueCluster>>& clusters,
                     const std::vector<int>& starts, F&& emit) {
  std::vector<int> choice(slots.size(), 0);
  for (std::size_t i = 0; i < slots.size(); ++i) choice[i] = starts[i];
  while (true) {
    emit(choice);
    std::size_t pos = slots.size();
    while (pos > 0) {
      --pos;
      if (++choice[pos] < static_cast<int>(clusters[slots[pos] - 1].size())) break;
      choice[pos] = starts[pos];
      if (pos == 0) return;
    }
    if (slots.empty()) return;
  }
}

}  // namespace

std::vector<EigenspaceDescriptor> analytic_spectrum_first(
    const CrestedSpec& spec, const std::vector<SpectralData>& spectra, bool with_bases) {
  const int n = static_cast<int>(spec.arity());
  const int i1 = first_nested_index(spec);
  const auto clusters = factor_clusters(spectra);
  std::vector<EigenspaceDescriptor> out;

  // Family B: eigenspace choices at coordinates 1..i1, trivial tails.
  {
    std::vector<int> slots;
    for (int t = 1; t <= std::min(i1, n); ++t) slots.push_back(t);
    std::vector<int> starts(slots.size(), 0);
    for_each_choice(slots, clusters, starts, [&](const std::vector<int>& choice) {
      std::vector<CoordTag> coords(n);
      double eig = 0.0;
      for (std::size_t s = 0; s < slots.size(); ++s) {
        const int i = slots[s];
        coords[i - 1] = {CoordTag::Kind::Eig, i, choice[s]};
        eig += spec.weights[i - 1] * clusters[i - 1][choice[s]].value;
      }
      for (int i = i1 + 1; i <= n; ++i) {
        coords[i - 1] = {CoordTag::Kind::Trivial, i, 0};
        eig += spec.weights[i - 1];
      }
      out.push_back(finish_descriptor(std::move(coords), eig, clusters, spectra));
    });
  }

  // Family A: pivot coordinate k beyond i1 carries a nontrivial eigenspace,
  // nested coordinates before it contribute their whole function space.
  for (int k = i1 + 1; k <= n; ++k) {
    std::vector<int> slots;   // crossed coordinates before k, then k itself
    std::vector<int> starts;
    for (int i = 1; i < k; ++i) {
      if (spec.partition[i - 1] == PartTag::Crossed) {
        slots.push_back(i);
        starts.push_back(0);
      }
    }
    slots.push_back(k);
    starts.push_back(1);  // j_k != 0
    if (clusters[k - 1].size() < 2) continue;  // factor with a single eigenvalue
    for_each_choice(slots, clusters, starts, [&](const std::vector<int>& choice) {
      std::vector<CoordTag> coords(n);
      double eig = 0.0;
      for (std::size_t s = 0; s < slots.size(); ++s) {
        const int i = slots[s];
        coords[i - 1] = {CoordTag::Kind::Eig, i, choice[s]};
        eig += spec.weights[i - 1] * clusters[i - 1][choice[s]].value;
      }
      for (int i = 1; i < k; ++i) {
        if (spec.partition[i - 1] == PartTag::Nested) coords[i - 1] = {CoordTag::Kind::Full, i, 0};
      }
      for (int i = k + 1; i <= n; ++i) {
        coords[i - 1] = {CoordTag::Kind::Trivial, i, 0};
        eig += spec.weights[i - 1];
      }
      out.push_back(finish_descriptor(std::move(coords), eig, clusters, spectra));
    });
  }

  if (with_bases)
    for (auto& d : out) d.basis = materialize_descriptor_basis(spec, spectra, d);
  return out;
}

Matrix materialize_descriptor_basis(const CrestedSpec& spec,
                                    const std::vector<SpectralData>& spectra,
                                    const EigenspaceDescriptor& d) {
  if (d.coords.size() != spec.arity())
    throw InputError("descriptor basis: coordinate count does not match the spec");
  const auto clusters = factor_clusters(spectra);
  std::vector<Matrix> blocks;
  blocks.reserve(d.coords.size());
  for (const auto& t : d.coords) {
    const SpectralData& s = spectra[t.factor - 1];
    const std::size_t m = s.size();
    switch (t.kind) {
      case CoordTag::Kind::Full: {
        // sigma-orthonormal basis of the whole space: e_x / sqrt(sigma(x)).
        Matrix b(m, m);
        for (std::size_t x = 0; x < m; ++x) b(x, x) = 1.0 / std::sqrt(s.pi[x]);
        blocks.push_back(std::move(b));
        break;
      }
      case CoordTag::Kind::Eig: {
        const auto& cols = clusters[t.factor - 1][t.cluster].columns;
        Matrix b(m, cols.size());
        for (std::size_t c = 0; c < cols.size(); ++c)
          for (std::size_t x = 0; x < m; ++x) b(x, c) = s.U(x, cols[c]);
        blocks.push_back(std::move(b));
        break;
      }
      case CoordTag::Kind::Trivial: {
        blocks.push_back(Matrix(m, 1, 1.0));
        break;
      }
    }
  }
  Matrix basis = kron(std::span<const Matrix>(blocks));
  if (static_cast<long long>(basis.cols()) != d.dimension)
    throw ModelError("descriptor basis: dimension mismatch");
  return basis;
}

EigenSystem assemble_U_D_Delta(const CrestedSpec& spec,
                               const std::vector<SpectralData>& spectra) {
  const int n = static_cast<int>(spec.arity());
  const int i1 = first_nested_index(spec);
  const MixedRadix mr{spec.factor_sizes()};
  const std::size_t total = mr.size();

  EigenSystem es;
  es.states = product_state_labels(spec);
  es.U = Matrix(total, total);
  es.d.resize(total);
  es.lambda.resize(total);

  for (std::size_t xi = 0; xi < total; ++xi) {
    const auto w = mr.word(xi);
    double v = 1.0;
    for (int i = 0; i < n; ++i) v *= spec.factors[i].pi[w[i]];
    es.d[xi] = v;
  }

  for (std::size_t zi = 0; zi < total; ++zi) {
    const auto z = mr.word(zi);
    int pivot = 0;  // last coordinate with a nonzero eigenvector index
    for (int i = n; i >= 1; --i) {
      if (z[i - 1] != 0) {
        pivot = i;
        break;
      }
    }

    // Per-coordinate column of the sparse eigenvector matrix.
    std::vector<Vec> coordvec(n);
    for (int i = 1; i <= n; ++i) {
      const SpectralData& s = spectra[i - 1];
      const std::size_t m = s.size();
      if (pivot > i1) {
        if (i < pivot) {
          if (spec.partition[i - 1] == PartTag::Nested) {
            Vec e(m, 0.0);
            e[z[i - 1]] = 1.0 / std::sqrt(s.pi[z[i - 1]]);
            coordvec[i - 1] = std::move(e);
          } else {
            coordvec[i - 1] = s.U.col(z[i - 1]);
          }
        } else if (i == pivot) {
          coordvec[i - 1] = s.U.col(z[i - 1]);
        } else {
          coordvec[i - 1] = Vec(m, 1.0);
        }
      } else {
        coordvec[i - 1] = i <= std::min(i1, n) ? s.U.col(z[i - 1]) : Vec(m, 1.0);
      }
    }
    for (std::size_t xi = 0; xi < total; ++xi) {
      const auto x = mr.word(xi);
      double v = 1.0;
      for (int i = 0; i < n; ++i) v *= coordvec[i][x[i]];
      es.U(xi, zi) = v;
    }

    // Diagonal of the eigenvalue matrix: nested coordinates only contribute
    // while every later index is still 0.
    double lam = 0.0;
    bool tail_zero = true;
    for (int i = n; i >= 1; --i) {
      const double li = spectra[i - 1].lambdas[z[i - 1]];
      if (spec.partition[i - 1] == PartTag::Crossed) {
        lam += spec.weights[i - 1] * li;
      } else if (tail_zero) {
        lam += spec.weights[i - 1] * li;
      }
      if (z[i - 1] != 0) tail_zero = false;
    }
    es.lambda[zi] = lam;
  }
  return es;
}

Matrix tensor_eigenvector_matrix(const std::vector<SpectralData>& spectra) {
  std::vector<Matrix> us;
  us.reserve(spectra.size());
  for (const auto& s : spectra) us.push_back(s.U);
  return kron(std::span<const Matrix>(us));
}

double kstep_first(const EigenSystem& es, unsigned k, std::size_t x, std::size_t y) {
  const std::size_t total = es.lambda.size();
  if (x >= total || y >= total) throw UnknownStateError("state index out of range");
  double acc = 0.0;
  for (std::size_t z = 0; z < total; ++z) {
    const double ux = es.U(x, z);
    if (ux == 0.0) continue;
    acc += ux * ipow(es.lambda[z], k) * es.U(y, z);
  }
  return es.d[y] * acc;
}

double kstep_first(const CrestedSpec& spec, const std::vector<SpectralData>& spectra,
                   unsigned k, std::size_t x, std::size_t y) {
  return kstep_first(assemble_U_D_Delta(spec, spectra), k, x, y);
}

std::vector<CensusRow> crossed_dimension_census(const std::vector<SpectralData>& spectra) {
  if (spectra.empty()) throw InputError("census: no factors");
  const int n = static_cast<int>(spectra.size());
  const auto ref = cluster_eigenvalues(spectra[0].lambdas);
  for (const auto& s : spectra) {
    const auto c = cluster_eigenvalues(s.lambdas);
    bool same = s.size() == spectra[0].size() && c.size() == ref.size();
    for (std::size_t j = 0; same && j < c.size(); ++j)
      same = c[j].multiplicity == ref[j].multiplicity &&
             std::fabs(c[j].value - ref[j].value) <= 1e-9;
    if (!same) throw InputError("census: factors are not homogeneous");
  }

  const int kk = static_cast<int>(ref.size());  // k+1 distinct eigenvalues
  std::vector<CensusRow> rows;
  for (const auto& r : compositions(n, kk)) {
    double eig = 0.0;
    long long count = multinomial(n, r);
    for (int j = 0; j < kk; ++j) {
      eig += static_cast<double>(r[j]) * ref[j].value;
      count *= ipow_ll(ref[j].multiplicity, r[j]);
    }
    rows.push_back({r, eig / n, count});
  }
  return rows;
}

}  // namespace crested
