#include "crested/second_crested.hpp"

#include <algorithm>
#include <cmath>

#include "crested/errors.hpp"
#include "crested/oracle.hpp"
#include "crested/util.hpp"

namespace crested {

namespace {

std::vector<std::vector<int>> all_combinations(int n, int h) {
  std::vector<std::vector<int>> out;
  std::vector<int> c(h);
  for (int i = 0; i < h; ++i) c[i] = i;
  if (h == 0) {
    out.push_back({});
    return out;
  }
  while (true) {
    out.push_back(c);
    int i = h - 1;
    while (i >= 0 && c[i] == n - h + i) --i;
    if (i < 0) break;
    ++c[i];
    for (int j = i + 1; j < h; ++j) c[j] = c[j - 1] + 1;
  }
  return out;
}

void require_symmetric(const ReversibleChain& q) {
  if (max_abs_diff(q.P, q.P.transposed()) > kRowSumTol)
    throw ModelError("second product: Q must be symmetric (uniform measure on Y)");
}

}  // namespace

ThetaSpace::ThetaSpace(int n, int h, int ysize) : n_(n), h_(h), ysize_(ysize) {
  if (h < 0 || h > n || n < 1) throw InputError("theta space: h out of range");
  if (ysize < 1) throw InputError("theta space: Y must be nonempty");
  block_ = 1;
  for (int i = 0; i < h; ++i) block_ *= static_cast<std::size_t>(ysize);
  domains_ = all_combinations(n, h);
  states_.reserve(domains_.size() * block_);
  for (const auto& d : domains_) {
    std::vector<int> img(h, 0);
    for (std::size_t b = 0; b < block_; ++b) {
      // decode image word, first slot most significant
      std::size_t rest = b;
      for (int i = h - 1; i >= 0; --i) {
        img[i] = static_cast<int>(rest % ysize);
        rest /= ysize;
      }
      states_.push_back({d, img});
    }
  }
}

std::size_t ThetaSpace::domain_rank(std::span<const int> domain) const {
  // Lexicographic rank of an ascending h-subset of {0..n-1}.
  std::size_t rank = 0;
  int prev = -1;
  for (int t = 0; t < h_; ++t) {
    for (int v = prev + 1; v < domain[t]; ++v)
      rank += static_cast<std::size_t>(binomial(n_ - 1 - v, h_ - 1 - t));
    prev = domain[t];
  }
  return rank;
}

std::size_t ThetaSpace::index_of(std::span<const int> domain, std::span<const int> images) const {
  std::size_t img_rank = 0;
  for (int i = 0; i < h_; ++i)
    img_rank = img_rank * static_cast<std::size_t>(ysize_) + static_cast<std::size_t>(images[i]);
  return domain_rank(domain) * block_ + img_rank;
}

std::string ThetaSpace::label(std::size_t idx, const std::vector<std::string>& y_labels) const {
  const PartialFunction& f = states_[idx];
  std::string s;
  for (int i = 0; i < h_; ++i) {
    if (i > 0) s += '|';
    s += std::to_string(f.domain[i] + 1);  // 1-based positions in X
    s += ':';
    s += y_labels[f.images[i]];
  }
  if (h_ == 0) s = "{}";
  return s;
}

Matrix build_delta(const ThetaSpace& space) {
  const int n = space.n(), h = space.h(), ysize = space.ysize();
  if (h >= n) throw DegenerateDeltaError();
  if (h < 1) throw InputError("delta: h must be at least 1");

  const std::size_t total = space.size();
  Matrix delta(total, total);
  std::vector<int> dom(h), img(h);
  for (std::size_t idx = 0; idx < total; ++idx) {
    const PartialFunction& f = space.state(idx);
    for (int drop = 0; drop < h; ++drop) {
      for (int add = 0; add < n; ++add) {
        if (std::binary_search(f.domain.begin(), f.domain.end(), add)) continue;
        // new domain: f.domain minus slot `drop`, plus `add`, kept ascending
        int w = 0;
        bool placed = false;
        for (int i = 0; i < h; ++i) {
          if (i == drop) continue;
          if (!placed && add < f.domain[i]) {
            dom[w] = add;
            img[w] = -1;
            ++w;
            placed = true;
          }
          dom[w] = f.domain[i];
          img[w] = f.images[i];
          ++w;
        }
        if (!placed) {
          dom[w] = add;
          img[w] = -1;
          ++w;
        }
        int slot = 0;
        while (img[slot] != -1) ++slot;
        for (int y = 0; y < ysize; ++y) {
          img[slot] = y;
          delta(idx, space.index_of(dom, img)) = 1.0;
        }
        img[slot] = -1;
      }
    }
  }
  return delta;
}

long long delta_norm(const ThetaSpace& space) {
  return static_cast<long long>(space.ysize()) * (space.n() - space.h()) * space.h();
}

Matrix build_M(const ThetaSpace& space, const ReversibleChain& q) {
  if (static_cast<int>(q.size()) != space.ysize())
    throw InputError("M: Q size does not match Y");
  require_symmetric(q);
  const int h = space.h();
  const std::size_t total = space.size();
  Matrix m(total, total);
  std::vector<int> img(h);
  for (std::size_t idx = 0; idx < total; ++idx) {
    const PartialFunction& f = space.state(idx);
    for (int slot = 0; slot < h; ++slot) {
      img = f.images;
      for (int y = 0; y < space.ysize(); ++y) {
        img[slot] = y;
        m(idx, space.index_of(f.domain, img)) += q.P(f.images[slot], y) / h;
      }
    }
  }
  return m;
}

ReversibleChain build_P(double p0, const ThetaSpace& space, const Matrix& m,
                        const Matrix& delta, long long norm,
                        const std::vector<std::string>& y_labels) {
  if (!(p0 > 0.0 && p0 < 1.0)) throw InputError("second product: p0 must lie in (0,1)");
  const std::size_t total = space.size();
  if (m.rows() != total || delta.rows() != total)
    throw InputError("second product: operator shape mismatch");
  Matrix p(total, total);
  const double dscale = (1.0 - p0) / static_cast<double>(norm);
  for (std::size_t i = 0; i < total; ++i)
    for (std::size_t j = 0; j < total; ++j) p(i, j) = p0 * m(i, j) + dscale * delta(i, j);
  std::vector<std::string> labels(total);
  for (std::size_t i = 0; i < total; ++i) labels[i] = space.label(i, y_labels);
  return {std::move(labels), std::move(p), Vec(total, 1.0 / static_cast<double>(total))};
}

ReversibleChain second_crested_chain(int n, int h, const ReversibleChain& q, double p0) {
  if (h < 1 || h > n) throw InputError("second product: h out of range");
  require_symmetric(q);
  ThetaSpace space(n, h, static_cast<int>(q.size()));
  if (h == n) {
    // No exchange move exists: the chain is the uniform crossed product on Y^n.
    Matrix m = build_M(space, q);
    std::vector<std::string> labels(space.size());
    for (std::size_t i = 0; i < space.size(); ++i) labels[i] = space.label(i, q.states);
    return {std::move(labels), std::move(m), Vec(space.size(), 1.0 / space.size())};
  }
  return build_P(p0, space, build_M(space, q), build_delta(space), delta_norm(space), q.states);
}

ReversibleChain crested_bernoulli_laplace(int n, int h, const ReversibleChain& q, double p0) {
  return second_crested_chain(n, h, q, p0);
}

Vec apply_D(const ThetaSpace& upper, const ThetaSpace& lower, const Vec& f) {
  if (upper.h() != lower.h() + 1 || f.size() != upper.size())
    throw InputError("apply_D: level mismatch");
  Vec out(lower.size(), 0.0);
  const int h = upper.h();
  std::vector<int> dom(h - 1), img(h - 1);
  for (std::size_t idx = 0; idx < upper.size(); ++idx) {
    const double v = f[idx];
    if (v == 0.0) continue;
    const PartialFunction& t = upper.state(idx);
    for (int drop = 0; drop < h; ++drop) {
      int w = 0;
      for (int i = 0; i < h; ++i) {
        if (i == drop) continue;
        dom[w] = t.domain[i];
        img[w] = t.images[i];
        ++w;
      }
      out[lower.index_of(dom, img)] += v;
    }
  }
  return out;
}

Vec apply_Dstar(const ThetaSpace& lower, const ThetaSpace& upper, const Vec& f) {
  if (upper.h() != lower.h() + 1 || f.size() != lower.size())
    throw InputError("apply_Dstar: level mismatch");
  Vec out(upper.size(), 0.0);
  const int h = upper.h();
  std::vector<int> dom(h - 1), img(h - 1);
  for (std::size_t idx = 0; idx < upper.size(); ++idx) {
    const PartialFunction& t = upper.state(idx);
    double acc = 0.0;
    for (int drop = 0; drop < h; ++drop) {
      int w = 0;
      for (int i = 0; i < h; ++i) {
        if (i == drop) continue;
        dom[w] = t.domain[i];
        img[w] = t.images[i];
        ++w;
      }
      acc += f[lower.index_of(dom, img)];
    }
    out[idx] = acc;
  }
  return out;
}

QEigenstructure q_eigenstructure(const ReversibleChain& q) {
  require_symmetric(q);
  SpectralData s = numeric_spectrum(q);
  const auto clusters = cluster_eigenvalues(s.lambdas);
  if (std::fabs(clusters[0].value - 1.0) > kClusterTol || clusters[0].multiplicity != 1)
    throw ModelError("Q eigenstructure: eigenvalue 1 must be simple");

  QEigenstructure out;
  out.ysize = static_cast<int>(q.size());
  const double scale = 1.0 / std::sqrt(static_cast<double>(q.size()));
  for (const auto& c : clusters) {
    out.lambdas.push_back(c.value);
    out.dims.push_back(c.multiplicity);
    Matrix b(q.size(), c.columns.size());
    for (std::size_t j = 0; j < c.columns.size(); ++j)
      for (std::size_t x = 0; x < q.size(); ++x) b(x, j) = s.U(x, c.columns[j]) * scale;
    out.bases.push_back(std::move(b));
  }
  out.lambdas[0] = 1.0;
  for (std::size_t x = 0; x < q.size(); ++x) out.bases[0](x, 0) = scale;
  return out;
}

Vec fundamental_vector(const ThetaSpace& space, const QEigenstructure& q,
                       const FundamentalFunction& f) {
  const int h = space.h();
  Vec out(space.size(), 0.0);
  const std::size_t base = space.domain_rank(f.domain) * space.block_size();
  std::vector<int> img(h, 0);
  for (std::size_t b = 0; b < space.block_size(); ++b) {
    std::size_t rest = b;
    for (int i = h - 1; i >= 0; --i) {
      img[i] = static_cast<int>(rest % space.ysize());
      rest /= space.ysize();
    }
    double v = 1.0;
    for (int i = 0; i < h; ++i) v *= q.bases[f.eigenspace[i]](img[i], f.basis_col[i]);
    out[base + b] = v;
  }
  return out;
}

namespace {

// All distinct slot assignments with the given per-eigenspace counts,
// lexicographic over assignment words.
void assignments_rec(std::vector<int>& remaining, std::vector<int>& word, int pos,
                     std::vector<std::vector<int>>& out) {
  if (pos == static_cast<int>(word.size())) {
    out.push_back(word);
    return;
  }
  for (int j = 0; j < static_cast<int>(remaining.size()); ++j) {
    if (remaining[j] == 0) continue;
    --remaining[j];
    word[pos] = j;
    assignments_rec(remaining, word, pos + 1, out);
    ++remaining[j];
  }
}

}  // namespace

Matrix fundamental_basis(const ThetaSpace& space, const QEigenstructure& q,
                         std::span<const int> type) {
  const int h = space.h();
  int sum = 0;
  for (int a : type) sum += a;
  if (sum != h) throw InputError("fundamental basis: type does not sum to h");

  std::vector<int> counts(type.begin(), type.end());
  std::vector<std::vector<int>> assignments;
  std::vector<int> word(h, 0);
  assignments_rec(counts, word, 0, assignments);

  std::vector<Vec> cols;
  FundamentalFunction f;
  f.basis_col.resize(h);
  for (std::size_t d = 0; d < space.domain_count(); ++d) {
    f.domain = space.domain(d);
    for (const auto& assign : assignments) {
      f.eigenspace = assign;
      // mixed-radix loop over basis columns per slot
      std::vector<int> radix(h);
      for (int i = 0; i < h; ++i) radix[i] = q.dims[assign[i]];
      std::fill(f.basis_col.begin(), f.basis_col.end(), 0);
      while (true) {
        cols.push_back(fundamental_vector(space, q, f));
        int pos = h - 1;
        while (pos >= 0) {
          if (++f.basis_col[pos] < radix[pos]) break;
          f.basis_col[pos] = 0;
          --pos;
        }
        if (pos < 0) break;
      }
    }
  }

  Matrix b(space.size(), cols.size());
  for (std::size_t j = 0; j < cols.size(); ++j) b.set_col(j, cols[j]);
  return b;
}

long long type_space_dimension(int n, int k, std::span<const int> type,
                               const std::vector<int>& wdims) {
  long long d = binomial(n, k) * multinomial(k, type);
  for (std::size_t j = 1; j < type.size(); ++j) d *= ipow_ll(wdims[j], type[j]);
  return d;
}

int triple_k_min(std::span<const int> type, int /*h*/) {
  int ell = 0;
  for (std::size_t j = 1; j < type.size(); ++j) ell += type[j];
  return ell;
}

int triple_k_max(int n, int h, std::span<const int> type) {
  const int ell = triple_k_min(type, h);
  // Lifting from level k dies at level n + l - k, so the triple is nonzero
  // only while k <= n + l - h.
  return std::min(h, n + ell - h);
}

long long triple_dimension(int n, int h, std::span<const int> type, int k,
                           const std::vector<int>& wdims) {
  const int ell = triple_k_min(type, h);
  if (k < ell || k > triple_k_max(n, h, type))
    throw InputError("eigenspace triple: k out of range");
  std::vector<int> tail(type.begin() + 1, type.end());
  long long num = static_cast<long long>(n + ell + 1 - 2 * k) * binomial(n, k) *
                  binomial(k, ell) * multinomial(ell, tail);
  for (std::size_t j = 1; j < type.size(); ++j) num *= ipow_ll(wdims[j], type[j]);
  const long long den = n - k + 1;
  if (num % den != 0) throw ModelError("eigenspace triple: dimension is not integral");
  return num / den;
}

double m_part_eigenvalue(int h, std::span<const int> type, const Vec& lambdas) {
  double acc = 0.0;
  for (std::size_t j = 0; j < type.size(); ++j) acc += type[j] * lambdas[j];
  return acc / h;
}

double delta_part_eigenvalue(int n, int h, std::span<const int> type, int k) {
  if (h >= n) throw DegenerateDeltaError();
  const int ell = triple_k_min(type, h);
  const double num =
      static_cast<double>((n + ell - k - h) * (h - k + 1)) - static_cast<double>(n - h);
  return num / static_cast<double>(h * (n - h));
}

double triple_eigenvalue(double p0, int n, int h, std::span<const int> type, int k,
                               const Vec& lambdas) {
  return p0 * m_part_eigenvalue(h, type, lambdas) +
         (1.0 - p0) * delta_part_eigenvalue(n, h, type, k);
}

SecondContext::SecondContext(int n, int h, QEigenstructure q)
    : n_(n), h_(h), q_(std::move(q)) {
  levels_.resize(h + 1);
  for (int k = 0; k <= h; ++k)
    levels_[k] = std::make_unique<ThetaSpace>(n, k, q_.ysize);
}

const ThetaSpace& SecondContext::level(int k) const {
  if (k < 0 || k > h_) throw InputError("second context: level out of range");
  return *levels_[k];
}

namespace {

// Two-pass modified Gram-Schmidt append; returns false when v is (numerically)
// in the span of `basis`.
bool mgs_append(std::vector<Vec>& basis, Vec v, double drop_tol) {
  for (int pass = 0; pass < 2; ++pass) {
    for (const Vec& b : basis) {
      const double c = dot(b, v);
      for (std::size_t i = 0; i < v.size(); ++i) v[i] -= c * b[i];
    }
  }
  const double norm = std::sqrt(dot(v, v));
  if (norm <= drop_tol) return false;
  for (double& x : v) x /= norm;
  basis.push_back(std::move(v));
  return true;
}

}  // namespace

Matrix eigenspace_basis(const SecondContext& ctx, std::span<const int> type, int k) {
  const int n = ctx.n(), h = ctx.h();
  const int ell = triple_k_min(type, h);
  if (k < ell || k > triple_k_max(n, h, type))
    throw InputError("eigenspace basis: k out of range");

  // Type at the kernel level: h - k constant slots removed.
  std::vector<int> level_type(type.begin(), type.end());
  level_type[0] -= (h - k);

  const ThetaSpace& lk = ctx.level(k);
  Matrix block = fundamental_basis(lk, ctx.q(), level_type);

  std::vector<Vec> ortho;  // lifted range first, then kernel vectors
  std::size_t range_dim = 0;
  if (level_type[0] > 0) {
    std::vector<int> below_type = level_type;
    --below_type[0];
    const ThetaSpace& lkm1 = ctx.level(k - 1);
    Matrix lower = fundamental_basis(lkm1, ctx.q(), below_type);
    for (std::size_t j = 0; j < lower.cols(); ++j)
      mgs_append(ortho, apply_Dstar(lkm1, lk, lower.col(j)), 1e-8);
    range_dim = ortho.size();
  }
  std::vector<Vec> kernel;
  for (std::size_t j = 0; j < block.cols(); ++j) {
    if (mgs_append(ortho, block.col(j), 1e-8)) kernel.push_back(ortho.back());
  }

  const long long want = triple_dimension(n, h, type, k, ctx.q().dims);
  if (static_cast<long long>(kernel.size()) != want)
    throw ModelError("eigenspace basis: kernel dimension " + std::to_string(kernel.size()) +
                     " does not match the closed form " + std::to_string(want));
  (void)range_dim;

  // Lift back to level h; each raise scales every norm by the same factor.
  for (int t = k; t < h; ++t) {
    const double growth = std::sqrt(static_cast<double>(ctx.q().ysize) *
                                    static_cast<double>(n + ell - k - t) *
                                    static_cast<double>(t - k + 1));
    for (Vec& v : kernel) {
      Vec lifted = apply_Dstar(ctx.level(t), ctx.level(t + 1), v);
      for (double& x : lifted) x /= growth;
      v = std::move(lifted);
    }
  }

  Matrix out(ctx.level(h).size(), kernel.size());
  for (std::size_t j = 0; j < kernel.size(); ++j) out.set_col(j, kernel[j]);
  return out;
}

std::string EigenTriple::label() const {
  std::string s = "P[a=";
  for (std::size_t i = 0; i < type.size(); ++i) {
    if (i > 0) s += '.';
    s += std::to_string(type[i]);
  }
  s += ";k=" + std::to_string(level_k) + "]";
  return s;
}

std::vector<EigenTriple> second_spectrum(int n, int h, const QEigenstructure& q, double p0,
                                         bool with_bases) {
  if (h < 1 || h >= n)
    throw InputError("second spectrum: requires 1 <= h < n");
  std::unique_ptr<SecondContext> ctx;
  if (with_bases) ctx = std::make_unique<SecondContext>(n, h, q);

  std::vector<EigenTriple> out;
  for (const auto& a : compositions(h, q.eigenspace_count())) {
    const int ell = triple_k_min(a, h);
    const int kmax = triple_k_max(n, h, a);
    for (int k = ell; k <= kmax; ++k) {
      EigenTriple t;
      t.type = a;
      t.level_k = k;
      t.m_part = m_part_eigenvalue(h, a, q.lambdas);
      t.delta_part = delta_part_eigenvalue(n, h, a, k);
      t.eigenvalue = p0 * t.m_part + (1.0 - p0) * t.delta_part;
      t.dimension = triple_dimension(n, h, a, k, q.dims);
      if (with_bases) t.basis = eigenspace_basis(*ctx, a, k);
      out.push_back(std::move(t));
    }
  }
  return out;
}

std::vector<EigenspaceDescriptor> triples_to_descriptors(const std::vector<EigenTriple>& triples,
                                                         std::size_t space_size) {
  std::vector<EigenspaceDescriptor> out;
  const double scale = std::sqrt(static_cast<double>(space_size));
  for (const auto& t : triples) {
    EigenspaceDescriptor d;
    d.label = t.label();
    d.eigenvalue = t.eigenvalue;
    d.dimension = t.dimension;
    if (t.basis.has_value()) {
      Matrix b = *t.basis;
      b *= scale;  // counting-orthonormal -> orthonormal under uniform pi
      d.basis = std::move(b);
    }
    out.push_back(std::move(d));
  }
  return out;
}

QEigenstructure bi_insect_q_structure(int q, int m) {
  if (q < 2) throw InputError("bi-insect: q must be at least 2");
  if (m < 3) throw InputError("bi-insect: m must be at least 3");
  TreeShape yshape{std::vector<int>(m - 1, q)};
  QEigenstructure s = q_eigenstructure(insect_kernel(yshape));

  // Replace the numeric eigenvalues by their alpha-product closed forms.
  const Vec alpha = compute_alphas(yshape);
  Vec aprod(m, 1.0);
  for (int t = 1; t <= m - 1; ++t) aprod[t] = aprod[t - 1] * alpha[t];
  if (s.eigenspace_count() != m)
    throw ModelError("bi-insect: unexpected eigenspace count for the insect kernel");
  for (int j = 1; j <= m - 1; ++j) {
    const double analytic = 1.0 - aprod[m - 1 - j];
    if (std::fabs(analytic - s.lambdas[j]) > 1e-8)
      throw ModelError("bi-insect: numeric insect spectrum disagrees with the closed form");
    s.lambdas[j] = analytic;
    if (s.dims[j] != static_cast<int>(ipow_ll(q, j - 1) * (q - 1)))
      throw ModelError("bi-insect: unexpected eigenspace dimension");
  }
  return s;
}

std::vector<EigenTriple> bi_insect_spectrum(int n, int q, int m, double p0, bool with_bases) {
  if (n < 3) throw InputError("bi-insect: n must be at least 3");
  return second_spectrum(n, 2, bi_insect_q_structure(q, m), p0, with_bases);
}

ReversibleChain bi_insect_chain(int n, int q, int m, double p0) {
  if (n < 3) throw InputError("bi-insect: n must be at least 3");
  if (q < 2 || m < 3) throw InputError("bi-insect: need q >= 2 and m >= 3");
  TreeShape yshape{std::vector<int>(m - 1, q)};
  return second_crested_chain(n, 2, insect_kernel(yshape), p0);
}

}  // namespace crested
