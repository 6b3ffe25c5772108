#include "crested/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "crested/errors.hpp"
#include "crested/rng.hpp"

namespace crested {

JacobiResult jacobi_eigensymm(Matrix a, double tol, int max_sweeps) {
  const std::size_t n = a.rows();
  if (a.cols() != n) throw InputError("jacobi: matrix not square");
  Matrix v = Matrix::identity(n);

  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) scale = std::max(scale, std::fabs(a(i, j)));
  if (scale == 0.0) scale = 1.0;
  const double stop = tol * scale;

  int sweep = 0;
  for (; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off = std::max(off, std::fabs(a(p, q)));
    if (off <= stop) break;

    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (std::fabs(apq) <= stop * 1e-2) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        double t = 1.0 / (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        if (theta < 0.0) t = -t;
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        const double tau = s / (1.0 + c);

        const double app = a(p, p), aqq = a(q, q);
        a(p, p) = app - t * apq;
        a(q, q) = aqq + t * apq;
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          if (i != p && i != q) {
            const double aip = a(i, p), aiq = a(i, q);
            a(i, p) = aip - s * (aiq + tau * aip);
            a(i, q) = aiq + s * (aip - tau * aiq);
            a(p, i) = a(i, p);
            a(q, i) = a(i, q);
          }
          const double vip = v(i, p), viq = v(i, q);
          v(i, p) = vip - s * (viq + tau * vip);
          v(i, q) = viq + s * (vip - tau * viq);
        }
      }
    }
  }

  Vec lambdas(n);
  for (std::size_t i = 0; i < n; ++i) lambdas[i] = a(i, i);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return lambdas[x] > lambdas[y]; });

  JacobiResult out;
  out.sweeps = sweep;
  out.eigenvalues.resize(n);
  out.vectors = Matrix(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t src = order[j];
    out.eigenvalues[j] = lambdas[src];
    double peak = 0.0;
    for (std::size_t i = 0; i < n; ++i) peak = std::max(peak, std::fabs(v(i, src)));
    double sign = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (std::fabs(v(i, src)) > 1e-12 * peak) {
        sign = v(i, src) > 0.0 ? 1.0 : -1.0;
        break;
      }
    }
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, j) = sign * v(i, src);
  }
  return out;
}

SpectralData numeric_spectrum(const ReversibleChain& c) {
  if (!check_detailed_balance(c.P, c.pi))
    throw ModelError("numeric_spectrum: chain violates detailed balance");
  const std::size_t n = c.size();
  Vec sqrt_pi(n);
  for (std::size_t i = 0; i < n; ++i) sqrt_pi[i] = std::sqrt(c.pi[i]);

  Matrix s(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) s(i, j) = sqrt_pi[i] * c.P(i, j) / sqrt_pi[j];
  // Kill the detailed-balance rounding noise so the input is exactly symmetric.
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double avg = 0.5 * (s(i, j) + s(j, i));
      s(i, j) = avg;
      s(j, i) = avg;
    }

  JacobiResult jr = jacobi_eigensymm(std::move(s));
  SpectralData out;
  out.states = c.states;
  out.lambdas = std::move(jr.eigenvalues);
  out.pi = c.pi;
  out.U = Matrix(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out.U(i, j) = jr.vectors(i, j) / sqrt_pi[i];
  return out;
}

namespace {

struct AnalyticCluster {
  double value;
  long long dimension;
  std::vector<const EigenspaceDescriptor*> members;
};

std::vector<AnalyticCluster> cluster_descriptors(
    const std::vector<EigenspaceDescriptor>& descriptors, double tol) {
  std::vector<const EigenspaceDescriptor*> sorted;
  sorted.reserve(descriptors.size());
  for (const auto& d : descriptors) sorted.push_back(&d);
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const auto* a, const auto* b) { return a->eigenvalue > b->eigenvalue; });
  std::vector<AnalyticCluster> clusters;
  double anchor = 0.0;
  for (const auto* d : sorted) {
    if (clusters.empty() || d->eigenvalue < anchor - tol) {
      clusters.push_back({d->eigenvalue, 0, {}});
      anchor = d->eigenvalue;
    }
    clusters.back().dimension += d->dimension;
    clusters.back().members.push_back(d);
  }
  return clusters;
}

}  // namespace

OracleReport compare_spectra(const std::vector<EigenspaceDescriptor>& analytic,
                             const SpectralData& numeric, double eps_cluster,
                             double eps_eig) {
  OracleReport report;
  const std::size_t n = numeric.size();

  long long total = 0;
  for (const auto& d : analytic) total += d.dimension;
  if (total != static_cast<long long>(n)) {
    report.pass = false;
    report.notes.push_back("dimension sum mismatch: analytic " + std::to_string(total) +
                           " vs state space " + std::to_string(n));
    return report;
  }

  const auto a_clusters = cluster_descriptors(analytic, eps_cluster);
  const auto n_clusters = cluster_eigenvalues(numeric.lambdas, eps_cluster);
  for (const auto& c : a_clusters) report.claimed.emplace_back(c.value, c.dimension);
  for (const auto& c : n_clusters)
    report.numeric.emplace_back(c.value, static_cast<long long>(c.multiplicity));

  bool ok = a_clusters.size() == n_clusters.size();
  if (!ok) report.notes.push_back("cluster count mismatch");
  for (std::size_t i = 0; ok && i < a_clusters.size(); ++i) {
    if (std::fabs(a_clusters[i].value - n_clusters[i].value) > eps_cluster) {
      ok = false;
      report.notes.push_back("eigenvalue mismatch at cluster " + std::to_string(i));
    } else if (a_clusters[i].dimension != n_clusters[i].multiplicity) {
      ok = false;
      report.notes.push_back("multiplicity mismatch at eigenvalue " +
                             std::to_string(a_clusters[i].value));
    }
  }

  if (ok) {
    // Projector comparison under the pi-weighted inner product wherever the
    // analytic side materialized bases: both projectors are B B^T D.
    for (std::size_t i = 0; i < a_clusters.size(); ++i) {
      bool have_bases = !a_clusters[i].members.empty();
      for (const auto* d : a_clusters[i].members)
        if (!d->basis.has_value()) have_bases = false;
      if (!have_bases) continue;
      report.projectors_checked = true;

      Matrix pa(n, n);
      for (const auto* d : a_clusters[i].members) {
        const Matrix& b = *d->basis;
        for (std::size_t x = 0; x < n; ++x)
          for (std::size_t y = 0; y < n; ++y) {
            double acc = 0.0;
            for (std::size_t cidx = 0; cidx < b.cols(); ++cidx)
              acc += b(x, cidx) * b(y, cidx);
            pa(x, y) += acc * numeric.pi[y];
          }
      }
      Matrix pn(n, n);
      for (std::size_t x = 0; x < n; ++x)
        for (std::size_t y = 0; y < n; ++y) {
          double acc = 0.0;
          for (std::size_t cidx : n_clusters[i].columns)
            acc += numeric.U(x, cidx) * numeric.U(y, cidx);
          pn(x, y) = acc * numeric.pi[y];
        }
      report.max_projector_gap = std::max(report.max_projector_gap, max_abs_diff(pa, pn));
    }
    if (report.projectors_checked && report.max_projector_gap >= eps_eig * static_cast<double>(n)) {
      ok = false;
      report.notes.push_back("projector gap " + std::to_string(report.max_projector_gap) +
                             " exceeds tolerance");
    }
  }

  report.pass = ok;
  return report;
}

Matrix simulate_chain(const ReversibleChain& c, std::size_t start, unsigned steps,
                      unsigned replicas, std::uint64_t seed) {
  const std::size_t n = c.size();
  if (start >= n) throw UnknownStateError("simulation start state out of range");
  if (replicas == 0) throw InputError("simulate_chain: need at least one replica");

  Matrix counts(steps + 1, n);
  for (unsigned r = 0; r < replicas; ++r) {
    SplitMix64 rng = substream(seed, r);
    std::size_t x = start;
    counts(0, x) += 1.0;
    for (unsigned t = 1; t <= steps; ++t) {
      x = static_cast<std::size_t>(
          sample_index(c.P.row_ptr(x), static_cast<int>(n), rng.uniform()));
      counts(t, x) += 1.0;
    }
  }
  counts *= 1.0 / static_cast<double>(replicas);
  return counts;
}

}  // namespace crested
