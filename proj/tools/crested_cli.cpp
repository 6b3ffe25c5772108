#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "crested/errors.hpp"
#include "crested/insect.hpp"
#include "crested/json_io.hpp"
#include "crested/oracle.hpp"
#include "crested/random_specs.hpp"
#include "crested/second_crested.hpp"

namespace {

using namespace crested;

constexpr std::uint64_t kDefaultSeed = 1234567891ULL;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void emit(const std::string& out_path, const std::string& content) {
  if (out_path.empty())
    std::cout << content;
  else
    write_text_file(out_path, content);
}

// What a command operates on, resolved from --spec / --preset flags.
struct Model {
  std::optional<CrestedSpec> first;
  std::optional<SecondSpec> second;
  std::optional<ReversibleChain> chain;  // plain chain input
  std::optional<TreeShape> tree;         // insect preset
};

struct ModelFlags {
  std::string spec_path;
  std::string preset;
  std::vector<int> shape;
  std::vector<double> weights;
  int balls = 3;
  int urns = 2;
  int n = 5;
  int h = 2;
  int q = 2;
  int m = 3;
  int s = 2;
  double p0 = 0.5;
  std::string q_spec_path;
};

void add_model_flags(CLI::App* cmd, ModelFlags& f) {
  cmd->set_help_flag("--help", "print help");
  cmd->add_option("--spec", f.spec_path, "model spec file (chain, product, or tree JSON)");
  cmd->add_option("--preset", f.preset,
                  "preset name: insect | ehrenfest | nested-uniform | bi-insect | "
                  "bernoulli-laplace");
  cmd->add_option("--shape", f.shape, "tree branching, e.g. 3,2,2")->delimiter(',');
  cmd->add_option("--weights", f.weights, "mixing weights for nested-uniform")->delimiter(',');
  cmd->add_option("--balls", f.balls, "ehrenfest: number of balls");
  cmd->add_option("--urns", f.urns, "ehrenfest: number of urns");
  cmd->add_option("--n", f.n, "second product: |X|");
  cmd->add_option("--h", f.h, "second product: domain size");
  cmd->add_option("--q", f.q, "bi-insect: tree degree");
  cmd->add_option("--m", f.m, "bi-insect: tree depth plus one");
  cmd->add_option("--s", f.s, "bernoulli-laplace: number of ball labels");
  cmd->add_option("--p0", f.p0, "second product: image-update probability");
  cmd->add_option("--q-spec", f.q_spec_path, "bernoulli-laplace: chain JSON for Q");
}

Model resolve_model(const ModelFlags& f) {
  Model m;
  if (!f.spec_path.empty()) {
    const json j = load_json_file(f.spec_path);
    switch (detect_spec_kind(j)) {
      case SpecKind::FirstProduct: m.first = spec_from_json(j); break;
      case SpecKind::SecondProduct: m.second = second_spec_from_json(j); break;
      case SpecKind::Chain: m.chain = chain_from_json(j); break;
      case SpecKind::Tree: m.tree = shape_from_json(j); break;
    }
    return m;
  }
  if (f.preset == "insect") {
    if (f.shape.empty()) throw InputError("preset insect requires --shape");
    m.tree = TreeShape{f.shape};
    validate_shape(*m.tree);
  } else if (f.preset == "ehrenfest") {
    m.first = ehrenfest_preset(f.balls, f.urns);
  } else if (f.preset == "nested-uniform") {
    if (f.shape.empty()) throw InputError("preset nested-uniform requires --shape");
    m.first = nested_uniform_preset(TreeShape{f.shape}, Vec(f.weights.begin(), f.weights.end()));
  } else if (f.preset == "bi-insect") {
    TreeShape yshape{std::vector<int>(f.m - 1, f.q)};
    if (f.n < 3 || f.m < 3 || f.q < 2)
      throw InputError("bi-insect preset: need n >= 3, m >= 3, q >= 2");
    m.second = SecondSpec{f.n, 2, insect_kernel(yshape), f.p0};
  } else if (f.preset == "bernoulli-laplace") {
    ReversibleChain q =
        f.q_spec_path.empty() ? uniform_chain(f.s) : chain_from_json(load_json_file(f.q_spec_path));
    m.second = SecondSpec{f.n, f.h, std::move(q), f.p0};
  } else if (f.preset.empty()) {
    throw InputError("no model: pass --spec or --preset");
  } else {
    throw InputError("unknown preset: " + f.preset);
  }
  return m;
}

ReversibleChain model_chain(const Model& m) {
  if (m.first) return assemble_first_crested(*m.first);
  if (m.second) return second_crested_chain(m.second->n, m.second->h, m.second->q, m.second->p0);
  if (m.tree) return insect_kernel(*m.tree);
  if (m.chain) return *m.chain;
  throw InputError("no model resolved");
}

struct SpectrumRow {
  double eigenvalue;
  long long dimension;
  std::string label;
};

std::vector<SpectrumRow> merge_rows(std::vector<SpectrumRow> rows, double tol) {
  std::stable_sort(rows.begin(), rows.end(),
                   [](const auto& a, const auto& b) { return a.eigenvalue > b.eigenvalue; });
  std::vector<SpectrumRow> merged;
  for (auto& r : rows) {
    if (!merged.empty() && merged.back().eigenvalue - r.eigenvalue <= tol) {
      merged.back().dimension += r.dimension;
      merged.back().label += "+" + r.label;
    } else {
      merged.push_back(std::move(r));
    }
  }
  return merged;
}

std::string rows_to_csv(const std::vector<SpectrumRow>& rows) {
  std::ostringstream os;
  os << "eigenvalue,dimension,label\n";
  for (const auto& r : rows)
    os << fmt(r.eigenvalue) << "," << r.dimension << "," << r.label << "\n";
  return os.str();
}

std::string rows_to_json(const std::vector<SpectrumRow>& rows) {
  json arr = json::array();
  for (const auto& r : rows)
    arr.push_back({{"eigenvalue", r.eigenvalue}, {"dimension", r.dimension}, {"label", r.label}});
  return arr.dump(2) + "\n";
}

int cmd_spectrum(const ModelFlags& flags, bool no_merge, double eps_cluster,
                 const std::string& format, const std::string& out_path) {
  const Model model = resolve_model(flags);
  std::vector<SpectrumRow> rows;

  if (model.second && model.second->h < model.second->n && no_merge) {
    // Unmerged second-product output keeps the (a, k) labeling of the triples.
    const SecondSpec& s = *model.second;
    const auto triples = second_spectrum(s.n, s.h, q_eigenstructure(s.q), s.p0);
    if (format == "json") {
      json arr = json::array();
      for (const auto& t : triples)
        arr.push_back({{"a", t.type},
                       {"k", t.level_k},
                       {"eigenvalue", t.eigenvalue},
                       {"dimension", t.dimension}});
      emit(out_path, arr.dump(2) + "\n");
    } else {
      std::ostringstream os;
      os << "a,k,eigenvalue,dimension\n";
      for (const auto& t : triples) {
        for (std::size_t i = 0; i < t.type.size(); ++i) os << (i ? "." : "") << t.type[i];
        os << "," << t.level_k << "," << fmt(t.eigenvalue) << "," << t.dimension << "\n";
      }
      emit(out_path, os.str());
    }
    return 0;
  }

  if (model.first) {
    validate_spec(*model.first);
    const auto rc = check_crested_reversibility(*model.first);
    if (!rc.reversible) throw NotReversibleError(rc.witness);
    const auto spectra = factor_spectra(*model.first);
    for (const auto& d : analytic_spectrum_first(*model.first, spectra))
      rows.push_back({d.eigenvalue, d.dimension, d.label});
  } else if (model.second) {
    const SecondSpec& s = *model.second;
    if (s.h == s.n) {
      // no exchange move: report the crossed-product spectrum on Y^n
      CrestedSpec crossed;
      for (int i = 0; i < s.n; ++i) {
        crossed.factors.push_back(s.q);
        crossed.partition.push_back(PartTag::Crossed);
      }
      crossed.weights = Vec(s.n, 1.0 / s.n);
      const auto spectra = factor_spectra(crossed);
      for (const auto& d : analytic_spectrum_first(crossed, spectra))
        rows.push_back({d.eigenvalue, d.dimension, d.label});
    } else {
      for (const auto& t : second_spectrum(s.n, s.h, q_eigenstructure(s.q), s.p0))
        rows.push_back({t.eigenvalue, t.dimension, t.label()});
    }
  } else if (model.tree) {
    for (const auto& d : insect_spectrum(*model.tree))
      rows.push_back({d.eigenvalue, d.dimension, d.label});
  } else if (model.chain) {
    const SpectralData sd = numeric_spectrum(*model.chain);
    for (const auto& c : cluster_eigenvalues(sd.lambdas))
      rows.push_back({c.value, c.multiplicity, "numeric"});
  }

  if (!no_merge) rows = merge_rows(std::move(rows), eps_cluster);
  std::stable_sort(rows.begin(), rows.end(),
                   [](const auto& a, const auto& b) { return a.eigenvalue > b.eigenvalue; });
  emit(out_path, format == "json" ? rows_to_json(rows) : rows_to_csv(rows));
  return 0;
}

OracleReport verify_first(const CrestedSpec& spec, bool with_bases, double eps_cluster,
                          double eps_eig) {
  const ReversibleChain chain = assemble_first_crested(spec);
  const auto spectra = factor_spectra(spec);
  const auto analytic = analytic_spectrum_first(spec, spectra, with_bases);
  return compare_spectra(analytic, numeric_spectrum(chain), eps_cluster, eps_eig);
}

void print_report(const OracleReport& r, const std::string& name, std::ostringstream& os) {
  os << (r.pass ? "PASS" : "FAIL") << " " << name;
  if (r.projectors_checked) os << " (max projector gap " << fmt(r.max_projector_gap) << ")";
  for (const auto& note : r.notes) os << "\n  note: " << note;
  os << "\n";
}

int cmd_verify(const ModelFlags& flags, int random_corpus, std::uint64_t seed,
               double eps_cluster, double eps_eig, const std::string& format,
               const std::string& out_path) {
  std::ostringstream os;
  json jreports = json::array();
  bool all_pass = true;

  auto account = [&](const OracleReport& r, const std::string& name) {
    all_pass = all_pass && r.pass;
    if (format == "json") {
      json e = report_to_json(r);
      e["name"] = name;
      jreports.push_back(std::move(e));
    } else {
      print_report(r, name, os);
    }
  };

  if (random_corpus > 0) {
    for (int i = 1; i <= random_corpus; ++i) {
      const CrestedSpec spec = random_crested_spec(seed + static_cast<std::uint64_t>(i));
      account(verify_first(spec, spec.product_size() <= 256, eps_cluster, eps_eig),
              "random-spec-" + std::to_string(i));
    }
  } else {
    const Model model = resolve_model(flags);
    if (model.first) {
      account(verify_first(*model.first, model.first->product_size() <= 512, eps_cluster,
                           eps_eig),
              "first-product");
    } else if (model.second) {
      const SecondSpec& s = *model.second;
      if (s.h == s.n) {
        // Reduction check: the h = n product and the crossed product coincide.
        CrestedSpec crossed;
        for (int i = 0; i < s.n; ++i) {
          crossed.factors.push_back(s.q);
          crossed.partition.push_back(PartTag::Crossed);
        }
        crossed.weights = Vec(s.n, 1.0 / s.n);
        const ReversibleChain direct = second_crested_chain(s.n, s.h, s.q, s.p0);
        const double gap = max_abs_diff(direct.P, assemble_crested_matrix(crossed));
        OracleReport r =
            verify_first(crossed, crossed.product_size() <= 512, eps_cluster, eps_eig);
        if (gap > 1e-14) {
          r.pass = false;
          r.notes.push_back("crossed reduction mismatch " + fmt(gap));
        }
        account(r, "second-product-crossed-reduction");
      } else {
        const auto qs = q_eigenstructure(s.q);
        const ReversibleChain chain = second_crested_chain(s.n, s.h, s.q, s.p0);
        const bool with_bases = chain.size() <= 512;
        const auto triples = second_spectrum(s.n, s.h, qs, s.p0, with_bases);
        account(compare_spectra(triples_to_descriptors(triples, chain.size()),
                                numeric_spectrum(chain), eps_cluster, eps_eig),
                "second-product");
      }
    } else if (model.tree) {
      const TreeShape& shape = *model.tree;
      const ReversibleChain kernel = insect_kernel(shape);
      OracleReport r = compare_spectra(insect_spectrum(shape), numeric_spectrum(kernel),
                                        eps_cluster, eps_eig);
      const double gap =
          max_abs_diff(assemble_crested_matrix(insect_as_nested(shape)), kernel.P);
      if (gap > 1e-13) {
        r.pass = false;
        r.notes.push_back("nested-product equivalence gap " + fmt(gap));
      }
      account(r, "insect");
    } else if (model.chain) {
      const SpectralData sd = numeric_spectrum(*model.chain);
      OracleReport r;
      r.pass = true;
      for (const auto& c : cluster_eigenvalues(sd.lambdas))
        r.numeric.emplace_back(c.value, static_cast<long long>(c.multiplicity));
      r.claimed = r.numeric;
      const double res = eigen_equation_residual(model.chain->P, sd);
      if (res > kEigenTol) {
        r.pass = false;
        r.notes.push_back("eigen residual " + fmt(res));
      }
      account(r, "chain");
    }
  }

  if (format == "json")
    emit(out_path, jreports.dump(2) + "\n");
  else {
    os << (all_pass ? "verification passed" : "verification FAILED") << "\n";
    emit(out_path, os.str());
  }
  return all_pass ? 0 : 1;
}

int cmd_kstep(const ModelFlags& flags, unsigned k, const std::string& x_label,
              const std::string& y_label, const std::string& out_path) {
  const Model model = resolve_model(flags);
  const ReversibleChain chain = model_chain(model);
  const std::size_t x = chain.index_of(x_label);
  const std::size_t y = chain.index_of(y_label);

  double analytic;
  if (model.first) {
    const auto spectra = factor_spectra(*model.first);
    analytic = kstep_first(*model.first, spectra, k, x, y);
  } else {
    analytic = kstep_probability(numeric_spectrum(chain), k, x, y);
  }
  const double power = matrix_power(chain.P, k)(x, y);

  std::ostringstream os;
  os << "spectral " << fmt(analytic) << "\n";
  os << "matrix-power " << fmt(power) << "\n";
  os << "difference " << fmt(analytic - power) << "\n";
  emit(out_path, os.str());
  return 0;
}

int cmd_simulate(const ModelFlags& flags, const std::string& start_label, unsigned steps,
                 unsigned replicas, std::uint64_t seed, const std::string& out_path) {
  const Model model = resolve_model(flags);
  const ReversibleChain chain = model_chain(model);
  const std::size_t start = start_label.empty() ? 0 : chain.index_of(start_label);

  const SpectralData sd = numeric_spectrum(chain);
  const Ergodicity erg = classify_ergodicity(sd);
  const Matrix freq = simulate_chain(chain, start, steps, replicas, seed);

  std::ostringstream os;
  if (erg != Ergodicity::Ergodic)
    os << "# warning: chain is " << to_string(erg) << "; TV to pi does not converge\n";
  os << "step,tv_empirical,tv_exact\n";
  Vec exact(chain.size(), 0.0);
  exact[start] = 1.0;
  for (unsigned t = 0; t <= steps; ++t) {
    Vec emp(chain.size());
    for (std::size_t j = 0; j < chain.size(); ++j) emp[j] = freq(t, j);
    os << t << "," << fmt(total_variation(emp, chain.pi)) << ","
       << fmt(total_variation(exact, chain.pi)) << "\n";
    if (t < steps) exact = vecmat(exact, chain.P);
  }
  emit(out_path, os.str());
  return 0;
}

int cmd_build(const ModelFlags& flags, const std::string& out_path) {
  const Model model = resolve_model(flags);
  emit(out_path, chain_to_json(model_chain(model)).dump(2) + "\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"crested: spectral decompositions of structured Markov-chain products"};
  app.require_subcommand(1);
  app.set_help_flag("--help", "print help");  // reserve --h for the domain size

  ModelFlags mf_spectrum, mf_verify, mf_kstep, mf_simulate, mf_build;
  std::string out_path, format = "csv";
  bool no_merge = false;
  int random_corpus = 0;
  std::uint64_t seed = kDefaultSeed;
  unsigned k = 1, steps = 20, replicas = 10000;
  double eps_cluster = kClusterTol, eps_eig = kEigenTol;
  std::string x_label, y_label, start_label;

  auto* spectrum = app.add_subcommand("spectrum", "analytic eigenvalue/dimension table");
  add_model_flags(spectrum, mf_spectrum);
  spectrum->add_flag("--no-merge", no_merge, "do not merge coincidental eigenvalue collisions");
  spectrum->add_option("--eps-cluster", eps_cluster, "eigenvalue clustering tolerance");
  spectrum->add_option("--format", format, "csv|json");
  spectrum->add_option("--out", out_path, "output path (default stdout)");

  auto* verify = app.add_subcommand("verify", "analytic spectrum vs numeric eigensolver");
  add_model_flags(verify, mf_verify);
  verify->add_option("--random-corpus", random_corpus, "verify N seeded random product specs");
  verify->add_option("--seed", seed, "corpus seed");
  verify->add_option("--eps-cluster", eps_cluster, "eigenvalue clustering tolerance");
  verify->add_option("--eps-eig", eps_eig, "eigen-identity / projector tolerance");
  verify->add_option("--format", format, "csv|json");
  verify->add_option("--out", out_path, "output path (default stdout)");

  auto* kstep = app.add_subcommand("kstep", "k-step transition probability, two ways");
  add_model_flags(kstep, mf_kstep);
  kstep->add_option("--k", k, "number of steps")->required();
  kstep->add_option("--x", x_label, "start state label")->required();
  kstep->add_option("--y", y_label, "target state label")->required();
  kstep->add_option("--out", out_path, "output path (default stdout)");

  auto* simulate = app.add_subcommand("simulate", "Monte-Carlo total-variation trace");
  add_model_flags(simulate, mf_simulate);
  simulate->add_option("--start", start_label, "start state label (default: first state)");
  simulate->add_option("--steps", steps, "number of steps");
  simulate->add_option("--replicas", replicas, "number of replicas");
  simulate->add_option("--seed", seed, "simulation seed");
  simulate->add_option("--out", out_path, "output path (default stdout)");

  auto* build = app.add_subcommand("build", "assemble the product chain as JSON");
  add_model_flags(build, mf_build);
  build->add_option("--out", out_path, "output path (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (spectrum->parsed())
      return cmd_spectrum(mf_spectrum, no_merge, eps_cluster, format, out_path);
    if (verify->parsed())
      return cmd_verify(mf_verify, random_corpus, seed, eps_cluster, eps_eig, format, out_path);
    if (kstep->parsed()) return cmd_kstep(mf_kstep, k, x_label, y_label, out_path);
    if (simulate->parsed())
      return cmd_simulate(mf_simulate, start_label, steps, replicas, seed, out_path);
    if (build->parsed()) return cmd_build(mf_build, out_path);
  } catch (const crested::InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const crested::ModelError& e) {
    std::cerr << "model error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
