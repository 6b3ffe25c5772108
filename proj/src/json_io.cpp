#include "crested/json_io.hpp"

#include <fstream>
#include <sstream>

#include "crested/errors.hpp"

namespace crested {

json chain_to_json(const ReversibleChain& c) {
  json j;
  j["states"] = c.states;
  json rows = json::array();
  for (std::size_t i = 0; i < c.size(); ++i) {
    json row = json::array();
    for (std::size_t k = 0; k < c.size(); ++k) row.push_back(c.P(i, k));
    rows.push_back(std::move(row));
  }
  j["P"] = std::move(rows);
  j["pi"] = c.pi;
  return j;
}

ReversibleChain chain_from_json(const json& j) {
  try {
    std::vector<std::string> states = j.at("states").get<std::vector<std::string>>();
    const auto& rows = j.at("P");
    const std::size_t n = states.size();
    if (rows.size() != n) throw InputError("chain json: P row count mismatch");
    Matrix p(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      if (rows[i].size() != n) throw InputError("chain json: P column count mismatch");
      for (std::size_t k = 0; k < n; ++k) p(i, k) = rows[i][k].get<double>();
    }
    Vec pi = j.at("pi").get<Vec>();
    ReversibleChain c{std::move(states), std::move(p), std::move(pi)};
    validate_chain(c);
    return c;
  } catch (const json::exception& e) {
    throw InputError(std::string("chain json: ") + e.what());
  }
}

json spec_to_json(const CrestedSpec& spec) {
  json j;
  json factors = json::array();
  for (const auto& f : spec.factors) factors.push_back(chain_to_json(f));
  j["factors"] = std::move(factors);
  json part = json::array();
  for (PartTag t : spec.partition) part.push_back(t == PartTag::Nested ? "N" : "C");
  j["partition"] = std::move(part);
  j["weights"] = spec.weights;
  return j;
}

CrestedSpec spec_from_json(const json& j) {
  try {
    CrestedSpec spec;
    for (const auto& f : j.at("factors")) spec.factors.push_back(chain_from_json(f));
    for (const auto& t : j.at("partition")) {
      const std::string s = t.get<std::string>();
      if (s == "C")
        spec.partition.push_back(PartTag::Crossed);
      else if (s == "N")
        spec.partition.push_back(PartTag::Nested);
      else
        throw InputError("spec json: partition tags must be \"C\" or \"N\"");
    }
    spec.weights = j.at("weights").get<Vec>();
    validate_spec(spec);
    return spec;
  } catch (const json::exception& e) {
    throw InputError(std::string("spec json: ") + e.what());
  }
}

json second_spec_to_json(const SecondSpec& s) {
  json j;
  j["n"] = s.n;
  j["h"] = s.h;
  j["Q"] = chain_to_json(s.q);
  j["p0"] = s.p0;
  return j;
}

SecondSpec second_spec_from_json(const json& j) {
  try {
    SecondSpec s;
    s.n = j.at("n").get<int>();
    s.h = j.at("h").get<int>();
    s.q = chain_from_json(j.at("Q"));
    s.p0 = j.at("p0").get<double>();
    if (s.n < 1 || s.h < 1 || s.h > s.n)
      throw InputError("second spec json: need 1 <= h <= n");
    return s;
  } catch (const json::exception& e) {
    throw InputError(std::string("second spec json: ") + e.what());
  }
}

json shape_to_json(const TreeShape& shape) {
  json j;
  j["branching"] = shape.branching;
  return j;
}

TreeShape shape_from_json(const json& j) {
  try {
    TreeShape shape{j.at("branching").get<std::vector<int>>()};
    validate_shape(shape);
    return shape;
  } catch (const json::exception& e) {
    throw InputError(std::string("tree json: ") + e.what());
  }
}

json report_to_json(const OracleReport& r) {
  json j;
  json claimed = json::array();
  for (const auto& [v, m] : r.claimed) claimed.push_back({{"eigenvalue", v}, {"multiplicity", m}});
  json numeric = json::array();
  for (const auto& [v, m] : r.numeric) numeric.push_back({{"eigenvalue", v}, {"multiplicity", m}});
  j["claimed"] = std::move(claimed);
  j["numeric"] = std::move(numeric);
  j["max_projector_gap"] = r.max_projector_gap;
  j["projectors_checked"] = r.projectors_checked;
  j["pass"] = r.pass;
  j["notes"] = r.notes;
  return j;
}

SpecKind detect_spec_kind(const json& j) {
  if (!j.is_object()) throw InputError("spec file: expected a JSON object");
  if (j.contains("factors")) return SpecKind::FirstProduct;
  if (j.contains("Q") && j.contains("h")) return SpecKind::SecondProduct;
  if (j.contains("branching")) return SpecKind::Tree;
  if (j.contains("states") && j.contains("P")) return SpecKind::Chain;
  throw InputError("spec file: unrecognized schema");
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw InputError("cannot parse " + path + ": " + e.what());
  }
  return j;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot open output file: " + path);
  out << content;
}

}  // namespace crested
