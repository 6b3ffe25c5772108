#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "crested/first_crested.hpp"
#include "crested/insect.hpp"
#include "crested/oracle.hpp"

namespace crested {

using json = nlohmann::json;

// Chain document: {"states": [...], "P": [[...]], "pi": [...]}, rows ordered
// like `states`.
json chain_to_json(const ReversibleChain& c);
ReversibleChain chain_from_json(const json& j);

// First-product spec: {"factors": [<chain>...], "partition": ["C","N",...],
// "weights": [...]}.
json spec_to_json(const CrestedSpec& spec);
CrestedSpec spec_from_json(const json& j);

// Second-product spec: {"n": int, "h": int, "Q": <chain>, "p0": real}.
struct SecondSpec {
  int n = 0;
  int h = 0;
  ReversibleChain q;
  double p0 = 0.5;
};
json second_spec_to_json(const SecondSpec& s);
SecondSpec second_spec_from_json(const json& j);

// Tree shape: {"branching": [m1, ..., mn]}.
json shape_to_json(const TreeShape& shape);
TreeShape shape_from_json(const json& j);

json report_to_json(const OracleReport& r);

enum class SpecKind { Chain, FirstProduct, SecondProduct, Tree };
SpecKind detect_spec_kind(const json& j);

json load_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace crested
