#pragma once

#include <json.hpp>

#include "padic/family.hpp"

namespace padic {

inline constexpr int kSchemaVersion = 1;

using Json = nlohmann::json;

Json rat_to_json(const Rat& q);
Rat rat_from_json(const Json& j);

Json scalar_to_json(const Scalar& s);
Scalar scalar_from_json(unsigned p, const Json& j);

// Term lists [[i, "scalar"], ...]; multivariate [[i, j1, .., jk, "scalar"], ...].
Json laurent_to_json(const Laurent& l);
Laurent laurent_from_json(unsigned p, unsigned nparams, const Json& j);

Json module_to_json(const DiffModule& M);
DiffModule module_from_json(const Json& j);

Json family_to_json(const FamilyModule& F);
FamilyModule family_from_json(const Json& j);

Json load_json_file(const std::string& path);

}  // namespace padic
