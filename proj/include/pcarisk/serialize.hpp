#pragma once

#include "pcarisk/bounds.hpp"
#include "pcarisk/concentration.hpp"
#include "pcarisk/identities.hpp"
#include "pcarisk/risk.hpp"

#include <json.hpp>

namespace pcarisk {

using Json = nlohmann::ordered_json;

// Finite values pass through; +inf/-inf/nan become the strings "inf"/"-inf"/"nan".
Json json_number(double v);

Json to_json(const RiskReport& r);
Json to_json(const BoundValue& b);
Json to_json(const DeviationBound& b);
Json to_json(const IdentityCheck& c);
Json to_json(const BoundConstants& k);

}  // namespace pcarisk
