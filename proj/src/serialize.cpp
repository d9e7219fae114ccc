#include "pcarisk/serialize.hpp"

#include <cmath>

namespace pcarisk {

Json json_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

namespace {
Json params_json(const std::map<std::string, double>& params) {
  Json out = Json::object();
  for (const auto& [key, v] : params) out[key] = json_number(v);
  return out;
}
}  // namespace

Json to_json(const RiskReport& r) {
  return Json{{"excess", json_number(r.excess)}, {"part_leq", json_number(r.part_leq)},
              {"part_gt", json_number(r.part_gt)}, {"mu", json_number(r.mu)},
              {"hs_sq", json_number(r.hs_sq)},     {"erm_gap", json_number(r.erm_gap)}};
}

Json to_json(const BoundValue& b) {
  Json out;
  out["name"] = b.name;
  out["value"] = json_number(b.value);
  out["condition_ok"] = b.condition_ok;
  out["condition_lhs"] = b.condition_lhs ? json_number(*b.condition_lhs) : Json(nullptr);
  out["condition_rhs"] = b.condition_rhs ? json_number(*b.condition_rhs) : Json(nullptr);
  out["params"] = params_json(b.params);
  return out;
}

Json to_json(const DeviationBound& b) {
  Json out;
  out["name"] = b.name;
  out["side"] = std::string(to_string(b.side));
  out["x_or_y"] = json_number(b.x_or_y);
  out["value"] = json_number(b.prob_bound);
  out["vacuous"] = b.vacuous();
  out["condition_ok"] = b.condition_ok;
  out["condition_lhs"] = json_number(b.condition_lhs);
  out["condition_rhs"] = json_number(b.condition_rhs);
  out["params"] = params_json(b.params);
  return out;
}

Json to_json(const IdentityCheck& c) {
  return Json{{"name", c.name},
              {"lhs", json_number(c.lhs)},
              {"rhs", json_number(c.rhs)},
              {"abs_err", json_number(c.abs_err)},
              {"rel_err", json_number(c.rel_err)},
              {"tol", json_number(c.tol)},
              {"degenerate", c.degenerate},
              {"passed", c.passed}};
}

Json to_json(const BoundConstants& k) {
  Json out;
  out["C1"] = k.C1;
  out["C2"] = k.C2;
  out["C3"] = k.C3;
  out["C_display"] = k.C_display ? Json(*k.C_display) : Json(nullptr);
  out["c1"] = k.c1 ? Json(*k.c1) : Json(nullptr);
  out["c"] = k.deviation_constant();
  out["c_lower"] = k.c_lower;
  return out;
}

}  // namespace pcarisk
