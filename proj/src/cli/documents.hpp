#pragma once

#include <string>

#include <json.hpp>

#include "bz/canard.hpp"
#include "bz/critical_geometry.hpp"
#include "bz/cycles.hpp"
#include "bz/equilibrium.hpp"
#include "bz/model.hpp"

namespace bz::cli {

using json = nlohmann::ordered_json;

json params_json(const Params& p);
json fold_json(const FoldReport& folds);
json equilibrium_json(const EquilibriumReport& report);
json hopf_json(const HopfData& hopf);
json canard_json(const CanardReport& report);
json cycle_json(const LimitCycleEstimate& cycle);
json cycle_settings_json(const CycleOptions& opts);

/// Everything the library knows about one parameter point.
json analysis_document(const Params& p);

/// One-paragraph reading of the regime in terms of the critical curve.
std::string regime_narrative(const Params& p, const FoldReport& folds,
                             const EquilibriumReport& report);

/// Plain-text rendering of an analysis document.
std::string analysis_text(const json& doc);

}  // namespace bz::cli
