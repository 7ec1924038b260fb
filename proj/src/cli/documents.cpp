#include "documents.hpp"

#include <sstream>

#include "bz/cli.hpp"
#include "bz/error.hpp"

namespace bz::cli {

namespace {

std::string str(std::string_view s) { return std::string(s); }

}  // namespace

json params_json(const Params& p) { return {{"f", p.f()}, {"q", p.q()}, {"eps", p.eps()}}; }

json fold_json(const FoldReport& folds) {
  json j = {{"q", folds.q},
            {"shape_class", str(to_string(folds.shape_class))},
            {"fold_count", folds.fold_count()}};
  if (folds.x1) j["x1"] = *folds.x1;
  if (folds.y1) j["y1"] = *folds.y1;
  if (folds.x2) j["x2"] = *folds.x2;
  if (folds.y2) j["y2"] = *folds.y2;
  if (folds.x0) j["x0"] = *folds.x0;
  return j;
}

json equilibrium_json(const EquilibriumReport& r) {
  json eig = json::array();
  for (const auto& l : r.eigenvalues) {
    eig.push_back({{"re", l.real()}, {"im", l.imag()}});
  }
  return {{"x_star", r.x_star},
          {"y_star", r.x_star},
          {"strip", str(to_string(r.strip))},
          {"eigenvalues", eig},
          {"w", r.w_value},
          {"trace", -r.w_value},
          {"determinant", r.determinant},
          {"stability", str(to_string(r.stability))},
          {"regime", str(to_string(r.regime))}};
}

json hopf_json(const HopfData& h) {
  return {{"x1_eps", h.x1_eps}, {"x2_eps", h.x2_eps}, {"d1", h.d1},
          {"d2", h.d2},         {"f_hm", h.f_hm},     {"f_hM", h.f_hM}};
}

json canard_json(const CanardReport& r) {
  return {{"x_star", r.x_star},
          {"f_star", r.f_star},
          {"alpha", r.factors.alpha},
          {"beta", r.factors.beta},
          {"eta", r.factors.eta},
          {"xi", r.factors.xi},
          {"a2", r.a2},
          {"a3", r.a3},
          {"a4", r.a4},
          {"a5", r.a5},
          {"A", r.A},
          {"A_coefficients", r.A_coefficients},
          {"criticality", str(to_string(r.criticality))}};
}

json cycle_json(const LimitCycleEstimate& c) {
  return {{"section_fixed_point", c.section_fixed_point},
          {"x_star", c.x_star},
          {"period", c.period},
          {"time_variable", str(to_string(c.time_variable))},
          {"period_fast_time", c.period_fast_time},
          {"x_min", c.x_min},
          {"x_max", c.x_max},
          {"y_min", c.y_min},
          {"y_max", c.y_max},
          {"amplitude_x", c.amplitude_x},
          {"stability", str(to_string(c.stability))},
          {"shape", str(to_string(c.shape))},
          {"contraction_ratio", c.contraction_ratio},
          {"returns", c.returns}};
}

json cycle_settings_json(const CycleOptions& o) {
  return {{"rel_tol", o.integrator.rel_tol},
          {"abs_tol", o.integrator.abs_tol},
          {"formulation", str(to_string(o.integrator.formulation))},
          {"max_returns", o.max_returns},
          {"convergence_tol", o.convergence_tol},
          {"equilibrium_tol", o.equilibrium_tol},
          {"accelerate", o.accelerate}};
}

std::string regime_narrative(const Params& p, const FoldReport& folds,
                             const EquilibriumReport& r) {
  if (folds.shape_class != ShapeClass::SShaped) {
    return "The critical curve has no pair of folds (" + str(to_string(folds.shape_class)) +
           "); the equilibrium is stable and attracts the open positive quadrant.";
  }
  if (!r.hopf) {
    return "The critical curve is S-shaped but eps is too large for singular Hopf points; "
           "the equilibrium is stable and attracts the open positive quadrant.";
  }
  switch (r.regime) {
    case Regime::HopfCritical:
      return "The equilibrium sits at a singular Hopf point next to a fold (weak focus); the "
             "sign of A at that fold decides whether the emerging cycle is stable.";
    case Regime::Oscillatory:
      return "The equilibrium lies on the repelling middle branch between the Hopf points and "
             "is unstable; a stable limit cycle surrounds it (small Hopf cycle, canard or "
             "relaxation oscillation depending on f).";
    case Regime::GloballyStable:
      break;
  }
  std::string text =
      "The equilibrium lies outside the Hopf window on an attracting part of the curve and is "
      "stable.";
  if (r.x_star > r.hopf->x2_eps) {
    try {
      if (hopf_criticality(p.q(), FoldKind::Max) == Criticality::Subcritical) {
        text +=
            " A is positive at the maximum fold, so close to the Hopf value a stable and an "
            "unstable cycle can surround it.";
      }
    } catch (const Error&) {
    }
  }
  return text;
}

json analysis_document(const Params& p) {
  const FoldReport folds = fold_points(p.q());
  const EquilibriumReport eq = classify(p);
  json doc = {{"params", params_json(p)},
              {"fold_report", fold_json(folds)},
              {"equilibrium", equilibrium_json(eq)}};
  if (eq.hopf) {
    doc["hopf"] = hopf_json(*eq.hopf);
  }
  if (folds.shape_class == ShapeClass::SShaped) {
    doc["canard"] = {{"min", canard_json(canard_report(p.q(), *folds.x1))},
                     {"max", canard_json(canard_report(p.q(), *folds.x2))}};
  }
  doc["regime_narrative"] = regime_narrative(p, folds, eq);
  doc["settings"] = {{"weak_focus_tolerance", kWeakFocusTolerance},
                     {"hopf_location_tolerance", kHopfLocationTolerance},
                     {"discriminant_tolerance", kDiscriminantTolerance},
                     {"shape_tie_tolerance", kShapeTieTolerance},
                     {"degenerate_A", kDegenerateA},
                     {"q_star", q_star()}};
  return doc;
}

namespace {

void flatten(const json& j, const std::string& prefix, std::ostringstream& out) {
  if (j.is_object()) {
    for (const auto& [key, value] : j.items()) {
      flatten(value, prefix.empty() ? key : prefix + "." + key, out);
    }
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) {
      flatten(j[i], prefix + "[" + std::to_string(i) + "]", out);
    }
  } else if (j.is_number_float()) {
    out << prefix << ": " << format_double(j.get<double>()) << "\n";
  } else if (j.is_string()) {
    out << prefix << ": " << j.get<std::string>() << "\n";
  } else {
    out << prefix << ": " << j.dump() << "\n";
  }
}

}  // namespace

std::string analysis_text(const json& doc) {
  std::ostringstream out;
  for (const char* section :
       {"params", "fold_report", "equilibrium", "hopf", "canard", "settings"}) {
    if (doc.contains(section)) {
      flatten(doc[section], section, out);
    }
  }
  out << "regime_narrative: " << doc["regime_narrative"].get<std::string>() << "\n";
  return out.str();
}

}  // namespace bz::cli
