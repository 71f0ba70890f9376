#pragma once

#include <string>
#include <variant>

#include "errors.hpp"

namespace shapegeo {

// The almost-local weight family Phi(vol, trl2), where vol is the total
// surface area and trl2 the squared scalar mean curvature. Every variant is
// positive on vol > 0, trl2 >= 0.
struct G0 {};                                       // Phi = 1
struct GAPower {                                    // Phi = 1 + A trl2^k
  double A = 1;
  int k = 1;
};
struct ConformalPower {                             // Phi = vol^k
  double k = 1;
};
struct ConformalExp {};                             // Phi = e^vol
struct ScaleInvariant {                             // Phi = vol^-2 + A trl2 / vol
  double A = 0;
};
struct Combined {                                   // Phi = c0 + A trl2^k + B vol^l
  double c0 = 1;
  double A = 1;
  int k = 1;
  double B = 1;
  double l = 1;
};

struct MetricWeight {
  std::variant<G0, GAPower, ConformalPower, ConformalExp, ScaleInvariant, Combined> variant;
};

double evaluate(const MetricWeight& w, double vol, double trl2);

// First partial derivatives with respect to vol and trl2.
struct Partials {
  double dVol = 0;
  double dTrl2 = 0;
};
Partials partials(const MetricWeight& w, double vol, double trl2);

// The same second slot in the signed mean-curvature convention:
// dPhi/dTrL = 2 TrL dPhi/d(trl2), evaluated at trl2 = TrL^2.
double partial_trl(const MetricWeight& w, double vol, double trl);

// Whether the weight actually reads its trl2 (resp. vol) argument.
bool uses_trl2(const MetricWeight& w);
bool uses_vol(const MetricWeight& w);

// The variant's name as used in the JSON "type" field.
std::string weight_name(const MetricWeight& w);

// JSON codec, e.g. {"type":"GAPower","A":0.0625,"k":2}. Unknown types or
// keys are rejected with ConfigError.
MetricWeight metric_from_json(const std::string& json);
std::string metric_to_json(const MetricWeight& w);

}  // namespace shapegeo
