#include "metric.hpp"

#include <cmath>
#include <set>

#include <json.hpp>

namespace shapegeo {

namespace {

void check_domain(double vol, double trl2) {
  if (!(vol > 0)) fail(ErrorCode::DomainError, "vol must be positive");
  if (!(trl2 >= 0)) fail(ErrorCode::DomainError, "trl2 must be non-negative");
}

// trl2^k for integer k >= 1 without pow's trl2 = 0 edge cases.
double ipow(double x, int k) {
  double r = 1;
  for (int i = 0; i < k; ++i) r *= x;
  return r;
}

}  // namespace

double evaluate(const MetricWeight& w, double vol, double trl2) {
  check_domain(vol, trl2);
  return std::visit(
      [&](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, G0>) return 1.0;
        if constexpr (std::is_same_v<T, GAPower>) return 1.0 + m.A * ipow(trl2, m.k);
        if constexpr (std::is_same_v<T, ConformalPower>) return std::pow(vol, m.k);
        if constexpr (std::is_same_v<T, ConformalExp>) return std::exp(vol);
        if constexpr (std::is_same_v<T, ScaleInvariant>) return 1.0 / (vol * vol) + m.A * trl2 / vol;
        if constexpr (std::is_same_v<T, Combined>)
          return m.c0 + m.A * ipow(trl2, m.k) + m.B * std::pow(vol, m.l);
      },
      w.variant);
}

Partials partials(const MetricWeight& w, double vol, double trl2) {
  check_domain(vol, trl2);
  return std::visit(
      [&](const auto& m) -> Partials {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, G0>) return {0, 0};
        if constexpr (std::is_same_v<T, GAPower>) return {0, m.A * m.k * ipow(trl2, m.k - 1)};
        if constexpr (std::is_same_v<T, ConformalPower>) return {m.k * std::pow(vol, m.k - 1), 0};
        if constexpr (std::is_same_v<T, ConformalExp>) return {std::exp(vol), 0};
        if constexpr (std::is_same_v<T, ScaleInvariant>)
          return {-2.0 / (vol * vol * vol) - m.A * trl2 / (vol * vol), m.A / vol};
        if constexpr (std::is_same_v<T, Combined>)
          return {m.B * m.l * std::pow(vol, m.l - 1), m.A * m.k * ipow(trl2, m.k - 1)};
      },
      w.variant);
}

double partial_trl(const MetricWeight& w, double vol, double trl) {
  return 2 * trl * partials(w, vol, trl * trl).dTrl2;
}

bool uses_trl2(const MetricWeight& w) {
  return std::visit(
      [](const auto& m) -> bool {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, GAPower>) return true;
        else if constexpr (std::is_same_v<T, ScaleInvariant>) return m.A != 0;
        else if constexpr (std::is_same_v<T, Combined>) return m.A != 0;
        else return false;
      },
      w.variant);
}

bool uses_vol(const MetricWeight& w) {
  return std::visit(
      [](const auto& m) -> bool {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, G0>) return false;
        else if constexpr (std::is_same_v<T, GAPower>) return false;
        else if constexpr (std::is_same_v<T, Combined>) return m.B != 0;
        else return true;
      },
      w.variant);
}

std::string weight_name(const MetricWeight& w) {
  return std::visit(
      [](const auto& m) -> std::string {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, G0>) return "G0";
        else if constexpr (std::is_same_v<T, GAPower>) return "GAPower";
        else if constexpr (std::is_same_v<T, ConformalPower>) return "ConformalPower";
        else if constexpr (std::is_same_v<T, ConformalExp>) return "ConformalExp";
        else if constexpr (std::is_same_v<T, ScaleInvariant>) return "ScaleInvariant";
        else return "Combined";
      },
      w.variant);
}

namespace {

using nlohmann::json;

[[noreturn]] void config_fail(const std::string& what) { fail(ErrorCode::ConfigError, what); }

void check_keys(const json& j, std::set<std::string> allowed) {
  allowed.insert("type");
  for (const auto& [key, value] : j.items())
    if (!allowed.count(key)) config_fail("unknown metric key '" + key + "'");
}

double get_number(const json& j, const std::string& key) {
  if (!j.contains(key)) config_fail("metric is missing '" + key + "'");
  if (!j[key].is_number()) config_fail("metric key '" + key + "' must be a number");
  return j[key].get<double>();
}

int get_integer(const json& j, const std::string& key) {
  if (!j.contains(key)) config_fail("metric is missing '" + key + "'");
  if (!j[key].is_number_integer()) config_fail("metric key '" + key + "' must be an integer");
  return j[key].get<int>();
}

}  // namespace

MetricWeight metric_from_json(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) config_fail("metric is not valid JSON");
  if (!j.is_object() || !j.contains("type") || !j["type"].is_string())
    config_fail("metric must be an object with a 'type' string");
  const std::string type = j["type"].get<std::string>();

  if (type == "G0") {
    check_keys(j, {});
    return {G0{}};
  }
  if (type == "GAPower") {
    check_keys(j, {"A", "k"});
    GAPower m{get_number(j, "A"), get_integer(j, "k")};
    if (!(m.A > 0)) config_fail("GAPower needs A > 0");
    if (m.k < 1) config_fail("GAPower needs integer k >= 1");
    return {m};
  }
  if (type == "ConformalPower") {
    check_keys(j, {"k"});
    return {ConformalPower{get_number(j, "k")}};
  }
  if (type == "ConformalExp") {
    check_keys(j, {});
    return {ConformalExp{}};
  }
  if (type == "ScaleInvariant") {
    check_keys(j, {"A"});
    ScaleInvariant m{j.contains("A") ? get_number(j, "A") : 0.0};
    if (!(m.A >= 0)) config_fail("ScaleInvariant needs A >= 0");
    return {m};
  }
  if (type == "Combined") {
    check_keys(j, {"c0", "A", "k", "B", "l"});
    Combined m{get_number(j, "c0"), get_number(j, "A"), get_integer(j, "k"), get_number(j, "B"),
               get_number(j, "l")};
    if (m.k < 1) config_fail("Combined needs integer k >= 1");
    if (!(m.c0 >= 0) || !(m.A >= 0) || !(m.B >= 0)) config_fail("Combined needs c0, A, B >= 0");
    if (!(m.c0 + m.A + m.B > 0)) config_fail("Combined needs at least one positive coefficient");
    return {m};
  }
  config_fail("unknown metric type '" + type + "'");
}

std::string metric_to_json(const MetricWeight& w) {
  nlohmann::ordered_json j;
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, G0>) j["type"] = "G0";
        if constexpr (std::is_same_v<T, GAPower>) {
          j["type"] = "GAPower";
          j["A"] = m.A;
          j["k"] = m.k;
        }
        if constexpr (std::is_same_v<T, ConformalPower>) {
          j["type"] = "ConformalPower";
          j["k"] = m.k;
        }
        if constexpr (std::is_same_v<T, ConformalExp>) j["type"] = "ConformalExp";
        if constexpr (std::is_same_v<T, ScaleInvariant>) {
          j["type"] = "ScaleInvariant";
          j["A"] = m.A;
        }
        if constexpr (std::is_same_v<T, Combined>) {
          j["type"] = "Combined";
          j["c0"] = m.c0;
          j["A"] = m.A;
          j["k"] = m.k;
          j["B"] = m.B;
          j["l"] = m.l;
        }
      },
      w.variant);
  return j.dump();
}

}  // namespace shapegeo
