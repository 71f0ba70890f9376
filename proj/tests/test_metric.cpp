#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "metric.hpp"
#include "oracles.hpp"

using namespace shapegeo;

namespace {

const std::vector<MetricWeight> catalog() {
  return {
      {G0{}},
      {GAPower{0.0625, 2}},
      {GAPower{1.0, 1}},
      {ConformalPower{1.0}},
      {ConformalPower{-1.0}},
      {ConformalPower{2.5}},
      {ConformalExp{}},
      {ScaleInvariant{}},
      {ScaleInvariant{0.7}},
      {Combined{0.5, 2.0, 3, 1.5, -0.5}},
  };
}

}  // namespace

TEST_SUITE("metric") {

TEST_CASE("evaluate on hand-computed examples") {
  CHECK(evaluate({G0{}}, 3.0, 9.0) == 1.0);
  CHECK(evaluate({GAPower{0.0625, 2}}, 7.0, 2.0) == doctest::Approx(1 + 0.0625 * 4).epsilon(1e-15));
  CHECK(evaluate({ConformalPower{2.0}}, 3.0, 0.0) == doctest::Approx(9.0).epsilon(1e-15));
  CHECK(evaluate({ConformalPower{-1.0}}, 4.0, 0.0) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(evaluate({ConformalExp{}}, 2.0, 0.0) == doctest::Approx(std::exp(2.0)).epsilon(1e-15));
  CHECK(evaluate({ScaleInvariant{0.5}}, 2.0, 3.0) ==
        doctest::Approx(0.25 + 0.5 * 3.0 / 2.0).epsilon(1e-15));
  CHECK(evaluate({Combined{0.5, 2.0, 3, 1.5, -0.5}}, 4.0, 2.0) ==
        doctest::Approx(0.5 + 2.0 * 8.0 + 1.5 * 0.5).epsilon(1e-15));
}

TEST_CASE("partials agree with finite differences") {
  for (const MetricWeight& w : catalog()) {
    for (const auto [vol, trl2] : {std::pair{1.7, 0.9}, std::pair{12.56, 4.0}, std::pair{0.3, 0.01}}) {
      const Partials p = partials(w, vol, trl2);
      const auto f = [&](const std::vector<double>& x) { return evaluate(w, x[0], x[1]); };
      const auto fd = oracle::fd_gradient(f, {vol, trl2}, 1e-6);
      const double scale = std::max({1.0, std::abs(fd[0]), std::abs(fd[1])});
      CHECK(std::abs(p.dVol - fd[0]) < 1e-8 * scale);
      CHECK(std::abs(p.dTrl2 - fd[1]) < 1e-8 * scale);
    }
  }
}

TEST_CASE("scale-invariant partials hand value") {
  const double v = 4 * M_PI;
  const Partials p = partials({ScaleInvariant{1.0}}, v, 4.0);
  CHECK(p.dVol == doctest::Approx(-2 / (v * v * v) - 4 / (v * v)).epsilon(1e-13));
  CHECK(p.dTrl2 == doctest::Approx(1.0 / v).epsilon(1e-15));
}

TEST_CASE("partial_trl is the signed chain rule") {
  for (const MetricWeight& w : catalog()) {
    for (double trl : {-2.0, -0.5, 0.0, 1.5}) {
      const double vol = 3.2;
      const double expected = 2.0 * trl * partials(w, vol, trl * trl).dTrl2;
      CHECK(partial_trl(w, vol, trl) == doctest::Approx(expected).epsilon(1e-13));
    }
  }
}

TEST_CASE("uses flags") {
  CHECK_FALSE(uses_trl2({G0{}}));
  CHECK_FALSE(uses_vol({G0{}}));
  CHECK(uses_trl2({GAPower{}}));
  CHECK_FALSE(uses_vol({GAPower{}}));
  CHECK_FALSE(uses_trl2({ConformalPower{2}}));
  CHECK(uses_vol({ConformalPower{2}}));
  CHECK(uses_vol({ConformalExp{}}));
  CHECK_FALSE(uses_trl2({ScaleInvariant{}}));  // A = 0 drops the trl2 term
  CHECK(uses_trl2({ScaleInvariant{0.5}}));
  CHECK(uses_vol({ScaleInvariant{}}));
  CHECK(uses_trl2({Combined{}}));
  CHECK(uses_vol({Combined{}}));
}

TEST_CASE("json round trip") {
  for (const MetricWeight& w : catalog()) {
    const MetricWeight back = metric_from_json(metric_to_json(w));
    CHECK(back.variant.index() == w.variant.index());
    CHECK(metric_to_json(back) == metric_to_json(w));
    // Values survive: compare the evaluations.
    CHECK(evaluate(back, 2.3, 1.1) == evaluate(w, 2.3, 1.1));
  }
}

TEST_CASE("json parsing accepts the documented forms") {
  const MetricWeight w = metric_from_json(R"({"type":"GAPower","A":0.0625,"k":2})");
  CHECK(weight_name(w) == "GAPower");
  CHECK(evaluate(w, 1.0, 4.0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(weight_name(metric_from_json(R"({"type":"G0"})")) == "G0");
  CHECK(weight_name(metric_from_json(R"({"type":"ConformalExp"})")) == "ConformalExp");
  CHECK(weight_name(metric_from_json(R"({"type":"ScaleInvariant"})")) == "ScaleInvariant");
}

TEST_CASE("json rejects unknown content") {
  const auto rejects = [](const std::string& text) {
    try {
      metric_from_json(text);
    } catch (const Error& e) {
      return e.code() == ErrorCode::ConfigError;
    }
    return false;
  };
  CHECK(rejects(R"({"type":"Frobnicate"})"));
  CHECK(rejects(R"({"type":"G0","extra":1})"));
  CHECK(rejects(R"({"type":"GAPower","A":"big","k":2})"));
  CHECK(rejects(R"({"type":"GAPower","A":1,"k":2.5})"));
  CHECK(rejects(R"({"A":1,"k":2})"));
  CHECK(rejects("not json at all"));
}

TEST_CASE("json rejects invalid parameter values") {
  const auto rejects = [](const std::string& text) {
    try {
      metric_from_json(text);
    } catch (const Error& e) {
      return e.code() == ErrorCode::ConfigError;
    }
    return false;
  };
  // Negative coefficients or zero exponents break positivity.
  CHECK(rejects(R"({"type":"GAPower","A":-1,"k":2})"));
  CHECK(rejects(R"({"type":"GAPower","A":1,"k":0})"));
  CHECK(rejects(R"({"type":"ScaleInvariant","A":-0.5})"));
}

TEST_CASE("evaluate rejects out-of-domain arguments") {
  const auto domain_error = [](const MetricWeight& w, double vol, double trl2) {
    try {
      evaluate(w, vol, trl2);
    } catch (const Error& e) {
      return e.code() == ErrorCode::DomainError;
    }
    return false;
  };
  CHECK(domain_error({ConformalPower{0.5}}, -1.0, 0.0));
  CHECK(domain_error({ConformalPower{-1.0}}, 0.0, 0.0));
  CHECK(domain_error({ScaleInvariant{}}, 0.0, 1.0));
  CHECK(domain_error({GAPower{1, 1}}, 1.0, -0.5));
}

}  // TEST_SUITE
