#pragma once

#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rml/errors.hpp"
#include "rml/rng.hpp"

namespace rml {

enum class DesignLaw { uniform01, normal };
enum class ResponseKind { sine, constant };

inline std::string_view to_string(DesignLaw d) {
  return d == DesignLaw::uniform01 ? "uniform" : "normal";
}
inline std::string_view to_string(ResponseKind r) {
  return r == ResponseKind::sine ? "sin" : "constant";
}

// Axis-aligned box in R^d; a single interval is repeated across coordinates.
struct Box {
  double lo = 0.2;
  double hi = 0.8;

  [[nodiscard]] bool contains(std::span<const double> x) const {
    for (double t : x) {
      if (t < lo || t > hi) return false;
    }
    return true;
  }
};

// Closed-form regression model: product design density f on R^d, regression
// function r, Gaussian response noise and declared regularity rho.
//   sine:     r(x) = sum_j sin(2 pi x_j)
//   constant: r(x) = c
struct RegressionModel {
  int d = 1;
  DesignLaw design = DesignLaw::uniform01;
  ResponseKind response = ResponseKind::sine;
  double response_constant = 0.0;
  double noise_sd = 0.3;
  double rho = 2.0;
  Box region;  // B

  [[nodiscard]] double density(std::span<const double> x) const {
    double f = 1.0;
    for (double t : x) {
      if (design == DesignLaw::uniform01) {
        if (t < 0.0 || t > 1.0) return 0.0;
      } else {
        f *= normal_pdf(t);
      }
    }
    return f;
  }

  [[nodiscard]] double density_sup() const {
    return design == DesignLaw::uniform01 ? 1.0 : std::pow(normal_pdf(0.0), d);
  }

  // Points where f is not smooth along each axis.
  [[nodiscard]] std::vector<double> density_breakpoints() const {
    if (design == DesignLaw::uniform01) return {0.0, 1.0};
    return {};
  }

  [[nodiscard]] double regression(std::span<const double> x) const {
    if (response == ResponseKind::constant) return response_constant;
    double r = 0.0;
    for (double t : x) r += std::sin(2.0 * std::numbers::pi * t);
    return r;
  }

  [[nodiscard]] double regression_sup_abs() const {
    return response == ResponseKind::constant ? std::abs(response_constant) : static_cast<double>(d);
  }

  // inf of f over B.
  [[nodiscard]] double density_inf_on_region() const {
    if (design == DesignLaw::uniform01) {
      return (region.lo >= 0.0 && region.hi <= 1.0) ? 1.0 : 0.0;
    }
    const double far = std::max(std::abs(region.lo), std::abs(region.hi));
    return std::pow(normal_pdf(far), d);
  }

  void validate() const {
    if (d < 1) throw invalid_spec("regression model needs d >= 1");
    if (!(region.hi > region.lo)) throw invalid_spec("region B needs lo < hi");
    if (!(noise_sd >= 0.0)) throw invalid_spec("noise sd must be >= 0");
    if (!(rho > 0.0)) throw invalid_spec("rho must be positive");
    if (!(density_inf_on_region() > 0.0)) {
      throw invalid_spec("f must be bounded below on B");
    }
  }
};

}  // namespace rml
