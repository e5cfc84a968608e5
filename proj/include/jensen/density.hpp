#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "jensen/gauss_legendre.hpp"

namespace jensen {

/// A probability density on [a, b] with 0 <= a < b. Validated on
/// construction: finite everywhere, >= 0 at the endpoints and > 0 in the
/// interior of a 1024-point grid, and unit mass within `mass_tolerance`
/// (composite Gauss quadrature, cells split at any breakpoints).
///
/// `cdf` is the cumulative mass from a; `quantile` its inverse. With a cdf but
/// no quantile, inversion falls back to bisection. Evaluators must be
/// reentrant: quadrature and sampling call them from several threads.
class DensitySpec {
 public:
  using Fn = std::function<double(double)>;

  static constexpr double kDefaultMassTolerance = 1e-8;
  static constexpr std::size_t kValidationPoints = 1024;

  DensitySpec(std::string name, Fn density, double a, double b, std::optional<Fn> cdf = std::nullopt,
              std::optional<Fn> quantile = std::nullopt, std::vector<double> breakpoints = {},
              double mass_tolerance = kDefaultMassTolerance);

  const std::string& name() const noexcept { return name_; }
  double lower() const noexcept { return a_; }
  double upper() const noexcept { return b_; }
  double operator()(double x) const;

  bool has_cdf() const noexcept { return cdf_.has_value(); }
  double cdf(double x) const;
  /// Inverse cdf; throws InvalidInput when the density has no cdf.
  double quantile(double u) const;

  /// Mass and mean by composite quadrature.
  double mass() const noexcept { return mass_; }
  double mean() const noexcept { return mean_; }

  /// Cells for composite quadrature: the breakpoints if any, else a uniform split.
  std::vector<double> cells(std::size_t uniform_cells) const;

 private:
  std::string name_;
  Fn density_;
  double a_;
  double b_;
  std::optional<Fn> cdf_;
  std::optional<Fn> quantile_;
  std::vector<double> breakpoints_;
  double mass_ = 0.0;
  double mean_ = 0.0;
};

DensitySpec uniform_density(double a, double b);
/// Proportional to x + shift on [a, b] (shift >= -a).
DensitySpec linear_density(double a, double b, double shift = 0.0);
/// Proportional to x^alpha on [a, b].
DensitySpec powerlaw_density(double a, double b, double alpha);
/// Piecewise-linear through (x_i, d_i), renormalised to unit trapezoid mass.
DensitySpec tabulated_density(std::vector<double> xs, std::vector<double> ds, std::string name = "tabulated");
/// Reads "x,density" rows.
DensitySpec load_density_csv(const std::string& path);

/// "uniform", "linear", "linear:<shift>", "powerlaw:<alpha>" on [a, b], or
/// "csv:<path>" (interval taken from the file).
DensitySpec density_from_id(std::string_view id, double a, double b);

}  // namespace jensen
