#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace jensen {

/// [0, upper]; upper may be +inf.
struct Domain {
  double upper = std::numeric_limits<double>::infinity();

  bool bounded() const noexcept { return upper != std::numeric_limits<double>::infinity(); }
  bool contains(double x) const noexcept { return x >= 0.0 && x <= upper; }
};

/// A candidate superquadratic function: f, an optional companion slope C, and
/// the domain it lives on. Immutable once built; safe to share across threads
/// as long as the wrapped callables are reentrant.
class FunctionSpec {
 public:
  using Fn = std::function<double(double)>;

  FunctionSpec(std::string name, Fn f, std::optional<Fn> slope, Domain domain,
               bool claims_superquadratic);

  const std::string& name() const noexcept { return name_; }
  const Domain& domain() const noexcept { return domain_; }
  bool claims_superquadratic() const noexcept { return claims_superquadratic_; }
  bool has_slope() const noexcept { return slope_.has_value(); }

  /// f(x). Throws DomainError outside [0, a] and if f is not finite there.
  double operator()(double x) const;
  /// C(x). Throws MissingSlope when no slope was supplied.
  double slope(double x) const;

 private:
  double checked(double x) const;

  std::string name_;
  Fn f_;
  std::optional<Fn> slope_;
  Domain domain_;
  bool claims_superquadratic_;
};

// Catalog.
FunctionSpec power_function(double p);            // x^p, C = p x^{p-1}
FunctionSpec xsqlog_function();                   // x^2 log x, C = x (2 log x + 1)
FunctionSpec neg_power_comp_function(double p);   // -(1 + x^{1/p})^p, C = 0
FunctionSpec exp_function();                      // not superquadratic, no C
FunctionSpec identity_function();                 // not superquadratic, no C

/// Piecewise-linear interpolant through (x_i, f_i); x must start at 0 and be
/// strictly increasing. Domain is [0, x_last]; no slope.
FunctionSpec tabulated_function(std::string name, std::vector<double> xs, std::vector<double> fs);

/// Reads "x,f" rows (an optional non-numeric header line is skipped).
FunctionSpec load_function_csv(const std::string& path);

/// "power:<p>", "xsqlog", "neg_power_comp:<p>", "exp", "identity", or
/// "csv:<path>" for tabulated samples.
FunctionSpec function_from_id(std::string_view id);

double eval_f(const FunctionSpec& spec, double x);
double eval_C(const FunctionSpec& spec, double x);

/// Feasible values of C(x) against a finite y grid. Empty iff lower > upper.
struct SlopeInterval {
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();

  bool empty() const noexcept { return lower > upper; }
  bool contains(double c) const noexcept { return c >= lower && c <= upper; }
};

SlopeInterval feasible_C_envelope(const FunctionSpec& spec, double x, std::span<const double> y_grid);

enum class Verdict { certified, violated, inconclusive };

const char* to_string(Verdict v) noexcept;

struct CertificationReport {
  Verdict verdict = Verdict::inconclusive;
  /// max over the grid of f(|y-x|) + C(x)(y-x) - f(y) + f(x); positive = violated.
  /// Without a catalog C, C(x) is chosen per x to minimise this maximum.
  double worst_violation = -std::numeric_limits<double>::infinity();
  std::pair<double, double> witness{0.0, 0.0};
  /// min over x of (upper_C - lower_C); negative means some x has no feasible C.
  double envelope_gap = std::numeric_limits<double>::infinity();
  double tolerance_abs = 0.0;
  bool used_slope = false;
  std::string note;
};

/// Grid check of the superquadratic defining inequality. The verdict only
/// speaks for the grid; `note` says so.
CertificationReport certify_superquadratic(const FunctionSpec& spec, std::span<const double> x_grid,
                                           std::span<const double> y_grid, double tolerance);

std::vector<double> uniform_grid(double lo, double hi, std::size_t points);

}  // namespace jensen
