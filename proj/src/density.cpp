#include "jensen/density.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>

#include "jensen/errors.hpp"
#include "jensen/summation.hpp"

namespace jensen {

namespace {

constexpr std::size_t kMassCells = 32;
constexpr std::size_t kMassPoints = 16;

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

double parse_number(const std::string& s, const char* what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw InvalidInput(std::string("cannot parse ") + what + " from '" + s + "'");
  }
  if (used != s.size()) throw InvalidInput(std::string("trailing characters in ") + what + " '" + s + "'");
  return v;
}

}  // namespace

DensitySpec::DensitySpec(std::string name, Fn density, double a, double b, std::optional<Fn> cdf,
                         std::optional<Fn> quantile, std::vector<double> breakpoints, double mass_tolerance)
    : name_(std::move(name)),
      density_(std::move(density)),
      a_(a),
      b_(b),
      cdf_(std::move(cdf)),
      quantile_(std::move(quantile)),
      breakpoints_(std::move(breakpoints)) {
  if (!density_) throw InvalidInput("density '" + name_ + "' has no evaluator");
  if (!(std::isfinite(a_) && std::isfinite(b_) && a_ >= 0.0 && a_ < b_)) {
    throw InvalidInput("density '" + name_ + "' needs 0 <= a < b, got [" + fmt(a_) + ", " + fmt(b_) + "]");
  }
  for (std::size_t i = 0; i < kValidationPoints; ++i) {
    const double x = a_ + (b_ - a_) * static_cast<double>(i) / static_cast<double>(kValidationPoints - 1);
    const double v = density_(x);
    const bool interior = i > 0 && i + 1 < kValidationPoints;
    if (!std::isfinite(v) || v < 0.0 || (interior && v <= 0.0)) {
      throw InvalidInput("density '" + name_ + "' is not positive at x = " + fmt(x));
    }
  }
  const QuadratureRule rule = composite_gauss(cells(kMassCells), kMassPoints);
  mass_ = integrate(rule, density_);
  mean_ = integrate(rule, [this](double x) { return x * density_(x); }) / mass_;
  if (!(std::abs(mass_ - 1.0) <= mass_tolerance)) {
    throw InvalidInput("density '" + name_ + "' has mass " + fmt(mass_) + ", not 1");
  }
}

double DensitySpec::operator()(double x) const {
  if (x < a_ || x > b_) throw DomainError("density '" + name_ + "' evaluated outside [a, b]");
  return density_(x);
}

double DensitySpec::cdf(double x) const {
  if (!cdf_) throw InvalidInput("density '" + name_ + "' has no cumulative mass function");
  return (*cdf_)(std::clamp(x, a_, b_));
}

double DensitySpec::quantile(double u) const {
  if (quantile_) return std::clamp((*quantile_)(u), a_, b_);
  if (!cdf_) throw InvalidInput("density '" + name_ + "' has no invertible cdf; Monte Carlo sampling needs one");
  double lo = a_, hi = b_;
  for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    ((*cdf_)(mid) < u ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

std::vector<double> DensitySpec::cells(std::size_t uniform_cells) const {
  if (!breakpoints_.empty()) return breakpoints_;
  std::vector<double> c(uniform_cells + 1);
  for (std::size_t i = 0; i <= uniform_cells; ++i) {
    c[i] = a_ + (b_ - a_) * static_cast<double>(i) / static_cast<double>(uniform_cells);
  }
  c.back() = b_;
  return c;
}

DensitySpec uniform_density(double a, double b) {
  const double width = b - a;
  return DensitySpec(
      "uniform", [width](double) { return 1.0 / width; }, a, b, [a, width](double x) { return (x - a) / width; },
      [a, width](double u) { return a + u * width; });
}

DensitySpec linear_density(double a, double b, double shift) {
  if (!(a + shift >= 0.0)) throw InvalidInput("linear density needs x + shift >= 0 on [a, b]");
  const double lo2 = (a + shift) * (a + shift), hi2 = (b + shift) * (b + shift);
  const double norm = 0.5 * (hi2 - lo2);
  std::string name = shift == 0.0 ? "linear" : "linear:" + fmt(shift);
  return DensitySpec(
      std::move(name), [shift, norm](double x) { return (x + shift) / norm; }, a, b,
      [shift, lo2, hi2](double x) { return ((x + shift) * (x + shift) - lo2) / (hi2 - lo2); },
      [shift, lo2, hi2](double u) { return std::sqrt(lo2 + u * (hi2 - lo2)) - shift; });
}

DensitySpec powerlaw_density(double a, double b, double alpha) {
  if (!std::isfinite(alpha)) throw InvalidInput("powerlaw exponent must be finite");
  if (alpha < 0.0 && a == 0.0) throw InvalidInput("powerlaw with negative exponent needs a > 0");
  const std::string name = "powerlaw:" + fmt(alpha);
  if (alpha == -1.0) {
    const double la = std::log(a), span = std::log(b) - la;
    return DensitySpec(
        name, [span](double x) { return 1.0 / (x * span); }, a, b,
        [la, span](double x) { return (std::log(x) - la) / span; },
        [la, span](double u) { return std::exp(la + u * span); });
  }
  const double e = alpha + 1.0;
  const double lo = std::pow(a, e), hi = std::pow(b, e), norm = (hi - lo) / e;
  return DensitySpec(
      name, [alpha, norm](double x) { return std::pow(x, alpha) / norm; }, a, b,
      [e, lo, hi](double x) { return (std::pow(x, e) - lo) / (hi - lo); },
      [e, lo, hi](double u) { return std::pow(lo + u * (hi - lo), 1.0 / e); });
}

DensitySpec tabulated_density(std::vector<double> xs, std::vector<double> ds, std::string name) {
  if (xs.size() != ds.size() || xs.size() < 2) throw InvalidInput("tabulated density needs >= 2 (x, density) rows");
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!std::isfinite(xs[i]) || !std::isfinite(ds[i]) || ds[i] < 0.0) {
      throw InvalidInput("tabulated density: values must be finite and nonnegative");
    }
    if (i > 0 && !(xs[i] > xs[i - 1])) throw InvalidInput("tabulated density: x must be strictly increasing");
  }
  CompensatedSum mass;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) mass.add(0.5 * (ds[i] + ds[i + 1]) * (xs[i + 1] - xs[i]));
  const double total = mass.value();
  if (!(total > 0.0)) throw InvalidInput("tabulated density has zero mass");
  for (double& d : ds) d /= total;
  std::vector<double> cum(xs.size(), 0.0);
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) cum[i + 1] = cum[i] + 0.5 * (ds[i] + ds[i + 1]) * (xs[i + 1] - xs[i]);

  struct Table {
    std::vector<double> xs, ds, cum;
    std::size_t segment(double x) const {
      const auto it = std::upper_bound(xs.begin(), xs.end(), x);
      const std::size_t hi = std::clamp<std::size_t>(static_cast<std::size_t>(it - xs.begin()), 1, xs.size() - 1);
      return hi - 1;
    }
    double slope(std::size_t j) const { return (ds[j + 1] - ds[j]) / (xs[j + 1] - xs[j]); }
  };
  auto table = std::make_shared<const Table>(Table{xs, ds, cum});
  const double a = xs.front(), b = xs.back();
  auto density = [table](double x) {
    const std::size_t j = table->segment(x);
    return table->ds[j] + table->slope(j) * (x - table->xs[j]);
  };
  auto cdf = [table](double x) {
    const std::size_t j = table->segment(x);
    const double t = x - table->xs[j];
    return table->cum[j] + table->ds[j] * t + 0.5 * table->slope(j) * t * t;
  };
  auto quantile = [table](double u) {
    const auto& c = table->cum;
    const auto it = std::upper_bound(c.begin(), c.end(), u);
    const std::size_t j = std::clamp<std::size_t>(static_cast<std::size_t>(it - c.begin()), 1, c.size() - 1) - 1;
    const double r = u - c[j], d = table->ds[j], s = table->slope(j);
    const double denom = d + std::sqrt(std::max(0.0, d * d + 2.0 * s * r));
    const double t = denom > 0.0 ? 2.0 * r / denom : 0.0;
    return table->xs[j] + std::clamp(t, 0.0, table->xs[j + 1] - table->xs[j]);
  };
  return DensitySpec(std::move(name), density, a, b, cdf, quantile, xs);
}

DensitySpec load_density_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open density samples '" + path + "'");
  std::vector<double> xs, ds;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw InvalidInput("density samples: expected 'x,density' in '" + line + "'");
    const std::string x = line.substr(0, comma), d = line.substr(comma + 1);
    if (first) {
      first = false;
      double probe = 0.0;
      if (std::from_chars(x.data(), x.data() + x.size(), probe).ec != std::errc{}) continue;
    }
    xs.push_back(parse_number(x, "x"));
    ds.push_back(parse_number(d, "density"));
  }
  return tabulated_density(std::move(xs), std::move(ds), "csv:" + path);
}

DensitySpec density_from_id(std::string_view id, double a, double b) {
  const auto colon = id.find(':');
  const std::string head(id.substr(0, colon));
  const std::string arg = colon == std::string_view::npos ? std::string{} : std::string(id.substr(colon + 1));
  if (head == "csv") return load_density_csv(arg);
  if (head == "uniform" && arg.empty()) return uniform_density(a, b);
  if (head == "linear") return linear_density(a, b, arg.empty() ? 0.0 : parse_number(arg, "linear shift"));
  if (head == "powerlaw") {
    if (arg.empty()) throw InvalidInput("powerlaw density needs an exponent");
    return powerlaw_density(a, b, parse_number(arg, "powerlaw exponent"));
  }
  throw InvalidInput("unknown density id '" + std::string(id) + "'");
}

}  // namespace jensen
