#include "jensen/function_toolkit.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <exception>
#include <fstream>
#include <sstream>

#include "jensen/errors.hpp"

namespace jensen {

namespace {

double parse_double(std::string_view text, std::string_view what) {
  std::string s(text);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw InvalidInput("cannot parse " + std::string(what) + " from '" + s + "'");
  }
  if (used != s.size()) throw InvalidInput("trailing characters in " + std::string(what) + " '" + s + "'");
  return v;
}

std::string format_param(double p) {
  std::ostringstream os;
  os << p;
  return os.str();
}

// Rounding slack at the right end of a bounded domain.
constexpr double kEdgeSlack = 1e-12;

}  // namespace

FunctionSpec::FunctionSpec(std::string name, Fn f, std::optional<Fn> slope, Domain domain,
                           bool claims_superquadratic)
    : name_(std::move(name)),
      f_(std::move(f)),
      slope_(std::move(slope)),
      domain_(domain),
      claims_superquadratic_(claims_superquadratic) {
  if (!f_) throw InvalidInput("function '" + name_ + "' has no evaluator");
  if (!(domain_.upper > 0.0)) throw InvalidInput("domain [0, a] needs a > 0");
}

double FunctionSpec::checked(double x) const {
  if (!(x >= 0.0)) {
    throw DomainError(name_ + ": argument " + format_param(x) + " is negative");
  }
  if (x > domain_.upper) {
    if (x <= domain_.upper + kEdgeSlack * std::max(1.0, domain_.upper)) return domain_.upper;
    throw DomainError(name_ + ": argument " + format_param(x) + " exceeds domain end " +
                      format_param(domain_.upper));
  }
  return x;
}

double FunctionSpec::operator()(double x) const {
  const double v = f_(checked(x));
  if (!std::isfinite(v)) throw DomainError(name_ + ": non-finite value at " + format_param(x));
  return v;
}

double FunctionSpec::slope(double x) const {
  if (!slope_) throw MissingSlope(name_ + " has no companion slope C(x)");
  const double v = (*slope_)(checked(x));
  if (!std::isfinite(v)) throw DomainError(name_ + ": non-finite slope at " + format_param(x));
  return v;
}

FunctionSpec power_function(double p) {
  if (!(p > 0.0) || !std::isfinite(p)) throw InvalidInput("power exponent must be positive");
  auto f = [p](double x) { return std::pow(x, p); };
  auto c = [p](double x) { return p * std::pow(x, p - 1.0); };
  std::optional<FunctionSpec::Fn> slope;
  if (p >= 1.0) slope = c;
  return FunctionSpec("power:" + format_param(p), f, slope, Domain{}, p >= 2.0);
}

FunctionSpec xsqlog_function() {
  // Continuous extension at 0: f(0) = 0 and C(0) = 0.
  auto f = [](double x) { return x > 0.0 ? x * x * std::log(x) : 0.0; };
  auto c = [](double x) { return x > 0.0 ? x * (2.0 * std::log(x) + 1.0) : 0.0; };
  return FunctionSpec("xsqlog", f, c, Domain{}, true);
}

FunctionSpec neg_power_comp_function(double p) {
  if (!(p > 0.0) || !std::isfinite(p)) throw InvalidInput("neg_power_comp parameter must be positive");
  auto f = [p](double x) { return -std::pow(1.0 + std::pow(x, 1.0 / p), p); };
  auto c = [](double) { return 0.0; };
  return FunctionSpec("neg_power_comp:" + format_param(p), f, c, Domain{}, true);
}

FunctionSpec exp_function() {
  return FunctionSpec("exp", [](double x) { return std::exp(x); }, std::nullopt, Domain{}, false);
}

FunctionSpec identity_function() {
  return FunctionSpec("identity", [](double x) { return x; }, std::nullopt, Domain{}, false);
}

FunctionSpec tabulated_function(std::string name, std::vector<double> xs, std::vector<double> fs) {
  if (xs.size() != fs.size()) throw InvalidInput("tabulated function: x and f columns differ in length");
  if (xs.size() < 2) throw InvalidInput("tabulated function needs at least two samples");
  if (xs.front() != 0.0) throw InvalidInput("tabulated function must start at x = 0");
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!std::isfinite(xs[i]) || !std::isfinite(fs[i])) throw InvalidInput("tabulated function: non-finite sample");
    if (i > 0 && !(xs[i] > xs[i - 1])) throw InvalidInput("tabulated function: x must be strictly increasing");
  }
  const double upper = xs.back();
  auto f = [xs = std::move(xs), fs = std::move(fs)](double x) {
    auto it = std::upper_bound(xs.begin(), xs.end(), x);
    if (it == xs.end()) return fs.back();
    const std::size_t hi = static_cast<std::size_t>(it - xs.begin());
    const std::size_t lo = hi - 1;
    const double t = (x - xs[lo]) / (xs[hi] - xs[lo]);
    return fs[lo] + t * (fs[hi] - fs[lo]);
  };
  return FunctionSpec(std::move(name), f, std::nullopt, Domain{upper}, false);
}

FunctionSpec load_function_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open function samples '" + path + "'");
  std::vector<double> xs, fs;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw InvalidInput("function samples: expected 'x,f' in '" + line + "'");
    const std::string a = line.substr(0, comma), b = line.substr(comma + 1);
    if (first) {
      first = false;
      double probe = 0.0;
      const auto [ptr, ec] = std::from_chars(a.data(), a.data() + a.size(), probe);
      if (ec != std::errc{}) continue;  // header
    }
    xs.push_back(parse_double(a, "x"));
    fs.push_back(parse_double(b, "f"));
  }
  return tabulated_function("csv:" + path, std::move(xs), std::move(fs));
}

FunctionSpec function_from_id(std::string_view id) {
  const auto colon = id.find(':');
  const std::string_view head = id.substr(0, colon);
  const std::string_view arg = colon == std::string_view::npos ? std::string_view{} : id.substr(colon + 1);
  auto need_arg = [&] {
    if (arg.empty()) throw InvalidInput("function id '" + std::string(id) + "' needs a parameter");
    return parse_double(arg, "function parameter");
  };
  if (head == "power") return power_function(need_arg());
  if (head == "neg_power_comp") return neg_power_comp_function(need_arg());
  if (head == "csv") return load_function_csv(std::string(arg));
  if (!arg.empty()) throw InvalidInput("function id '" + std::string(head) + "' takes no parameter");
  if (head == "xsqlog") return xsqlog_function();
  if (head == "exp") return exp_function();
  if (head == "identity") return identity_function();
  throw InvalidInput("unknown function id '" + std::string(id) + "'");
}

double eval_f(const FunctionSpec& spec, double x) { return spec(x); }

double eval_C(const FunctionSpec& spec, double x) { return spec.slope(x); }

SlopeInterval feasible_C_envelope(const FunctionSpec& spec, double x, std::span<const double> y_grid) {
  const double fx = spec(x);
  SlopeInterval env;
  for (double y : y_grid) {
    if (y == x) continue;
    const double q = (spec(y) - fx - spec(std::abs(y - x))) / (y - x);
    if (y > x) {
      env.upper = std::min(env.upper, q);
    } else {
      env.lower = std::max(env.lower, q);
    }
  }
  return env;
}

const char* to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::certified: return "certified";
    case Verdict::violated: return "violated";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "?";
}

namespace {

struct Line {
  double offset;  // f(|y-x|) - f(y) + f(x)
  double slope;   // y - x
  double y;
};

struct PointResult {
  double violation;
  double y;
  double gap;
};

double max_at(std::span<const Line> lines, double c, double& arg) {
  double best = -std::numeric_limits<double>::infinity();
  for (const Line& l : lines) {
    const double v = l.offset + l.slope * c;
    if (v > best) {
      best = v;
      arg = l.y;
    }
  }
  return best;
}

// min over C of max_y (offset + slope * C), with the envelope it implies.
PointResult minimax(std::span<const Line> rising, std::span<const Line> falling, const SlopeInterval& env) {
  double c = 0.0;
  if (!env.empty()) {
    const bool lo = std::isfinite(env.lower), hi = std::isfinite(env.upper);
    c = lo && hi ? 0.5 * (env.lower + env.upper) : lo ? env.lower : hi ? env.upper : 0.0;
  } else {
    // h(C) = max rising - max falling is increasing; its root minimises the max.
    double a = env.upper, b = env.lower, dummy = 0.0;
    for (int it = 0; it < 200 && b - a > 1e-15 * std::max(1.0, std::abs(a) + std::abs(b)); ++it) {
      const double mid = 0.5 * (a + b);
      const double h = max_at(rising, mid, dummy) - max_at(falling, mid, dummy);
      (h < 0.0 ? a : b) = mid;
    }
    c = 0.5 * (a + b);
  }
  double y_up = 0.0, y_down = 0.0;
  const double up = rising.empty() ? -std::numeric_limits<double>::infinity() : max_at(rising, c, y_up);
  const double down = falling.empty() ? -std::numeric_limits<double>::infinity() : max_at(falling, c, y_down);
  return up >= down ? PointResult{up, y_up, env.upper - env.lower} : PointResult{down, y_down, env.upper - env.lower};
}

}  // namespace

CertificationReport certify_superquadratic(const FunctionSpec& spec, std::span<const double> x_grid,
                                           std::span<const double> y_grid, double tolerance) {
  if (x_grid.empty() || y_grid.empty()) throw InvalidInput("certification grids must be non-empty");
  if (!(tolerance > 0.0)) throw InvalidInput("certification tolerance must be positive");
  for (double v : x_grid) {
    if (!spec.domain().contains(v)) throw DomainError("x grid point outside the domain");
  }
  for (double v : y_grid) {
    if (!spec.domain().contains(v)) throw DomainError("y grid point outside the domain");
  }

  std::vector<double> fy(y_grid.size());
  double scale = 1.0;
  for (std::size_t j = 0; j < y_grid.size(); ++j) {
    fy[j] = spec(y_grid[j]);
    scale = std::max(scale, std::abs(fy[j]));
  }
  for (double x : x_grid) scale = std::max(scale, std::abs(spec(x)));

  CertificationReport report;
  report.tolerance_abs = tolerance * scale;
  report.used_slope = spec.has_slope();

  // y = x gives 0 >= f(0) for every x.
  const double f0 = spec(0.0);
  report.worst_violation = f0;
  report.witness = {x_grid.front(), x_grid.front()};

  auto evaluate_at = [&](double x) {
    const double fx = spec(x);
    std::vector<Line> rising, falling;
    SlopeInterval env;
    for (std::size_t j = 0; j < y_grid.size(); ++j) {
      const double y = y_grid[j];
      if (y == x) continue;
      const Line l{spec(std::abs(y - x)) - fy[j] + fx, y - x, y};
      const double q = -l.offset / l.slope;
      if (l.slope > 0.0) {
        env.upper = std::min(env.upper, q);
        rising.push_back(l);
      } else {
        env.lower = std::max(env.lower, q);
        falling.push_back(l);
      }
    }
    if (!spec.has_slope()) return minimax(rising, falling, env);
    const double c = spec.slope(x);
    PointResult r{-std::numeric_limits<double>::infinity(), x, env.upper - env.lower};
    for (const auto* group : {&rising, &falling}) {
      for (const Line& l : *group) {
        const double v = l.offset + l.slope * c;
        if (v > r.violation) {
          r.violation = v;
          r.y = l.y;
        }
      }
    }
    return r;
  };

  const std::size_t nx = x_grid.size();
  std::vector<PointResult> per_x(nx);
  std::vector<std::exception_ptr> failure(nx);
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(nx); ++i) {
    try {
      per_x[static_cast<std::size_t>(i)] = evaluate_at(x_grid[static_cast<std::size_t>(i)]);
    } catch (...) {
      failure[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (const auto& e : failure) {
    if (e) std::rethrow_exception(e);
  }

  for (std::size_t i = 0; i < nx; ++i) {
    report.envelope_gap = std::min(report.envelope_gap, per_x[i].gap);
    if (per_x[i].violation > report.worst_violation) {
      report.worst_violation = per_x[i].violation;
      report.witness = {x_grid[i], per_x[i].y};
    }
  }

  const bool sparse = x_grid.size() < 3 || y_grid.size() < 3;
  if (report.worst_violation > report.tolerance_abs) {
    report.verdict = Verdict::violated;
    report.note = "defining inequality fails at the witness pair";
  } else if (sparse) {
    report.verdict = Verdict::inconclusive;
    report.note = "grid too sparse (fewer than 3 points on an axis) to certify";
  } else {
    report.verdict = Verdict::certified;
    report.note = "holds on the supplied grid only";
  }
  return report;
}

std::vector<double> uniform_grid(double lo, double hi, std::size_t points) {
  if (points == 0) throw InvalidInput("grid needs at least one point");
  if (points == 1) return {lo};
  std::vector<double> g(points);
  const double h = (hi - lo) / static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i) g[i] = lo + h * static_cast<double>(i);
  g.back() = hi;
  return g;
}

}  // namespace jensen
