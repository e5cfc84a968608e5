#include "jensen/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "jensen/density.hpp"
#include "jensen/discrete_bounds.hpp"
#include "jensen/errors.hpp"
#include "jensen/instance_io.hpp"
#include "jensen/integral_functionals.hpp"
#include "jensen/verifier.hpp"

namespace jensen::cli {

namespace {

using nlohmann::json;

const std::vector<std::string> kEvalTargets{"jensen", "chebychev", "jensen_int", "chebychev_int"};
const std::vector<std::string> kDiscreteBoundTargets{"superquadratic_lower", "lambda_lower",        "halved_lower",
                                                     "ratio_sandwich",       "convex_sandwich",     "chebychev_magnitude",
                                                     "slope_upper"};
const std::vector<std::string> kIntegralBoundTargets{"superquadratic_lower_int", "ratio_sandwich_int",
                                                     "chebychev_magnitude_int", "slope_upper_int"};
const std::map<std::string, std::string> kBoundAliases{
    {"th1", "ratio_sandwich_int"},
    {"lower_bound_superquadratic", "superquadratic_lower"},
    {"lambda_bound", "lambda_lower"},
    {"halved_bound", "halved_lower"},
    {"sandwich_bounds", "ratio_sandwich"},
    {"chebychev_magnitude_bound", "chebychev_magnitude"},
    {"jensen_upper_via_C", "slope_upper"},
    {"lower_bound_superquadratic_int", "superquadratic_lower_int"},
    {"sandwich_bounds_int", "ratio_sandwich_int"},
    {"chebychev_magnitude_bound_int", "chebychev_magnitude_int"},
    {"jensen_upper_via_C_int", "slope_upper_int"},
};

bool contains(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

std::string joined(const std::vector<std::string>& v) {
  std::string s;
  for (const auto& e : v) s += (s.empty() ? "" : ", ") + e;
  return s;
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

struct Options {
  std::string target;
  std::string fn = "power:2";
  std::string instance_path;
  std::vector<double> weights;
  std::vector<double> nodes;
  std::vector<double> r_weights;
  std::vector<std::string> p_ids;
  std::vector<std::string> r_ids;
  std::vector<double> q;
  std::vector<double> interval;
  double lambda = 0.5;
  std::string quad_mode = "tensor_gauss";
  std::size_t quad_nodes = 32;
  std::uint64_t samples = 100'000;
  std::uint64_t seed = 1;
  double tolerance = kDefaultTolerance;
  std::string out_path;
  std::string format = "json";
  std::optional<double> m_tilde;
  std::optional<double> M_tilde;
  double xmax = 4.0;
  std::size_t points = 201;
  std::size_t resolution = 256;
  std::string config_path;
  std::optional<std::uint64_t> trials;
  std::optional<int> workers;
  std::string csv_out;
};

class Command {
 public:
  Command(const Options& o, std::ostream& out) : o_(o), out_(out) {}

  int eval() {
    const FunctionSpec f = function_from_id(o_.fn);
    FunctionalValue v;
    json j;
    if (o_.target == "jensen_int" || o_.target == "chebychev_int") {
      const auto [p, q] = densities(o_.p_ids, "--p");
      const QuadratureSpec quad = quadrature(p.size());
      v = o_.target == "jensen_int" ? jensen_k_int(f, p, q, quad) : chebychev_k_int(f, p, q, quad);
      j["quadrature"] = to_string(quad.mode);
    } else {
      const InstanceFile in = instance();
      const GroupedInstance& inst = in.instance;
      const bool jensen_target = o_.target == "jensen";
      if (inst.rank() == 1) {
        const auto& g = inst.group(0);
        v = jensen_target ? jensen(f, g.weights, g.nodes) : chebychev(f, g.weights, g.nodes);
      } else {
        v = jensen_target ? jensen_k(f, inst) : chebychev_k(f, inst);
      }
      j["instance"] = to_json(inst, in.r);
    }
    j["target"] = o_.target;
    j["function"] = o_.fn;
    j["value"] = v.value;
    j["term_count"] = v.term_count;
    j["xbar"] = v.xbar;
    j["std_error"] = v.std_error;
    if (o_.format == "csv") {
      std::ostringstream os;
      os.precision(17);
      os << "target,function,value,term_count,xbar,std_error\n"
         << o_.target << ',' << o_.fn << ',' << v.value << ',' << v.term_count << ',' << v.xbar << ','
         << v.std_error << '\n';
      emit(os.str());
    } else {
      emit(j.dump(2) + "\n");
    }
    return kExitOk;
  }

  int bound() {
    const std::string target = canonical_bound(o_.target);
    const FunctionSpec f = function_from_id(o_.fn);
    std::vector<BoundReport> reports;
    json j;
    BoundOptions opts;
    opts.tolerance = o_.tolerance;
    if (contains(kIntegralBoundTargets, target)) {
      const auto [p, q] = densities(o_.p_ids, "--p");
      const QuadratureSpec quad = quadrature(p.size());
      if (target == "superquadratic_lower_int") {
        reports.push_back(lower_bound_superquadratic_int(f, p, q, quad, o_.tolerance));
      } else if (target == "ratio_sandwich_int") {
        const auto [r, q_r] = densities(o_.r_ids, "--r");
        const auto s = sandwich_bounds_int(f, p, r, q, quad, o_.resolution, o_.tolerance);
        reports = {s.lower, s.upper};
        j["extrema"] = extrema_json(s.extrema);
      } else if (target == "chebychev_magnitude_int") {
        const ValueRange range = value_range_int(f, p, q, quad);
        reports.push_back(chebychev_magnitude_bound_int(f, p, q, quad, o_.m_tilde.value_or(range.lo),
                                                        o_.M_tilde.value_or(range.hi), o_.tolerance));
      } else {
        const ValueRange range = slope_range_int(f, p, q, quad);
        reports.push_back(jensen_upper_via_C_int(f, p, q, quad, o_.m_tilde.value_or(range.lo),
                                                 o_.M_tilde.value_or(range.hi), o_.tolerance));
      }
    } else {
      const InstanceFile in = instance();
      const GroupedInstance& inst = in.instance;
      if (target == "superquadratic_lower") {
        reports.push_back(lower_bound_superquadratic(f, inst, opts));
      } else if (target == "lambda_lower") {
        if (inst.rank() != 1) throw InvalidInput("lambda_lower takes a single-group instance");
        reports.push_back(lambda_bound(f, inst.group(0).weights, inst.group(0).nodes, o_.lambda, opts));
      } else if (target == "halved_lower") {
        reports.push_back(halved_bound(f, inst, opts));
      } else if (target == "ratio_sandwich" || target == "convex_sandwich") {
        if (in.r.empty()) throw InvalidInput(target + " needs r weights (--r-weights or \"r\" in the instance)");
        const auto s = target == "ratio_sandwich" ? sandwich_bounds(f, inst, in.r, opts)
                                                  : convex_sandwich(f, inst, in.r, opts);
        reports = {s.lower, s.upper};
        j["extrema"] = {{"m", s.extrema.m}, {"M", s.extrema.M}};
      } else if (target == "chebychev_magnitude") {
        const ValueRange range = value_range(f, inst);
        reports.push_back(chebychev_magnitude_bound(f, inst, o_.m_tilde.value_or(range.lo),
                                                    o_.M_tilde.value_or(range.hi), opts));
      } else {
        const ValueRange range = slope_range(f, inst);
        const auto s =
            jensen_upper_via_C(f, inst, o_.m_tilde.value_or(range.lo), o_.M_tilde.value_or(range.hi), opts);
        reports = {s.upper, s.via_chebychev};
      }
      j["instance"] = to_json(inst, in.r);
    }

    bool all_hold = true;
    j["target"] = target;
    j["function"] = o_.fn;
    j["reports"] = json::array();
    for (const auto& r : reports) {
      all_hold = all_hold && (r.skipped || r.holds);
      j["reports"].push_back(to_json(r));
    }
    if (o_.format == "csv") {
      std::string s = csv_header() + "\n";
      for (const auto& r : reports) s += csv_row(r) + "\n";
      emit(s);
    } else {
      emit(j.dump(2) + "\n");
    }
    return all_hold ? kExitOk : kExitViolation;
  }

  int certify() {
    const FunctionSpec f = function_from_id(o_.fn);
    if (!(o_.xmax > 0.0)) throw InvalidInput("--xmax must be positive");
    const std::vector<double> grid = uniform_grid(0.0, o_.xmax, o_.points);
    const CertificationReport c = certify_superquadratic(f, grid, grid, o_.tolerance);
    const json j{{"function", o_.fn},
                 {"verdict", to_string(c.verdict)},
                 {"worst_violation", finite_or_null(c.worst_violation)},
                 {"witness", {c.witness.first, c.witness.second}},
                 {"envelope_gap", finite_or_null(c.envelope_gap)},
                 {"tolerance_abs", c.tolerance_abs},
                 {"used_slope", c.used_slope},
                 {"grid", {{"xmax", o_.xmax}, {"points", o_.points}}},
                 {"note", c.note}};
    if (o_.format == "csv") {
      std::ostringstream os;
      os.precision(17);
      os << "function,verdict,worst_violation,witness_x,witness_y\n"
         << o_.fn << ',' << to_string(c.verdict) << ',' << c.worst_violation << ',' << c.witness.first << ','
         << c.witness.second << '\n';
      emit(os.str());
    } else {
      emit(j.dump(2) + "\n");
    }
    return c.verdict == Verdict::violated ? kExitViolation : kExitOk;
  }

  int campaign() {
    CampaignConfig cfg;
    if (!o_.config_path.empty()) {
      std::ifstream in(o_.config_path);
      if (!in) throw InvalidInput("cannot open config '" + o_.config_path + "'");
      json j;
      try {
        in >> j;
      } catch (const json::parse_error& e) {
        throw InvalidInput(std::string("malformed config: ") + e.what());
      }
      cfg = campaign_config_from_json(j);
    }
    if (!o_.target.empty()) cfg.inequality_ids = {o_.target};
    if (o_.trials) cfg.trials = *o_.trials;
    if (o_.workers) cfg.workers = *o_.workers;
    const CampaignReport report = run_campaign(cfg);
    if (!o_.csv_out.empty()) write_file(o_.csv_out, campaign_csv(report));
    emit(o_.format == "csv" ? campaign_csv(report) : to_json(report).dump(2) + "\n");
    return report.total_violations() == 0 ? kExitOk : kExitViolation;
  }

  int extrema() {
    json j;
    if (!o_.p_ids.empty()) {
      const auto [p, q] = densities(o_.p_ids, "--p");
      const auto [r, q_r] = densities(o_.r_ids, "--r");
      j = extrema_json(ratio_extrema_int(p, r, o_.resolution));
    } else {
      const InstanceFile in = instance();
      if (in.r.empty()) throw InvalidInput("extrema needs r weights (--r-weights or \"r\" in the instance)");
      std::vector<WeightVector> p;
      for (const auto& g : in.instance.groups()) p.push_back(g.weights);
      const RatioExtrema e = ratio_extrema(p, in.r);
      j = {{"m", e.m}, {"M", e.M}, {"argmin", e.argmin}, {"argmax", e.argmax},
           {"instance", to_json(in.instance, in.r)}};
    }
    if (o_.format == "csv") {
      std::ostringstream os;
      os.precision(17);
      os << "m,M\n" << j.at("m").dump() << ',' << j.at("M").dump() << '\n';
      emit(os.str());
    } else {
      emit(j.dump(2) + "\n");
    }
    return kExitOk;
  }

 private:
  static std::string canonical_bound(const std::string& t) {
    if (const auto it = kBoundAliases.find(t); it != kBoundAliases.end()) return it->second;
    if (contains(kDiscreteBoundTargets, t) || contains(kIntegralBoundTargets, t)) return t;
    throw InvalidInput("unknown bound target '" + t + "'; expected one of " + joined(kDiscreteBoundTargets) + ", " +
                       joined(kIntegralBoundTargets));
  }

  static json extrema_json(const IntegralRatioExtrema& e) {
    return {{"m", e.m},
            {"M", finite_or_null(e.M)},
            {"M_unbounded", e.M_unbounded},
            {"arg_m", {e.arg_m.first, e.arg_m.second}},
            {"arg_M", {e.arg_M.first, e.arg_M.second}},
            {"m_pointwise", e.m_pointwise},
            {"M_pointwise", e.M_pointwise},
            {"grid_resolution", e.grid_resolution}};
  }

  InstanceFile instance() const {
    if (!o_.instance_path.empty()) {
      if (!o_.weights.empty() || !o_.nodes.empty()) throw InvalidInput("give either --instance or --weights/--nodes");
      InstanceFile in = load_instance(o_.instance_path);
      if (!o_.r_weights.empty()) {
        if (in.instance.rank() != 1) throw InvalidInput("--r-weights applies to single-group instances");
        in.r = {WeightVector(o_.r_weights)};
      }
      return in;
    }
    if (o_.weights.empty() || o_.nodes.empty()) throw InvalidInput("an instance is required (--instance or --weights/--nodes)");
    InstanceFile in{GroupedInstance::single(WeightVector(o_.weights), o_.nodes), {}};
    if (!o_.r_weights.empty()) {
      in.r = {WeightVector(o_.r_weights)};
      in.instance.with_weights(in.r);
    }
    return in;
  }

  // One density per axis; a single id is repeated to the length of --q.
  std::pair<std::vector<DensitySpec>, WeightVector> densities(std::vector<std::string> ids, const char* flag) const {
    if (ids.empty()) throw InvalidInput(std::string(flag) + " is required");
    if (o_.interval.size() != 2) throw InvalidInput("--interval a b is required");
    std::vector<double> q = o_.q.empty() ? std::vector<double>(ids.size(), 1.0 / static_cast<double>(ids.size()))
                                         : o_.q;
    if (ids.size() == 1 && q.size() > 1) ids.assign(q.size(), ids.front());
    if (ids.size() != q.size()) {
      throw InvalidInput(std::string(flag) + " gives " + std::to_string(ids.size()) + " densities but --q has " +
                         std::to_string(q.size()) + " entries");
    }
    std::vector<DensitySpec> out;
    for (const auto& id : ids) out.push_back(density_from_id(id, o_.interval[0], o_.interval[1]));
    return {std::move(out), WeightVector(std::move(q))};
  }

  QuadratureSpec quadrature(std::size_t k) const {
    QuadratureSpec quad;
    quad.mode = quadrature_mode_from_string(o_.quad_mode);
    quad.nodes_per_axis = o_.quad_nodes;
    quad.sample_count = o_.samples;
    quad.seed = o_.seed;
    quad.validate(k);
    return quad;
  }

  static void write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path);
    if (!f) throw InvalidInput("cannot write '" + path + "'");
    f << text;
  }

  void emit(const std::string& text) const {
    if (o_.out_path.empty()) {
      out_ << text;
    } else {
      write_file(o_.out_path, text);
    }
  }

  const Options& o_;
  std::ostream& out_;
};

void add_function(CLI::App* c, Options& o) { c->add_option("--fn", o.fn, "function id (power:<p>, xsqlog, exp, ...)"); }

void add_output(CLI::App* c, Options& o) {
  c->add_option("--out", o.out_path, "write the report here instead of stdout");
  c->add_option("--format", o.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
}

void add_instance(CLI::App* c, Options& o) {
  c->add_option("--instance", o.instance_path, "instance JSON file");
  c->add_option("--weights", o.weights, "inline single-group weights")->delimiter(',');
  c->add_option("--nodes", o.nodes, "inline single-group nodes")->delimiter(',');
  c->add_option("--r-weights", o.r_weights, "second weight system for ratio bounds")->delimiter(',');
}

void add_integral(CLI::App* c, Options& o, bool with_r) {
  c->add_option("--p", o.p_ids, "density id(s) per axis")->delimiter(',');
  if (with_r) c->add_option("--r", o.r_ids, "comparison density id(s) per axis")->delimiter(',');
  c->add_option("--q", o.q, "outer weights")->delimiter(',');
  c->add_option("--interval", o.interval, "support [a, b]")->expected(2);
  c->add_option("--quad-mode", o.quad_mode, "tensor_gauss or monte_carlo");
  c->add_option("--quad-nodes", o.quad_nodes, "Gauss nodes per axis");
  c->add_option("--samples", o.samples, "Monte Carlo sample count");
  c->add_option("--seed", o.seed, "Monte Carlo seed");
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Jensen functional bounds for superquadratic functions", "jensen-bounds"};
  app.require_subcommand(1);

  auto* eval = app.add_subcommand("eval", "evaluate a functional");
  eval->add_option("target", o.target, "functional")->required()->check(CLI::IsMember(kEvalTargets));
  add_function(eval, o);
  add_instance(eval, o);
  add_integral(eval, o, false);
  add_output(eval, o);

  auto* bound = app.add_subcommand("bound", "evaluate an inequality");
  bound->add_option("target", o.target, "inequality id")->required();
  add_function(bound, o);
  add_instance(bound, o);
  add_integral(bound, o, true);
  bound->add_option("--lambda", o.lambda, "lambda in [0, 1]");
  bound->add_option("--mtilde", o.m_tilde, "lower bracket (default: exact minimum)");
  bound->add_option("--Mtilde", o.M_tilde, "upper bracket (default: exact maximum)");
  bound->add_option("--resolution", o.resolution, "ratio extrema grid cells");
  bound->add_option("--tolerance", o.tolerance, "relative tolerance");
  add_output(bound, o);

  auto* certify = app.add_subcommand("certify", "grid-check the superquadratic inequality");
  add_function(certify, o);
  certify->add_option("--xmax", o.xmax, "grid upper end");
  certify->add_option("--points", o.points, "grid points");
  certify->add_option("--tolerance", o.tolerance, "relative tolerance");
  add_output(certify, o);

  auto* campaign = app.add_subcommand("campaign", "randomized property campaign");
  campaign->add_option("target", o.target, "inequality id or group (overrides the config)");
  campaign->add_option("--config", o.config_path, "campaign config JSON");
  campaign->add_option("--trials", o.trials, "trial count override");
  campaign->add_option("--workers", o.workers, "worker threads");
  campaign->add_option("--csv-out", o.csv_out, "also write the CSV summary here");
  add_output(campaign, o);

  auto* extrema = app.add_subcommand("extrema", "ratio extrema m and M");
  add_instance(extrema, o);
  add_integral(extrema, o, true);
  extrema->add_option("--resolution", o.resolution, "grid cells");
  add_output(extrema, o);

  try {
    app.parse(std::vector<std::string>(args.rbegin(), args.rend()));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    Command cmd(o, out);
    if (eval->parsed()) return cmd.eval();
    if (bound->parsed()) return cmd.bound();
    if (certify->parsed()) return cmd.certify();
    if (campaign->parsed()) return cmd.campaign();
    return cmd.extrema();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

}  // namespace jensen::cli
