#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>

#include "bimodal/bifurcation.hpp"
#include "bimodal/classify.hpp"
#include "bimodal/control.hpp"
#include "bimodal/dynamics.hpp"
#include "bimodal/geometry.hpp"
#include "io.hpp"

namespace bimodal::cli {
namespace {

using io::json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Config {
  double tol = kDefaultEps;
  std::uint64_t seed = 0;
  std::string in;
  std::string inline_json;
  std::string out;
  std::string format;
};

struct Options {
  // controllability
  std::string method = "auto";
  // miniversal
  std::vector<double> eta;
  // simulate
  std::vector<double> x0;
  int samples = 0;
  double horizon = 0.0;
  double max_step = 0.01;
  std::vector<double> feedback;
  bool stabilize = false;
  // bifurcate
  double a4 = -1.0;
  double b1 = 1.0;
  std::vector<double> range = {-2.0, 2.0};
  int res = 81;
  double slice_x5 = 0.0;
  std::size_t max_points = 1'000'000;
  unsigned threads = 0;
};

Triple load_triple(const Config& cfg, std::istream& in) {
  std::string text;
  if (!cfg.inline_json.empty()) {
    text = cfg.inline_json;
  } else if (cfg.in == "-") {
    std::ostringstream buf;
    buf << in.rdbuf();
    text = buf.str();
  } else if (!cfg.in.empty()) {
    std::ifstream file(cfg.in, std::ios::binary);
    if (!file) throw Error(ErrorCode::IoFailure, "cannot read " + cfg.in, "input");
    std::ostringstream buf;
    buf << file.rdbuf();
    text = buf.str();
  } else {
    throw UsageError("no input triple: pass --in FILE, --in - or --json TEXT");
  }
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ParseError, std::string("malformed JSON: ") + e.what(), "input");
  }
  return io::triple_from_json(j, cfg.tol);
}

void require_format(const Config& cfg, std::initializer_list<const char*> allowed) {
  if (cfg.format.empty()) return;
  for (const char* f : allowed) {
    if (cfg.format == f) return;
  }
  throw UsageError("unsupported --format " + cfg.format + " for this subcommand");
}

std::string format_or(const Config& cfg, const char* fallback) {
  return cfg.format.empty() ? fallback : cfg.format;
}

/// Writes to --out when given, else to `out`.
void emit(const Config& cfg, std::ostream& out, const std::string& text) {
  if (cfg.out.empty()) {
    out << text;
    return;
  }
  std::ofstream file(cfg.out, std::ios::binary | std::ios::trunc);
  if (!file) throw Error(ErrorCode::IoFailure, "cannot open " + cfg.out + " for writing", "output");
  file << text;
  file.flush();
  if (!file) throw Error(ErrorCode::IoFailure, "write to " + cfg.out + " failed", "output");
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json complex_list(const Eigen::VectorXcd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back({v(i).real(), v(i).imag()});
  return out;
}

json report_json(const ControllabilityReport& r) {
  json j;
  j["controllable"] = r.controllable;
  j["boundary"] = r.boundary;
  j["method"] = std::string(to_string(r.method));
  j["b1"] = r.b1;
  j["delta1"] = r.delta1;
  j["delta2"] = r.delta2;
  j["e"] = io::vector_to_json(r.e);
  j["condition1"] = r.kalman_rank_condition1;
  j["condition2"] = r.mu_condition2 ? json(*r.mu_condition2) : json(nullptr);
  return j;
}

json feedback_json(const Triple& x, const Feedback& f) {
  json j;
  j["F"] = io::vector_to_json(f.F.transpose());
  j["trace_margins"] = {f.trace_margins[0], f.trace_margins[1]};
  j["det_margins"] = {f.det_margins[0], f.det_margins[1]};
  j["decay_rates"] = {f.decay_rates[0], f.decay_rates[1]};
  j["delta"] = f.delta;
  json modes = json::array();
  for (const Eigen::MatrixXd* A : {&x.A1(), &x.A2()}) {
    const Eigen::MatrixXd M = *A + x.B() * f.F;
    modes.push_back({{"matrix", io::matrix_to_json(M)}, {"eigenvalues", complex_list(M.eigenvalues())}});
  }
  j["closed_loop"] = modes;
  return j;
}

int cmd_classify(const Config& cfg, std::istream& in, std::ostream& out) {
  require_format(cfg, {"json"});
  const Triple x = load_triple(cfg, in);
  const ClassificationResult r = classify(x, cfg.tol);
  json j;
  j["label"] = std::string(to_string(r.form.label));
  j["stratum"] = stratum_name(r.form.label);
  json params = json::object();
  const auto names = param_names(r.form.label);
  for (std::size_t i = 0; i < names.size(); ++i) params[std::string(names[i])] = r.form.params[i];
  j["params"] = params;
  j["orbit_dim"] = r.form.orbit_dim;
  j["stratum_dim"] = r.form.stratum_dim;
  j["S"] = io::matrix_to_json(r.S.matrix());
  j["residual"] = r.residual;
  j["condition_number"] = r.S.condition_number();
  j["ill_conditioned"] = r.ill_conditioned;
  j["triple"] = io::triple_to_json(r.form.triple);
  emit(cfg, out, dump(j));
  return 0;
}

int cmd_invariants(const Config& cfg, std::istream& in, std::ostream& out) {
  require_format(cfg, {"json"});
  const Triple x = load_triple(cfg, in);
  const auto v = planar_invariants(x);
  json j;
  j["a3"] = v.a3;
  j["b1"] = v.b1;
  j["delta0"] = v.delta0;
  j["delta12"] = v.delta12;
  j["delta1"] = v.delta1;
  j["delta2"] = v.delta2;
  j["trA1"] = v.trA1;
  j["trA2"] = v.trA2;
  j["detA1"] = v.detA1;
  j["detA2"] = v.detA2;
  const double p = v.delta1 * v.delta2;
  const ZeroTest z(cfg.tol, x.scale());
  j["sign_delta1_delta2"] = z.zero(p, 4) ? 0 : (p > 0 ? 1 : -1);
  j["observable"] = is_observable(x, cfg.tol);
  emit(cfg, out, dump(j));
  return 0;
}

int cmd_observability(const Config& cfg, std::istream& in, std::ostream& out) {
  require_format(cfg, {"json"});
  const Triple x = load_triple(cfg, in);
  json j;
  j["n"] = x.n();
  j["observable"] = is_observable(x, cfg.tol);
  j["rank_A1"] = observability_rank(x.A1(), cfg.tol);
  j["rank_A2"] = observability_rank(x.A2(), cfg.tol);
  emit(cfg, out, dump(j));
  return 0;
}

int cmd_normal_space(const Config& cfg, std::istream& in, std::ostream& out) {
  require_format(cfg, {"json"});
  const Triple x = load_triple(cfg, in);
  const auto tangent = tangent_basis(x, cfg.tol);
  const auto normal = normal_basis(x, cfg.tol);
  json j;
  if (x.n() == 2) j["label"] = std::string(to_string(classify(x, cfg.tol).form.label));
  j["ambient_dim"] = ambient_dimension(x.n());
  j["orbit_dim"] = tangent.size();
  j["normal_dim"] = normal.size();
  json t = json::array(), nb = json::array();
  for (const auto& v : tangent) t.push_back(io::direction_to_json(v));
  for (const auto& v : normal) nb.push_back(io::direction_to_json(v));
  j["tangent_basis"] = t;
  j["normal_basis"] = nb;
  emit(cfg, out, dump(j));
  return 0;
}

int cmd_miniversal(const Config& cfg, const Options& opt, std::istream& in, std::ostream& out) {
  require_format(cfg, {"json"});
  const Triple x = load_triple(cfg, in);
  const MiniversalDeformation m = miniversal(x, cfg.tol);
  std::vector<double> eta = opt.eta;
  if (eta.empty()) eta.assign(static_cast<std::size_t>(m.d()), 0.0);
  json j;
  j["d"] = m.d();
  j["base"] = io::triple_to_json(m.base);
  json dirs = json::array();
  for (const auto& v : m.directions) dirs.push_back(io::direction_to_json(v));
  j["directions"] = dirs;
  j["eta"] = eta;
  j["triple"] = io::triple_to_json(m(eta));
  emit(cfg, out, dump(j));
  return 0;
}

int cmd_controllability(const Config& cfg, const Options& opt, std::istream& in,
                        std::ostream& out) {
  require_format(cfg, {"json"});
  const Triple x = load_triple(cfg, in);
  std::string method = opt.method;
  if (method == "auto") {
    method = (x.n() == 2 && !is_observable(x, cfg.tol)) ? "explicit" : "theorem";
  }
  json j;
  if (method == "explicit") {
    j = report_json(is_controllable_explicit(x, cfg.tol));
  } else if (method == "theorem") {
    j = report_json(is_controllable_theorem(x, cfg.tol));
  } else {
    const auto a = is_controllable_explicit(x, cfg.tol);
    const auto b = is_controllable_theorem(x, cfg.tol);
    j["controllable"] = a.controllable;
    j["agree"] = a.controllable == b.controllable;
    j["explicit"] = report_json(a);
    j["theorem"] = report_json(b);
  }
  emit(cfg, out, dump(j));
  return 0;
}

int cmd_stabilize(const Config& cfg, std::istream& in, std::ostream& out) {
  require_format(cfg, {"json"});
  const Triple x = load_triple(cfg, in);
  emit(cfg, out, dump(feedback_json(x, stabilizing_feedback(x, cfg.tol))));
  return 0;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

int cmd_simulate(const Config& cfg, const Options& opt, std::istream& in, std::ostream& out) {
  require_format(cfg, {"csv", "json"});
  const Triple x = load_triple(cfg, in);
  const int n = x.n();

  std::vector<Eigen::VectorXd> starts;
  if (!opt.x0.empty()) {
    if (static_cast<int>(opt.x0.size()) != n) throw UsageError("--x0 needs n entries");
    starts.push_back(Eigen::Map<const Eigen::VectorXd>(opt.x0.data(), n));
  }
  if (opt.samples > 0) {
    // unit-norm initial states from the seed
    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> normal;
    for (int k = 0; k < opt.samples; ++k) {
      Eigen::VectorXd v(n);
      do {
        for (int i = 0; i < n; ++i) v(i) = normal(rng);
      } while (v.norm() == 0.0);
      starts.push_back(v / v.norm());
    }
  }
  if (starts.empty()) throw UsageError("pass --x0 or --samples");

  SimulationMode mode = AffineMode{};
  std::optional<Feedback> feedback;
  if (opt.stabilize) {
    feedback = stabilizing_feedback(x, cfg.tol);
  } else if (!opt.feedback.empty()) {
    if (static_cast<int>(opt.feedback.size()) != n) throw UsageError("--feedback needs n entries");
    feedback = evaluate_feedback(x, Eigen::Map<const Eigen::RowVectorXd>(opt.feedback.data(), n));
  }
  if (feedback) mode = ClosedLoopMode{feedback->F};

  SimulationOptions so;
  so.max_step = opt.max_step;
  so.horizon = opt.horizon > 0.0 ? opt.horizon
                                 : (feedback && feedback->delta > 0.0 ? 20.0 / feedback->delta : 10.0);

  std::vector<Trajectory> runs;
  runs.reserve(starts.size());
  for (const auto& s : starts) runs.push_back(simulate(x, mode, s, so));

  std::ostringstream text;
  if (format_or(cfg, "csv") == "csv") {
    const bool many = runs.size() > 1;
    if (many) text << "run,";
    text << "t";
    for (int i = 1; i <= n; ++i) text << ",x" << i;
    text << ",mode\n";
    for (std::size_t r = 0; r < runs.size(); ++r) {
      const Trajectory& tr = runs[r];
      for (std::size_t k = 0; k < tr.size(); ++k) {
        if (many) text << r << ',';
        text << fmt(tr.times[k]);
        const auto s = tr.state(k);
        for (int i = 0; i < n; ++i) text << ',' << fmt(s(i));
        text << ',' << tr.modes[k] << '\n';
      }
    }
  } else {
    json j;
    j["horizon"] = so.horizon;
    if (feedback) j["feedback"] = feedback_json(x, *feedback);
    json list = json::array();
    for (std::size_t r = 0; r < runs.size(); ++r) {
      const Trajectory& tr = runs[r];
      json s = json::array();
      for (const auto& sw : tr.switches) {
        s.push_back({{"time", sw.time}, {"bracket_lo", sw.bracket_lo},
                     {"direction", sw.direction}, {"x1", sw.x1}});
      }
      const Eigen::VectorXd last = tr.final_state();
      list.push_back({{"x0", io::vector_to_json(starts[r])},
                      {"final_time", tr.times.back()},
                      {"final_state", io::vector_to_json(last)},
                      {"final_norm_ratio", last.norm() / starts[r].norm()},
                      {"samples", tr.size()},
                      {"switches", s},
                      {"blew_up", tr.blew_up},
                      {"stopped_early", tr.stopped_early}});
    }
    j["runs"] = list;
    text << dump(j);
  }
  emit(cfg, out, text.str());
  return 0;
}

int cmd_bifurcate(const Config& cfg, const Options& opt, std::ostream& out) {
  require_format(cfg, {"csv", "svg"});
  if (opt.range.size() != 2 || !(opt.range[0] <= opt.range[1])) {
    throw UsageError("--range expects LO,HI with LO <= HI");
  }
  if (opt.res < 0) throw UsageError("--res must be non-negative");
  const GridAxis axis{opt.range[0], opt.range[1], opt.res};
  const SweepGrid grid{axis, axis, axis};
  if (grid.size() > opt.max_points) {
    throw UsageError("grid has " + std::to_string(grid.size()) + " points, above --max-points " +
                     std::to_string(opt.max_points));
  }
  const BifurcationDiagram d = sweep_cf10p(opt.a4, opt.b1, grid, cfg.tol, opt.threads);
  std::ostringstream text;
  if (format_or(cfg, "csv") == "csv") write_csv(d, text);
  else write_svg(d, opt.slice_x5, text);
  emit(cfg, out, text.str());
  return 0;
}

void error_json(std::ostream& err, std::string_view code, const std::string& message,
                const std::string& context) {
  json j;
  j["code"] = code;
  j["message"] = message;
  j["context"] = context;
  err << j.dump() << '\n';
}

}  // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Bimodal piecewise-linear systems: canonical forms, geometry, controllability",
               "bimodal"};
  app.require_subcommand(1);
  app.fallthrough();
  Config cfg;
  Options opt;

  app.add_option("--tol", cfg.tol, "Zero tolerance")->check(CLI::NonNegativeNumber);
  app.add_option("--seed", cfg.seed, "RNG seed for sampled initial states");
  app.add_option("--in", cfg.in, "Input triple JSON file, or - for stdin");
  app.add_option("--json", cfg.inline_json, "Input triple as inline JSON");
  app.add_option("--out", cfg.out, "Output file (default stdout)");
  app.add_option("--format", cfg.format, "Output format (json, csv or svg)");

  auto* classify_cmd = app.add_subcommand("classify", "Canonical form and reducing change");
  auto* invariants_cmd = app.add_subcommand("invariants", "Planar invariants");
  auto* observability_cmd = app.add_subcommand("observability", "Observability ranks");
  auto* normal_cmd = app.add_subcommand("normal-space", "Tangent and normal spaces to the orbit");
  auto* miniversal_cmd = app.add_subcommand("miniversal", "Miniversal deformation");
  miniversal_cmd->add_option("--eta", opt.eta, "Deformation parameters")->delimiter(',');
  auto* control_cmd = app.add_subcommand("controllability", "Controllability test");
  control_cmd->add_option("--method", opt.method, "auto, explicit, theorem or both")
      ->check(CLI::IsMember({"auto", "explicit", "theorem", "both"}));
  auto* stabilize_cmd = app.add_subcommand("stabilize", "Common stabilizing feedback");
  auto* simulate_cmd = app.add_subcommand("simulate", "Trajectory simulation");
  simulate_cmd->add_option("--x0", opt.x0, "Initial state")->delimiter(',');
  simulate_cmd->add_option("--samples", opt.samples, "Random unit initial states")
      ->check(CLI::NonNegativeNumber);
  simulate_cmd->add_option("--horizon", opt.horizon, "Final time (default 20/delta or 10)");
  simulate_cmd->add_option("--max-step", opt.max_step, "Step bound")->check(CLI::PositiveNumber);
  auto* fb = simulate_cmd->add_option("--feedback", opt.feedback, "Gain F")->delimiter(',');
  simulate_cmd->add_flag("--stabilize", opt.stabilize, "Use the synthesized gain")->excludes(fb);
  auto* bif_cmd = app.add_subcommand("bifurcate", "CF10' bifurcation diagram");
  bif_cmd->add_option("--a4", opt.a4, "Base a4");
  bif_cmd->add_option("--b1", opt.b1, "Base b1");
  bif_cmd->add_option("--range", opt.range, "Axis range LO,HI")->delimiter(',');
  bif_cmd->add_option("--res", opt.res, "Points per axis");
  bif_cmd->add_option("--slice-x5", opt.slice_x5, "x5 of the SVG slice");
  bif_cmd->add_option("--max-points", opt.max_points, "Grid size guard");
  bif_cmd->add_option("--threads", opt.threads, "Worker threads (0 = all cores)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n" << "run with --help for usage\n";
    return 2;
  }

  try {
    if (*classify_cmd) return cmd_classify(cfg, in, out);
    if (*invariants_cmd) return cmd_invariants(cfg, in, out);
    if (*observability_cmd) return cmd_observability(cfg, in, out);
    if (*normal_cmd) return cmd_normal_space(cfg, in, out);
    if (*miniversal_cmd) return cmd_miniversal(cfg, opt, in, out);
    if (*control_cmd) return cmd_controllability(cfg, opt, in, out);
    if (*stabilize_cmd) return cmd_stabilize(cfg, in, out);
    if (*simulate_cmd) return cmd_simulate(cfg, opt, in, out);
    if (*bif_cmd) return cmd_bifurcate(cfg, opt, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    error_json(err, to_string(e.code()), e.what(), e.context());
    return e.code() == ErrorCode::ParseError ? 2 : 1;
  } catch (const json::exception& e) {
    error_json(err, "ParseError", e.what(), "input");
    return 2;
  }
  return 2;
}

}  // namespace bimodal::cli
