#include "odoflow/cli.hpp"

#include <algorithm>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "odoflow/reports.hpp"
#include "odoflow/statistics.hpp"

namespace odoflow {

namespace {

struct Options {
  int depth = 3;
  std::string scheme = "paper";
  std::string ceiling = "factorial";
  std::string variant = "corrected";
  std::string window;    // "<lo>:<hi>", [lo, hi) unless --open
  bool window_open = false;
  std::string s, delta;  // certified window for (e^(s-delta), e^(s+delta))
  bool mirrored = false;
  std::string set_path;
  std::string out_path;
  std::string svg_path;
  int jobs = 1;
  int precision_cap = 4096;
  bool allow_large_depth = false;

  int max_n = 8;                    // kvalues
  int from = 4, to = 7;             // bounds / k-interval decay
  std::string family = "k-intervals";
  std::string s_from, s_to, s_step; // log-scale decay grid
  std::string band;                 // "<a>:<b>" for lambda-rect
  std::string point;                // "x1,x2,...,xM" for flow-eval
  std::string height = "0";
  std::string t = "0";
  std::string eta;                  // prop-a threshold
  std::string directions = "both";
  std::vector<std::string> perms;   // "n:a0,a1,..." entries
  std::string weighting_path;
  std::string conjugated_ceiling;   // deliberate-mismatch control
};

void apply_config(Options& o, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read --config file " + path);
  nlohmann::json j;
  in >> j;
  auto str = [&j](const char* k, std::string& dst) {
    if (j.contains(k)) dst = j.at(k).get<std::string>();
  };
  auto num = [&j](const char* k, int& dst) {
    if (j.contains(k)) dst = j.at(k).get<int>();
  };
  auto flag = [&j](const char* k, bool& dst) {
    if (j.contains(k)) dst = j.at(k).get<bool>();
  };
  num("depth", o.depth);
  str("scheme", o.scheme);
  str("ceiling", o.ceiling);
  str("variant", o.variant);
  str("window", o.window);
  flag("open", o.window_open);
  str("s", o.s);
  str("delta", o.delta);
  flag("mirrored", o.mirrored);
  str("set", o.set_path);
  str("out", o.out_path);
  str("svg", o.svg_path);
  num("jobs", o.jobs);
  num("precision-cap", o.precision_cap);
  flag("allow-large-depth", o.allow_large_depth);
  num("max", o.max_n);
  num("from", o.from);
  num("to", o.to);
  str("family", o.family);
  str("s-from", o.s_from);
  str("s-to", o.s_to);
  str("s-step", o.s_step);
  str("band", o.band);
  str("point", o.point);
  str("height", o.height);
  str("t", o.t);
  str("eta", o.eta);
  str("directions", o.directions);
  str("weighting", o.weighting_path);
  str("conjugated-ceiling", o.conjugated_ceiling);
  if (j.contains("perm")) o.perms = j.at("perm").get<std::vector<std::string>>();
}

void check_depth(const Options& o) {
  if (o.depth < 3) throw std::invalid_argument("--depth must be at least 3");
  if (o.depth >= 8 && !o.allow_large_depth)
    throw std::invalid_argument(
        "--depth 8 already enumerates about 7e10 words; pass "
        "--allow-large-depth to proceed anyway");
}

CoordinateScheme make_scheme(const Options& o) {
  if (o.scheme == "paper") return CoordinateScheme::dyadic(o.depth);
  if (o.scheme.rfind("bernoulli:", 0) == 0)
    return CoordinateScheme::bernoulli(o.depth, parse_rat(o.scheme.substr(10)));
  throw std::invalid_argument("--scheme must be paper or bernoulli:<p/q>");
}

CeilingSpec make_ceiling(const std::string& sel) {
  if (sel == "factorial") return CeilingSpec::factorial();
  if (sel.rfind("constant:", 0) == 0)
    return CeilingSpec::constant(Int(sel.substr(9)));
  throw std::invalid_argument("--ceiling must be factorial or constant:<c>");
}

std::pair<Rat, Rat> parse_pair(const std::string& text, const char* what) {
  const auto pos = text.find(':');
  if (pos == std::string::npos || pos == 0 || pos + 1 == text.size())
    throw std::invalid_argument(std::string(what) + " must be <lo>:<hi>");
  return {parse_rat(text.substr(0, pos)), parse_rat(text.substr(pos + 1))};
}

PrecisionPolicy make_policy(const Options& o) {
  if (o.precision_cap < 4)
    throw std::invalid_argument("--precision-cap must be at least 4 bits");
  return PrecisionPolicy{std::min(64, o.precision_cap), o.precision_cap};
}

// force_open: the statistic's windows are open by definition (prop-a).
Window make_window(const Options& o, bool force_open) {
  if (!o.s.empty() || !o.delta.empty()) {
    if (o.s.empty() || o.delta.empty())
      throw std::invalid_argument("--s and --delta must be given together");
    return window_from_log_scale(parse_rat(o.s), parse_rat(o.delta), o.mirrored,
                                 make_policy(o));
  }
  if (o.window.empty())
    throw std::invalid_argument("need --window <lo>:<hi> or --s/--delta");
  const auto [lo, hi] = parse_pair(o.window, "--window");
  const bool open = force_open || o.window_open;
  return Window::direct(lo, hi, o.mirrored, /*lo_open=*/open, /*hi_open=*/true);
}

std::optional<CylinderSet> load_set(const Options& o) {
  if (o.set_path.empty()) return std::nullopt;
  std::ifstream in(o.set_path);
  if (!in) throw std::invalid_argument("cannot read --set file " + o.set_path);
  std::stringstream ss;
  ss << in.rdbuf();
  return set_from_json(ss.str());
}

Directions parse_directions(const std::string& d) {
  if (d == "forward") return Directions::Forward;
  if (d == "backward") return Directions::Backward;
  if (d == "both") return Directions::Both;
  throw std::invalid_argument("--directions must be forward, backward or both");
}

Prefix parse_point(const std::string& text) {
  if (text.empty()) throw std::invalid_argument("--point is required");
  std::vector<int> sym;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) sym.push_back(std::stoi(part));
  return Prefix(sym);
}

void emit(const Options& o, const std::string& content) {
  if (!o.out_path.empty()) write_file_atomic(o.out_path, content);
}

// ------------------------------------------------------------- handlers

int run_kvalues(const Options& o, std::ostream& out) {
  if (o.max_n < 4) throw std::invalid_argument("--max must be at least 4");
  const std::string csv = csv_kvalues(o.max_n);
  out << csv;
  emit(o, csv);
  return 0;
}

int run_prop51(const Options& o, std::ostream& out) {
  check_depth(o);
  ClaimVariant variant;
  if (o.variant == "corrected")
    variant = ClaimVariant::Corrected;
  else if (o.variant == "printed")
    variant = ClaimVariant::Printed;
  else
    throw std::invalid_argument("--variant must be printed or corrected");
  const auto rows = prop51_check(o.depth, variant, o.jobs);
  out << rows.size() << " violations\n";
  for (std::size_t i = 0; i < rows.size() && i < 10; ++i)
    out << "  " << prefix_str(rows[i].prefix) << " k=" << rows[i].k
        << " n=" << rows[i].n << " expected x_" << rows[i].expected_index
        << "=" << rows[i].expected_value << " got " << rows[i].observed_value
        << "\n";
  if (rows.size() > 10) out << "  ... (" << rows.size() - 10 << " more)\n";
  emit(o, csv_violations(rows));
  return variant == ClaimVariant::Corrected && !rows.empty() ? 1 : 0;
}

int run_bounds(const Options& o, std::ostream& out) {
  check_depth(o);
  const auto rows = interval_bound_report(o.depth, o.from, o.to, o.jobs);
  const std::string csv = csv_bounds(rows);
  out << csv;
  emit(o, csv);
  for (const auto& r : rows)
    if (!r.forward_ok_corrected) {
      out << "corrected bound fails at n=" << r.n << "\n";
      return 1;
    }
  out << "corrected bound holds on all rows\n";
  return 0;
}

int run_decay(const Options& o, std::ostream& out) {
  check_depth(o);
  const CoordinateScheme scheme = make_scheme(o);
  const CeilingSpec spec = make_ceiling(o.ceiling);
  const auto set = load_set(o);
  DecayFamily family;
  if (o.family == "k-intervals") {
    family = KIntervalFamily{o.from, o.to};
  } else if (o.family == "log-scale") {
    if (o.s_from.empty() || o.s_to.empty() || o.s_step.empty() ||
        o.delta.empty())
      throw std::invalid_argument(
          "log-scale family needs --s-from, --s-to, --s-step and --delta");
    const Rat step = parse_rat(o.s_step);
    if (step <= 0) throw std::invalid_argument("--s-step must be positive");
    LogScaleFamily lf{{}, parse_rat(o.delta), make_policy(o)};
    for (Rat sv = parse_rat(o.s_from); sv <= parse_rat(o.s_to); sv += step)
      lf.s_values.push_back(sv);
    if (lf.s_values.empty())
      throw std::invalid_argument("empty s-grid: --s-from exceeds --s-to");
    family = std::move(lf);
  } else {
    throw std::invalid_argument("--family must be k-intervals or log-scale");
  }
  const auto rows =
      decay_table(scheme, spec, set ? &*set : nullptr, family, o.jobs);
  const std::string csv = csv_decay(rows);
  out << csv;
  emit(o, csv);
  if (!o.svg_path.empty()) write_file_atomic(o.svg_path, svg_decay(rows));
  for (const auto& r : rows)
    if (r.union_measure > r.envelope) {
      out << "envelope exceeded at " << r.label << "\n";
      return 1;
    }
  out << "union measure within envelope on all rows\n";
  return 0;
}

int run_delta(const Options& o, std::ostream& out) {
  check_depth(o);
  const CoordinateScheme scheme = make_scheme(o);
  const CeilingSpec spec = make_ceiling(o.ceiling);
  const auto set = load_set(o);
  const Window window = make_window(o, /*force_open=*/false);
  const ReturnReport report =
      return_window_set(scheme, spec, set ? &*set : nullptr, window,
                        parse_directions(o.directions), o.jobs);
  out << "window " << window.str() << "\n"
      << "base " << rat_str(report.base_measure) << "\n"
      << "forward " << rat_str(report.forward.measure) << " (undetermined "
      << rat_str(report.forward.undetermined_mass) << ", boundary "
      << rat_str(report.forward.boundary_mass) << ")\n"
      << "backward " << rat_str(report.backward.measure) << " (undetermined "
      << rat_str(report.backward.undetermined_mass) << ", boundary "
      << rat_str(report.backward.boundary_mass) << ")\n"
      << "union " << rat_str(report.combined.measure) << " (undetermined "
      << rat_str(report.combined.undetermined_mass) << ")\n";
  emit(o, report_to_json(report).dump(2) + "\n");
  return 0;
}

int run_lambda_rect(const Options& o, std::ostream& out) {
  check_depth(o);
  const CoordinateScheme scheme = make_scheme(o);
  const CeilingSpec spec = make_ceiling(o.ceiling);
  const auto set = load_set(o);
  if (o.band.empty()) throw std::invalid_argument("--band <a>:<b> is required");
  const auto [a, b] = parse_pair(o.band, "--band");
  const Window window = make_window(o, /*force_open=*/false);
  const RectangleReport report = rectangle_flow_window_measure(
      scheme, spec, set ? &*set : nullptr, a, b, window, o.jobs);
  out << "window " << window.str() << " band [" << rat_str(a) << ", "
      << rat_str(b) << "]\n"
      << "measure " << rat_str(report.measure) << "\n"
      << "undetermined " << rat_str(report.undetermined_mass) << "\n";
  emit(o, report_to_json(report).dump(2) + "\n");
  return 0;
}

int run_prop_a(const Options& o, std::ostream& out) {
  check_depth(o);
  const CoordinateScheme scheme = make_scheme(o);
  const auto set = load_set(o);
  Window window = make_window(o, /*force_open=*/true);
  window.mirrored = true;  // the statistic tests both cocycle signs
  std::optional<Rat> eta;
  if (!o.eta.empty()) eta = parse_rat(o.eta);
  const PropAReport report = prop_a_window_set(
      scheme, set ? &*set : nullptr, window, make_policy(o), eta, o.jobs);
  out << "window " << window.str() << "\n"
      << "measure " << rat_str(report.measure) << " of base "
      << rat_str(report.base_measure) << "\n";
  if (report.eta)
    out << "exceeds eta*base (eta=" << rat_str(*report.eta) << "): "
        << (*report.exceeds_eta ? "true" : "false") << "\n";
  emit(o, report_to_json(report).dump(2) + "\n");
  return 0;
}

int run_flow_eval(const Options& o, std::ostream& out) {
  check_depth(o);
  const CoordinateScheme scheme = make_scheme(o);
  const CeilingSpec spec = make_ceiling(o.ceiling);
  const FlowPoint point{parse_point(o.point), parse_rat(o.height)};
  require_flow_point(spec, scheme, point);
  const FlowOutcome outcome = flow_apply(spec, scheme, point, parse_rat(o.t));
  const std::string text = outcome_to_json(outcome).dump(2) + "\n";
  out << text;
  emit(o, text);
  return 0;
}

int run_conjugacy(const Options& o, std::ostream& out) {
  check_depth(o);
  const CoordinateScheme scheme = make_scheme(o);
  const CeilingSpec spec = make_ceiling(o.ceiling);
  const auto set = load_set(o);
  const Window window = make_window(o, /*force_open=*/false);

  if (!o.weighting_path.empty()) {
    std::ifstream in(o.weighting_path);
    if (!in)
      throw std::invalid_argument("cannot read --weighting file " +
                                  o.weighting_path);
    std::stringstream ss;
    ss << in.rdbuf();
    const Weighting weighting = weighting_from_json(ss.str());
    const WeightingReport report = weighting_consistency(
        scheme, spec, weighting, set ? &*set : nullptr, window, o.jobs);
    out << "base " << rat_str(report.base_measure) << "\n"
        << "weighted " << rat_str(report.weighted_measure) << "\n"
        << "max density " << rat_str(report.max_density) << "\n"
        << "dominated " << (report.dominated ? "true" : "false") << "\n";
    emit(o, report_to_json(report).dump(2) + "\n");
    return report.dominated ? 0 : 1;
  }

  // identity on every coordinate, then the requested overrides
  std::vector<std::vector<int>> perms(static_cast<std::size_t>(o.depth));
  for (int n = 1; n <= o.depth; ++n) {
    auto& p = perms[static_cast<std::size_t>(n - 1)];
    p.resize(static_cast<std::size_t>(scheme.size(n)));
    for (int v = 0; v < scheme.size(n); ++v) p[static_cast<std::size_t>(v)] = v;
  }
  for (const std::string& entry : o.perms) {
    const auto pos = entry.find(':');
    if (pos == std::string::npos)
      throw std::invalid_argument("--perm must be n:v0,v1,...");
    const int n = std::stoi(entry.substr(0, pos));
    if (n < 1 || n > o.depth)
      throw std::invalid_argument("--perm coordinate out of range: " + entry);
    std::vector<int> values;
    std::stringstream ss(entry.substr(pos + 1));
    std::string part;
    while (std::getline(ss, part, ',')) values.push_back(std::stoi(part));
    perms[static_cast<std::size_t>(n - 1)] = std::move(values);
  }
  const Relabeling relabeling{std::move(perms)};

  std::optional<CeilingSpec> override_spec;
  if (!o.conjugated_ceiling.empty())
    override_spec = make_ceiling(o.conjugated_ceiling);
  const ConjugacyReport report = conjugacy_consistency(
      scheme, spec, relabeling, set ? &*set : nullptr, window, o.jobs,
      override_spec ? &*override_spec : nullptr);
  out << "original  forward " << rat_str(report.original_forward)
      << " backward " << rat_str(report.original_backward) << " union "
      << rat_str(report.original_union) << "\n"
      << "conjugated forward " << rat_str(report.conjugated_forward)
      << " backward " << rat_str(report.conjugated_backward) << " union "
      << rat_str(report.conjugated_union) << "\n"
      << "equal " << (report.equal ? "true" : "false") << "\n";
  emit(o, report_to_json(report).dump(2) + "\n");
  if (override_spec) return 0;  // mismatch is the point of the control
  return report.equal ? 0 : 1;
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out) {
  Options o;
  try {
    for (std::size_t i = 0; i < args.size(); ++i) {
      if (args[i] == "--config" && i + 1 < args.size())
        apply_config(o, args[i + 1]);
      else if (args[i].rfind("--config=", 0) == 0)
        apply_config(o, args[i].substr(9));
    }
  } catch (const std::exception& e) {
    out << "error: " << e.what() << "\n";
    return 2;
  }

  CLI::App app{"exact return-window statistics for odometer suspension flows"};
  app.require_subcommand(1);
  std::string config_path;  // consumed in the pre-pass above

  auto add_common = [&](CLI::App* c) {
    c->add_option("--config", config_path, "JSON file with flag defaults");
    c->add_option("--jobs", o.jobs, "worker threads for scans");
  };
  auto add_depth = [&](CLI::App* c) {
    c->add_option("--depth", o.depth, "truncation depth M, at least 3");
    c->add_flag("--allow-large-depth", o.allow_large_depth,
                "permit depth 8 and beyond");
  };
  auto add_system = [&](CLI::App* c) {
    c->add_option("--scheme", o.scheme, "paper | bernoulli:<p/q>");
    c->add_option("--ceiling", o.ceiling, "factorial | constant:<c>");
  };
  auto add_window = [&](CLI::App* c) {
    c->add_option("--window", o.window, "<lo>:<hi>, half-open unless --open");
    c->add_flag("--open", o.window_open, "treat --window as open-open");
    c->add_option("--s", o.s, "certified window center exponent");
    c->add_option("--delta", o.delta, "certified window half-width");
    c->add_flag("--mirrored", o.mirrored, "also test the reflected interval");
    c->add_option("--precision-cap", o.precision_cap,
                  "certification cap in bits");
  };
  auto add_set = [&](CLI::App* c) {
    c->add_option("--set", o.set_path, "JSON cylinder set (default: full space)");
  };
  auto add_out = [&](CLI::App* c) {
    c->add_option("--out", o.out_path, "output file, written atomically");
  };

  CLI::App* kvalues = app.add_subcommand("kvalues", "factorial-product table");
  kvalues->add_option("--max", o.max_n, "largest n to tabulate");
  add_common(kvalues);
  add_out(kvalues);

  CLI::App* prop51 =
      app.add_subcommand("prop51", "exhaustive coordinate-claim check");
  add_depth(prop51);
  prop51->add_option("--variant", o.variant, "printed | corrected");
  add_common(prop51);
  add_out(prop51);

  CLI::App* bounds =
      app.add_subcommand("bounds", "per-interval measures vs bounds");
  add_depth(bounds);
  bounds->add_option("--from", o.from, "first n");
  bounds->add_option("--to", o.to, "last n");
  add_common(bounds);
  add_out(bounds);

  CLI::App* decay = app.add_subcommand("decay", "return-measure decay table");
  add_depth(decay);
  add_system(decay);
  decay->add_option("--family", o.family, "k-intervals | log-scale");
  decay->add_option("--from", o.from, "first n (k-intervals)");
  decay->add_option("--to", o.to, "last n (k-intervals)");
  decay->add_option("--s-from", o.s_from, "grid start (log-scale)");
  decay->add_option("--s-to", o.s_to, "grid end (log-scale)");
  decay->add_option("--s-step", o.s_step, "grid step (log-scale)");
  decay->add_option("--delta", o.delta, "half-width (log-scale)");
  decay->add_option("--precision-cap", o.precision_cap,
                    "certification cap in bits");
  add_set(decay);
  add_common(decay);
  add_out(decay);
  decay->add_option("--svg", o.svg_path, "decay curve SVG output");

  CLI::App* delta =
      app.add_subcommand("delta", "base return set for a window");
  add_depth(delta);
  add_system(delta);
  add_window(delta);
  delta->add_option("--directions", o.directions, "forward | backward | both");
  add_set(delta);
  add_common(delta);
  add_out(delta);

  CLI::App* lambda_rect =
      app.add_subcommand("lambda-rect", "rectangle return measure");
  add_depth(lambda_rect);
  add_system(lambda_rect);
  add_window(lambda_rect);
  lambda_rect->add_option("--band", o.band, "<a>:<b> fiber height band");
  add_set(lambda_rect);
  add_common(lambda_rect);
  add_out(lambda_rect);

  CLI::App* prop_a =
      app.add_subcommand("prop-a", "cocycle window statistic");
  add_depth(prop_a);
  prop_a->add_option("--scheme", o.scheme, "paper | bernoulli:<p/q>");
  add_window(prop_a);
  prop_a->add_option("--eta", o.eta, "threshold for the base-measure fraction");
  add_set(prop_a);
  add_common(prop_a);
  add_out(prop_a);

  CLI::App* flow_eval = app.add_subcommand("flow-eval", "evaluate the flow");
  add_depth(flow_eval);
  add_system(flow_eval);
  flow_eval->add_option("--point", o.point, "base word, e.g. 0,0,0");
  flow_eval->add_option("--height", o.height, "fiber height (rational)");
  flow_eval->add_option("--t", o.t, "flow time (rational)");
  add_common(flow_eval);
  add_out(flow_eval);

  CLI::App* conjugacy =
      app.add_subcommand("conjugacy", "relabeling/reweighting consistency");
  add_depth(conjugacy);
  add_system(conjugacy);
  add_window(conjugacy);
  conjugacy->add_option("--perm", o.perms,
                        "coordinate permutation n:v0,v1,... (repeatable)");
  conjugacy->add_option("--weighting", o.weighting_path,
                        "JSON density file (switches to the weighted check)");
  conjugacy->add_option("--conjugated-ceiling", o.conjugated_ceiling,
                        "override the conjugated side's ceiling");
  add_set(conjugacy);
  add_common(conjugacy);
  add_out(conjugacy);

  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("odoflow");
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, out);
    return code == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand(kvalues)) return run_kvalues(o, out);
    if (app.got_subcommand(prop51)) return run_prop51(o, out);
    if (app.got_subcommand(bounds)) return run_bounds(o, out);
    if (app.got_subcommand(decay)) return run_decay(o, out);
    if (app.got_subcommand(delta)) return run_delta(o, out);
    if (app.got_subcommand(lambda_rect)) return run_lambda_rect(o, out);
    if (app.got_subcommand(prop_a)) return run_prop_a(o, out);
    if (app.got_subcommand(flow_eval)) return run_flow_eval(o, out);
    if (app.got_subcommand(conjugacy)) return run_conjugacy(o, out);
  } catch (const PrecisionExhaustedError& e) {
    out << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    out << "error: " << e.what() << "\n";
    return 2;
  }
  out << "error: no subcommand\n";
  return 2;
}

}  // namespace odoflow
