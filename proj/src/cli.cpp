#include "weakperf/cli.hpp"

#include <chrono>
#include <deque>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <sstream>

#include <CLI11.hpp>

#include "weakperf/config.hpp"
#include "weakperf/content.hpp"
#include "weakperf/harmonic.hpp"
#include "weakperf/kernels.hpp"
#include "weakperf/perfectness.hpp"
#include "weakperf/report.hpp"
#include "weakperf/verify.hpp"

namespace weakperf {

namespace {

using nlohmann::json;

struct Binding {
  std::string section;
  std::string key;
  std::string value;
  CLI::Option* option = nullptr;
};

struct Command {
  CLI::App* app = nullptr;
  std::string name;
  std::string config_path;
  Config::Schema schema;
  std::deque<Binding> bindings;

  void bind(const std::string& flag, const std::string& section, const std::string& key, const std::string& help) {
    bindings.push_back({section, key, "", nullptr});
    auto& b = bindings.back();
    b.option = app->add_option(flag, b.value, help);
    schema[section].insert(key);
  }

  Config load() const {
    Config cfg = config_path.empty() ? Config{} : Config::load(config_path);
    for (const auto& b : bindings) {
      if (b.option->count() > 0) cfg.set(b.section, b.key, b.value);
    }
    cfg.check_schema(schema);
    return cfg;
  }
};

// Output sinks and timing shared by every command.
struct Run {
  const Config& cfg;
  std::ostream& out;
  std::string command;
  std::string precision;
  std::unique_ptr<std::ofstream> csv_file;
  std::ostream* csv = nullptr;
  std::string summary_path;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

  Run(const Config& c, std::ostream& o, std::string name, std::string prec)
      : cfg(c), out(o), command(std::move(name)), precision(std::move(prec)) {
    const std::string csv_path = cfg.text("output", "csv", "-");
    summary_path = cfg.text("output", "summary", "");
    if (csv_path == "-") {
      csv = &out;
    } else {
      csv_file = std::make_unique<std::ofstream>(csv_path);
      if (!*csv_file) throw ConfigError("cannot write csv to '" + csv_path + "'");
      csv = csv_file.get();
    }
  }

  json summary() const {
    json j = make_summary(command, precision);
    j["config"] = cfg.entries();
    return j;
  }

  void finish(json j) {
    j["timing"] = {{"wall_seconds", std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()}};
    if (!summary_path.empty()) write_summary(j, summary_path, out);
  }
};

std::string num(long double v) { return format_number(v); }

template <typename S>
S positive(const Config& cfg, const std::string& section, const std::string& key, double fallback, double hi) {
  const double v = cfg.real(section, key, fallback, 0, hi);
  if (!(v > 0)) throw ConfigError("[" + section + "] " + key + ": must be positive");
  return S(v);
}

template <typename S>
CantorLengths<S> cantor_lengths(const Config& cfg, const std::string& section, const std::string& family, int depth) {
  if (family == "u1") {
    const double alpha = cfg.real(section, "alpha", 2, 1, 64);
    if (!(alpha > 1)) throw ConfigError("[" + section + "] alpha: must exceed 1");
    return build_u1_lengths<S>(positive<S>(cfg, section, "l0", 0.1, 0.5), S(alpha), depth);
  }
  const S beta = positive<S>(cfg, section, "beta", 3, 64);
  return build_u2_lengths<S>(positive<S>(cfg, section, "l0", std::exp(-10.0), 0.5), beta, depth);
}

template <typename S>
GaugeFunction<S> default_tree_gauge(const Config& cfg, const std::string& section, const std::string& set_section,
                                    const std::string& family) {
  const std::string literal = cfg.text(section, "h", "");
  if (!literal.empty()) return parse_gauge<S>(literal);
  if (family == "u1") return GaugeFunction<S>::power(S(cfg.real(set_section, "alpha", 2, 1, 64)), S(0.9));
  return GaugeFunction<S>::log_power(positive<S>(cfg, set_section, "beta", 3, 64), S(0.5));
}

// ---------------------------------------------------------------- generate

template <typename S>
int cmd_generate(Run& run) {
  const auto& cfg = run.cfg;
  const std::string family = cfg.choice("set", "family", "u1", {"u1", "u2"});
  const int depth = int(cfg.integer("set", "depth", 6, 0, 24));
  const bool midpoints = cfg.flag("set", "midpoints", false);
  const std::filesystem::path dir = cfg.text("output", "dir", ".");
  const std::string prefix = cfg.text("output", "prefix", family);
  const long tree_depth = cfg.integer("tree", "depth", 0, 0, 20);

  const auto lengths = cantor_lengths<S>(cfg, "set", family, depth);
  const CantorIntervalSet<S> intervals(lengths);
  auto points = std::make_shared<const CantorPointSet<S>>(intervals, midpoints);

  std::filesystem::create_directories(dir);
  const auto lengths_path = dir / (prefix + "_lengths.txt");
  const auto points_path = dir / (prefix + "_points.txt");
  {
    std::ofstream f(lengths_path);
    if (!f) throw ConfigError("cannot write '" + lengths_path.string() + "'");
    write_lengths(f, lengths);
  }
  {
    std::ofstream f(points_path);
    if (!f) throw ConfigError("cannot write '" + points_path.string() + "'");
    write_point_cloud(f, points->points(), points->resolution(), points->diameter());
  }

  CsvWriter csv(*run.csv, {"quantity", "value", "witness"});
  csv.row({"intervals", std::to_string(intervals.interval_count(depth)), "depth " + std::to_string(depth)});
  csv.row({"points", std::to_string(points->size()), points_path.string()});
  csv.row({"resolution", num(points->resolution()), ""});
  csv.row({"leaf_log_inverse_length", num(intervals.log_inv_length(depth)), lengths_path.string()});

  json j = run.summary();
  j["family"] = family;
  j["depth"] = depth;
  j["intervals"] = intervals.interval_count(depth);
  j["points"] = points->size();
  j["files"] = {lengths_path.string(), points_path.string()};

  if (tree_depth > 0) {
    const auto h = default_tree_gauge<S>(cfg, "tree", "set", family);
    const S radius = positive<S>(cfg, "tree", "radius", double(intervals.length(0)) / 2, 1);
    const S c_tilde = S(cfg.real("tree", "c_tilde", 0.25, 0, 0.5));
    const auto root = std::size_t(cfg.integer("tree", "root", 0, 0, long(points->size()) - 1));
    const auto tree = build_disc_tree(points, root, radius, h, c_tilde, int(tree_depth));
    const auto tree_path = dir / (prefix + "_tree.txt");
    std::ofstream f(tree_path);
    if (!f) throw ConfigError("cannot write '" + tree_path.string() + "'");
    write_tree(f, tree);
    const auto check = check_tree_structure(tree);
    csv.row({"tree_nodes", std::to_string(tree.size()), tree_path.string()});
    csv.row({"deepest_radius", num(tree.radius_at_depth(int(tree_depth))), h.literal()});
    j["files"].push_back(tree_path.string());
    j["tree"] = {{"depth", tree_depth}, {"nodes", tree.size()}, {"gauge", h.literal()},
                 {"deepest_radius", json_number(tree.radius_at_depth(int(tree_depth)))},
                 {"structure_ok", check.ok()}};
  }
  run.finish(j);
  return exit_pass;
}

// -------------------------------------------------------- test-perfectness

template <typename S, typename Set>
int perfectness_on(Run& run, const Set& sample, const std::optional<FitResult<S>>& fit, const GaugeFunction<S>& h,
                   S r0, const ProbeGrid& grid, json j) {
  const auto cert = test_h_perfectness(sample, h, r0, grid);
  CsvWriter csv(*run.csv, {"center", "radius", "inner", "hit", "margin_only", "margin"});
  for (const auto& p : cert.probes) {
    csv.row({std::to_string(p.center), num(p.radius), num(p.inner), p.hit ? "1" : "0", p.margin_only ? "1" : "0",
             num(p.margin)});
  }
  j["condition"] = std::string(to_string(cert.condition));
  j["gauge"] = cert.gauge;
  j["r0"] = json_number(r0);
  j["probes"] = cert.probes.size();
  j["pass"] = cert.pass;
  j["worst_margin"] = json_number(cert.worst_margin);
  j["resolution_caveat"] = cert.resolution_caveat;
  if (cert.counterexample) {
    j["counterexample"] = {{"center", cert.counterexample->center},
                           {"radius", json_number(cert.counterexample->radius)},
                           {"inner", json_number(cert.counterexample->inner)}};
  }
  if (fit) {
    j["fit"] = {{"family", std::string(to_string(fit->family))}, {"exponent", json_number(fit->exponent)},
                {"coefficient", json_number(fit->coefficient)}, {"vacuous", fit->vacuous},
                {"gaps", fit->gap_count}, {"scales", fit->scales_used}, {"note", fit->note}};
  }
  run.finish(j);
  return cert.pass ? exit_pass : exit_check_failed;
}

template <typename S>
int cmd_test_perfectness(Run& run) {
  const auto& cfg = run.cfg;
  const std::string source = cfg.choice("set", "source", "u1", {"u1", "u2", "segment", "file"});
  const std::string fit_choice = cfg.choice("test", "fit", "auto", {"auto", "none", "u1", "u2"});
  const std::string literal = cfg.text("test", "gauge", "");
  ProbeGrid grid;
  grid.max_centers = std::size_t(cfg.integer("test", "max_centers", 512, 1, 1 << 20));
  json j = run.summary();
  j["source"] = source;

  auto resolve = [&](const auto& fit_fn, S r0) -> std::pair<std::optional<FitResult<S>>, GaugeFunction<S>> {
    std::string family = fit_choice;
    if (family == "auto") family = literal.empty() ? (source == "u2" ? "u2" : "u1") : "none";
    if (family == "none") {
      if (literal.empty()) throw ConfigError("[test] gauge: required when fit = none");
      return {std::nullopt, parse_gauge<S>(literal)};
    }
    if (!literal.empty()) throw ConfigError("[test] gauge and fit are exclusive");
    auto fit = fit_fn(family == "u1" ? ConditionFamily::u1 : ConditionFamily::u2, r0);
    return {fit, fit.gauge()};
  };

  if (source == "u1" || source == "u2") {
    const int depth = int(cfg.integer("set", "depth", 8, 0, 24));
    const CantorIntervalSet<S> intervals(cantor_lengths<S>(cfg, "set", source, depth));
    const S r0 = positive<S>(cfg, "test", "r0", double(intervals.length(0)) / 2, 1);
    const CantorPointSet<S> sample(intervals, true);
    auto [fit, h] = resolve([&](ConditionFamily f, S r) { return fit_condition_parameters(sample, f, r, grid); }, r0);
    return perfectness_on(run, sample, fit, h, r0, grid, j);
  }
  std::optional<PlanarSetSample<S>> sample;
  if (source == "segment") {
    const long n = cfg.integer("set", "points", 200, 2, 1 << 20);
    std::vector<Point<S>> pts;
    for (long i = 0; i < n; ++i) pts.emplace_back(S(i) / S(n - 1), 0);
    sample.emplace(std::move(pts), S(0.5) / S(n - 1));
  } else {
    const std::string path = cfg.text("set", "path", "");
    if (path.empty()) throw ConfigError("[set] path: required for source = file");
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open point cloud '" + path + "'");
    sample.emplace(read_point_cloud<S>(in));
  }
  const S r0 = positive<S>(cfg, "test", "r0", double(sample->diameter()) / 2, 1e6);
  auto [fit, h] = resolve([&](ConditionFamily f, S r) { return fit_condition_parameters(*sample, f, r, grid); }, r0);
  return perfectness_on(run, *sample, fit, h, r0, grid, j);
}

// ---------------------------------------------------------- kernel-profile

template <typename S>
int cmd_kernel_profile(Run& run) {
  const auto& cfg = run.cfg;
  const auto rs = cfg.reals("kernel", "r", {0.01, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5}, 1e-300, 0.5);
  const auto ts = cfg.reals("kernel", "t", {0.1, 0.25, 0.5}, 1e-300, 0.5);
  const S tol = positive<S>(cfg, "kernel", "tol", 1e-12, 1);
  CsvWriter csv(*run.csv, {"r", "t", "abs_z", "series_value", "tail_bound", "upper_bound_21", "margin"});
  S worst = std::numeric_limits<S>::infinity();
  std::size_t failures = 0;
  for (double r_in : rs) {
    for (double t_in : ts) {
      const S r = S(r_in), t = S(t_in);
      const S abs_z = std::pow(r, t);
      const auto k = bergman_annulus(r, abs_z, tol);
      const S bound = bergman_upper_bound(r, t);
      const S margin = bound - k.value;
      worst = std::min(worst, margin);
      if (margin < S(-1e-10)) ++failures;
      csv.row({num(r), num(t), num(abs_z), num(k.value), num(k.tail_bound), num(bound), num(margin)});
    }
  }
  json j = run.summary();
  j["rows"] = csv.rows();
  j["worst_margin"] = json_number(worst);
  j["failures"] = failures;
  j["pass"] = failures == 0;
  run.finish(j);
  return failures == 0 ? exit_pass : exit_check_failed;
}

// -------------------------------------------------------- poincare-profile

template <typename S>
int cmd_poincare_profile(Run& run) {
  const auto& cfg = run.cfg;
  const std::string kind = cfg.choice("poincare", "domain", "punctured", {"punctured", "symmetric", "centered", "sampled"});
  const auto n_boundary = std::size_t(cfg.integer("poincare", "boundary_points", 256, 3, 1 << 16));
  const S c_probe = S(cfg.real("poincare", "c_probe", 1, 0, 1e6));
  const long n = cfg.integer("poincare", "points", 20, 1, 1 << 16);
  PoincareDomain<S> domain = PoincareDomain<S>::sampled();
  std::optional<PlanarSetSample<S>> boundary;
  S lo = 0, hi = 1;
  if (kind == "punctured") {
    domain = PoincareDomain<S>::punctured_disk();
    boundary.emplace(punctured_disk_boundary<S>(n_boundary));
  } else if (kind == "symmetric") {
    const double R = cfg.real("poincare", "R", 3, 1, 1e100);
    if (!(R > 1)) throw ConfigError("[poincare] R: must exceed 1");
    domain = PoincareDomain<S>::symmetric_annulus(S(R));
    lo = 1 / S(R);
    hi = S(R);
  } else if (kind == "centered") {
    domain = PoincareDomain<S>::centered_annulus(positive<S>(cfg, "poincare", "r", 1, 1e100),
                                                 positive<S>(cfg, "poincare", "m", 1, 100));
    lo = domain.r * std::exp(-domain.m);
    hi = domain.r * std::exp(domain.m);
  }
  if (kind == "symmetric" || kind == "centered") boundary.emplace(annulus_boundary(lo, hi, n_boundary));
  if (kind == "sampled") throw UnsupportedDomain("no closed-form Poincare density for a sampled domain");

  std::vector<Point<S>> zs;
  if (cfg.has("poincare", "abs_z")) {
    for (double a : cfg.reals("poincare", "abs_z", {}, 0, 1e100)) zs.emplace_back(S(a), 0);
  } else if (kind == "punctured") {
    for (long k = 0; k < n; ++k) zs.emplace_back(std::exp(-S(k + 2)), 0);  // e^-2, e^-3, ...
  } else {
    for (long k = 0; k < n; ++k) zs.emplace_back(lo * std::pow(hi / lo, (S(k) + S(0.5)) / S(n)), 0);
  }
  const bool banded = cfg.has("poincare", "band_lo") || cfg.has("poincare", "band_hi");
  const S band_lo = S(cfg.real("poincare", "band_lo", 0, 0, 1e100));
  const S band_hi = S(cfg.real("poincare", "band_hi", 1e100, 0, 1e100));
  const auto report = check_bp_estimate(domain, zs, *boundary, c_probe, band_lo, band_hi);

  CsvWriter csv(*run.csv, {"abs_z", "density", "boundary_distance", "beta", "ratio"});
  for (const auto& row : report.rows) {
    csv.row({num(length(row.z)), num(row.density), num(row.delta), num(row.beta), num(row.ratio)});
  }
  json j = run.summary();
  j["domain"] = kind;
  j["rows"] = csv.rows();
  j["min_ratio"] = json_number(report.min_ratio);
  j["max_ratio"] = json_number(report.max_ratio);
  if (banded) {
    j["band"] = {json_number(band_lo), json_number(band_hi)};
    j["pass"] = report.pass;
  }
  run.finish(j);
  return !banded || report.pass ? exit_pass : exit_check_failed;
}

// ----------------------------------------------------------- harmonic-bound

template <typename S>
CapacityProfile<S> capacity_profile(const Config& cfg) {
  const std::string kind = cfg.choice("harmonic", "profile", "power", {"power", "log"});
  const S C = positive<S>(cfg, "harmonic", "C", 0.5, 1e6);
  if (kind == "power") {
    return CapacityProfile<S>::power_law(C, S(cfg.real("harmonic", "alpha", 1.5, 1, 1.999999)), 1);
  }
  return CapacityProfile<S>::log_corrected(C, positive<S>(cfg, "harmonic", "beta", 1, 100),
                                           S(std::exp(-std::numbers::e)));
}

template <typename S>
std::vector<S> geometric(S top, S ratio, long n) {
  std::vector<S> out;
  for (long i = 0; i < n; ++i) out.push_back(top * std::pow(ratio, S(i) / S(std::max(1L, n - 1))));
  return out;
}

template <typename S>
int cmd_harmonic_bound(Run& run) {
  const auto& cfg = run.cfg;
  const std::string method = cfg.choice("harmonic", "method", "chen", {"phi", "chen", "lhmd1", "lhmd2"});
  const long n = cfg.integer("harmonic", "points", 12, 1, 100000);
  CsvWriter csv(*run.csv, {"method", "a_x", "a_y", "r", "z_dist", "bound", "params"});
  json j = run.summary();
  j["method"] = method;
  auto emit = [&](const std::string& m, S r, S z, S v, const std::string& params) {
    csv.row({m, "0", "0", num(r), num(z), num(v), params});
  };

  if (method == "phi") {
    const S inner = positive<S>(cfg, "harmonic", "inner", 0.01, 1e100);
    const S outer = positive<S>(cfg, "harmonic", "outer", 1, 1e100);
    if (!(inner < outer)) throw ConfigError("[harmonic] inner must be below outer");
    const std::string params = "inner=" + num(inner) + ";outer=" + num(outer);
    for (S s : geometric(outer, inner / outer, n)) emit("phi", outer, s, annulus_comparison_phi(inner, outer, s), params);
    j["rows"] = csv.rows();
    run.finish(j);
    return exit_pass;
  }

  const auto cap = capacity_profile<S>(cfg);
  const S kappa = positive<S>(cfg, "harmonic", "kappa", 0.05, 0.0625);
  const S c_kappa = positive<S>(cfg, "harmonic", "c_kappa", 1, 1e6);
  const S span = positive<S>(cfg, "harmonic", "span", 1e-12, 1);
  const std::string cap_params = "kappa=" + num(kappa) + ";C_kappa=" + num(c_kappa) + ";C=" + num(cap.coefficient) +
                                 (cap.kind == CapacityKind::power_law ? ";p=" : ";beta=") + num(cap.exponent);
  if (method == "chen") {
    const S r = positive<S>(cfg, "harmonic", "r", 0.01, 1);
    const S upper = chen_upper_limit(kappa, r);
    for (S z : geometric(upper, span, n)) {
      const auto b = chen_upper_bound(z, upper, kappa, cap, c_kappa);
      emit("chen", r, z, b.value, cap_params + (b.clamped ? ";clamped" : ""));
    }
    j["rows"] = csv.rows();
    run.finish(j);
    return exit_pass;
  }

  if ((method == "lhmd1") != (cap.kind == CapacityKind::power_law)) {
    throw ConfigError("[harmonic] lhmd1 needs profile = power, lhmd2 needs profile = log");
  }
  const S default_r1 = method == "lhmd1" ? S(0.01) : S(std::exp(-std::exp(2.0))) / 2;
  const S r1 = positive<S>(cfg, "harmonic", "r1", double(default_r1), 1);
  const auto k = lhmd_constants(cap, kappa, r1, c_kappa);
  const std::string params = (method == "lhmd1" ? "gamma=" : "eta=") + num(k.exponent) + ";C3=" + num(k.c3);
  std::size_t violations = 0;
  S worst_gap = std::numeric_limits<S>::infinity();
  for (S r : {r1, r1 / 10, r1 / 100}) {
    const S upper = chen_upper_limit(kappa, r);
    for (S z : geometric(upper, span, n)) {
      const auto chen = chen_upper_bound(z, upper, kappa, cap, c_kappa);
      const auto lhmd = method == "lhmd1" ? lhmd1_bound(z, r, k.exponent, k.c3) : lhmd2_bound(z, r, k.exponent, k.c3);
      emit("chen", r, z, chen.value, cap_params);
      emit(method, r, z, lhmd.value, params + (lhmd.clamped ? ";clamped" : ""));
      worst_gap = std::min(worst_gap, lhmd.value - chen.value);
      if (chen.value > lhmd.value * (1 + S(1e-12))) ++violations;
    }
  }
  j["exponent"] = json_number(k.exponent);
  j["c3"] = json_number(k.c3);
  j["r1"] = json_number(r1);
  j["rows"] = csv.rows();
  j["worst_gap"] = json_number(worst_gap);
  j["violations"] = violations;
  j["pass"] = violations == 0;
  run.finish(j);
  return violations == 0 ? exit_pass : exit_check_failed;
}

// ------------------------------------------------------------------ content

template <typename S>
json disc_json(const AnchoredDisc<S>& d) {
  return {{"anchor", d.anchor}, {"offset", {json_number(d.offset.x()), json_number(d.offset.y())}},
          {"radius", json_number(d.radius)}};
}

template <typename S>
int cmd_content(Run& run) {
  const auto& cfg = run.cfg;
  const std::string family = cfg.choice("content", "set", "u1", {"u1", "u2"});
  const int depth = int(cfg.integer("content", "depth", family == "u1" ? 10 : 8, 3, 20));
  const auto trials = std::size_t(cfg.integer("content", "trials", 1000, 1, 100000000));
  const auto seed = std::uint64_t(cfg.integer("content", "seed", 20240611, 0, std::numeric_limits<long>::max()));
  const S factor = S(cfg.real("content", "factor", 18, 1, 1e12));
  const S c_tilde = S(cfg.real("content", "c_tilde", 0.25, 0, 0.5));
  const int cantor_depth = int(cfg.integer("content", "cantor_depth", std::min(depth + 2, 24), depth, 24));

  const auto lengths = cantor_lengths<S>(cfg, "content", family, cantor_depth);
  const CantorIntervalSet<S> intervals(lengths);
  auto points = std::make_shared<const CantorPointSet<S>>(intervals, false);
  const auto h = default_tree_gauge<S>(cfg, "content", "content", family);
  const S radius = positive<S>(cfg, "content", "radius", double(intervals.length(0)) / 2, 1);
  auto tree = std::make_shared<const DiscTree<CantorPointSet<S>>>(build_disc_tree(points, 0, radius, h, c_tilde, depth));
  MassDistribution<CantorPointSet<S>> mu(tree);

  std::optional<GaugeFunction<S>> content_gauge;
  std::string gauge_literal;
  S exponent = 0, scale = 0, lower = 0, upper = 0;
  std::string upper_cover, convention;
  DiscMassReport<S> validation;
  const std::string override_literal = cfg.text("content", "gauge", "");
  if (override_literal.empty()) {
    const auto est = content_forward_certificate(tree, trials, seed, factor);
    content_gauge = est.content_gauge;
    gauge_literal = est.gauge;
    exponent = est.exponent;
    scale = est.scale;
    lower = est.lower;
    upper = est.upper;
    upper_cover = est.upper_cover;
    convention = est.convention;
    validation = est.validation;
  } else {
    const auto g = monotone_extension(parse_gauge<S>(override_literal));
    content_gauge = g;
    gauge_literal = g.literal();
    exponent = g.exponent();
    scale = g.scale();
    validation = validate_disc_mass_inequality(mu, g, factor, trials, seed);
    const auto up = tree_content_upper(*tree, g);
    upper = up.value;
    upper_cover = up.cover.description;
    if (validation.passed) lower = mass_lower_bound(mu, g, &validation, factor);
  }
  const auto level = content_upper(intervals, *content_gauge, 1u << 12);
  const bool certified = validation.passed && lower <= upper * (1 + S(1e-12)) + S(1e-12);

  CsvWriter csv(*run.csv, {"quantity", "value", "witness"});
  std::string witness;
  if (validation.witness) {
    const auto& w = *validation.witness;
    witness = "anchor=" + std::to_string(w.anchor) + ";offset=" + num(w.offset.x()) + ";radius=" + num(w.radius) +
              ";mass=" + num(validation.witness_mass);
  }
  csv.row({"exponent", num(exponent), gauge_literal});
  csv.row({"scale", num(scale), convention});
  csv.row({"upper_bound_tree", num(upper), upper_cover});
  csv.row({"upper_bound_intervals", num(level.value), level.cover.description});
  csv.row({"lower_bound", num(lower), validation.passed ? "validated factor " + num(factor) : "not validated"});
  csv.row({"worst_ratio", num(validation.worst_ratio), "smallest passing factor"});
  csv.row({"violations", std::to_string(validation.violations), witness});
  csv.row({"certified", certified ? "1" : "0", ""});

  json j = run.summary();
  j["family"] = family;
  j["tree"] = {{"depth", depth}, {"gauge", h.literal()}, {"root_radius", json_number(radius)},
               {"deepest_radius", json_number(tree->radius_at_depth(depth))}};
  j["gauge"] = gauge_literal;
  j["convention"] = convention;
  j["exponent"] = json_number(exponent);
  j["scale"] = json_number(scale);
  j["upper"] = json_number(std::min(upper, level.value));
  j["lower"] = json_number(lower);
  j["validation"] = {{"trials", trials}, {"seed", seed}, {"factor", json_number(factor)},
                     {"violations", validation.violations}, {"worst_ratio", json_number(validation.worst_ratio)},
                     {"passed", validation.passed}};
  if (validation.witness) j["validation"]["witness"] = disc_json(*validation.witness);
  j["certified"] = certified;
  run.finish(j);
  return certified ? exit_pass : exit_check_failed;
}

// ---------------------------------------------------------- verify-theorems

int cmd_verify(Run& run) {
  const auto& cfg = run.cfg;
  std::vector<int> ids = all_check_ids();
  if (cfg.has("verify", "checks")) {
    ids.clear();
    if (!cfg.text("verify", "checks", "").empty()) {
      for (double v : cfg.reals("verify", "checks", {}, 1, 11)) {
        if (v != std::floor(v)) throw ConfigError("[verify] checks: ids are integers 1..11");
        ids.push_back(int(v));
      }
    }
  }
  VerifyOptions options;
  options.seed = std::uint64_t(cfg.integer("verify", "seed", 20240611, 0, std::numeric_limits<long>::max()));
  options.trials = std::size_t(cfg.integer("verify", "trials", 1000, 1, 100000000));
  options.gamma_scale = cfg.flag("verify", "negative_control", false) ? 2 : 1;
  options.parallel = cfg.flag("verify", "parallel", true);

  const auto results = run_checks(ids, options);
  CsvWriter csv(*run.csv, {"id", "name", "pass", "detail"});
  json checks = json::array();
  json timing;
  bool all = true;
  for (const auto& c : results) {
    csv.row({std::to_string(c.id), c.name, c.pass ? "1" : "0", c.detail});
    json m = json::object();
    for (const auto& [k, v] : c.metrics) m[k] = v;
    checks.push_back({{"id", c.id}, {"name", c.name}, {"pass", c.pass}, {"detail", c.detail}, {"metrics", m}});
    timing[std::to_string(c.id)] = c.seconds;
    all = all && c.pass;
  }
  json j = run.summary();
  j["checks"] = checks;
  j["pass"] = all;
  j["negative_control"] = options.gamma_scale != 1;
  run.finish(j);
  return all ? exit_pass : exit_check_failed;
}

// ----------------------------------------------------------------- driver

using Handler = std::function<int(Run&, PrecisionMode)>;

template <int (*D)(Run&), int (*E)(Run&)>
int by_precision(Run& run, PrecisionMode mode) {
  return mode == PrecisionMode::double_precision ? D(run) : E(run);
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Weakly uniformly perfect sets: constructions, testers and certificates"};
  app.require_subcommand(1);
  std::deque<Command> commands;
  std::map<std::string, Handler> handlers;

  auto add = [&](const std::string& name, const std::string& help, Handler handler) -> Command& {
    commands.push_back({});
    auto& c = commands.back();
    c.name = name;
    c.app = app.add_subcommand(name, help);
    c.app->add_option("--config", c.config_path, "key = value config file");
    c.bind("--csv", "output", "csv", "csv destination, - for stdout");
    c.bind("--summary", "output", "summary", "json summary destination, - for stdout");
    handlers[name] = std::move(handler);
    return c;
  };

  {
    auto& c = add("generate", "build a Cantor set, its point sample and optionally a disc tree",
                  by_precision<cmd_generate<double>, cmd_generate<extended>>);
    c.bind("--family", "set", "family", "u1 or u2");
    c.bind("--l0", "set", "l0", "first length");
    c.bind("--alpha", "set", "alpha", "u1 exponent (> 1)");
    c.bind("--beta", "set", "beta", "u2 exponent (> 0)");
    c.bind("--depth", "set", "depth", "construction depth (0..24)");
    c.bind("--midpoints", "set", "midpoints", "also sample interval midpoints");
    c.bind("--tree-depth", "tree", "depth", "disc tree depth (0 = no tree)");
    c.bind("--tree-gauge", "tree", "h", "gauge literal for the tree radii");
    c.bind("--tree-radius", "tree", "radius", "root radius");
    c.bind("--c-tilde", "tree", "c_tilde", "radius shrink constant in (0, 1/2)");
    c.bind("--root", "tree", "root", "root center index");
    c.bind("--out-dir", "output", "dir", "directory for the set files");
    c.bind("--prefix", "output", "prefix", "file name prefix");
  }
  {
    auto& c = add("test-perfectness", "test h-perfectness on a sampled set",
                  by_precision<cmd_test_perfectness<double>, cmd_test_perfectness<extended>>);
    c.bind("--source", "set", "source", "u1, u2, segment or file");
    c.bind("--path", "set", "path", "point cloud file");
    c.bind("--l0", "set", "l0", "first length");
    c.bind("--alpha", "set", "alpha", "u1 exponent");
    c.bind("--beta", "set", "beta", "u2 exponent");
    c.bind("--depth", "set", "depth", "construction depth");
    c.bind("--points", "set", "points", "segment sample size");
    c.bind("--gauge", "test", "gauge", "gauge literal h1:... or h2:...");
    c.bind("--fit", "test", "fit", "auto, none, u1 or u2");
    c.bind("--r0", "test", "r0", "largest probe scale");
    c.bind("--max-centers", "test", "max_centers", "probe center budget");
  }
  {
    auto& c = add("kernel-profile", "annulus Bergman kernel against its explicit bound",
                  by_precision<cmd_kernel_profile<double>, cmd_kernel_profile<extended>>);
    c.bind("--r", "kernel", "r", "comma list of inner radii in (0, 1/2]");
    c.bind("--t", "kernel", "t", "comma list of radial exponents in (0, 1/2]");
    c.bind("--tol", "kernel", "tol", "series truncation tolerance");
  }
  {
    auto& c = add("poincare-profile", "Poincare density, boundary distance and the band ratio",
                  by_precision<cmd_poincare_profile<double>, cmd_poincare_profile<extended>>);
    c.bind("--domain", "poincare", "domain", "punctured, symmetric, centered or sampled");
    c.bind("--R", "poincare", "R", "symmetric annulus outer radius");
    c.bind("--r", "poincare", "r", "centered annulus core radius");
    c.bind("--m", "poincare", "m", "centered annulus half log-width");
    c.bind("--points", "poincare", "points", "number of z values");
    c.bind("--abs-z", "poincare", "abs_z", "explicit comma list of |z|");
    c.bind("--boundary-points", "poincare", "boundary_points", "boundary sample size per circle");
    c.bind("--c-probe", "poincare", "c_probe", "constant added to beta");
    c.bind("--band-lo", "poincare", "band_lo", "lower band edge");
    c.bind("--band-hi", "poincare", "band_hi", "upper band edge");
  }
  {
    auto& c = add("harmonic-bound", "harmonic measure bounds",
                  by_precision<cmd_harmonic_bound<double>, cmd_harmonic_bound<extended>>);
    c.bind("--method", "harmonic", "method", "phi, chen, lhmd1 or lhmd2");
    c.bind("--profile", "harmonic", "profile", "capacity profile: power or log");
    c.bind("--C", "harmonic", "C", "capacity coefficient");
    c.bind("--alpha", "harmonic", "alpha", "power profile alpha in [1, 2)");
    c.bind("--beta", "harmonic", "beta", "log profile beta");
    c.bind("--kappa", "harmonic", "kappa", "kappa in (0, 1/16)");
    c.bind("--c-kappa", "harmonic", "c_kappa", "constant in the exponential");
    c.bind("--r", "harmonic", "r", "radius for the integral bound");
    c.bind("--r1", "harmonic", "r1", "largest radius for the LHMD constants");
    c.bind("--inner", "harmonic", "inner", "annulus inner radius (phi)");
    c.bind("--outer", "harmonic", "outer", "annulus outer radius (phi)");
    c.bind("--points", "harmonic", "points", "rows per radius");
    c.bind("--span", "harmonic", "span", "smallest z_dist as a fraction of the largest");
  }
  {
    auto& c = add("content", "gauge content bounds on a Cantor disc tree",
                  by_precision<cmd_content<double>, cmd_content<extended>>);
    c.bind("--set", "content", "set", "u1 or u2");
    c.bind("--gauge", "content", "gauge", "content gauge literal (default: the predicted one)");
    c.bind("--depth", "content", "depth", "tree depth (3..20)");
    c.bind("--trials", "content", "trials", "random disc trials");
    c.bind("--seed", "content", "seed", "validation seed");
    c.bind("--factor", "content", "factor", "disc-mass factor");
    c.bind("--l0", "content", "l0", "first length");
    c.bind("--alpha", "content", "alpha", "u1 exponent");
    c.bind("--beta", "content", "beta", "u2 exponent");
    c.bind("--tree-gauge", "content", "h", "gauge literal for the tree radii");
    c.bind("--radius", "content", "radius", "root radius");
    c.bind("--c-tilde", "content", "c_tilde", "radius shrink constant");
    c.bind("--cantor-depth", "content", "cantor_depth", "depth of the point sample");
  }
  {
    auto& c = add("verify-theorems", "run the verification suite",
                  [](Run& run, PrecisionMode) { return cmd_verify(run); });
    c.bind("--checks", "verify", "checks", "comma list of check ids (empty for none)");
    c.bind("--seed", "verify", "seed", "seed");
    c.bind("--trials", "verify", "trials", "disc-mass trials");
    c.bind("--negative-control", "verify", "negative_control", "validate with a doubled exponent");
    c.bind("--parallel", "verify", "parallel", "run checks concurrently");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? exit_pass : exit_config;
  }

  try {
    for (auto& c : commands) {
      if (!c.app->parsed()) continue;
      const Config cfg = c.load();
      PrecisionMode mode = precision_from_env();
      // the suite needs extended range regardless of the environment
      if (c.name == "verify-theorems") mode = PrecisionMode::extended_precision;
      Run run(cfg, out, c.name, std::string(to_string(mode)));
      return handlers.at(c.name)(run, mode);
    }
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return exit_config;
  } catch (const UnsupportedDomain& e) {
    err << "unsupported domain: " << e.what() << '\n';
    return exit_domain;
  } catch (const DomainError& e) {
    err << "domain error: " << e.what() << '\n';
    return exit_domain;
  } catch (const ConstructionError& e) {
    err << "construction error: " << e.what() << '\n';
    return exit_domain;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "config error: " << e.what() << '\n';
    return exit_config;
  }
  return exit_config;
}

}  // namespace weakperf
