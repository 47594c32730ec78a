#include "weakperf/verify.hpp"

#include <chrono>
#include <cmath>
#include <future>
#include <random>
#include <sstream>

#include "weakperf/content.hpp"
#include "weakperf/harmonic.hpp"
#include "weakperf/kernels.hpp"
#include "weakperf/perfectness.hpp"

namespace weakperf {

namespace {

using X = long double;

double draw(std::mt19937_64& rng) { return std::ldexp(double(rng() >> 11), -53); }

std::string fixed(double v, int digits = 6) {
  std::ostringstream s;
  s.precision(digits);
  s << v;
  return s.str();
}

// direct sum over 1 <= |n| <= 2000 in natural order, each term from its logarithm
X brute_kernel(X r, X abs_z) {
  const X log_x = 2 * std::log(abs_z);
  const X log_r = std::log(r);
  X sum = 1 / (-2 * log_r);
  for (int n = -2000; n <= 2000; ++n) {
    if (n == 0) continue;
    const X m = std::abs(X(n));
    // |1 - r^(2n)| = r^(2n) (1 - r^(2|n|)) for n < 0
    const X log_den = std::log1p(-std::exp(2 * m * log_r)) + (n < 0 ? 2 * X(n) * log_r : 0);
    sum += std::exp(std::log(m) + X(n) * log_x - log_den);
  }
  return sum / (pi_v<X> * std::exp(log_x));
}

// u'' + u'/s = 0 on [a, b], u(a) = 0, u(b) = 1, central differences, Thomas sweep
std::vector<X> radial_laplace(X a, X b, int n) {
  const X h = (b - a) / X(n);
  std::vector<X> lower(n + 1), diag(n + 1), upper(n + 1), rhs(n + 1, 0);
  diag[0] = 1;
  diag[n] = 1;
  rhs[n] = 1;
  for (int i = 1; i < n; ++i) {
    const X s = a + h * X(i);
    lower[i] = 1 / (h * h) - 1 / (2 * h * s);
    diag[i] = -2 / (h * h);
    upper[i] = 1 / (h * h) + 1 / (2 * h * s);
  }
  for (int i = 1; i <= n; ++i) {
    const X w = lower[i] / diag[i - 1];
    diag[i] -= w * upper[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  std::vector<X> u(n + 1);
  u[n] = rhs[n] / diag[n];
  for (int i = n - 1; i >= 0; --i) u[i] = (rhs[i] - upper[i] * u[i + 1]) / diag[i];
  return u;
}

struct U1Tree {
  std::shared_ptr<const DiscTree<CantorPointSet<X>>> tree;
  GaugeFunction<X> content_gauge;
};

// alpha = 2 Cantor set and its depth-10 disc tree with h = 0.9 t^2
U1Tree u1_tree(double gamma_scale) {
  const auto lengths = build_u1_lengths<X>(0.1L, 2, 12);
  auto points = std::make_shared<const CantorPointSet<X>>(CantorIntervalSet<X>(lengths), false);
  const auto h = GaugeFunction<X>::power(2, 0.9L);
  auto tree = std::make_shared<const DiscTree<CantorPointSet<X>>>(build_disc_tree(points, 0, X(0.05), h, X(0.25), 10));
  const X alpha = 2;
  const X gamma = std::log(X(2)) / std::log(alpha) * X(gamma_scale);
  const X c2 = power_tree_scale(h.coefficient(), alpha, tree->c_tilde());
  const X r = tree->root().radius;
  auto g = monotone_extension(GaugeFunction<X>::log_gauge(gamma, c2, std::min(4 * r, 1 / c2)));
  return {tree, g};
}

CheckResult check_bergman_bound(const VerifyOptions&) {
  CheckResult c;
  const auto t0 = std::chrono::steady_clock::now();
  X worst_margin = std::numeric_limits<X>::infinity();
  X worst_identity = 0;
  for (X r : {0.01L, 0.05L, 0.1L, 0.2L, 0.3L, 0.4L, 0.5L}) {
    for (X t : {0.1L, 0.25L, 0.5L}) {
      const auto k = bergman_annulus<X>(r, std::pow(r, t), X(1e-12));
      const X bound = bergman_upper_bound(r, t);
      worst_margin = std::min(worst_margin, bound - k.value);
      if (t == 0.5L) {
        const X closed = 1 / (2 * pi_v<X> * r * std::log(1 / r)) + 32 / (3 * pi_v<X>);
        worst_identity = std::max(worst_identity, std::abs(bound - closed));
      }
    }
  }
  c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  c.pass = worst_margin >= -1e-10L && worst_identity <= 1e-12L && c.seconds < 2;
  c.metrics = {{"worst_margin", double(worst_margin)}, {"half_identity_error", double(worst_identity)}};
  c.detail = "21 grid points, worst margin " + fixed(double(worst_margin)) + ", identity error at t=1/2 " +
             fixed(double(worst_identity), 3);
  return c;
}

CheckResult check_series(const VerifyOptions& o) {
  CheckResult c;
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(o.seed);
  X worst = 0;
  bool ok = true;
  for (int q = 0; q < 50; ++q) {
    const X r = X(0.01 + 0.49 * draw(rng));
    const X t = X(0.1 + 0.8 * draw(rng));
    const X abs_z = std::pow(r, t);
    const auto k = bergman_annulus<X>(r, abs_z, X(1e-12));
    const X diff = std::abs(k.value - brute_kernel(r, abs_z));
    const X allowed = std::max(k.tail_bound, X(1e-10));
    worst = std::max(worst, diff / allowed);
    ok = ok && diff <= allowed;
  }
  c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  c.pass = ok && c.seconds < 5;
  c.metrics = {{"worst_error_over_allowance", double(worst)}};
  c.detail = "50 queries, worst |diff|/allowance " + fixed(double(worst), 3);
  return c;
}

CheckResult check_poincare(const VerifyOptions&) {
  CheckResult c;
  const X R = 3;
  const X m = std::log(R);
  const auto sym = PoincareDomain<X>::symmetric_annulus(R);
  X worst_rel = 0;
  for (int i = 0; i < 20; ++i) {
    // the annulus rescaled so that |z0| sits on its core circle
    const X s = std::exp(-m + 2 * m * (X(i) + X(0.5)) / 20);
    const X core_form = poincare_density(PoincareDomain<X>::centered_annulus(s, m), Point<X>(s, 0));
    const X general_form = poincare_density(sym, Point<X>(1, 0)) / s;
    worst_rel = std::max(worst_rel, std::abs(core_form - general_form) / general_form);
  }
  const auto disk = PoincareDomain<X>::punctured_disk();
  X worst_identity = 0;
  for (int k = 1; k <= 20; ++k) {
    const X a = std::exp(-X(k));
    worst_identity = std::max(worst_identity, std::abs(poincare_density(disk, Point<X>(a, 0)) * a * X(k) - 1));
  }
  c.pass = worst_rel <= 1e-12L && worst_identity <= 1e-14L;
  c.metrics = {{"annulus_relative_error", double(worst_rel)}, {"punctured_identity_error", double(worst_identity)}};
  c.detail = "annulus forms agree to " + fixed(double(worst_rel), 3) + ", punctured identity to " +
             fixed(double(worst_identity), 3);
  return c;
}

CheckResult check_band(const VerifyOptions&) {
  CheckResult c;
  std::vector<Point<X>> zs;
  for (int k = 2; k <= 20; ++k) zs.emplace_back(std::exp(-X(k)), 0);
  const auto report =
      check_bp_estimate(PoincareDomain<X>::punctured_disk(), zs, punctured_disk_boundary<X>(256), X(1), X(0.4), X(1.1));
  // closed form along this sequence: (k + 1) / k
  X closed_error = 0;
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    const X k = X(i + 2);
    closed_error = std::max(closed_error, std::abs(report.rows[i].ratio - (k + 1) / k));
  }
  c.pass = report.pass;
  c.metrics = {{"min_ratio", double(report.min_ratio)},
               {"max_ratio", double(report.max_ratio)},
               {"closed_form_error", double(closed_error)}};
  c.detail = "ratio range [" + fixed(double(report.min_ratio)) + ", " + fixed(double(report.max_ratio)) +
             "] against band [0.4, 1.1]; equals (k+1)/k to " + fixed(double(closed_error), 3);
  return c;
}

CheckResult check_harmonic(const VerifyOptions&) {
  CheckResult c;
  X worst_fd = 0;
  const std::pair<X, X> annuli[] = {{0.1L, 1}, {0.5L, 2}, {0.01L, 0.05L}};
  for (auto [a, b] : annuli) {
    const int n = 4000;
    const auto u = radial_laplace(a, b, n);
    for (int i = 0; i <= n; i += 40) {
      const X s = i == n ? b : a + (b - a) * X(i) / X(n);
      worst_fd = std::max(worst_fd, std::abs(u[i] - annulus_comparison_phi(a, b, s)));
    }
  }
  const X r = 1e-12L;
  X worst_ratio = 0;
  for (auto [al, alp] : {std::pair<X, X>{2, 3}, {1.5L, 4}}) {
    const X phi = annulus_comparison_phi(std::pow(r, alp), r, std::pow(r, al));
    worst_ratio = std::max(worst_ratio, std::abs(phi - (alp - al) / (alp - 1)));
  }
  const X L = std::log(1 / r);
  for (auto [be, bep] : {std::pair<X, X>{1, 3}, {2, 5}}) {
    const X phi = annulus_comparison_phi(r * std::pow(L, -bep), r, r * std::pow(L, -be));
    worst_ratio = std::max(worst_ratio, std::abs(phi - (bep - be) / bep));
  }
  c.pass = worst_fd <= 1e-4L && worst_ratio <= 1e-6L;
  c.metrics = {{"finite_difference_error", double(worst_fd)}, {"limit_ratio_error", double(worst_ratio)}};
  c.detail = "finite-difference gap " + fixed(double(worst_fd), 3) + " on 3 annuli, limit ratios to " +
             fixed(double(worst_ratio), 3);
  return c;
}

CheckResult check_chen(const VerifyOptions& o) {
  CheckResult c;
  std::mt19937_64 rng(o.seed + 6);
  X worst = 0;
  for (int i = 0; i < 20; ++i) {
    const X alpha = X(1.05 + 0.9 * draw(rng));
    const X C = X(0.1 + 1.9 * draw(rng));
    const X kappa = X(0.001 + 0.059 * draw(rng));
    const X r = X(std::exp(std::log(1e-3) + draw(rng) * std::log(500.0)));
    const X upper = chen_upper_limit(kappa, r);
    const X z = upper * std::exp(-X(0.1 + 29.9 * draw(rng)));
    const auto cap = CapacityProfile<X>::power_law(C, alpha, 1);
    const X quad = chen_integral(z, upper, kappa, cap);
    const X closed = chen_integral_power_law_closed_form(z, upper, kappa, cap);
    worst = std::max(worst, std::abs(quad - closed) / std::abs(closed));
  }
  c.pass = worst < 1e-6L;
  c.metrics = {{"worst_relative_error", double(worst)}};
  c.detail = "20 draws, worst relative error " + fixed(double(worst), 3);
  return c;
}

CheckResult check_limit(const VerifyOptions&) {
  CheckResult c;
  bool ok = true;
  std::string detail;
  for (X beta : {1.0L, 3.0L, 10.0L}) {
    X prev = std::numeric_limits<X>::infinity();
    X last = 0;
    for (X r : {1e-8L, 1e-16L, 1e-32L, 1e-64L}) {
      last = std::abs(log_power_level_gap(r, beta) + beta);
      ok = ok && last < prev;
      prev = last;
    }
    const X rel = last / beta;
    ok = ok && rel < 0.25L;
    c.metrics.emplace_back("ratio_beta_" + fixed(double(beta)), double(rel));
    detail += (detail.empty() ? "" : ", ") + std::string("beta ") + fixed(double(beta)) + ": " + fixed(double(rel), 4);
  }
  c.pass = ok;
  c.detail = "|I(1e-64)+beta|/beta " + detail;
  return c;
}

template <typename Tree>
bool additivity_exact(const std::shared_ptr<const Tree>& tree) {
  MassDistribution<CantorPointSet<X>> mu(tree);
  bool exact = mu.mass(0) == 1;
  for (std::size_t i = 0; i < tree->size(); ++i) {
    // a hair wider than the node disc, still far from every disjoint disc
    const auto disc = mass_of_disc(mu, AnchoredDisc<X>{i, Point<X>::Zero(), tree->node(i).radius * X(1 + 1e-6)});
    exact = exact && disc.lo == mu.mass(i) && disc.hi == mu.mass(i);
    if (!tree->is_leaf(i)) exact = exact && mu.mass(2 * i + 1) + mu.mass(2 * i + 2) == mu.mass(i);
  }
  return exact;
}

CheckResult check_mass(const VerifyOptions& o) {
  CheckResult c;
  const auto fx = u1_tree(o.gamma_scale);
  MassDistribution<CantorPointSet<X>> mu(fx.tree);
  // alpha = 1.8 keeps depth 12 inside the extended range
  auto points = std::make_shared<const CantorPointSet<X>>(CantorIntervalSet<X>(build_u1_lengths<X>(0.1L, 1.8L, 13)),
                                                          false);
  auto deep = std::make_shared<const DiscTree<CantorPointSet<X>>>(
      build_disc_tree(points, 0, X(0.05), GaugeFunction<X>::power(1.8L, 0.9L), X(0.25), 12));
  const bool exact = additivity_exact(fx.tree) && additivity_exact(deep);
  const auto report = validate_disc_mass_inequality(mu, fx.content_gauge, X(18), o.trials, o.seed);
  const auto control = validate_disc_mass_inequality(mu, u1_tree(2 * o.gamma_scale).content_gauge, X(18), o.trials,
                                                     o.seed);
  c.pass = exact && report.passed && control.violations >= 1;
  c.metrics = {{"worst_ratio", double(report.worst_ratio)},
               {"violations", double(report.violations)},
               {"control_violations", double(control.violations)}};
  c.detail = std::string("additivity ") + (exact ? "exact" : "broken") + " on depth 10 and 12 trees, worst ratio " +
             fixed(double(report.worst_ratio)) + " over " + std::to_string(o.trials) + " trials, control violations " +
             std::to_string(control.violations);
  return c;
}

CheckResult check_forward(const VerifyOptions& o) {
  CheckResult c;
  const auto fx = u1_tree(o.gamma_scale);
  MassDistribution<CantorPointSet<X>> mu(fx.tree);
  const auto report = validate_disc_mass_inequality(mu, fx.content_gauge, X(18), o.trials, o.seed);
  const X upper = tree_content_upper(*fx.tree, fx.content_gauge).value;
  bool ok = report.passed;
  X lower = 0;
  if (report.passed) {
    lower = mass_lower_bound(mu, fx.content_gauge, &report, X(18));
    ok = lower <= upper;
  }
  const X vanishing = content_upper_bound_levels(CantorIntervalSet<X>(build_u1_lengths<X>(0.1L, 2, 10)), X(0.01), 10);
  c.pass = ok && vanishing < 1e-6L;
  c.metrics = {{"lower", double(lower)}, {"upper", double(upper)}, {"vanishing_sum", double(vanishing)}};
  c.detail = "lower " + fixed(double(lower)) + " <= upper " + fixed(double(upper)) + "; 2^j l_j^gamma = " +
             fixed(double(vanishing), 4);
  if (!report.passed) c.detail += "; disc-mass validation failed";
  return c;
}

CheckResult check_converse(const VerifyOptions&) {
  CheckResult c;
  const auto u1 = content_converse_probe<X>(ContentFamily::u1, 1, 1, 0.9L);
  const auto u2 = content_converse_probe<X>(ContentFamily::u2, 1, 1, 0.9L);
  c.pass = u1.exponent == 2 && u1.r1 > 0 && u2.exponent > 0;
  c.metrics = {{"u1_alpha", double(u1.exponent)}, {"u1_r1", double(u1.r1)}, {"u2_beta", double(u2.exponent)},
               {"u2_r1", double(u2.r1)}};
  c.detail = "u1 alpha " + fixed(double(u1.exponent)) + " with r1 " + fixed(double(u1.r1), 4) + "; u2 beta " +
             fixed(double(u2.exponent)) + " with r1 " + fixed(double(u2.r1), 4);
  return c;
}

CheckResult check_fit(const VerifyOptions&) {
  CheckResult c;
  const auto f1 = fit_condition_parameters(CantorIntervalSet<X>(build_u1_lengths<X>(0.1L, 2, 8)), ConditionFamily::u1,
                                           X(0.05));
  const auto f2 = fit_condition_parameters(CantorIntervalSet<X>(build_u2_lengths<X>(std::exp(X(-10)), 3, 8)),
                                           ConditionFamily::u2, X(0.01));
  std::vector<Point<X>> seg;
  for (int i = 0; i < 200; ++i) seg.emplace_back(X(i) / 199, 0);
  const PlanarSetSample<X> segment(seg, X(0.5) / 199);
  const auto uniform = test_h_perfectness(segment, GaugeFunction<X>::power(1, 0.5L), X(0.5));
  c.pass = f1.exponent >= 1.8L && f1.exponent <= 2.2L && f2.exponent >= 2.5L && f2.exponent <= 3.5L && uniform.pass;
  c.metrics = {{"alpha_hat", double(f1.exponent)}, {"beta_hat", double(f2.exponent)},
               {"segment_probes", double(uniform.probes.size())}};
  c.detail = "alpha_hat " + fixed(double(f1.exponent), 4) + ", beta_hat " + fixed(double(f2.exponent), 4) +
             ", segment " + (uniform.pass ? "uniformly perfect" : "fails") + " on " +
             std::to_string(uniform.probes.size()) + " probes";
  return c;
}

}  // namespace

std::vector<int> all_check_ids() { return {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11}; }

std::string check_name(int id) {
  switch (id) {
    case 1: return "bergman bound";
    case 2: return "series correctness";
    case 3: return "poincare consistency";
    case 4: return "density band";
    case 5: return "harmonic comparison";
    case 6: return "integral bound quadrature";
    case 7: return "log-log limit";
    case 8: return "mass distribution";
    case 9: return "content forward";
    case 10: return "content converse";
    case 11: return "perfectness fit";
  }
  throw DomainError("unknown check id " + std::to_string(id));
}

CheckResult run_check(int id, const VerifyOptions& options) {
  const std::string name = check_name(id);
  const auto t0 = std::chrono::steady_clock::now();
  CheckResult c;
  try {
    switch (id) {
      case 1: c = check_bergman_bound(options); break;
      case 2: c = check_series(options); break;
      case 3: c = check_poincare(options); break;
      case 4: c = check_band(options); break;
      case 5: c = check_harmonic(options); break;
      case 6: c = check_chen(options); break;
      case 7: c = check_limit(options); break;
      case 8: c = check_mass(options); break;
      case 9: c = check_forward(options); break;
      case 10: c = check_converse(options); break;
      case 11: c = check_fit(options); break;
    }
  } catch (const std::exception& e) {
    c = CheckResult{};
    c.pass = false;
    c.detail = std::string("error: ") + e.what();
  }
  c.id = id;
  c.name = name;
  if (c.seconds == 0) c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return c;
}

std::vector<CheckResult> run_checks(const std::vector<int>& ids, const VerifyOptions& options) {
  std::vector<int> sorted = ids;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  for (int id : sorted) check_name(id);
  std::vector<CheckResult> out;
  if (options.parallel && sorted.size() > 1) {
    std::vector<std::future<CheckResult>> jobs;
    for (int id : sorted) jobs.push_back(std::async(std::launch::async, run_check, id, std::cref(options)));
    for (auto& j : jobs) out.push_back(j.get());
  } else {
    for (int id : sorted) out.push_back(run_check(id, options));
  }
  return out;
}

}  // namespace weakperf
