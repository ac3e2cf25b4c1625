#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <set>

#include <CLI11.hpp>

#include "modcont/config.hpp"
#include "modcont/elliptic.hpp"
#include "modcont/errors.hpp"
#include "modcont/experiment.hpp"
#include "modcont/modulus.hpp"
#include "modcont/sharpness.hpp"

using namespace modcont;

namespace {

struct Output {
  std::unique_ptr<std::ofstream> file;
  std::ostream& os;
  explicit Output(const std::string& path)
      : file(path.empty() ? nullptr : std::make_unique<std::ofstream>(path)), os(file ? *file : std::cout) {
    if (file && !*file) throw std::runtime_error("cannot write " + path);
    os.precision(17);
  }
};

std::vector<double> radii_or_grid(const std::vector<double>& radii, double lo, double hi, int count) {
  if (!radii.empty()) return radii;
  std::vector<double> out;
  for (int k = 0; k < count; ++k) out.push_back(count == 1 ? hi : hi * std::pow(lo / hi, double(k) / (count - 1)));
  return out;
}

EllipticOperator make_operator(const std::vector<double>& a, int n) {
  if (a.empty()) return EllipticOperator::laplacian(n);
  if (a.size() != static_cast<std::size_t>(n * n))
    throw std::invalid_argument("--operator needs " + std::to_string(n * n) + " entries");
  return EllipticOperator(n, a);
}

void print_report_line(const ExperimentReport& r) {
  std::cout << (r.passed() ? "PASS " : "FAIL ") << r.name << " (" << to_string(r.kind) << ", "
            << r.runtime_seconds << " s)\n";
  if (!r.error.empty()) std::cout << "  error: " << r.error << "\n";
  for (const auto& v : r.verdicts)
    std::cout << "  [" << (v.pass ? "pass" : "FAIL") << "] criterion " << v.criterion << ": " << v.name << " = "
              << v.value << " " << v.relation << " " << v.threshold << (v.detail.empty() ? "" : "  (" + v.detail + ")")
              << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Moduli of continuity, singular integrals and elliptic regularity experiments"};
  app.require_subcommand(1);

  // hat
  std::string spec_text, out_path;
  std::vector<double> radii;
  double rmin = 1e-8, rmax = 0.3;
  int count = 20;
  auto* hat_cmd = app.add_subcommand("hat", "Tabulate omega and hat(omega)");
  hat_cmd->add_option("--spec", spec_text, "e.g. log(2), holder(0.5), holog(0.5, 1)")->required();
  hat_cmd->add_option("-r,--radius", radii, "Radii (default: geometric grid)");
  hat_cmd->add_option("--rmin", rmin);
  hat_cmd->add_option("--rmax", rmax);
  hat_cmd->add_option("--count", count)->check(CLI::PositiveNumber);
  hat_cmd->add_option("-o,--out", out_path, "CSV output (default stdout)");

  // blimit
  auto* b_cmd = app.add_subcommand("blimit", "Tabulate B(r) and its limit 1/(C1 - 1)");
  b_cmd->add_option("--spec", spec_text)->required();
  b_cmd->add_option("-r,--radius", radii);
  b_cmd->add_option("--rmin", rmin);
  b_cmd->add_option("--rmax", rmax);
  b_cmd->add_option("--count", count)->check(CLI::PositiveNumber);
  b_cmd->add_option("-o,--out", out_path);

  // modulus
  std::string field_path;
  double max_radius = 0.0, window_lo = 0.0, window_hi = 0.0, dini_R = 0.0;
  int cap = 96;
  bool fit = false;
  auto* mod_cmd = app.add_subcommand("modulus", "Empirical modulus of a sampled field");
  mod_cmd->add_option("--field", field_path, "Field file (.csv or .bin)")->required()->check(CLI::ExistingFile);
  mod_cmd->add_option("--max-radius", max_radius, "Largest radius (default: quarter of the smallest side)");
  mod_cmd->add_option("--cap", cap, "Offset cap in lattice steps")->check(CLI::PositiveNumber);
  mod_cmd->add_option("--spec", spec_text, "Seminorm against this modulus");
  mod_cmd->add_option("--window-lo", window_lo);
  mod_cmd->add_option("--window-hi", window_hi);
  mod_cmd->add_option("--dini", dini_R, "Dini estimate up to this radius");
  mod_cmd->add_flag("--fit", fit, "Fit a Holder/Log/Holog family");
  mod_cmd->add_option("-o,--out", out_path, "Curve CSV");

  // solve
  std::string rhs_path, hess_prefix;
  std::vector<double> op_entries;
  double tol = 1e-10;
  int manufactured = 0;
  auto* solve_cmd = app.add_subcommand("solve", "Dirichlet problem sum a_ij D_ij u = f, u = 0 on the boundary");
  auto* rhs_opt = solve_cmd->add_option("--rhs", rhs_path, "Right-hand side field")->check(CLI::ExistingFile);
  solve_cmd->add_option("--manufactured", manufactured, "Grid size for the manufactured [x(1-x)y(1-y)]^2 test")
      ->excludes(rhs_opt);
  solve_cmd->add_option("--operator", op_entries, "Coefficients a, row-major");
  solve_cmd->add_option("--tol", tol);
  solve_cmd->add_option("-o,--out", out_path, "Solution field file");
  solve_cmd->add_option("--hessian", hess_prefix, "Write Hessian components to <prefix>_ij.csv");

  // hklg
  int resolution = 129;
  std::vector<int> kernel_ij{0, 1};
  auto* hklg_cmd = app.add_subcommand("hklg", "Singular-integral ratio [K*phi]_hat / ||phi||_omega");
  hklg_cmd->add_option("--spec", spec_text)->required();
  hklg_cmd->add_option("--kernel", kernel_ij, "Second-derivative indices i j (0-based)")->expected(2);
  hklg_cmd->add_option("--operator", op_entries);
  hklg_cmd->add_option("--resolution", resolution)->check(CLI::Range(9, 4097));

  // sharpness
  std::string candidate_text;
  auto* sharp_cmd = app.add_subcommand("sharpness", "Ratio hat/candidate and its trend as r -> 0");
  sharp_cmd->add_option("--spec", spec_text)->required();
  sharp_cmd->add_option("--candidate", candidate_text)->required();
  sharp_cmd->add_option("-r,--radius", radii);
  sharp_cmd->add_option("--rmin", rmin);
  sharp_cmd->add_option("--rmax", rmax);
  sharp_cmd->add_option("--count", count)->check(CLI::PositiveNumber);
  sharp_cmd->add_option("-o,--out", out_path);

  // density
  std::string g_kind = "linear";
  auto* dens_cmd = app.add_subcommand("density", "Density-failure gap for f(x) = omega(|x|)");
  dens_cmd->add_option("--spec", spec_text)->required();
  dens_cmd->add_option("-r,--radius", radii)->required();
  dens_cmd->add_option("--g", g_kind, "Comparison function on a 1D lattice")
      ->check(CLI::IsMember({"linear", "zero", "self"}));
  dens_cmd->add_option("--field", field_path, "Comparison field instead of --g")->check(CLI::ExistingFile);

  // suite
  std::string config_path, out_dir;
  std::vector<std::string> only;
  bool print_default = false;
  auto* suite_cmd = app.add_subcommand("suite", "Run an experiment suite and write CSV tables and verdicts");
  suite_cmd->add_option("--config", config_path, "Suite or experiment file (default: bundled suite)")
      ->check(CLI::ExistingFile);
  suite_cmd->add_option("--out", out_dir, "Output directory (overrides the config)");
  suite_cmd->add_option("--only", only, "Run only these experiment names");
  suite_cmd->add_flag("--print-default", print_default, "Print the bundled suite and exit");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*hat_cmd) {
      const auto spec = parse_spec(spec_text);
      const HatTransform hat(spec);
      Output out(out_path);
      out.os << "radius,omega,hat,method\n";
      for (double r : radii_or_grid(radii, rmin, std::min(rmax, spec.radius()), count))
        out.os << r << ',' << eval(spec, r) << ',' << hat(r) << ','
               << (hat.has_closed_form() ? "closed" : "quadrature") << '\n';
    } else if (*b_cmd) {
      const auto spec = parse_spec(spec_text);
      const auto sc = space_constants(spec);
      Output out(out_path);
      out.os << "radius,B,limit\n";
      for (double r : radii_or_grid(radii, rmin, std::min(rmax, spec.radius()), count))
        out.os << r << ',' << b_of_r(spec, r) << ',' << sc.B_limit << '\n';
      std::cerr << "C1 = " << sc.C1.to_double() << ", B limit = " << sc.B_limit << "\n";
    } else if (*mod_cmd) {
      const auto f = load_field(field_path);
      if (max_radius <= 0.0) max_radius = 0.25 * f.min_side();
      ModulusOptions mo;
      mo.offset_cap = cap;
      const auto curve = empirical_oscillation(f, max_radius, mo);
      if (!out_path.empty()) write_curve_csv(curve, out_path);
      else {
        std::cout.precision(17);
        std::cout << "radius,omega\n";
        for (std::size_t k = 0; k < curve.size(); ++k) std::cout << curve.radii[k] << ',' << curve.values[k] << '\n';
      }
      if (!spec_text.empty()) {
        const auto spec = parse_spec(spec_text);
        RadiusWindow w = default_window(f.h(), max_radius);
        if (window_lo > 0) w.lo = window_lo;
        if (window_hi > 0) w.hi = window_hi;
        const auto s = seminorm(curve, spec, w);
        std::cerr << "seminorm " << s.seminorm << " at r = " << s.argmax_radius << " against " << spec.describe()
                  << " on [" << w.lo << ", " << w.hi << "]\n";
      }
      if (dini_R > 0.0) {
        const auto d = dini_of_curve(curve, f.h(), dini_R);
        std::cerr << "dini resolved " << d.resolved << ", unresolved " << d.unresolved << "\n";
      }
      if (fit) {
        const auto ff = fit_family(curve);
        std::cerr << "fit " << to_string(ff.family) << " lambda " << ff.lambda << " alpha " << ff.alpha
                  << " constant " << ff.constant << " residual " << ff.residual
                  << (ff.degenerate ? " (degenerate)" : "") << "\n";
      }
    } else if (*solve_cmd) {
      const auto op = make_operator(op_entries, 2);
      SampledField rhs = rhs_path.empty() ? SampledField({3, 3}, 0.5, {0, 0}, std::vector<double>(9, 0.0))
                                          : load_field(rhs_path);
      std::function<double(const Point&)> exact;
      if (manufactured > 0) {
        auto p = [](double t) { return t * (1 - t); };
        auto dp = [](double t) { return 1 - 2 * t; };
        exact = [p](const Point& x) { return std::pow(p(x[0]) * p(x[1]), 2); };
        rhs = SampledField::sample_box(2, manufactured, 0, 1, [&](const Point& x) {
          const double P = p(x[0]), Q = p(x[1]);
          return op.a(0, 0) * (2 * dp(x[0]) * dp(x[0]) - 4 * P) * Q * Q +
                 op.a(1, 1) * (2 * dp(x[1]) * dp(x[1]) - 4 * Q) * P * P +
                 2 * op.a(0, 1) * 4 * P * dp(x[0]) * Q * dp(x[1]);
        });
      } else if (rhs_path.empty()) {
        throw std::invalid_argument("solve needs --rhs or --manufactured");
      }
      SolveStats st;
      const auto u = solve_dirichlet({op, rhs}, tol, &st);
      std::cout << "iterations " << st.iterations << ", relative residual " << st.residual << "\n";
      if (exact) {
        double err = 0.0;
        for (std::size_t k = 0; k < u.size(); ++k)
          err = std::max(err, std::abs(u.values()[k] - exact(u.point(u.unflat(k)))));
        std::cout << "max error " << err << "\n";
      }
      if (!out_path.empty()) save_field(u, out_path);
      if (!hess_prefix.empty()) {
        const auto H = hessian(u);
        for (int i = 0; i < u.dim(); ++i)
          for (int j = i; j < u.dim(); ++j)
            save_field(H[static_cast<std::size_t>(hessian_index(u.dim(), i, j))],
                       hess_prefix + "_" + std::to_string(i) + std::to_string(j) + ".csv");
      }
    } else if (*hklg_cmd) {
      const auto spec = parse_spec(spec_text);
      const auto op = make_operator(op_entries, 2);
      const auto k = second_derivative_kernel(op, kernel_ij[0], kernel_ij[1]);
      const auto res = hklg_ratio(k, spec, resolution);
      std::cout << "kernel " << k.name() << ", spec " << spec.describe() << ", resolution " << resolution << "\n"
                << "ratio " << res.ratio << " = " << res.numerator << " / " << res.denominator
                << (res.degenerate ? " (degenerate)" : "") << "\n";
    } else if (*sharp_cmd) {
      const auto spec = parse_spec(spec_text), cand = parse_spec(candidate_text);
      const auto cert = sharpness_certificate(
          spec, cand, radii_or_grid(radii, rmin, std::min({rmax, spec.radius(), cand.radius()}) * 0.999, count));
      Output out(out_path);
      out.os << "radius,ratio\n";
      for (const auto& row : cert.rows) out.os << row.radius << ',' << row.ratio << '\n';
      std::cerr << "verdict spec=" << format_spec(spec) << " candidate=" << format_spec(cand)
                << " sup=" << cert.sup_ratio << " argmax=" << cert.argmax_radius
                << " trend=" << to_string(cert.trend.trend) << " admissible=" << (cert.admissible ? "yes" : "no")
                << "\n";
    } else if (*dens_cmd) {
      const auto spec = parse_spec(spec_text);
      SampledField g = field_path.empty() ? SampledField({3}, 1.0, {-1.0}, {0.0, 0.0, 0.0}) : load_field(field_path);
      if (field_path.empty()) {
        const double rmn = *std::min_element(radii.begin(), radii.end());
        const double rmx = *std::max_element(radii.begin(), radii.end());
        const double h = rmn / 10.0;
        const int n = static_cast<int>(std::ceil(4.0 * rmx / h) + 1) | 1;
        std::function<double(const Point&)> fn = [](const Point& x) { return x[0]; };
        if (g_kind == "zero") fn = [](const Point&) { return 0.0; };
        if (g_kind == "self") fn = [&](const Point& x) { return eval(spec, std::abs(x[0])); };
        g = SampledField::sample({n}, h, {-0.5 * (n - 1) * h}, fn);
      }
      const auto gap = density_failure_gap(spec, g, radii);
      std::cout.precision(17);
      std::cout << "radius,gap\n";
      for (const auto& row : gap.rows) std::cout << row.radius << ',' << row.ratio << '\n';
      std::cerr << "verdict gap=" << gap.gap << "\n";
    } else if (*suite_cmd) {
      if (print_default) {
        std::cout << default_suite_text();
        return 0;
      }
      auto configs = config_path.empty() ? default_suite() : load_suite(config_path);
      if (!only.empty()) {
        const std::set<std::string> keep(only.begin(), only.end());
        std::erase_if(configs, [&](const ExperimentConfig& c) { return !keep.count(c.name); });
      }
      const auto suite = run_suite(configs, print_report_line);
      std::string dir = out_dir;
      if (dir.empty() && !configs.empty()) dir = configs.front().output_dir;
      if (!dir.empty()) {
        write_suite(suite, dir);
        std::cout << "wrote " << dir << "\n";
      }
      for (const auto& [crit, ok] : suite.criteria())
        std::cout << "criterion " << crit << ": " << (ok ? "PASS" : "FAIL") << "\n";
      return suite.passed() ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
