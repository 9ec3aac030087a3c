// lattice3b: spectral data for the lattice fermion-fermion-boson system at
// resonance coupling. Subcommands: resonance, dispersion, spectrum, efimov,
// oracle. Exit codes: 0 success, 2 validation failure, 3 numerical
// consistency failure.

#include <chrono>
#include <cmath>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lattice3b/efimov.hpp"
#include "lattice3b/three_body.hpp"
#include "lattice3b/two_body.hpp"
#include "report.hpp"

using namespace lattice3b;
using l3btool::fmt_num;
using l3btool::fmt_short;
using l3btool::Report;

namespace {

using clk = std::chrono::steady_clock;

double elapsed(clk::time_point t0) {
  return std::chrono::duration<double>(clk::now() - t0).count();
}

struct CommonOpts {
  std::vector<double> gammas{1.0};
  double mu0_tol = 1e-8;
  std::string out;
  std::string format = "csv";
  std::string config;
};

void add_common(CLI::App* cmd, CommonOpts& c) {
  cmd->add_option("--gamma", c.gammas, "mass ratio list")->capture_default_str();
  cmd->add_option("--mu0-tol", c.mu0_tol, "tolerance for the coupling normalization")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--out", c.out, "output path (default stdout)");
  cmd->add_option("--format", c.format, "csv | jsonl")
      ->check(CLI::IsMember({"csv", "jsonl"}))
      ->capture_default_str();
  cmd->set_config("--config", "", "flat key=value config file");
}

TorusVec parse_k(const std::string& s) {
  std::array<double, 3> v{};
  std::stringstream ss(s);
  std::string item;
  for (int j = 0; j < 3; ++j) {
    if (!std::getline(ss, item, ','))
      throw CLI::ValidationError("--K", "expected three comma-separated components");
    v[j] = std::stod(item);
  }
  return wrap(v);
}

std::vector<double> logrange_z(const std::vector<double>& spec3) {
  // exponents a..b, n points; values -10^e
  const double a = spec3[0], b = spec3[1];
  const int n = static_cast<int>(spec3[2]);
  if (n < 1) throw CLI::ValidationError("--z-logrange", "need n >= 1");
  std::vector<double> out;
  for (int i = 0; i < n; ++i) {
    const double e = (n == 1) ? a : a + (b - a) * i / (n - 1);
    out.push_back(-std::pow(10.0, e));
  }
  return out;
}

void manifest_params(Report& rep, const ModelParams& par) {
  const std::string pre = "gamma_" + fmt_short(par.gamma) + ".";
  rep.manifest(pre + "mu0", par.mu0);
  rep.manifest(pre + "mu0_err", par.mu0_error);
  rep.manifest(pre + "v", par.v_gamma);
  rep.manifest(pre + "u", par.u_gamma);
  rep.manifest(pre + "s", par.s_gamma);
  rep.manifest(pre + "D", par.D_gamma);
  rep.manifest(pre + "n", par.n_gamma);
  rep.manifest(pre + "M", par.M_gamma);
}

// ---------------------------------------------------------------------------

int cmd_resonance(const CommonOpts& c, double coupling_scale) {
  Report rep("resonance", {"gamma", "mu0", "mu0_err", "v_gamma", "delta00",
                           "delta00_err", "status"});
  rep.manifest("coupling_scale", coupling_scale);
  const auto t0 = clk::now();
  const QuadratureEstimate mu0 = compute_mu0(c.mu0_tol);
  rep.manifest("wall_mu0_s", elapsed(t0));

  bool consistent = true;
  for (double g : c.gammas) {
    ModelParams par = make_params(g, mu0);
    par.v_gamma *= coupling_scale;
    manifest_params(rep, par);
    const DeterminantEval d = determinant({}, 0.0, par);
    const bool ok = std::abs(d.value) <= 10.0 * std::max(d.error_estimate, 1e-15);
    if (!ok) consistent = false;
    rep.row({fmt_num(g), fmt_num(par.mu0), fmt_num(par.mu0_error),
             fmt_num(par.v_gamma), fmt_num(d.value), fmt_num(d.error_estimate),
             ok ? "resonant" : "off-resonance"});
  }
  rep.manifest("wall_total_s", elapsed(t0));
  const int rc = rep.emit(c.out, c.format);
  if (rc != 0) return rc;
  return consistent ? 0 : 3;
}

int cmd_dispersion(const CommonOpts& c, const std::vector<std::string>& k_args,
                   int path_n, double bisect_tol) {
  std::vector<TorusVec> ks;
  if (!k_args.empty()) {
    for (const auto& s : k_args) ks.push_back(parse_k(s));
  } else {
    // Gamma -> X -> M -> R -> Gamma walk through the zone
    const std::array<TorusVec, 5> corners = {
        TorusVec{}, wrap(M_PI, 0, 0), wrap(M_PI, M_PI, 0), wrap(M_PI, M_PI, M_PI),
        TorusVec{}};
    for (int seg = 0; seg < 4; ++seg)
      for (int i = (seg == 0 ? 0 : 1); i <= path_n; ++i) {
        const double s = static_cast<double>(i) / path_n;
        ks.push_back(wrap((1 - s) * corners[seg].c1 + s * corners[seg + 1].c1,
                          (1 - s) * corners[seg].c2 + s * corners[seg + 1].c2,
                          (1 - s) * corners[seg].c3 + s * corners[seg + 1].c3));
      }
  }

  Report rep("dispersion", {"gamma", "k1", "k2", "k3", "m", "z", "bracket", "status"});
  const auto t0 = clk::now();
  const QuadratureEstimate mu0 = compute_mu0(c.mu0_tol);
  rep.manifest("wall_mu0_s", elapsed(t0));
  rep.manifest("bisect_tol", bisect_tol);

  for (double g : c.gammas) {
    const ModelParams par = make_params(g, mu0);
    manifest_params(rep, par);
    for (const TorusVec& k : ks) {
      const double m = band_bottom(k, par);
      if (k.norm() < 1e-12) {
        // zero-energy resonance point; z = 0 by continuity
        rep.row({fmt_num(g), fmt_num(k.c1), fmt_num(k.c2), fmt_num(k.c3),
                 fmt_num(m), fmt_num(0.0), fmt_num(0.0), "resonance"});
        continue;
      }
      try {
        const BoundStateSample b = bound_state_energy(k, par, bisect_tol);
        rep.row({fmt_num(g), fmt_num(k.c1), fmt_num(k.c2), fmt_num(k.c3),
                 fmt_num(b.m_k), fmt_num(b.z_gamma), fmt_num(b.bracket_width), "ok"});
      } catch (const BracketFailure& e) {
        rep.row({fmt_num(g), fmt_num(k.c1), fmt_num(k.c2), fmt_num(k.c3),
                 fmt_num(m), "", "", std::string("bracket-failure ") + e.what()});
      }
    }
  }
  rep.manifest("wall_total_s", elapsed(t0));
  return rep.emit(c.out, c.format);
}

int cmd_spectrum(const CommonOpts& c, const std::vector<std::string>& k_args,
                 const std::vector<double>& zs, int grid_n, int graded_levels,
                 const std::string& sector_name) {
  std::vector<TorusVec> ks;
  for (const auto& s : k_args) ks.push_back(parse_k(s));
  if (ks.empty()) ks.push_back(TorusVec{});
  const ExchangeSector sector = sector_name == "anti"
                                    ? ExchangeSector::antisymmetric
                                    : ExchangeSector::symmetric;

  Report rep("spectrum", {"gamma", "K1", "K2", "K3", "tau", "e_min", "e_max", "z",
                          "count", "margin", "ambiguous"});
  const auto t0 = clk::now();
  const QuadratureEstimate mu0 = compute_mu0(c.mu0_tol);
  rep.manifest("sector", sector_name);
  rep.manifest("grid_n", static_cast<double>(grid_n));

  for (double g : c.gammas) {
    const ModelParams par = make_params(g, mu0);
    manifest_params(rep, par);
    for (const TorusVec& K : ks) {
      const auto tk = clk::now();
      TauOptions topt;
      topt.compute_hessian = false;
      const ChannelMin cm = tau_channel_min(K, par, topt);
      const BandEdges be = band_edges(K, par);
      rep.manifest("wall_tau_s", elapsed(tk));
      if (zs.empty()) {
        rep.row({fmt_num(g), fmt_num(K.c1), fmt_num(K.c2), fmt_num(K.c3),
                 fmt_num(cm.tau), fmt_num(be.e_min), fmt_num(be.e_max), "", "", "",
                 ""});
        continue;
      }
      for (double z : zs) {
        if (!(z < cm.tau)) {
          std::cerr << "validation: z = " << z << " is not below tau(K) = "
                    << cm.tau << "\n";
          return 2;
        }
        const GridSpec grid = make_bs_grid(cm, z, grid_n, graded_levels);
        const CountReport cr =
            eigen_count_N(K, z, par, grid, sector, DeltaEval::refined,
                          fast_det_options());
        rep.row({fmt_num(g), fmt_num(K.c1), fmt_num(K.c2), fmt_num(K.c3),
                 fmt_num(cm.tau), fmt_num(be.e_min), fmt_num(be.e_max), fmt_num(z),
                 std::to_string(cr.count), fmt_num(cr.margin),
                 cr.ambiguous ? "yes" : "no"});
      }
    }
  }
  rep.manifest("wall_total_s", elapsed(t0));
  return rep.emit(c.out, c.format);
}

int cmd_efimov(const CommonOpts& c, double mu, int l_max,
               const std::vector<double>& ratio_rs,
               const std::vector<double>& z_logrange,
               const std::vector<double>& k_logrange, int grid_n,
               int graded_levels) {
  Report rep("efimov",
             {"gamma", "kind", "l_or_r_or_z", "value", "detail1", "detail2"});
  const auto t0 = clk::now();
  const QuadratureEstimate mu0 = compute_mu0(c.mu0_tol);
  rep.manifest("mu", mu);
  rep.manifest("l_max", static_cast<double>(l_max));

  for (double g : c.gammas) {
    const ModelParams par = make_params(g, mu0);
    manifest_params(rep, par);

    for (int l = 0; l <= l_max; ++l) {
      const double mes = level_set_measure(l, mu, par);
      rep.row({fmt_num(g), "level_measure", std::to_string(l), fmt_num(mes),
               fmt_num(partial_wave(l, 0.0, par)), ""});
    }
    const EfimovCoefficient U = efimov_coefficient(mu, par, l_max);
    rep.row({fmt_num(g), "U", "", fmt_num(U.value), fmt_num(U.truncation_estimate),
             ""});

    for (double r : ratio_rs) {
      const SOperatorCount sc = s_operator_count(r, mu, par, l_max);
      rep.row({fmt_num(g), "ratio", fmt_num(r), fmt_num(sc.ratio),
               std::to_string(sc.count), fmt_num(U.value)});
    }

    if (!z_logrange.empty()) {
      const std::vector<double> zs = logrange_z(z_logrange);
      TauOptions topt;
      topt.compute_hessian = false;
      const ChannelMin cm = tau_channel_min({}, par, topt);
      std::vector<double> xs, ns;
      for (double z : zs) {
        const GridSpec grid = make_bs_grid(cm, z, grid_n, graded_levels);
        const CountReport cr = eigen_count_N({}, z, par, grid,
                                             ExchangeSector::symmetric,
                                             DeltaEval::refined, fast_det_options());
        xs.push_back(std::abs(std::log(std::abs(z))));
        ns.push_back(cr.count);
        rep.row({fmt_num(g), "count_z", fmt_num(z),
                 std::to_string(cr.count), fmt_num(cr.margin),
                 cr.ambiguous ? "ambiguous" : ""});
      }
      if (xs.size() >= 4) {
        const LineFit fit = slope_fit(xs, ns);
        rep.row({fmt_num(g), "slope_z_vs_U", "", fmt_num(fit.slope), fmt_num(U.value),
                 fmt_num(fit.residual)});
      }
    }

    if (!k_logrange.empty()) {
      // |K| sweep at z = 0-: counts against 2 U
      std::vector<double> exps = k_logrange;
      const std::vector<double> kmags = [&] {
        std::vector<double> v;
        const double a = exps[0], b = exps[1];
        const int n = static_cast<int>(exps[2]);
        for (int i = 0; i < n; ++i)
          v.push_back(std::pow(10.0, (n == 1) ? a : a + (b - a) * i / (n - 1)));
        return v;
      }();
      std::vector<double> xs, ns;
      for (double km : kmags) {
        const TorusVec K = wrap(km, 0.0, 0.0);
        TauOptions topt;
        topt.compute_hessian = false;
        const ChannelMin cm = tau_channel_min(K, par, topt);
        const double z = 0.0;
        if (!(z < cm.tau)) {
          std::cerr << "validation: tau(K) <= 0 at |K| = " << km << "\n";
          return 2;
        }
        const GridSpec grid = make_bs_grid(cm, z, grid_n, graded_levels);
        const CountReport cr = eigen_count_N(K, z, par, grid,
                                             ExchangeSector::symmetric,
                                             DeltaEval::refined, fast_det_options());
        xs.push_back(std::abs(std::log(km)));
        ns.push_back(cr.count);
        rep.row({fmt_num(g), "count_K", fmt_num(km),
                 std::to_string(cr.count), fmt_num(cr.margin),
                 cr.ambiguous ? "ambiguous" : ""});
      }
      if (xs.size() >= 4) {
        const LineFit fit = slope_fit(xs, ns);
        rep.row({fmt_num(g), "slope_K_vs_2U", "", fmt_num(fit.slope),
                 fmt_num(2.0 * efimov_coefficient(mu, par, l_max).value),
                 fmt_num(fit.residual)});
      }
    }
  }
  rep.manifest("wall_total_s", elapsed(t0));
  return rep.emit(c.out, c.format);
}

int cmd_oracle(const CommonOpts& c, const std::vector<std::string>& k_args,
               std::vector<double> zs, int oracle_n,
               const std::string& sector_name) {
  if (zs.empty()) zs = {-0.5, -0.05};
  std::vector<TorusVec> ks;
  for (const auto& s : k_args) ks.push_back(parse_k(s));
  if (ks.empty()) ks.push_back(TorusVec{});
  const ExchangeSector sector = sector_name == "anti"
                                    ? ExchangeSector::antisymmetric
                                    : ExchangeSector::symmetric;

  Report rep("oracle", {"gamma", "K1", "K2", "K3", "z", "count_bs", "count_direct",
                        "equal", "margin_direct", "margin_bs", "ambiguous"});
  const auto t0 = clk::now();
  const QuadratureEstimate mu0 = compute_mu0(c.mu0_tol);
  rep.manifest("sector", sector_name);
  rep.manifest("oracle_n", static_cast<double>(oracle_n));

  bool all_equal = true;
  for (double g : c.gammas) {
    const ModelParams par = make_params(g, mu0);
    manifest_params(rep, par);
    for (const TorusVec& K : ks)
      for (double z : zs) {
        GridSpec grid;
        grid.n_per_axis = oracle_n;
        grid.offset = (oracle_n % 2 == 0);
        const CountReport bs =
            eigen_count_N(K, z, par, grid, sector, DeltaEval::shared_grid);
        const OracleReport dir = direct_count_oracle(K, z, par, oracle_n, sector);
        const bool equal = bs.count == dir.count;
        if (!equal && !bs.ambiguous && dir.margin > 1e-3) all_equal = false;
        rep.row({fmt_num(g), fmt_num(K.c1), fmt_num(K.c2), fmt_num(K.c3), fmt_num(z),
                 std::to_string(bs.count), std::to_string(dir.count),
                 equal ? "yes" : "no", fmt_num(dir.margin), fmt_num(bs.margin),
                 bs.ambiguous ? "yes" : "no"});
      }
  }
  rep.manifest("wall_total_s", elapsed(t0));
  const int rc = rep.emit(c.out, c.format);
  if (rc != 0) return rc;
  return all_equal ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spectral data for the lattice fermion-fermion-boson system"};
  app.require_subcommand(1);

  CommonOpts c_res, c_disp, c_spec, c_efi, c_ora;

  auto* res = app.add_subcommand("resonance",
                                 "coupling normalization and Delta(0,0) check");
  add_common(res, c_res);
  double coupling_scale = 1.0;
  res->add_option("--coupling-scale", coupling_scale,
                  "scale v(gamma) (1 = exact normalization)")
      ->capture_default_str();

  auto* disp = app.add_subcommand("dispersion", "band bottom and bound state over k");
  add_common(disp, c_disp);
  std::vector<std::string> disp_ks;
  int path_n = 8;
  double bisect_tol = 0.0;
  disp->add_option("--K", disp_ks, "k points 'a,b,c' (default: zone path)");
  disp->add_option("--path-n", path_n, "points per path segment")->capture_default_str();
  disp->add_option("--bisect-tol", bisect_tol, "bisection tolerance (0 = default)");

  auto* spec = app.add_subcommand("spectrum",
                                  "essential interval and eigenvalue count at z");
  add_common(spec, c_spec);
  std::vector<std::string> spec_ks;
  std::vector<double> spec_zs;
  int spec_grid = 10, spec_levels = 8;
  std::string spec_sector = "sym";
  spec->add_option("--K", spec_ks, "total quasi-momenta 'a,b,c'");
  spec->add_option("--z", spec_zs, "energies below tau for counting");
  spec->add_option("--grid", spec_grid, "three-body grid n per axis")
      ->check(CLI::Range(4, 64))
      ->capture_default_str();
  spec->add_option("--graded-levels", spec_levels, "radial nodes per decade")
      ->capture_default_str();
  spec->add_option("--sector", spec_sector, "sym | anti")
      ->check(CLI::IsMember({"sym", "anti"}))
      ->capture_default_str();

  auto* efi = app.add_subcommand("efimov", "asymptotic coefficient and sweeps");
  add_common(efi, c_efi);
  double mu = 1.0;
  int l_max = 8, efi_grid = 10, efi_levels = 8;
  std::vector<double> ratio_rs, z_lr, k_lr;
  efi->add_option("--mu", mu, "counting level")->capture_default_str();
  efi->add_option("--l-max", l_max, "partial wave truncation")->capture_default_str();
  efi->add_option("--ratio-r", ratio_rs, "model operator sizes r");
  efi->add_option("--z-logrange", z_lr, "a b n: z = -10^e sweep")->expected(3);
  efi->add_option("--K-logrange", k_lr, "a b n: |K| = 10^e sweep at z=0")->expected(3);
  efi->add_option("--grid", efi_grid, "three-body grid n per axis")
      ->check(CLI::Range(4, 64))
      ->capture_default_str();
  efi->add_option("--graded-levels", efi_levels, "radial nodes per decade")
      ->capture_default_str();

  auto* ora = app.add_subcommand("oracle",
                                 "Birman-Schwinger vs direct diagonalization");
  add_common(ora, c_ora);
  std::vector<std::string> ora_ks;
  std::vector<double> ora_zs;
  int oracle_n = 4;
  std::string ora_sector = "sym";
  ora->add_option("--K", ora_ks, "total quasi-momenta 'a,b,c'");
  ora->add_option("--z", ora_zs, "energies to count at");
  ora->add_option("--grid-oracle", oracle_n, "shared grid n per axis (<= 5)")
      ->check(CLI::Range(2, 5))
      ->capture_default_str();
  ora->add_option("--sector", ora_sector, "sym | anti")
      ->check(CLI::IsMember({"sym", "anti"}))
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? 0 : 2;
  }

  try {
    if (res->parsed()) return cmd_resonance(c_res, coupling_scale);
    if (disp->parsed())
      return cmd_dispersion(c_disp, disp_ks, path_n, bisect_tol);
    if (spec->parsed())
      return cmd_spectrum(c_spec, spec_ks, spec_zs, spec_grid, spec_levels,
                          spec_sector);
    if (efi->parsed())
      return cmd_efimov(c_efi, mu, l_max, ratio_rs, z_lr, k_lr, efi_grid,
                        efi_levels);
    if (ora->parsed())
      return cmd_oracle(c_ora, ora_ks, ora_zs, oracle_n, ora_sector);
  } catch (const std::invalid_argument& e) {
    std::cerr << "validation: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numerical consistency: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
