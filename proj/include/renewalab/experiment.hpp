#pragma once

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <optional>

#include "renewalab/catalog.hpp"
#include "renewalab/config.hpp"
#include "renewalab/csv.hpp"
#include "renewalab/oscillatory.hpp"
#include "renewalab/renewal.hpp"
#include "renewalab/spectral.hpp"

namespace renewalab {

inline constexpr const char* version_string = "0.1.0";

// exit codes: 0 ok, 1 error (bad input / crash), 2 ran correctly but a
// mathematical assertion failed
inline constexpr int exit_ok = 0;
inline constexpr int exit_error = 1;
inline constexpr int exit_assert = 2;

struct RunSettings {
  std::string out_dir = ".";
  int workers = 0;  // 0 = hardware concurrency
  std::optional<std::uint64_t> seed;
};

namespace detail {

inline std::uint64_t resolve_seed(const Config& cfg, const RunSettings& rs) {
  if (rs.seed) return *rs.seed;
  if (const char* env = std::getenv("RENEWALAB_SEED")) return std::strtoull(env, nullptr, 10);
  return std::uint64_t(cfg.get_int("seed", 12345));
}

inline std::string out_path(const RunSettings& rs, const std::string& name) {
  std::filesystem::create_directories(rs.out_dir);
  return (std::filesystem::path(rs.out_dir) / name).string();
}

inline void write_manifest(const Config& cfg, const RunSettings& rs, std::uint64_t seed,
                           const std::vector<std::string>& artifacts, double wall_ms) {
  const std::string kind = cfg.get_string("experiment");
  std::ofstream out(out_path(rs, kind + "-manifest.txt"));
  char hash[32];
  std::snprintf(hash, sizeof(hash), "%016llx", static_cast<unsigned long long>(config_hash(cfg)));
  out << "experiment = " << kind << "\n"
      << "config_hash = " << hash << "\n"
      << "seed = " << seed << "\n"
      << "workers = " << (rs.workers > 0 ? rs.workers : default_workers()) << "\n"
      << "version = " << version_string << "\n";
  for (const auto& a : artifacts) out << "artifact = " << a << "\n";
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char ts[64];
  std::strftime(ts, sizeof(ts), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  out << "timestamp = " << ts << " wall_ms=" << std::llround(wall_ms) << "\n";
}

inline ARModel build_ar(const Config& cfg) {
  const std::string name = cfg.get_string("model");
  if (name != "inline-ar") return make_ar_model(name);
  const int d = int(cfg.get_int("model.d"));
  return ARModel(cfg.get_mat("model.A", d, d), cfg.get_vec("model.noise_mean"),
                 cfg.get_mat("model.noise_cov", d, d));
}

inline FiniteChain build_chain(const Config& cfg) {
  const std::string name = cfg.get_string("model");
  if (name != "inline-chain") return make_chain(name);
  const int n = int(cfg.get_int("model.states"));
  const int d = int(cfg.get_int("model.d"));
  std::optional<Vec> f;
  if (cfg.has("model.f")) f = cfg.get_vec("model.f");
  return FiniteChain(cfg.get_mat("model.P", n, n), cfg.get_mat("model.xi", n, d), cfg.get_vec("model.mu"),
                     f);
}

inline bool model_is_chain(const Config& cfg) {
  const std::string name = cfg.get_string("model");
  return name == "inline-chain" || is_chain_model(name);
}

inline TargetSet build_set(const Config& cfg) {
  const std::string kind = cfg.get_string("set.kind", "box");
  if (kind == "box") return TargetSet::box(cfg.get_vec("set.center"), cfg.get_vec("set.halfwidths"));
  if (kind == "ball") return TargetSet::ball(cfg.get_vec("set.center"), cfg.get_real("set.radius"));
  throw std::runtime_error("set.kind must be 'box' or 'ball'");
}

// ---------------------------------------------------------------------------

inline int run_model_info(const Config& cfg, const RunSettings& rs, std::uint64_t seed,
                          std::vector<std::string>& artifacts) {
  const std::string path = out_path(rs, "model_info.csv");
  CsvWriter csv(path, {"quantity", "index", "value"});
  artifacts.push_back(path);
  auto emit_vec = [&](const std::string& name, const Vec& v) {
    for (int i = 0; i < v.size(); ++i)
      csv.row({name, std::int64_t(i), v(i)});
  };
  auto emit_mat = [&](const std::string& name, const Mat& m) {
    for (int i = 0; i < m.rows(); ++i)
      for (int j = 0; j < m.cols(); ++j)
        csv.row({name, std::int64_t(i * m.cols() + j), m(i, j)});
  };
  if (model_is_chain(cfg)) {
    const FiniteChain chain = build_chain(cfg);
    emit_vec("stationary_dist", stationary_dist(chain));
    emit_vec("drift", mean_vector(chain));
    const auto lrs = longrun_sigma(chain);
    emit_mat("sigma", lrs.sigma);
    csv.row({"sigma_positive_definite", std::int64_t(0), std::int64_t(lrs.positive_definite)});
    const auto diag = nonlattice_diagnostic(chain, 2.0 * pi + 0.5);
    csv.row({"lattice_evidence", std::int64_t(0), std::int64_t(diag.lattice_evidence)});
    csv.row({"max_offzero_spectral_radius", std::int64_t(0), diag.max_offzero_radius});
  } else {
    const ARModel model = build_ar(cfg);
    emit_vec("drift", mean_vector(model));
    const auto lrs = longrun_sigma(model);
    emit_mat("sigma", lrs.sigma);
    csv.row({"sigma_positive_definite", std::int64_t(0), std::int64_t(lrs.positive_definite)});
    const auto rep = lim_hypothesis_report(model, cfg.get_real("eps0", 0.5), 100000, seed);
    csv.row({"contraction", std::int64_t(0), rep.contraction});
    csv.row({"m_d", std::int64_t(0), rep.m_d});
    csv.row({"required_moment_order", std::int64_t(0), rep.required_order});
    csv.row({"mc_moment", std::int64_t(0), rep.mc_moment});
  }
  return exit_ok;
}

inline int run_spectral_report(const Config& cfg, const RunSettings& rs, std::uint64_t,
                               std::vector<std::string>& artifacts) {
  if (!model_is_chain(cfg)) throw std::runtime_error("spectral-report requires a finite-chain model");
  const FiniteChain chain = build_chain(cfg);
  const int d = chain.dim();
  const double radius = cfg.get_real("grid.radius", 0.3);
  const int per_axis = int(cfg.get_int("grid.per_axis", 7));

  std::vector<Vec> ts;
  std::vector<int> idx(d, 0);
  while (true) {
    Vec t(d);
    for (int i = 0; i < d; ++i) t(i) = -radius + 2.0 * radius * idx[i] / double(per_axis - 1);
    if (t.norm() <= radius) ts.push_back(t);
    int i = 0;
    for (; i < d; ++i) {
      if (++idx[i] < per_axis) break;
      idx[i] = 0;
    }
    if (i == d) break;
  }

  const std::string grid_path = out_path(rs, "spectral_grid.csv");
  {
    std::vector<std::string> header;
    for (int i = 0; i < d; ++i) header.push_back("t" + std::to_string(i + 1));
    header.insert(header.end(), {"re_lambda", "im_lambda", "abs_lambda", "re_L", "im_L"});
    CsvWriter csv(grid_path, header);
    for (const auto& row : lambda_grid(chain, ts)) {
      std::vector<CsvField> fields;
      for (int i = 0; i < d; ++i) fields.push_back(row.t(i));
      fields.insert(fields.end(), {row.lambda.real(), row.lambda.imag(), std::abs(row.lambda),
                                   row.L.real(), row.L.imag()});
      csv.row(fields);
    }
  }
  artifacts.push_back(grid_path);

  bool pass = true;
  const std::string checks_path = out_path(rs, "spectral_checks.csv");
  {
    CsvWriter csv(checks_path, {"check", "value", "pass"});
    const Vec m_fd = grad_lambda_zero(chain);
    const Vec m_exact = mean_vector(chain);
    const double grad_err = (m_fd - m_exact).norm();
    csv.row({"grad_consistency", grad_err, std::int64_t(grad_err < 1e-6)});
    pass = pass && grad_err < 1e-6;

    const Mat sig_fd = hess_lambda_zero(chain);
    const Mat sig_exact = longrun_sigma(chain).sigma;
    const double hess_err = (sig_fd - sig_exact).norm();
    csv.row({"hess_consistency", hess_err, std::int64_t(hess_err < 1e-4)});
    pass = pass && hess_err < 1e-4;

    Vec t0 = Vec::Zero(d);
    t0(0) = 0.1;
    if (d > 1) t0(1) = 0.07;
    const auto dec = decomposition_check(chain, t0, 40);
    const double rate_err = std::abs(dec.fitted_rate - dec.sub_modulus);
    csv.row({"remainder_rate_error", rate_err, std::int64_t(rate_err < 0.02)});
    pass = pass && rate_err < 0.02;
  }
  artifacts.push_back(checks_path);
  return pass ? exit_ok : exit_assert;
}

inline int run_renewal(const Config& cfg, const RunSettings& rs, std::uint64_t seed,
                       std::vector<std::string>& artifacts) {
  const TargetSet a_set = build_set(cfg);
  const auto taus = cfg.get_reals("tau");
  const std::int64_t paths = cfg.get_int("paths", 100000);
  const double margin = cfg.get_real("margin_sigmas", 12.0);

  std::vector<RenewalEstimate> rows;
  if (model_is_chain(cfg)) {
    const FiniteChain chain = build_chain(cfg);
    const Vec m = mean_vector(chain);
    Vec frak_A = cfg.has("dir.frak_a") ? cfg.get_vec("dir.frak_a") : Vec::Zero(chain.dim());
    DirectionFunction dir(m, frak_A);
    rows = convergence_study(chain, a_set, dir, taus, paths, seed, rs.workers, margin);
  } else {
    const ARModel model = build_ar(cfg);
    const Vec m = mean_vector(model);
    Vec frak_A = cfg.has("dir.frak_a") ? cfg.get_vec("dir.frak_a") : Vec::Zero(model.dim());
    DirectionFunction dir(m, frak_A);
    rows = convergence_study(model, a_set, dir, taus, paths, seed, rs.workers, margin);
  }

  const std::string path = out_path(rs, "renewal.csv");
  CsvWriter csv(path, {"tau", "v_hat", "std_err", "theory", "ratio", "n_paths", "n_max", "seed"});
  for (const auto& r : rows)
    csv.row({r.tau, r.v_hat, r.std_err, r.theory, r.v_hat / r.theory, std::int64_t(r.n_paths),
             std::int64_t(r.n_max), std::int64_t(r.seed)});
  artifacts.push_back(path);
  return exit_ok;
}

inline int run_oscillatory(const Config& cfg, const RunSettings& rs, std::uint64_t,
                           std::vector<std::string>& artifacts) {
  const std::string suite = cfg.get_string("suite", "i1-ladder");
  const int d = int(cfg.get_int("d", 2));
  bool pass = true;

  if (suite == "gauss") {
    const std::string path = out_path(rs, "oscillatory_gauss.csv");
    CsvWriter csv(path, {"n", "residual"});
    for (int n = 1; n <= 3; ++n) {
      Vec b = Vec::Zero(n);
      for (int i = 0; i < n; ++i) b(i) = 0.7 + 0.4 * i;
      const double r = gauss_fourier_identity_check(n, b);
      csv.row({std::int64_t(n), r});
      pass = pass && r < 1e-10;
    }
    artifacts.push_back(path);
  } else if (suite == "j-lemma") {
    const auto taus = cfg.get_reals("tau", {100, 1000, 10000});
    const std::string path = out_path(rs, "oscillatory_j.csv");
    CsvWriter csv(path, {"tau", "scaled_value", "limit", "ratio"});
    Vec ell = Vec::Zero(d - 1);
    if (cfg.has("ellprime")) ell = cfg.get_vec("ellprime");
    auto u1 = [](double) { return 0.0; };
    auto up = [&](double tau) -> Vec { return std::sqrt(tau) * ell; };
    for (double tau : taus) {
      const cplx j = j_mu_reduced(1.0, tau, u1, up, d);
      const double scaled = std::pow(tau, 0.5 * (d - 1)) * std::abs(j);
      const double limit = std::pow(tau, 0.5 * (d - 1)) * j_mu_asymptote(1.0, ell, d, tau);
      csv.row({tau, scaled, limit, scaled / limit});
      if (tau == taus.back()) pass = pass && std::abs(scaled / limit - 1.0) < 0.02;
    }
    artifacts.push_back(path);
  } else if (suite == "prop-equivalent") {
    const auto taus = cfg.get_reals("tau", {50, 100, 200, 400});
    Vec w(d);
    w.setZero();
    w(0) = 2.0;
    if (cfg.has("w")) w = cfg.get_vec("w");
    Vec frak_P = Vec::Zero(d);
    if (cfg.has("frak_p")) frak_P = cfg.get_vec("frak_p");
    const CutoffFunction chi(d, cfg.get_real("chi.rho", 0.5), cfg.get_real("chi.r", 1.0));
    const double limit = prop_equivalent_limit(w, frak_P, 1.0);
    const std::string path = out_path(rs, "oscillatory_prop.csv");
    CsvWriter csv(path, {"tau", "scaled_value", "limit", "ratio"});
    for (double tau : taus) {
      auto p_fn = [&](double t) -> Vec { return std::sqrt(t) * frak_P; };
      const cplx val = oscillatory_integral_direct([&](const Vec& u) { return cplx(chi(u), 0.0); }, w, tau,
                                                   p_fn, chi.R_out, 32, 1e-4);
      const double scaled = std::pow(tau, 0.5 * (d - 1)) * std::abs(val);
      csv.row({tau, scaled, limit, scaled / limit});
      if (tau == taus.back()) pass = pass && std::abs(scaled / limit - 1.0) < 0.02;
    }
    artifacts.push_back(path);
  } else if (suite == "i1-ladder") {
    const auto taus = cfg.get_reals("tau", {50, 100, 200, 400});
    Vec m(d);
    m.setZero();
    m(0) = 1.0;
    if (cfg.has("m")) m = cfg.get_vec("m");
    Mat sig = Mat::Identity(d, d);
    if (cfg.has("sigma")) sig = cfg.get_mat("sigma", d, d);
    Vec frak_A = Vec::Zero(d);
    if (cfg.has("frak_a")) frak_A = cfg.get_vec("frak_a");
    const CutoffFunction chi(d, cfg.get_real("chi.rho", 0.6), cfg.get_real("chi.r", 1.2));
    const auto rep = i1_limit_check(1.0, m, SymPosDef(sig), chi, frak_A, taus);
    const std::string path = out_path(rs, "oscillatory_i1.csv");
    CsvWriter csv(path, {"tau", "scaled_value", "limit", "ratio"});
    for (const auto& r : rep.rows) csv.row({r.tau, std::abs(r.scaled), r.limit, std::abs(r.scaled) / r.limit});
    artifacts.push_back(path);
    pass = rep.pass;
  } else if (suite == "e1-decay") {
    const auto taus = cfg.get_reals("tau", {50, 100, 200});
    Vec m(d);
    m.setZero();
    m(0) = 1.0;
    if (cfg.has("m")) m = cfg.get_vec("m");
    Mat sig = Mat::Identity(d, d);
    if (cfg.has("sigma")) sig = cfg.get_mat("sigma", d, d);
    const CutoffFunction chi(d, cfg.get_real("chi.rho", 0.6), cfg.get_real("chi.r", 1.2));
    const auto rep = e1_decay_check(m, SymPosDef(sig), chi, taus);
    const std::string path = out_path(rs, "oscillatory_e1.csv");
    CsvWriter csv(path, {"tau", "scaled_value", "limit", "ratio"});
    for (const auto& r : rep.rows) csv.row({r.tau, r.scaled, rep.rows.front().scaled, r.ratio_to_first});
    artifacts.push_back(path);
    pass = rep.pass;
  } else {
    throw std::runtime_error("oscillatory-check: unknown suite '" + suite + "'");
  }
  return pass ? exit_ok : exit_assert;
}

inline int run_dyadic(const Config& cfg, const RunSettings& rs, std::uint64_t seed,
                      std::vector<std::string>& artifacts) {
  const std::string suite = cfg.get_string("suite", "partition");
  const int d = int(cfg.get_int("d", 2));
  const double m_order = cfg.get_real("m_order", 2.5);
  const int budget = int(cfg.get_int("budget", 3000));
  bool pass = true;

  auto write_norm_table = [&](const std::string& name, const ScaledNormTable& table, double max_slope) {
    const std::string path = out_path(rs, "dyadic_" + name + ".csv");
    CsvWriter csv(path, {"k", "sup_order0", "sup_order1", "sup_order2", "holder_top", "total",
                         "fitted_slope"});
    for (const auto& r : table.rows) {
      const auto& s = r.norm.sup_by_order;
      csv.row({std::int64_t(r.k), s.size() > 0 ? s[0] : 0.0, s.size() > 1 ? s[1] : 0.0,
               s.size() > 2 ? s[2] : 0.0, r.norm.holder_top, r.norm.total, table.fitted_slope});
    }
    artifacts.push_back(path);
    pass = pass && table.fitted_slope <= max_slope;
  };

  const int k0 = k0_for_radius(1.0);
  const int k_begin = int(cfg.get_int("k.begin", k0));
  const int k_end = int(cfg.get_int("k.end", k_begin + 6));
  const double nu = std::min(m_order - 2.0, 1.0);

  if (suite == "partition") {
    DyadicPartition part(d);
    Rng rng(seed, 0);
    const std::int64_t n = cfg.get_int("points", 100000);
    double worst = 0;
    int worst_window = 0;
    for (std::int64_t i = 0; i < n; ++i) {
      // |w| log-uniform over [1e-12, 1e6] via a random point rescaled
      Vec x(d);
      for (int j = 0; j < d; ++j) x(j) = 2.0 * rng.uniform() - 1.0;
      if (w_abs(x) == 0) continue;
      const double target = std::pow(10.0, -12.0 + 18.0 * rng.uniform());
      const double s = w_abs(x);
      // anisotropic rescale moving |w| to target: dilation by real-valued k
      const double alpha = target / s;
      Vec y(d);
      y(0) = x(0) * alpha;
      for (int j = 1; j < d; ++j) y(j) = x(j) * std::sqrt(alpha);
      worst = std::max(worst, std::abs(part.partition_sum(y) - 1.0));
      worst_window = std::max(worst_window, part.window_count(y));
    }
    const std::string path = out_path(rs, "dyadic_partition.csv");
    CsvWriter csv(path, {"points", "max_abs_deviation", "max_window_terms"});
    csv.row({std::int64_t(n), worst, std::int64_t(worst_window)});
    artifacts.push_back(path);
    pass = worst < 1e-10 && worst_window <= 3;
  } else if (suite == "theta") {
    write_norm_table("theta", scaled_norm_table(make_theta_x2(d), ScaledKind::theta, k_begin, k_end,
                                                m_order, budget, seed),
                     -1.0 + 0.15);
  } else if (suite == "theta-jet3") {
    write_norm_table("theta_jet3", scaled_norm_table(make_theta_jet3(d), ScaledKind::theta2, k_begin,
                                                     k_end, m_order, budget, seed),
                     -(2.0 + nu) + 0.15);
  } else if (suite == "v") {
    write_norm_table("v", scaled_norm_table(make_v_quadratic(d), ScaledKind::v, std::max(k_begin, k0_for_radius(0.5)),
                                            std::max(k_end, k0_for_radius(0.5) + 6), m_order, budget, seed),
                     -2.0 + 0.15);
  } else if (suite == "inv-v") {
    write_norm_table("inv_v", scaled_norm_table(make_v_quadratic(d), ScaledKind::inv_v,
                                                std::max(k_begin, k0_for_radius(0.5)),
                                                std::max(k_end, k0_for_radius(0.5) + 6), m_order, budget, seed),
                     2.0 + 0.15);
  } else if (suite == "psi" || suite == "psi-m1" || suite == "psi-tilde") {
    const double mm = suite == "psi-m1" ? 1.0 : m_order;
    const FuncHandle v = make_v_quadratic(d);
    const int kb = std::max(k_begin, k0_for_radius(0.5));
    const int ke = std::max(k_end, kb + 6);
    if (suite == "psi-tilde") {
      const FuncHandle theta = make_theta_jet3(d);
      write_norm_table("psi_tilde", psi_k_norm_law(theta, v, &v, kb, ke, mm, budget, seed),
                       (2.0 - nu) + 0.15);
    } else {
      const FuncHandle theta = make_theta_x2(d);
      write_norm_table(suite == "psi-m1" ? "psi_m1" : "psi",
                       psi_k_norm_law(theta, v, nullptr, kb, ke, mm, budget, seed), 1.0 + 0.15);
    }
  } else if (suite == "fourier-decay") {
    const FuncHandle theta = make_theta_cone(d);
    const FuncHandle v = make_v_quadratic(d);
    std::vector<double> mags = cfg.get_reals("magnitudes", {50, 100, 200, 400});
    const auto rep = fourier_decay_check(theta, v, nullptr, {Vec::Unit(d, 0)}, mags, 16, false);
    const std::string path = out_path(rs, "dyadic_decay.csv");
    CsvWriter csv(path, {"a_norm", "qhat_abs", "scaled"});
    for (const auto& row : rep.rays.front()) csv.row({row.magnitude, row.q_hat_abs, row.scaled});
    artifacts.push_back(path);
    pass = rep.decay_ok;
  } else if (suite == "cm-bound") {
    const FuncHandle u = make_u_bump(d);
    std::vector<double> mags = cfg.get_reals("magnitudes", {1, 2, 5, 10, 20, 50, 100, 150, 200});
    const auto rep = cm_fourier_bound_check(u, cfg.get_real("m_order", 2.0), Vec::Unit(d, 0), mags);
    const std::string path = out_path(rs, "dyadic_cm_bound.csv");
    CsvWriter csv(path, {"a_norm", "uhat_abs", "scaled"});
    for (const auto& row : rep.rows) csv.row({row.magnitude, row.u_hat_abs, row.scaled});
    artifacts.push_back(path);
    pass = rep.stable;
  } else if (suite == "product-holder") {
    const Region region = Region::ball(Vec::Zero(d), 1.0);
    const auto rep = product_holder_check(make_theta_x2(d), make_u_bump(d), 0.5, region, budget, seed);
    const std::string path = out_path(rs, "dyadic_product_holder.csv");
    CsvWriter csv(path, {"fg_semi", "f_sup", "g_semi", "g_sup", "f_semi", "holds"});
    csv.row({rep.fg_semi, rep.f_sup, rep.g_semi, rep.g_sup, rep.f_semi, std::int64_t(rep.holds)});
    artifacts.push_back(path);
    pass = rep.holds;
  } else {
    throw std::runtime_error("dyadic-check: unknown suite '" + suite + "'");
  }
  return pass ? exit_ok : exit_assert;
}

inline const std::set<std::string>& allowed_keys() {
  static const std::set<std::string> keys = {
      "experiment", "model", "model.d", "model.states", "model.A", "model.noise_mean", "model.noise_cov",
      "model.P", "model.xi", "model.mu", "model.f", "seed", "workers", "out", "eps0", "grid.radius",
      "grid.per_axis", "set.kind", "set.center", "set.halfwidths", "set.radius", "tau", "paths",
      "margin_sigmas", "dir.frak_a", "suite", "d", "m_order", "budget", "k.begin", "k.end", "points",
      "magnitudes", "m", "sigma", "frak_a", "frak_p", "w", "ellprime", "chi.rho", "chi.r"};
  return keys;
}

}  // namespace detail

/// Executes the experiment named by `experiment` in the config; returns the
/// process exit code and writes CSV artifacts plus a run manifest.
inline int run_experiment(const Config& cfg, const RunSettings& rs) {
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<std::string> artifacts;
  int code = exit_error;
  const std::string kind = cfg.get_string("experiment");
  const std::uint64_t seed = detail::resolve_seed(cfg, rs);

  static const std::set<std::string> required_by_kind[] = {
      {"experiment", "model"},  // model-info
      {"experiment", "model"},  // spectral-report
      {"experiment", "model", "tau", "set.center"},  // renewal-run
      {"experiment"},           // oscillatory-check
      {"experiment"},           // dyadic-check
  };
  int kind_idx = -1;
  if (kind == "model-info") kind_idx = 0;
  else if (kind == "spectral-report") kind_idx = 1;
  else if (kind == "renewal-run") kind_idx = 2;
  else if (kind == "oscillatory-check") kind_idx = 3;
  else if (kind == "dyadic-check") kind_idx = 4;
  if (kind_idx < 0) throw std::runtime_error("unknown experiment kind '" + kind + "'");
  cfg.validate(detail::allowed_keys(), required_by_kind[kind_idx]);

  switch (kind_idx) {
    case 0: code = detail::run_model_info(cfg, rs, seed, artifacts); break;
    case 1: code = detail::run_spectral_report(cfg, rs, seed, artifacts); break;
    case 2: code = detail::run_renewal(cfg, rs, seed, artifacts); break;
    case 3: code = detail::run_oscillatory(cfg, rs, seed, artifacts); break;
    case 4: code = detail::run_dyadic(cfg, rs, seed, artifacts); break;
  }

  const double wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  detail::write_manifest(cfg, rs, seed, artifacts, wall_ms);
  return code;
}

}  // namespace renewalab
