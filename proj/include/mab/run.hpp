#pragma once

// Batch front door: a RunConfig names a command plus its inputs; run()
// dispatches, writes the artifact files plus a manifest into the output
// directory, and maps failures onto distinct exit codes.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "mab/analysis.hpp"
#include "mab/barrier.hpp"
#include "mab/errors.hpp"
#include "mab/exponents.hpp"
#include "mab/geometry.hpp"
#include "mab/io.hpp"
#include "mab/oracle.hpp"
#include "mab/rhs.hpp"
#include "mab/rng.hpp"
#include "mab/solver.hpp"

namespace mab {

enum ExitCode : int {
  kOk = 0,
  kConfigError = 2,
  kParamDomainError = 3,
  kSearchFailure = 4,
  kNonConvergence = 5,
  kBoundViolation = 6,
};

struct RunConfig {
  std::string command;  // exponent | certify | barrier | solve | rate | verify-examples
  Json config;
  std::string out_dir = ".";
  std::uint64_t seed = 0x5eedcafe1234ull;
  int threads = 1;
};

inline RunConfig load_run_config(const std::string& command, const std::string& config_path,
                                 const std::string& out_dir, std::uint64_t seed, int threads) {
  RunConfig rc;
  rc.command = command;
  rc.out_dir = out_dir;
  rc.seed = seed;
  rc.threads = threads;
  std::ifstream in(config_path);
  if (!in) throw ConfigError("config file not found: " + config_path);
  try {
    rc.config = Json::parse(in);
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("config parse: ") + e.what());
  }
  return rc;
}

namespace detail {

struct RunOutput {
  std::vector<std::string> files;
  int code = kOk;

  void add(const std::string& f) { files.push_back(f); }
};

inline std::string join_path(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

inline void write_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open for writing: " + path);
  out << j.dump(2) << '\n';
}

struct ContactSpec {
  Vec x0;
  int k = 1;
  std::vector<double> a, eta;
};

inline ContactSpec contact_from_json(const Json& j) {
  ContactSpec c;
  try {
    c.x0 = j.at("x0").get<Vec>();
    c.k = j.at("k").get<int>();
    c.a = j.value("a", std::vector<double>{});
    c.eta = j.value("eta", std::vector<double>{});
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("contact: ") + e.what());
  }
  if (c.k > 0 && (c.a.size() != static_cast<std::size_t>(c.k) ||
                  c.eta.size() != static_cast<std::size_t>(c.k)))
    throw ConfigError("contact: a and eta must have length k");
  return c;
}

// --- commands ---------------------------------------------------------------

inline RunOutput cmd_exponent(const RunConfig& rc) {
  RunOutput out;
  const GrowthParams g = growth_from_json(rc.config.at("growth"));
  const auto violations = exponents::validate(g);
  Json j;
  j["growth"] = growth_to_json(g);
  Json viol = Json::array();
  for (auto v : violations) viol.push_back(to_string(v));
  j["validation"] = viol;
  j["admissible"] = violations.empty();
  if (violations.empty()) {
    j["abar"] = exponents::abar(g);
    j["mu"] = exponents::mu(g);
    GrowthParams flat = g;
    flat.k = 0;
    flat.a.clear();
    flat.eta.clear();
    if (exponents::admissible(flat)) j["mu_flat"] = exponents::mu_flat(g);
    if (g.k >= 1) j["b"] = exponents::b_coeffs(g);
  }
  const std::string path = join_path(rc.out_dir, "exponent.json");
  write_json_file(path, j);
  out.add(path);
  std::cout << j.dump(2) << std::endl;
  if (!violations.empty()) out.code = kParamDomainError;
  return out;
}

inline RunOutput cmd_certify(const RunConfig& rc) {
  RunOutput out;
  auto domain = std::make_shared<ConvexDomain>(domain_from_json(rc.config.at("domain")));
  const ContactSpec c = contact_from_json(rc.config.at("contact"));
  const std::size_t samples =
      rc.config.value("samples", domain->dim() == 2 ? std::size_t(4096) : std::size_t(16384));
  Rng rng(rc.seed);
  const auto res = certify_k_convexity(*domain, c.x0, c.k, c.a, c.eta, samples, rng);
  Json j;
  j["ok"] = res.ok();
  j["worst_slack"] = res.worst_slack;
  j["worst_point"] = res.worst_point;
  j["samples"] = samples;
  if (res.ok()) {
    j["margin"] = res.certificate->margin;
    j["k"] = res.certificate->k;
    j["a"] = res.certificate->a;
    j["eta"] = res.certificate->eta;
    j["frame"] = frame_to_json(res.certificate->frame);
  }
  const std::string path = join_path(rc.out_dir, "certificate.json");
  write_json_file(path, j);
  out.add(path);
  std::cout << (res.ok() ? "certified" : "FAILED") << " worst_slack=" << res.worst_slack
            << std::endl;
  if (!res.ok()) out.code = kBoundViolation;
  return out;
}

inline BarrierFunction barrier_from_config(const RunConfig& rc, const ConvexDomain& domain,
                                           std::shared_ptr<const ConvexDomain> domain_ptr,
                                           Rng& rng) {
  const ContactSpec c = contact_from_json(rc.config.at("contact"));
  const RhsModel model = model_from_json(rc.config.at("model"), domain_ptr);
  if (c.k == 0) {
    // flat contact: no strictly convex direction, use the flat barrier
    const BoundaryFrame frame = build_frame(domain, c.x0, domain.dim() - 1);
    return flat_barrier(domain, model, frame, rng);
  }
  const std::size_t samples =
      rc.config.value("samples", domain.dim() == 2 ? std::size_t(4096) : std::size_t(16384));
  const auto res = certify_k_convexity(domain, c.x0, c.k, c.a, c.eta, samples, rng);
  if (!res.ok())
    throw SearchFailure("barrier: k-convexity certification failed at the contact point");
  return find_eps_M(domain, *res.certificate, model, rng);
}

inline RunOutput cmd_barrier(const RunConfig& rc) {
  RunOutput out;
  auto domain = std::make_shared<ConvexDomain>(domain_from_json(rc.config.at("domain")));
  Rng rng(rc.seed);
  const BarrierFunction bf = barrier_from_config(rc, *domain, domain, rng);
  const std::string bpath = join_path(rc.out_dir, "barrier.json");
  write_json_file(bpath, barrier_to_json(bf));
  out.add(bpath);

  // F[W] sample sweep along the contact axis ladder
  const RhsModel model = model_from_json(rc.config.at("model"), domain);
  Rng rng2(rc.seed + 1);
  std::vector<Vec> pts;
  if (bf.kind == BarrierKind::Anisotropic) {
    pts = make_certification_samples(*domain, bf.params.frame, bf.params.growth.k,
                                     bf.params.growth.a, bf.params.growth.eta, 16, 24, rng2);
  } else {
    const int n = domain->dim();
    const double d = domain->diameter();
    const double t_top = inward_ray_extent(*domain, bf.params.frame);
    for (int m = 0; m < 24; ++m) {
      const double t = 0.5 * t_top * std::pow(2.0, -m);
      for (int s = 0; s < 16; ++s) {
        Vec y(n, 0.0);
        y[n - 1] = t;
        for (int i = 0; i + 1 < n; ++i) y[i] = rng2.uniform(-d, d);
        const Vec w = bf.params.frame.to_world(y);
        if (domain->contains(w, 1e-14 * d)) pts.push_back(w);
      }
    }
  }
  const std::string cpath = join_path(rc.out_dir, "fw_samples.csv");
  std::ofstream csv(cpath);
  csv << "t_axis,FW\n";
  for (const auto& x : pts) {
    const Jet2 jet = bf.eval_world(x);
    double d_x = 1.0;
    if (model.uses_distance()) d_x = domain->distance_to_boundary(x);
    const double F = model.eval_with_distance(d_x, jet.value, dot(jet.grad, jet.grad));
    const Vec y = bf.params.frame.to_frame(x);
    csv << csv_num(y[bf.params.frame.normal_axis]) << ',' << csv_num(det(jet.hess) / F) << '\n';
  }
  out.add(cpath);
  std::cout << "barrier certified: eps=" << bf.params.epsilon << " M=" << bf.params.M
            << " min_FW=" << bf.min_FW << std::endl;
  return out;
}

inline SolveConfig solve_config_from_json(const Json& j) {
  SolveConfig cfg;
  cfg.h = j.value("h", cfg.h);
  cfg.stencil_width = j.value("stencil_width", cfg.stencil_width);
  cfg.damping = j.value("damping", cfg.damping);
  cfg.tol = j.value("tol", cfg.tol);
  cfg.max_iters = j.value("max_iters", cfg.max_iters);
  cfg.z_floor = j.value("z_floor", cfg.z_floor);
  cfg.comparison_C = j.value("comparison_C", cfg.comparison_C);
  return cfg;
}

inline RunOutput cmd_solve(const RunConfig& rc) {
  RunOutput out;
  auto domain = std::make_shared<ConvexDomain>(domain_from_json(rc.config.at("domain")));
  const RhsModel model = model_from_json(rc.config.at("model"), domain);
  const SolveConfig cfg = solve_config_from_json(rc.config.value("solver", Json::object()));
  const Grid grid = build_grid(*domain, cfg.h, cfg.stencil_width);

  std::unique_ptr<BarrierFunction> init;
  const std::string init_kind = rc.config.value("init", std::string("zero"));
  Rng rng(rc.seed);
  if (init_kind == "barrier") {
    init = std::make_unique<BarrierFunction>(barrier_from_config(rc, *domain, domain, rng));
    const std::string bpath = join_path(rc.out_dir, "barrier.json");
    write_json_file(bpath, barrier_to_json(*init));
    out.add(bpath);
  } else if (init_kind != "zero") {
    throw ConfigError("solve: init must be 'barrier' or 'zero'");
  }

  const SolverState st = solve(*domain, grid, model, cfg, init.get());

  const std::string spath = join_path(rc.out_dir, "solution.csv");
  write_solution_csv(spath, grid, st);
  out.add(spath);

  Json conv;
  conv["config"] = Json{{"h", cfg.h},
                        {"stencil_width", cfg.stencil_width},
                        {"damping", cfg.damping},
                        {"tol", cfg.tol},
                        {"max_iters", cfg.max_iters},
                        {"z_floor", cfg.z_floor},
                        {"init", init_kind}};
  conv["iterations"] = st.iterations;
  conv["last_update"] = st.last_update;
  conv["converged"] = st.converged;
  conv["nodes"] = grid.size();
  conv["h"] = grid.h;
  conv["update_history_tail"] =
      std::vector<double>(st.update_history.end() - std::min<std::size_t>(
                                                        st.update_history.size(), 32),
                          st.update_history.end());
  const std::string cpath = join_path(rc.out_dir, "convergence.json");
  write_json_file(cpath, conv);
  out.add(cpath);

  if (rc.config.contains("contact")) {
    const ContactSpec c = contact_from_json(rc.config.at("contact"));
    const Vec nrm = inward_normal_at(*domain, c.x0, 1e-7 * std::max(1.0, domain->diameter()));
    const int axis = std::abs(nrm[1]) > std::abs(nrm[0]) ? 1 : 0;
    const BoundaryFrame contact_frame = build_frame(*domain, c.x0, c.k);
    const double extent = inward_ray_extent(*domain, contact_frame);
    const auto pairs = ray_pairs(grid, st, c.x0, axis, 0.5 * extent);
    RatePairs filtered;
    for (const auto& pr : pairs)
      if (pr.first > 0.0 && pr.second > 0.0) filtered.push_back(pr);
    const std::string rpath = join_path(rc.out_dir, "ray.csv");
    write_pairs_csv(rpath, filtered);
    out.add(rpath);
  }
  std::cout << "solved: " << grid.size() << " nodes, " << st.iterations
            << " sweeps, last update " << st.last_update << std::endl;
  return out;
}

inline RunOutput cmd_rate(const RunConfig& rc) {
  RunOutput out;
  RatePairs pairs;
  if (rc.config.contains("pairs_csv")) {
    pairs = read_pairs_csv(rc.config.at("pairs_csv").get<std::string>());
  } else {
    throw ConfigError("rate: pairs_csv required");
  }
  RatePairs window;
  const double d_lo = rc.config.value("d_lo", 0.0);
  const double d_hi = rc.config.value("d_hi", std::numeric_limits<double>::infinity());
  for (const auto& pr : pairs)
    if (pr.first >= d_lo && pr.first <= d_hi && pr.second > 0.0) window.push_back(pr);
  const double mu_theory = rc.config.value("mu_theory", 0.0);
  const RateReport rep = fit_rate(window, mu_theory);
  Json j = rate_report_to_json(rep);
  bool bound_ok = true;
  if (mu_theory > 0.0) {
    const double infl = rc.config.value("c_inflation", 1.1);
    const auto bc = check_bound(window, mu_theory, infl * rep.C_fitted);
    j["bound_check"] = Json{{"pass", bc.pass},
                            {"C", infl * rep.C_fitted},
                            {"worst_ratio", bc.worst_ratio},
                            {"worst_d", bc.worst_pair.first}};
    bound_ok = bc.pass;
  }
  const std::string path = join_path(rc.out_dir, "rate.json");
  write_json_file(path, j);
  out.add(path);
  std::cout << j.dump(2) << std::endl;
  if (!bound_ok) out.code = kBoundViolation;
  return out;
}

inline RunOutput cmd_verify_examples(const RunConfig& rc) {
  RunOutput out;
  Rng rng(rc.seed);
  const std::size_t npts = rc.config.value("points", std::size_t(1000));
  Json table = Json::array();
  bool all_ok = true;

  auto add_row = [&](const std::string& name, int n, double max_resid, double mu_fit,
                     double mu_expect) {
    const bool ok = max_resid <= 1e-6 && std::abs(mu_fit - mu_expect) <= 0.01;
    all_ok = all_ok && ok;
    table.push_back(Json{{"example", name},
                         {"n", n},
                         {"max_residual", max_resid},
                         {"mu_fitted", mu_fit},
                         {"mu_expected", mu_expect},
                         {"ok", ok}});
    std::cout << name << " n=" << n << " max|residual|=" << max_resid << " mu_fit=" << mu_fit
              << " (expect " << mu_expect << ")" << (ok ? "" : "  <-- FAIL") << std::endl;
  };

  for (int n : {2, 3}) {
    // ball: closed-form Hessian residual
    double worst = 0.0;
    for (std::size_t s = 0; s < npts; ++s) {
      Vec x = rng.direction(n);
      const double r = 0.9 * std::pow(rng.uniform(), 1.0 / n);
      for (auto& c : x) c *= r;
      const double resid =
          det(oracle::exact_ball_hessian(x)) *
              pow_real(std::abs(oracle::exact_ball(x)), static_cast<double>(n) + 2.0) -
          1.0;
      worst = std::max(worst, std::abs(resid));
    }
    RatePairs pairs;
    for (int i = 0; i < 48; ++i) {
      const double d = 1e-4 * std::pow(1e3, i / 47.0);
      Vec x(n, 0.0);
      x[0] = 1.0 - d;
      pairs.emplace_back(d, std::abs(oracle::exact_ball(x)));
    }
    add_row("ball", n, worst, fit_rate(pairs).mu_fitted, 0.5);

    // cylinder: FD residual; rate at the flat bottom
    worst = 0.0;
    for (std::size_t s = 0; s < npts; ++s) {
      Vec x(n);
      double rp = 0.0;
      for (int i = 0; i + 1 < n; ++i) {
        x[i] = rng.uniform(-0.55, 0.55);
        rp += x[i] * x[i];
      }
      if (rp > 0.64) {
        --s;
        continue;
      }
      x[n - 1] = rng.uniform(0.25, 1.5);
      const double resid = oracle::hyperbolic_residual_fd(
          [](const Vec& p) { return oracle::exact_cylinder(p); }, x, 1e-3);
      worst = std::max(worst, std::abs(resid));
    }
    pairs.clear();
    for (int i = 0; i < 48; ++i) {
      const double d = 1e-4 * std::pow(1e3, i / 47.0);
      Vec x(n, 0.0);
      x[n - 1] = d;
      pairs.emplace_back(d, std::abs(oracle::exact_cylinder(x)));
    }
    add_row("cylinder", n, worst, fit_rate(pairs).mu_fitted, 1.0 / (n + 1.0));

    // cone: FD residual; rate along the axis
    worst = 0.0;
    const double slope = oracle::cone_slope(n);
    for (std::size_t s = 0; s < npts; ++s) {
      Vec x(n);
      x[n - 1] = rng.uniform(0.5, 1.5);
      const double reach = 0.5 * x[n - 1] / slope;
      for (int i = 0; i + 1 < n; ++i) x[i] = rng.uniform(-reach, reach) / std::sqrt(n - 1.0);
      const double resid = oracle::hyperbolic_residual_fd(
          [](const Vec& p) { return oracle::exact_cone(p); }, x, 1e-3);
      worst = std::max(worst, std::abs(resid));
    }
    pairs.clear();
    const double tilt = std::sqrt(1.0 + slope * slope);
    for (int i = 0; i < 48; ++i) {
      const double t = 1e-4 * std::pow(1e3, i / 47.0);
      Vec x(n, 0.0);
      x[n - 1] = t;
      pairs.emplace_back(t / tilt, std::abs(oracle::exact_cone(x)));
    }
    add_row("cone", n, worst, fit_rate(pairs).mu_fitted, n / (n + 1.0));
  }

  const std::string path = join_path(rc.out_dir, "examples.json");
  write_json_file(path, Json{{"table", table}, {"all_ok", all_ok}});
  out.add(path);
  if (!all_ok) out.code = kBoundViolation;
  return out;
}

}  // namespace detail

/// Dispatch a run; returns the process exit code and writes all artifacts
/// plus manifest.json under the configured output directory.
inline int run(const RunConfig& rc) {
  try {
    std::filesystem::create_directories(rc.out_dir);
    detail::RunOutput out;
    if (rc.command == "exponent") out = detail::cmd_exponent(rc);
    else if (rc.command == "certify") out = detail::cmd_certify(rc);
    else if (rc.command == "barrier") out = detail::cmd_barrier(rc);
    else if (rc.command == "solve") out = detail::cmd_solve(rc);
    else if (rc.command == "rate") out = detail::cmd_rate(rc);
    else if (rc.command == "verify-examples") out = detail::cmd_verify_examples(rc);
    else throw ConfigError("unknown command: " + rc.command);

    Json manifest;
    manifest["command"] = rc.command;
    manifest["config_digest"] = fnv1a(rc.config.dump());
    manifest["seed"] = rc.seed;
    manifest["threads"] = rc.threads;
    std::vector<std::string> names;
    for (const auto& f : out.files) names.push_back(std::filesystem::path(f).filename().string());
    manifest["files"] = names;
    detail::write_json_file(detail::join_path(rc.out_dir, "manifest.json"), manifest);
    return out.code;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << std::endl;
    return kConfigError;
  } catch (const Json::exception& e) {
    std::cerr << "config error: " << e.what() << std::endl;
    return kConfigError;
  } catch (const ParamDomainError& e) {
    std::cerr << "parameter-domain error: " << e.what() << std::endl;
    return kParamDomainError;
  } catch (const SearchFailure& e) {
    std::cerr << "search failure: " << e.what() << std::endl;
    return kSearchFailure;
  } catch (const NonConvergence& e) {
    std::cerr << "non-convergence: " << e.what() << std::endl;
    return kNonConvergence;
  } catch (const InsufficientDataError& e) {
    std::cerr << "insufficient data: " << e.what() << std::endl;
    return kConfigError;
  } catch (const DomainError& e) {
    std::cerr << "domain error: " << e.what() << std::endl;
    return kParamDomainError;
  } catch (const FrameError& e) {
    std::cerr << "frame error: " << e.what() << std::endl;
    return kParamDomainError;
  } catch (const BoundUnavailableError& e) {
    std::cerr << "bound unavailable: " << e.what() << std::endl;
    return kSearchFailure;
  }
}

}  // namespace mab
