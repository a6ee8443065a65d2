#pragma once

// JSON (de)serialization for the library's value types and CSV emitters.
// All CSV numbers are written with 17 significant digits, '.' decimal
// separator, fixed column order.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mab/analysis.hpp"
#include "mab/barrier.hpp"
#include "mab/errors.hpp"
#include "mab/exponents.hpp"
#include "mab/geometry.hpp"
#include "mab/rhs.hpp"
#include "mab/solver.hpp"

namespace mab {

using Json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// GrowthParams
// ---------------------------------------------------------------------------

inline Json growth_to_json(const GrowthParams& p) {
  return Json{{"n", p.n},         {"k", p.k},        {"a", p.a},
              {"eta", p.eta},     {"alpha", p.alpha}, {"beta", p.beta},
              {"gamma", p.gamma}, {"A", p.A}};
}

inline GrowthParams growth_from_json(const Json& j) {
  GrowthParams p;
  try {
    p.n = j.at("n").get<int>();
    p.k = j.at("k").get<int>();
    p.a = j.value("a", std::vector<double>{});
    p.eta = j.value("eta", std::vector<double>{});
    p.alpha = j.at("alpha").get<double>();
    p.beta = j.at("beta").get<double>();
    p.gamma = j.at("gamma").get<double>();
    p.A = j.at("A").get<double>();
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("growth_params: ") + e.what());
  }
  if (p.a.size() != static_cast<std::size_t>(p.k) ||
      p.eta.size() != static_cast<std::size_t>(p.k))
    throw ConfigError("growth_params: arrays a and eta must have length k");
  return p;
}

// ---------------------------------------------------------------------------
// Domain spec
// ---------------------------------------------------------------------------

inline ConvexDomain domain_from_json(const Json& j) {
  try {
    const int n = j.at("n").get<int>();
    BoundingBox bb;
    bb.lo = j.at("bbox").at("lo").get<Vec>();
    bb.hi = j.at("bbox").at("hi").get<Vec>();
    std::vector<Constraint> cons;
    for (const auto& c : j.value("constraints", Json::array())) {
      const std::string type = c.at("type").get<std::string>();
      if (type == "halfspace") {
        cons.push_back(Halfspace{c.at("normal").get<Vec>(), c.at("offset").get<double>()});
      } else if (type == "ball") {
        cons.push_back(BallConstraint{c.at("center").get<Vec>(), c.at("radius").get<double>()});
      } else if (type == "superellipse") {
        cons.push_back(Superellipse{c.at("powers").get<std::vector<double>>(),
                                    c.at("scales").get<std::vector<double>>()});
      } else if (type == "power_cup") {
        cons.push_back(PowerCup{c.at("eta").get<std::vector<double>>(),
                                c.at("a").get<std::vector<double>>()});
      } else if (type == "box") {
        cons.push_back(BoxConstraint{c.at("lo").get<Vec>(), c.at("hi").get<Vec>()});
      } else {
        throw ConfigError("domain: unknown constraint type '" + type + "'");
      }
    }
    return ConvexDomain(n, std::move(cons), std::move(bb));
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("domain: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// RHS model
// ---------------------------------------------------------------------------

inline RhsModel model_from_json(const Json& j, std::shared_ptr<const ConvexDomain> domain) {
  try {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "pure_hyperbolic") {
      int n = 2;
      if (j.contains("n")) n = j.at("n").get<int>();
      else if (domain) n = domain->dim();
      return RhsModel::pure_hyperbolic(n);
    }
    if (kind == "power_law")
      return RhsModel::power_law(growth_from_json(j.at("growth_params")), std::move(domain));
    throw ConfigError("model: unknown kind '" + kind + "'");
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("model: ") + e.what());
  }
}

inline Json model_to_json(const RhsModel& m, double clamp_floor) {
  Json j;
  j["kind"] = m.kind() == RhsKind::PureHyperbolic ? "pure_hyperbolic" : "power_law";
  if (m.kind() == RhsKind::PowerLaw) j["growth_params"] = growth_to_json(m.params());
  else j["n"] = m.dim();
  j["clamp_floor"] = clamp_floor;
  return j;
}

// ---------------------------------------------------------------------------
// Frames / barriers / reports
// ---------------------------------------------------------------------------

inline Json frame_to_json(const BoundaryFrame& f) {
  const int n = f.dim();
  std::vector<std::vector<double>> rows(n, std::vector<double>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) rows[i][j] = f.rotation(i, j);
  return Json{{"origin", f.origin}, {"rotation", rows}, {"normal_axis", f.normal_axis}};
}

inline BoundaryFrame frame_from_json(const Json& j) {
  BoundaryFrame f;
  f.origin = j.at("origin").get<Vec>();
  const auto rows = j.at("rotation").get<std::vector<std::vector<double>>>();
  const int n = static_cast<int>(rows.size());
  f.rotation = Mat(n, n);
  for (int i = 0; i < n; ++i)
    for (int c = 0; c < n; ++c) f.rotation(i, c) = rows[i][c];
  f.normal_axis = j.at("normal_axis").get<int>();
  return f;
}

inline Json barrier_to_json(const BarrierFunction& b) {
  Json j;
  j["kind"] = b.kind == BarrierKind::Anisotropic ? "anisotropic" : "flat";
  j["growth_params"] = growth_to_json(b.params.growth);
  j["frame"] = frame_to_json(b.params.frame);
  j["epsilon"] = b.params.epsilon;
  j["M"] = b.params.M;
  j["diameter"] = b.params.d;
  if (b.kind == BarrierKind::Anisotropic) j["Lambda"] = b.params.Lambda;
  else j["N"] = b.N;
  j["mu"] = b.kind == BarrierKind::Anisotropic ? b.params.mu : b.mu0;
  j["min_FW"] = b.min_FW;
  j["worst_point"] = b.worst_point;
  return j;
}

inline BarrierFunction barrier_from_json(const Json& j) {
  BarrierFunction b;
  b.kind = j.at("kind").get<std::string>() == "flat" ? BarrierKind::Flat
                                                     : BarrierKind::Anisotropic;
  b.params.growth = growth_from_json(j.at("growth_params"));
  b.params.frame = frame_from_json(j.at("frame"));
  b.params.epsilon = j.at("epsilon").get<double>();
  b.params.M = j.at("M").get<double>();
  b.params.d = j.at("diameter").get<double>();
  b.params.Lambda = std::sqrt(2.0 * b.params.d * b.params.d + 1.0);
  if (b.kind == BarrierKind::Anisotropic) {
    b.params.mu = exponents::mu(b.params.growth);
    b.params.b = exponents::b_coeffs(b.params.growth);
  } else {
    b.mu0 = exponents::mu_flat(b.params.growth);
    b.params.mu = b.mu0;
    b.N = j.at("N").get<double>();
  }
  b.min_FW = j.value("min_FW", 0.0);
  b.worst_point = j.value("worst_point", Vec{});
  return b;
}

inline Json rate_report_to_json(const RateReport& r) {
  return Json{{"mu_theory", r.mu_theory},
              {"mu_fitted", r.mu_fitted},
              {"C_fitted", r.C_fitted},
              {"fit_range", {r.d_lo, r.d_hi}},
              {"residual_rms", r.residual_rms},
              {"bound_slack", r.bound_slack},
              {"points", r.points}};
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

inline std::string csv_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void write_solution_csv(const std::string& path, const Grid& grid,
                               const SolverState& st) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open for writing: " + path);
  out << "x,y,u,residual,d_x\n";
  for (std::size_t i = 0; i < grid.size(); ++i)
    out << csv_num(grid.xs[i]) << ',' << csv_num(grid.ys[i]) << ',' << csv_num(st.u[i]) << ','
        << csv_num(st.residual[i]) << ',' << csv_num(grid.dist[i]) << '\n';
}

inline void write_pairs_csv(const std::string& path, const RatePairs& pairs) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open for writing: " + path);
  out << "d,abs_u\n";
  for (const auto& [d, au] : pairs) out << csv_num(d) << ',' << csv_num(au) << '\n';
}

inline RatePairs read_pairs_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open pairs csv: " + path);
  RatePairs pairs;
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ConfigError("bad pairs csv line: " + line);
    pairs.emplace_back(std::stod(line.substr(0, comma)), std::stod(line.substr(comma + 1)));
  }
  return pairs;
}

/// FNV-1a digest of the canonical config text, for manifests.
inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace mab
