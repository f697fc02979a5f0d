#include "hmk/io.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

namespace hmk {

using nlohmann::json;

namespace {

void check_version(const json& j, const char* what) {
  if (j.contains("format_version") && j["format_version"].get<int>() != 1) {
    std::ostringstream msg;
    msg << what << ": unsupported format_version "
        << j["format_version"].get<int>();
    throw std::runtime_error(msg.str());
  }
}

json grid_to_json_array(const DirectionGrid& g) {
  json dirs = json::array();
  for (const auto& u : g.dirs) dirs.push_back(u);
  return dirs;
}

GridPtr grid_from_json(const json& j) {
  const int n = j.at("n").get<int>();
  std::vector<std::vector<double>> dirs;
  for (const auto& u : j.at("grid"))
    dirs.push_back(u.get<std::vector<double>>());
  if (n >= 1) return make_grid(n, std::move(dirs));
  const int dim = j.at("dim").get<int>();
  return make_flat_grid(dim, std::move(dirs));
}

GridPtr grid_from_atoms(const json& j,
                        std::vector<std::vector<double>>&& dirs) {
  const int n = j.at("n").get<int>();
  if (n >= 1) return make_grid(n, std::move(dirs));
  const int dim = j.at("dim").get<int>();
  return make_flat_grid(dim, std::move(dirs));
}

}  // namespace

std::string point_to_json(const GroupPoint& g) {
  json j;
  j["format_version"] = 1;
  j["n"] = g.n();
  std::vector<double> coords = g.z;
  coords.push_back(g.t);
  j["coords"] = coords;
  return j.dump(2);
}

GroupPoint point_from_json(const std::string& text) {
  const json j = json::parse(text);
  check_version(j, "point");
  const int n = j.at("n").get<int>();
  const auto coords = j.at("coords").get<std::vector<double>>();
  if (coords.size() != 2 * static_cast<std::size_t>(n) + 1)
    throw std::runtime_error("point: coords length must be 2n+1");
  GroupPoint g(std::vector<double>(coords.begin(), coords.end() - 1),
               coords.back());
  return g;
}

std::string support_to_json(const SupportVector& f) {
  json j;
  j["format_version"] = 1;
  j["n"] = f.grid->n;
  if (f.grid->n < 1) j["dim"] = f.grid->dim;
  j["grid"] = grid_to_json_array(*f.grid);
  j["f"] = f.values;
  return j.dump(2);
}

SupportVector support_from_json(const std::string& text) {
  const json j = json::parse(text);
  check_version(j, "body");
  return make_support(grid_from_json(j), j.at("f").get<std::vector<double>>());
}

std::string measure_to_json(const DiscreteSphereMeasure& mu) {
  json j;
  j["format_version"] = 1;
  j["n"] = mu.grid->n;
  if (mu.grid->n < 1) j["dim"] = mu.grid->dim;
  json atoms = json::array();
  for (int i = 0; i < mu.size(); ++i) {
    json a;
    a["u"] = mu.grid->dirs[i];
    a["w"] = mu.weights[i];
    atoms.push_back(a);
  }
  j["atoms"] = atoms;
  return j.dump(2);
}

DiscreteSphereMeasure measure_from_json(const std::string& text) {
  const json j = json::parse(text);
  check_version(j, "measure");
  std::vector<std::vector<double>> dirs;
  std::vector<double> w;
  for (const auto& a : j.at("atoms")) {
    dirs.push_back(a.at("u").get<std::vector<double>>());
    w.push_back(a.at("w").get<double>());
  }
  return make_measure(grid_from_atoms(j, std::move(dirs)), std::move(w));
}

std::string report_to_json(const SolveReport& rep) {
  json j;
  j["format_version"] = 1;
  j["f_out"] = rep.f_out.values;
  j["grid"] = grid_to_json_array(*rep.f_out.grid);
  j["n"] = rep.f_out.grid->n;
  j["achieved_weights"] = rep.achieved.weights;
  j["residuals"] = {{"per_direction", rep.residuals.per_direction},
                    {"max_relative", rep.residuals.max_relative},
                    {"mass_error", rep.residuals.mass_error},
                    {"mass_stderr", rep.residuals.mass_stderr}};
  j["phi_trace"] = rep.phi_trace;
  j["phi_noise_3sigma"] = rep.phi_noise_3sigma;
  j["radius_bound"] = rep.radius_bound;
  j["radius_bound_ok"] = rep.radius_bound_ok;
  j["margin_c"] = rep.margin_c;
  j["dilation_applied"] = rep.dilation_applied;
  j["mass_scaling_exponent"] = rep.mass_scaling_exponent;
  j["vol_exponent_used"] = rep.vol_exponent_used;
  j["volume_target"] = rep.volume_target;
  j["sweeps_run"] = rep.sweeps_run;
  j["converged"] = rep.converged;
  j["config"] = {{"mode", rep.config.mode == SolveMode::heisenberg
                              ? "heisenberg"
                              : "euclidean"},
                 {"vol_exponent", rep.config.vol_exponent},
                 {"volume_target", rep.config.volume_target},
                 {"mc_samples", rep.config.mc_samples},
                 {"measure_samples", rep.config.measure_samples},
                 {"seed", rep.config.seed},
                 {"workers", rep.config.workers},
                 {"eta0", rep.config.eta0},
                 {"tol_phi", rep.config.tol_phi},
                 {"max_sweeps", rep.config.max_sweeps},
                 {"skip_centroid", rep.config.skip_centroid}};
  return j.dump(2);
}

std::string body_to_obj(const WulffBody& body, int n_polar, int n_azimuth) {
  if (body.n() != 1)
    throw std::invalid_argument("body_to_obj: only rank-1 bodies (R^3)");
  constexpr double kPi = std::numbers::pi;
  std::ostringstream out;
  out.precision(9);
  // boundary vertices along rays, poles handled separately
  auto boundary_at = [&](double tp, double ta) {
    GroupPoint probe({std::sin(tp) * std::cos(ta), std::sin(tp) * std::sin(ta)},
                     std::cos(tp) * body.bounding_box().t_half /
                         std::max(body.bounding_box().z_half, 1e-12));
    return body.project_to_boundary(probe);
  };
  std::vector<std::array<double, 3>> verts;
  for (int i = 1; i < n_polar; ++i) {
    const double tp = kPi * i / n_polar;
    for (int jj = 0; jj < n_azimuth; ++jj) {
      const double ta = 2.0 * kPi * jj / n_azimuth;
      const GroupPoint b = boundary_at(tp, ta);
      verts.push_back({b.x(0), b.y(0), b.t});
    }
  }
  const double fmin = *std::min_element(body.support().values.begin(),
                                        body.support().values.end());
  const double t_pole = fmin * fmin / (4.0 * kPi);
  verts.push_back({0.0, 0.0, t_pole});
  verts.push_back({0.0, 0.0, -t_pole});
  for (const auto& v : verts)
    out << "v " << v[0] << " " << v[1] << " " << v[2] << "\n";
  auto vid = [&](int ring, int col) {
    return ring * n_azimuth + (col % n_azimuth) + 1;
  };
  const int north = static_cast<int>(verts.size()) - 1;
  const int south = static_cast<int>(verts.size());
  for (int jj = 0; jj < n_azimuth; ++jj) {
    out << "f " << north << " " << vid(0, jj) << " " << vid(0, jj + 1) << "\n";
    out << "f " << south << " " << vid(n_polar - 2, jj + 1) << " "
        << vid(n_polar - 2, jj) << "\n";
  }
  for (int i = 0; i + 1 < n_polar - 1; ++i)
    for (int jj = 0; jj < n_azimuth; ++jj) {
      out << "f " << vid(i, jj) << " " << vid(i + 1, jj) << " "
          << vid(i + 1, jj + 1) << "\n";
      out << "f " << vid(i, jj) << " " << vid(i + 1, jj + 1) << " "
          << vid(i, jj + 1) << "\n";
    }
  return out.str();
}

std::string geodesic_to_csv(const GeodesicParams& p, int rows) {
  std::ostringstream out;
  out.precision(12);
  out << "s";
  for (int l = 0; l < p.n(); ++l) out << ",x" << l + 1;
  for (int l = 0; l < p.n(); ++l) out << ",y" << l + 1;
  out << ",t\n";
  for (int k = 0; k < rows; ++k) {
    const double s = static_cast<double>(k) / (rows - 1);
    const GroupPoint g = geodesic_point(p, s);
    out << s;
    for (double c : g.z) out << "," << c;
    out << "," << g.t << "\n";
  }
  return out.str();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << content;
}

}  // namespace hmk
