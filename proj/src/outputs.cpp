#include "scfem/outputs.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "scfem/errors.hpp"

namespace scfem {

namespace {

std::string fmt12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12e", v);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  return out;
}

}  // namespace

void write_csv(std::span<const IterationRecord> records, const std::string& path) {
  if (records.empty()) throw ContractError("write_csv: no records");
  auto out = open_out(path);
  out << "iter,type,dof,dof_total_vertices,mu_bar,tau_bar,mu,tau,eta,"
         "n_colpts,n_triangles,wall_ms\n";
  for (const auto& r : records) {
    out << r.iteration << ',' << refinement_name(r.type) << ',' << r.dof << ','
        << r.dof_total_vertices << ',' << fmt12(r.mu_bar) << ',' << fmt12(r.tau_bar)
        << ',' << fmt12(r.mu) << ',' << fmt12(r.tau) << ',' << fmt12(r.eta) << ','
        << r.n_collocation_points << ',' << r.n_triangles << ',' << fmt12(r.wall_ms)
        << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

std::vector<IterationRecord> read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open for reading: " + path);
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty csv: " + path);
  std::vector<IterationRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 12) throw IoError("malformed csv row: " + line);
    IterationRecord r;
    r.iteration = std::stoi(cells[0]);
    r.type = cells[1] == "spatial" ? RefinementType::Spatial : RefinementType::Parametric;
    r.dof = std::stoll(cells[2]);
    r.dof_total_vertices = std::stoll(cells[3]);
    r.mu_bar = std::stod(cells[4]);
    r.tau_bar = std::stod(cells[5]);
    r.mu = std::stod(cells[6]);
    r.tau = std::stod(cells[7]);
    r.eta = std::stod(cells[8]);
    r.n_collocation_points = std::stoi(cells[9]);
    r.n_triangles = std::stoi(cells[10]);
    r.wall_ms = std::stod(cells[11]);
    records.push_back(r);
  }
  return records;
}

namespace {

struct LogAxis {
  double lo = 0.0, hi = 1.0;  // log10 range
  double pix_lo = 0.0, pix_hi = 1.0;

  double map(double value) const {
    const double t = (std::log10(value) - lo) / (hi - lo);
    return pix_lo + t * (pix_hi - pix_lo);
  }
};

std::string tick_label(int exponent) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "1e%+03d", exponent);
  return buf;
}

}  // namespace

void emit_svg_plot(std::span<const IterationRecord> records, const std::string& path) {
  if (records.size() < 2) throw ContractError("emit_svg_plot: need at least 2 records");

  struct Series {
    const char* label;
    const char* color;
    const char* dash;
    std::vector<std::pair<double, double>> pts;  // (dof, value)
  };
  std::vector<Series> series{
      {"eta (total)", "#000000", "", {}},   {"mu (spatial)", "#1f4ecc", "", {}},
      {"tau (parametric)", "#cc2222", "", {}}, {"mu_bar", "#1f4ecc", "6,4", {}},
      {"tau_bar", "#cc2222", "6,4", {}},
  };
  for (const auto& r : records) {
    const double dof = static_cast<double>(r.dof);
    auto push = [&](std::size_t s, double v) {
      if (std::isfinite(v) && v > 0.0 && dof > 0.0) series[s].pts.push_back({dof, v});
    };
    push(0, r.eta);
    push(1, r.mu);
    push(2, r.tau);
    push(3, r.mu_bar);
    push(4, r.tau_bar);
  }

  double x_min = 1e300, x_max = -1e300, y_min = 1e300, y_max = -1e300;
  for (const auto& s : series) {
    for (const auto& [x, y] : s.pts) {
      x_min = std::min(x_min, x);
      x_max = std::max(x_max, x);
      y_min = std::min(y_min, y);
      y_max = std::max(y_max, y);
    }
  }
  if (x_max < x_min) throw ContractError("emit_svg_plot: no positive data to plot");
  if (x_max == x_min) x_max = x_min * 10.0;
  if (y_max == y_min) y_max = y_min * 10.0;

  const double W = 840, H = 600, ml = 90, mr = 30, mt = 30, mb = 70;
  LogAxis xaxis{std::floor(std::log10(x_min)), std::ceil(std::log10(x_max)), ml, W - mr};
  LogAxis yaxis{std::floor(std::log10(y_min)), std::ceil(std::log10(y_max)), H - mb, mt};
  if (xaxis.hi == xaxis.lo) xaxis.hi += 1.0;
  if (yaxis.hi == yaxis.lo) yaxis.hi += 1.0;

  auto out = open_out(path);
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\""
      << H << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
  out << "<rect x=\"0\" y=\"0\" width=\"" << W << "\" height=\"" << H
      << "\" fill=\"white\"/>\n";
  out << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << (W - ml - mr)
      << "\" height=\"" << (H - mt - mb)
      << "\" fill=\"none\" stroke=\"#444444\" stroke-width=\"1\"/>\n";

  // decade grid lines and tick labels
  for (int e = static_cast<int>(xaxis.lo); e <= static_cast<int>(xaxis.hi); ++e) {
    const double px = xaxis.map(std::pow(10.0, e));
    out << "<line x1=\"" << px << "\" y1=\"" << mt << "\" x2=\"" << px << "\" y2=\""
        << (H - mb) << "\" stroke=\"#dddddd\" stroke-dasharray=\"3,3\"/>\n";
    out << "<text x=\"" << px << "\" y=\"" << (H - mb + 22)
        << "\" font-size=\"13\" text-anchor=\"middle\" font-family=\"monospace\">"
        << tick_label(e) << "</text>\n";
  }
  for (int e = static_cast<int>(yaxis.lo); e <= static_cast<int>(yaxis.hi); ++e) {
    const double py = yaxis.map(std::pow(10.0, e));
    out << "<line x1=\"" << ml << "\" y1=\"" << py << "\" x2=\"" << (W - mr)
        << "\" y2=\"" << py << "\" stroke=\"#dddddd\" stroke-dasharray=\"3,3\"/>\n";
    out << "<text x=\"" << (ml - 8) << "\" y=\"" << (py + 4)
        << "\" font-size=\"13\" text-anchor=\"end\" font-family=\"monospace\">"
        << tick_label(e) << "</text>\n";
  }
  out << "<text x=\"" << (ml + (W - ml - mr) / 2) << "\" y=\"" << (H - 18)
      << "\" font-size=\"15\" text-anchor=\"middle\">degrees of freedom</text>\n";
  out << "<text x=\"22\" y=\"" << (mt + (H - mt - mb) / 2)
      << "\" font-size=\"15\" text-anchor=\"middle\" transform=\"rotate(-90 22 "
      << (mt + (H - mt - mb) / 2) << ")\">estimate</text>\n";

  for (const auto& s : series) {
    if (s.pts.size() < 2) continue;
    out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.6\"";
    if (s.dash[0]) out << " stroke-dasharray=\"" << s.dash << "\"";
    out << " points=\"";
    for (const auto& [x, y] : s.pts) out << xaxis.map(x) << ',' << yaxis.map(y) << ' ';
    out << "\"/>\n";
    for (const auto& [x, y] : s.pts)
      out << "<circle cx=\"" << xaxis.map(x) << "\" cy=\"" << yaxis.map(y)
          << "\" r=\"2.5\" fill=\"" << s.color << "\"/>\n";
  }

  // legend
  double ly = mt + 16;
  for (const auto& s : series) {
    if (s.pts.size() < 2) continue;
    out << "<line x1=\"" << (ml + 12) << "\" y1=\"" << ly << "\" x2=\"" << (ml + 44)
        << "\" y2=\"" << ly << "\" stroke=\"" << s.color << "\" stroke-width=\"1.6\"";
    if (s.dash[0]) out << " stroke-dasharray=\"" << s.dash << "\"";
    out << "/>\n";
    out << "<text x=\"" << (ml + 50) << "\" y=\"" << (ly + 4)
        << "\" font-size=\"13\" font-family=\"monospace\">" << s.label << "</text>\n";
    ly += 18;
  }
  out << "</svg>\n";
  if (!out) throw IoError("write failed: " + path);
}

void snapshot_mesh(const SimplexMesh& mesh, const std::string& path) {
  auto out = open_out(path);
  out << mesh.vertex_count() << ' ' << mesh.triangle_count() << '\n';
  char buf[80];
  for (const auto& v : mesh.vertices()) {
    std::snprintf(buf, sizeof(buf), "%.17g %.17g %d", v.x, v.y, v.boundary ? 1 : 0);
    out << buf << '\n';
  }
  for (const auto& t : mesh.triangles())
    out << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  if (!out) throw IoError("write failed: " + path);
}

std::shared_ptr<const SimplexMesh> read_mesh(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open for reading: " + path);
  std::size_t nv = 0, nt = 0;
  if (!(in >> nv >> nt)) throw IoError("malformed mesh header: " + path);
  std::vector<std::array<double, 2>> vertices(nv);
  for (std::size_t i = 0; i < nv; ++i) {
    int flag = 0;
    if (!(in >> vertices[i][0] >> vertices[i][1] >> flag))
      throw IoError("malformed vertex line in " + path);
  }
  std::vector<std::array<int, 3>> triangles(nt);
  for (std::size_t i = 0; i < nt; ++i)
    if (!(in >> triangles[i][0] >> triangles[i][1] >> triangles[i][2]))
      throw IoError("malformed triangle line in " + path);
  return SimplexMesh::create(std::move(vertices), std::move(triangles));
}

HypothesisReport run_hypothesis_check(const ParametricProblem& problem) {
  HypothesisReport report;
  if (problem.affine) {
    report.kind = "uniform_ellipticity";
    const auto e = check_uniform_ellipticity(problem);
    report.r = e.r;
    report.pass = e.pass;
  } else {
    report.kind = "derivative_bound";
    const auto delta = check_fourier_derivative_bound(problem, 3);
    report.pass = delta.has_value();
    if (delta) report.delta = *delta;
  }
  return report;
}

void write_manifest(const RunConfig& config, const RunResult& result,
                    const HypothesisReport& hypothesis, const std::string& path,
                    const std::string& config_source) {
  nlohmann::json j;
  j["config"] = config.as_map();
  if (!config_source.empty()) j["config_source"] = config_source;
  const char* status = result.termination == Termination::Converged ? "converged"
                       : result.termination == Termination::MaxIterations
                           ? "max_iterations"
                           : "aborted";
  j["termination"] = status;
  if (!result.message.empty()) j["message"] = result.message;
  j["totals"] = {
      {"wall_ms", result.total_wall_ms},
      {"coarse_solves", result.counters.coarse},
      {"current_solves", result.counters.current},
      {"fine_solves", result.counters.fine},
      {"iterations", result.records.size()},
  };
  nlohmann::json hyp;
  hyp["kind"] = hypothesis.kind;
  hyp["pass"] = hypothesis.pass;
  if (hypothesis.kind == "uniform_ellipticity") hyp["r"] = hypothesis.r;
  if (!hypothesis.delta.empty()) hyp["delta"] = hypothesis.delta;
  j["hypothesis_check"] = hyp;

  nlohmann::json recs = nlohmann::json::array();
  for (const auto& r : result.records) {
    nlohmann::json jr;
    jr["iter"] = r.iteration;
    jr["type"] = refinement_name(r.type);
    jr["dof"] = r.dof;
    jr["dof_total_vertices"] = r.dof_total_vertices;
    jr["mu_bar"] = r.mu_bar;
    jr["tau_bar"] = r.tau_bar;
    // NaN is not representable in JSON; emit null for skipped estimates
    jr["mu"] = std::isnan(r.mu) ? nlohmann::json() : nlohmann::json(r.mu);
    jr["tau"] = std::isnan(r.tau) ? nlohmann::json() : nlohmann::json(r.tau);
    jr["eta"] = std::isnan(r.eta) ? nlohmann::json() : nlohmann::json(r.eta);
    jr["n_colpts"] = r.n_collocation_points;
    jr["n_triangles"] = r.n_triangles;
    jr["wall_ms"] = r.wall_ms;
    recs.push_back(jr);
  }
  j["records"] = recs;

  nlohmann::json index_set = nlohmann::json::array();
  for (const auto& nu : result.final_index_set) index_set.push_back(nu);
  j["final_index_set"] = index_set;
  j["final_mesh"] = {
      {"vertices", result.final_mesh ? result.final_mesh->vertex_count() : 0},
      {"triangles", result.final_mesh ? result.final_mesh->triangle_count() : 0},
  };

  auto out = open_out(path);
  out << j.dump(2) << '\n';
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace scfem
