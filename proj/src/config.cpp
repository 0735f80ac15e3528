#include "scfem/config.hpp"

#include <istream>
#include <sstream>

#include "scfem/errors.hpp"

namespace scfem {

int RunConfig::effective_m() const {
  if (M > 0) return M;
  if (problem == "cookie") return 8;
  if (problem == "fourier") return 4;
  return 0;
}

std::map<std::string, std::string> RunConfig::as_map() const {
  auto fmt = [](double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
  };
  return {
      {"problem", problem},
      {"family", family},
      {"m", std::to_string(effective_m())},
      {"tol", fmt(tolerance)},
      {"theta_x", fmt(theta_x)},
      {"theta_y", fmt(theta_y)},
      {"vartheta", fmt(vartheta)},
      {"estimate_period", std::to_string(estimate_period)},
      {"max_iter", std::to_string(max_iterations)},
      {"lshape_cells", std::to_string(lshape_cells)},
      {"out", out_dir},
  };
}

namespace {

double parse_double(const std::string& key, const std::string& value) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(value, &pos);
  } catch (const std::exception&) {
    throw ConfigError("invalid number for '" + key + "': " + value);
  }
  if (pos != value.size())
    throw ConfigError("invalid number for '" + key + "': " + value);
  return v;
}

int parse_int(const std::string& key, const std::string& value) {
  std::size_t pos = 0;
  int v = 0;
  try {
    v = std::stoi(value, &pos);
  } catch (const std::exception&) {
    throw ConfigError("invalid integer for '" + key + "': " + value);
  }
  if (pos != value.size())
    throw ConfigError("invalid integer for '" + key + "': " + value);
  return v;
}

}  // namespace

void apply_setting(RunConfig& c, const std::string& key, const std::string& value) {
  if (key == "problem")
    c.problem = value;
  else if (key == "family")
    c.family = value;
  else if (key == "m")
    c.M = parse_int(key, value);
  else if (key == "tol")
    c.tolerance = parse_double(key, value);
  else if (key == "theta_x")
    c.theta_x = parse_double(key, value);
  else if (key == "theta_y")
    c.theta_y = parse_double(key, value);
  else if (key == "vartheta")
    c.vartheta = parse_double(key, value);
  else if (key == "estimate_period")
    c.estimate_period = parse_int(key, value);
  else if (key == "max_iter")
    c.max_iterations = parse_int(key, value);
  else if (key == "lshape_cells")
    c.lshape_cells = parse_int(key, value);
  else if (key == "out")
    c.out_dir = value;
  else
    throw ConfigError("unknown configuration key: " + key);
}

RunConfig parse_config(std::istream& in, RunConfig base) {
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t\r");
    line = line.substr(first, last - first + 1);
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected key=value");
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t");
      const auto b = s.find_last_not_of(" \t");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    apply_setting(base, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return base;
}

RunConfig validate(RunConfig c) {
  std::vector<std::string> violations;
  if (c.problem != "cookie" && c.problem != "fourier")
    violations.push_back("problem must be 'cookie' or 'fourier' (got '" + c.problem + "')");
  if (c.family != "leja" && c.family != "cc")
    violations.push_back("family must be set to 'leja' or 'cc' (got '" + c.family + "')");
  if (!(c.tolerance > 0.0)) violations.push_back("tol must be > 0");
  auto check_theta = [&](const char* name, double v) {
    if (!(v > 0.0 && v <= 1.0))
      violations.push_back(std::string(name) + " must be in (0, 1]");
  };
  check_theta("theta_x", c.theta_x);
  check_theta("theta_y", c.theta_y);
  if (!(c.vartheta > 0.0)) violations.push_back("vartheta must be > 0");
  if (c.estimate_period < 1) violations.push_back("estimate_period must be >= 1");
  if (c.max_iterations < 1) violations.push_back("max_iter must be >= 1");
  if (c.lshape_cells < 1) violations.push_back("lshape_cells must be >= 1");
  if (c.M < 0) violations.push_back("m must be positive");
  if (!violations.empty()) {
    std::string msg = "invalid configuration:";
    for (const auto& v : violations) msg += "\n  - " + v;
    throw ConfigError(msg);
  }
  c.M = c.effective_m();
  return c;
}

}  // namespace scfem
