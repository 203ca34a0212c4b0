#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "arrowsdp/fem2d.hpp"

namespace arrowsdp::fem2d {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_value(const std::string& key, const std::string& text) {
  std::istringstream in(text);
  T v{};
  if (!(in >> v) || !(in >> std::ws).eof()) {
    throw IoError("bad value for '" + key + "': '" + text + "'");
  }
  return v;
}

}  // namespace

std::string to_string(FixedEdge edge) {
  switch (edge) {
    case FixedEdge::left: return "left";
    case FixedEdge::right: return "right";
    case FixedEdge::bottom: return "bottom";
    case FixedEdge::top: return "top";
  }
  return "left";
}

FixedEdge parse_fixed_edge(const std::string& text) {
  if (text == "left") return FixedEdge::left;
  if (text == "right") return FixedEdge::right;
  if (text == "bottom") return FixedEdge::bottom;
  if (text == "top") return FixedEdge::top;
  throw DomainError("unknown fixed edge '" + text + "'");
}

double FemConfig::volume() const {
  return volume_bound ? *volume_bound : 0.4 * n_elements();
}

void FemConfig::validate() const {
  if (nx < 1 || ny < 1) throw DomainError("nx and ny must be at least 1");
  if (!std::isfinite(young_modulus) || young_modulus <= 0.0) {
    throw DomainError("young_modulus must be positive");
  }
  if (!(poisson_ratio > -1.0 && poisson_ratio < 0.5)) {
    throw DomainError("poisson_ratio must lie in (-1, 0.5)");
  }
  if (!std::isfinite(x_lower) || !std::isfinite(x_upper) || x_lower < 0.0 ||
      x_lower > x_upper) {
    throw DomainError("density bounds must satisfy 0 <= x_lower <= x_upper");
  }
  const double v = volume();
  if (!(x_lower * n_elements() < v && v < x_upper * n_elements())) {
    throw DomainError("volume bound must lie strictly between the bound sums");
  }
  for (const auto& l : loads) {
    if (l.node < 0 || l.node >= n_nodes()) throw DomainError("load node out of range");
    if (l.direction != 0 && l.direction != 1) {
      throw DomainError("load direction must be 0 (x) or 1 (y)");
    }
    if (!std::isfinite(l.magnitude)) throw DomainError("load magnitude not finite");
  }
}

FemConfig FemConfig::cantilever(int nx, int ny) {
  FemConfig cfg;
  cfg.nx = nx;
  cfg.ny = ny;
  cfg.loads = {{cfg.node(nx, ny / 2), 1, -1.0}};
  return cfg;
}

FemConfig read_config(std::istream& in) {
  FemConfig cfg;
  bool has_load = false;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw IoError("line " + std::to_string(lineno) + ": expected key = value");
    }
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key == "nx") {
      cfg.nx = parse_value<int>(key, value);
    } else if (key == "ny") {
      cfg.ny = parse_value<int>(key, value);
    } else if (key == "young_modulus") {
      cfg.young_modulus = parse_value<double>(key, value);
    } else if (key == "poisson_ratio") {
      cfg.poisson_ratio = parse_value<double>(key, value);
    } else if (key == "fixed_edge") {
      try {
        cfg.fixed_edge = parse_fixed_edge(value);
      } catch (const DomainError& e) {
        throw IoError(e.what());
      }
    } else if (key == "x_lower") {
      cfg.x_lower = parse_value<double>(key, value);
    } else if (key == "x_upper") {
      cfg.x_upper = parse_value<double>(key, value);
    } else if (key == "volume_bound") {
      cfg.volume_bound = parse_value<double>(key, value);
    } else if (key == "load") {
      std::istringstream ls(value);
      PointLoad l;
      std::string dir;
      if (!(ls >> l.node >> dir >> l.magnitude) || !(ls >> std::ws).eof() ||
          (dir != "x" && dir != "y")) {
        throw IoError("line " + std::to_string(lineno) +
                      ": load expects '<node> <x|y> <magnitude>'");
      }
      l.direction = dir == "x" ? 0 : 1;
      cfg.loads.push_back(l);
      has_load = true;
    } else {
      throw IoError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
  }
  if (!has_load) cfg.loads = FemConfig::cantilever(cfg.nx, cfg.ny).loads;
  return cfg;
}

FemConfig read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path + "'");
  return read_config(in);
}

void write_config(std::ostream& out, const FemConfig& cfg) {
  out.precision(17);
  out << "nx = " << cfg.nx << "\nny = " << cfg.ny
      << "\nyoung_modulus = " << cfg.young_modulus
      << "\npoisson_ratio = " << cfg.poisson_ratio
      << "\nfixed_edge = " << to_string(cfg.fixed_edge)
      << "\nx_lower = " << cfg.x_lower << "\nx_upper = " << cfg.x_upper
      << "\nvolume_bound = " << cfg.volume() << '\n';
  for (const auto& l : cfg.loads) {
    out << "load = " << l.node << ' ' << (l.direction == 0 ? 'x' : 'y') << ' '
        << l.magnitude << '\n';
  }
}

}  // namespace arrowsdp::fem2d
