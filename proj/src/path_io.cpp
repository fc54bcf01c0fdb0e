#include "hestonwlse/path_io.hpp"

#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "json.hpp"

namespace hestonwlse {

namespace {

bool has_json_extension(const std::string& name) {
  return name.size() >= 5 && name.compare(name.size() - 5, 5, ".json") == 0;
}

double parse_double(const std::string& field, std::size_t line) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(field, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != field.size()) {
    throw std::runtime_error("path csv: bad number '" + field + "' on line " +
                             std::to_string(line));
  }
  return v;
}

}  // namespace

void write_path_csv(std::ostream& out, const PathGrid& path) {
  const auto old_precision = out.precision(std::numeric_limits<double>::max_digits10);
  out << "t,x,y\n";
  for (std::size_t i = 0; i < path.size(); ++i) {
    out << static_cast<double>(i) * path.dt() << ',' << path.x()[i] << ',' << path.y()[i]
        << '\n';
  }
  out.precision(old_precision);
}

PathGrid read_path_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("path csv: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "t,x,y") throw std::runtime_error("path csv: expected header 't,x,y'");

  std::vector<double> t, x, y;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string f0, f1, f2;
    if (!std::getline(row, f0, ',') || !std::getline(row, f1, ',') ||
        !std::getline(row, f2, ',')) {
      throw std::runtime_error("path csv: expected 3 fields on line " + std::to_string(lineno));
    }
    t.push_back(parse_double(f0, lineno));
    x.push_back(parse_double(f1, lineno));
    y.push_back(parse_double(f2, lineno));
  }
  if (t.size() < 2) throw std::runtime_error("path csv: need at least two rows");
  const double dt = t[1] - t[0];
  return PathGrid(dt, t.back() - t.front(), std::move(x), std::move(y));
}

std::string path_to_json(const PathGrid& path) {
  nlohmann::json j;
  j["dt"] = path.dt();
  j["t_end"] = path.t_end();
  j["x"] = path.x();
  j["y"] = path.y();
  return j.dump();
}

PathGrid path_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  return PathGrid(j.at("dt").get<double>(), j.at("t_end").get<double>(),
                  j.at("x").get<std::vector<double>>(), j.at("y").get<std::vector<double>>());
}

void save_path(const std::string& filename, const PathGrid& path) {
  std::ofstream out(filename);
  if (!out) throw std::runtime_error("cannot open " + filename + " for writing");
  if (has_json_extension(filename)) {
    out << path_to_json(path) << '\n';
  } else {
    write_path_csv(out, path);
  }
  if (!out) throw std::runtime_error("write failed: " + filename);
}

PathGrid load_path(const std::string& filename) {
  std::ifstream in(filename);
  if (!in) throw std::runtime_error("cannot open " + filename);
  if (has_json_extension(filename)) {
    std::stringstream buf;
    buf << in.rdbuf();
    return path_from_json(buf.str());
  }
  return read_path_csv(in);
}

}  // namespace hestonwlse
