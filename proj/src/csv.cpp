#include "tbgate/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

namespace tbgate {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

struct Row {
  int number;  // 1-based line number in the file
  std::vector<std::string> cells;
};

struct Table {
  std::map<std::string, std::size_t> columns;
  std::vector<Row> rows;
};

Table parse_table(const std::string& text, const std::string& source,
                  const std::vector<std::string>& required) {
  Table t;
  std::istringstream in(text);
  std::string line;
  int number = 0;
  bool header = false;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string s = trim(line);
    if (s.empty() || s.front() == '#') continue;
    const auto cells = split(s);
    if (!header) {
      for (std::size_t i = 0; i < cells.size(); ++i) {
        if (t.columns.count(cells[i])) {
          throw DataFormatError(source, number, "duplicate column '" + cells[i] + "'");
        }
        t.columns[cells[i]] = i;
      }
      for (const auto& r : required) {
        if (!t.columns.count(r)) throw DataFormatError(source, number, "missing column '" + r + "'");
      }
      width = cells.size();
      header = true;
      continue;
    }
    if (cells.size() != width) {
      throw DataFormatError(source, number, "expected " + std::to_string(width) + " fields, got " +
                                                std::to_string(cells.size()));
    }
    t.rows.push_back(Row{number, cells});
  }
  if (!header) throw DataFormatError(source, 0, "empty table");
  return t;
}

double to_number(const std::string& cell, const std::string& source, int row,
                 const std::string& column) {
  double v = 0.0;
  const char* first = cell.data();
  const char* last = first + cell.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (cell.empty() || ec != std::errc() || ptr != last || !std::isfinite(v)) {
    throw DataFormatError(source, row, "column '" + column + "': not a number: '" + cell + "'");
  }
  return v;
}

}  // namespace

DataFormatError::DataFormatError(std::string source, int row, const std::string& message)
    : std::runtime_error(source + ":" + std::to_string(row) + ": " + message), row_(row) {}

CoincidenceCounts parse_counts_csv(const std::string& text, const std::string& source) {
  const Table t = parse_table(text, source, {"outcome", "counts"});
  const std::size_t oc = t.columns.at("outcome");
  const std::size_t cc = t.columns.at("counts");
  CoincidenceCounts c;
  std::set<std::string> seen;
  for (const Row& r : t.rows) {
    const std::string& name = r.cells[oc];
    const double v = to_number(r.cells[cc], source, r.number, "counts");
    if (v < 0.0 || std::floor(v) != v) {
      throw DataFormatError(source, r.number, "counts must be a non-negative integer");
    }
    if (!seen.insert(name).second) {
      throw DataFormatError(source, r.number, "outcome '" + name + "' listed twice");
    }
    if (name == "e_up") c.e_up = v;
    else if (name == "e_down") c.e_down = v;
    else if (name == "l_up") c.l_up = v;
    else if (name == "l_down") c.l_down = v;
    else if (name == "mid_x_plus") c.mid_x_plus = v;
    else if (name == "mid_x_minus") c.mid_x_minus = v;
    else if (name == "mid_y_plus") c.mid_y_plus = v;
    else if (name == "mid_y_minus") c.mid_y_minus = v;
    else throw DataFormatError(source, r.number, "unknown outcome '" + name + "'");
  }
  for (const char* z : {"e_up", "e_down", "l_up", "l_down"}) {
    if (!seen.count(z)) throw DataFormatError(source, 0, std::string("missing outcome '") + z + "'");
  }
  if (c.mid_x_plus.has_value() != c.mid_x_minus.has_value() ||
      c.mid_y_plus.has_value() != c.mid_y_minus.has_value()) {
    throw DataFormatError(source, 0, "mid-window outcomes must come in plus/minus pairs");
  }
  return c;
}

std::vector<SaturationPoint> parse_saturation_csv(const std::string& text,
                                                  const std::string& source) {
  const Table t = parse_table(text, source, {"power_nw", "counts"});
  const std::size_t pc = t.columns.at("power_nw");
  const std::size_t cc = t.columns.at("counts");
  const auto sc = t.columns.find("spin_state");
  std::vector<SaturationPoint> out;
  for (const Row& r : t.rows) {
    SaturationPoint p;
    p.power_nw = to_number(r.cells[pc], source, r.number, "power_nw");
    p.counts = to_number(r.cells[cc], source, r.number, "counts");
    if (p.power_nw < 0.0) throw DataFormatError(source, r.number, "power_nw must be non-negative");
    if (p.counts < 0.0) throw DataFormatError(source, r.number, "counts must be non-negative");
    if (sc != t.columns.end()) {
      p.spin_state = r.cells[sc->second];
      if (p.spin_state != "up" && p.spin_state != "down") {
        throw DataFormatError(source, r.number, "spin_state must be up or down");
      }
    }
    out.push_back(p);
  }
  return out;
}

std::vector<VisibilityPoint> parse_visibility_csv(const std::string& text,
                                                  const std::string& source) {
  const Table t = parse_table(text, source, {"n_bar", "visibility"});
  const std::size_t nc = t.columns.at("n_bar");
  const std::size_t vc = t.columns.at("visibility");
  const auto ec = t.columns.find("visibility_err");
  std::vector<VisibilityPoint> out;
  for (const Row& r : t.rows) {
    VisibilityPoint p;
    p.n_bar = to_number(r.cells[nc], source, r.number, "n_bar");
    p.visibility = to_number(r.cells[vc], source, r.number, "visibility");
    if (ec != t.columns.end() && !r.cells[ec->second].empty()) {
      p.error = to_number(r.cells[ec->second], source, r.number, "visibility_err");
      if (*p.error < 0.0) throw DataFormatError(source, r.number, "visibility_err must be >= 0");
    }
    out.push_back(p);
  }
  return out;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataFormatError(path, 0, "cannot open file");
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace tbgate
