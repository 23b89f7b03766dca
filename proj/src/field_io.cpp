#include "henon/field_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "henon/error.hpp"

namespace henon {
namespace {

constexpr const char* kHeader = "r,theta,value";

struct Row {
  double r, theta, value;
};

bool parse_row(const std::string& line, Row& row) {
  char* end = nullptr;
  const char* p = line.c_str();
  row.r = std::strtod(p, &end);
  if (end == p || *end != ',') return false;
  p = end + 1;
  row.theta = std::strtod(p, &end);
  if (end == p || *end != ',') return false;
  p = end + 1;
  row.value = std::strtod(p, &end);
  if (end == p) return false;
  while (*end == ' ' || *end == '\r') ++end;
  return *end == '\0';
}

std::vector<Row> read_rows(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("field CSV is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kHeader) throw ConfigError("field CSV header must be '" + std::string(kHeader) + "'");
  std::vector<Row> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    Row row{};
    if (!parse_row(line, row)) throw ConfigError("malformed field CSV line " + std::to_string(lineno));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

void write_field_csv(std::ostream& out, const Field& field) {
  const Grid& g = *field.grid();
  out << kHeader << '\n';
  char buf[96];
  for (int i = 0; i < g.nr(); ++i) {
    for (int j = 0; j < g.ntheta(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", g.r(i), g.theta(j), field(i, j));
      out << buf;
    }
  }
}

void write_field_csv(const std::string& path, const Field& field) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open " + path + " for writing");
  write_field_csv(out, field);
}

Field read_field_csv(std::istream& in, const GridPtr& grid) {
  const std::vector<Row> rows = read_rows(in);
  if (rows.size() != grid->size()) {
    throw ConfigError("field CSV has " + std::to_string(rows.size()) + " rows, grid expects " +
                      std::to_string(grid->size()));
  }
  Field f(grid);
  for (int i = 0; i < grid->nr(); ++i) {
    for (int j = 0; j < grid->ntheta(); ++j) {
      const Row& row = rows[grid->index(i, j)];
      if (std::fabs(row.r - grid->r(i)) > 1e-12 || std::fabs(row.theta - grid->theta(j)) > 1e-12) {
        throw ConfigError("field CSV coordinates do not match the grid at node (" +
                          std::to_string(i) + "," + std::to_string(j) + ")");
      }
      f(i, j) = row.value;
    }
  }
  return f;
}

Field read_field_csv(const std::string& path, const GridPtr& grid) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  return read_field_csv(in, grid);
}

CsvShape probe_field_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  const std::vector<Row> rows = read_rows(in);
  if (rows.empty()) throw ConfigError("field CSV has no data rows");
  CsvShape shape;
  // theta varies fastest: the first row block ends where r changes
  std::size_t nt = 0;
  while (nt < rows.size() && rows[nt].r == rows[0].r) ++nt;
  if (nt == 0 || rows.size() % nt != 0) throw ConfigError("field CSV is not a tensor grid");
  shape.ntheta = static_cast<int>(nt);
  shape.nr = static_cast<int>(rows.size() / nt);
  return shape;
}

}  // namespace henon
