#include "xduce/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace xduce {

int CsvTable::column(const std::string& name) const {
  for (size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return (int)i;
  return -1;
}

std::vector<double> CsvTable::col(const std::string& name) const {
  int c = column(name);
  if (c < 0) throw std::invalid_argument("csv: missing column '" + name + "'");
  std::vector<double> out;
  out.reserve(rows.size());
  for (auto& r : rows) out.push_back(r[c]);
  return out;
}

static std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  out.push_back(cur);
  for (auto& f : out) {
    size_t a = f.find_first_not_of(" \t");
    size_t b = f.find_last_not_of(" \t");
    f = a == std::string::npos ? "" : f.substr(a, b - a + 1);
  }
  return out;
}

CsvTable parse_csv(const std::string& text) {
  CsvTable t;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      size_t a = line.find_first_not_of(" \t", 1);
      t.comments.push_back(a == std::string::npos ? "" : line.substr(a));
      continue;
    }
    std::vector<std::string> fields = split_fields(line);
    if (!have_header) {
      t.header = fields;
      have_header = true;
      continue;
    }
    if (fields.size() != t.header.size())
      throw std::invalid_argument("csv: line " + std::to_string(lineno) + " has " +
                                  std::to_string(fields.size()) + " fields, expected " +
                                  std::to_string(t.header.size()));
    std::vector<double> row;
    row.reserve(fields.size());
    for (auto& f : fields) {
      try {
        size_t pos = 0;
        double v = std::stod(f, &pos);
        if (pos != f.size()) throw std::invalid_argument(f);
        row.push_back(v);
      } catch (const std::exception&) {
        throw std::invalid_argument("csv: line " + std::to_string(lineno) +
                                    ": cannot parse '" + f + "' as a number");
      }
    }
    t.rows.push_back(std::move(row));
  }
  if (!have_header) throw std::invalid_argument("csv: no header row found");
  return t;
}

CsvTable read_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::invalid_argument("csv: cannot open '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_csv(ss.str());
}

std::string format_csv(const std::vector<std::string>& manifest,
                       const std::vector<std::string>& header,
                       const std::vector<std::vector<double>>& rows) {
  std::ostringstream out;
  for (auto& m : manifest) out << "# " << m << "\n";
  for (size_t i = 0; i < header.size(); ++i)
    out << header[i] << (i + 1 < header.size() ? "," : "\n");
  char buf[40];
  for (auto& r : rows) {
    if (r.size() != header.size())
      throw std::invalid_argument("csv: row width does not match header");
    for (size_t i = 0; i < r.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", r[i]);
      out << buf << (i + 1 < r.size() ? "," : "\n");
    }
  }
  return out.str();
}

void write_csv(const std::string& path, const std::vector<std::string>& manifest,
               const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  std::ofstream f(path);
  if (!f) throw std::invalid_argument("csv: cannot write '" + path + "'");
  f << format_csv(manifest, header, rows);
}

}  // namespace xduce
