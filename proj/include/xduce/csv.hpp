#pragma once

#include <map>
#include <string>
#include <vector>

// Flat-file plumbing: CSV tables with '#' comment headers (run manifests).
namespace xduce {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  std::vector<std::string> comments;  // leading '#' lines, without the '#'

  int column(const std::string& name) const;      // -1 if absent
  std::vector<double> col(const std::string& name) const;  // throws if absent
  bool has(const std::string& name) const { return column(name) >= 0; }
};

CsvTable read_csv(const std::string& path);
CsvTable parse_csv(const std::string& text);

void write_csv(const std::string& path, const std::vector<std::string>& manifest,
               const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);
std::string format_csv(const std::vector<std::string>& manifest,
                       const std::vector<std::string>& header,
                       const std::vector<std::vector<double>>& rows);

}  // namespace xduce
