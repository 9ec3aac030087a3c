#ifndef LATTICE3B_TOOLS_REPORT_HPP
#define LATTICE3B_TOOLS_REPORT_HPP

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace l3btool {

inline std::string fmt_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12e", v);
  return buf;
}

inline std::string fmt_short(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6e", v);
  return buf;
}

/// Buffered table with a manifest block. Rows are built in config order and
/// emitted once at the end, so output is byte-identical for identical
/// configs regardless of thread count.
class Report {
 public:
  Report(std::string command, std::vector<std::string> columns)
      : command_(std::move(command)), columns_(std::move(columns)) {}

  void manifest(const std::string& key, const std::string& value) {
    manifest_.emplace_back(key, value);
  }
  void manifest(const std::string& key, double value) {
    manifest_.emplace_back(key, fmt_num(value));
  }

  void row(std::vector<std::string> cells) { rows_.push_back(std::move(cells)); }

  void write_csv(std::ostream& os) const {
    os << "# lattice3b " << command_ << "\n";
    for (const auto& [k, v] : manifest_) os << "# " << k << "=" << v << "\n";
    for (std::size_t c = 0; c < columns_.size(); ++c)
      os << columns_[c] << (c + 1 < columns_.size() ? "," : "");
    os << "\n";
    for (const auto& r : rows_) {
      for (std::size_t c = 0; c < r.size(); ++c)
        os << r[c] << (c + 1 < r.size() ? "," : "");
      os << "\n";
    }
  }

  void write_jsonl(std::ostream& os) const {
    nlohmann::ordered_json m;
    m["record"] = "manifest";
    m["command"] = command_;
    for (const auto& [k, v] : manifest_) m[k] = v;
    os << m.dump() << "\n";
    for (const auto& r : rows_) {
      nlohmann::ordered_json j;
      j["record"] = "row";
      for (std::size_t c = 0; c < r.size() && c < columns_.size(); ++c)
        j[columns_[c]] = r[c];
      os << j.dump() << "\n";
    }
  }

  int emit(const std::string& path, const std::string& format) const {
    std::ofstream file;
    std::ostream* os = &std::cout;
    if (!path.empty()) {
      file.open(path);
      if (!file) {
        std::cerr << "cannot open output path: " << path << "\n";
        return 2;
      }
      os = &file;
    }
    if (format == "jsonl")
      write_jsonl(*os);
    else
      write_csv(*os);
    return 0;
  }

 private:
  std::string command_;
  std::vector<std::string> columns_;
  std::vector<std::pair<std::string, std::string>> manifest_;
  std::vector<std::vector<std::string>> rows_;
};

}  // namespace l3btool

#endif
