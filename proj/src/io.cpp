#include "tumatch/io.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include <json.hpp>

namespace tumatch {

std::string format_double(double v) {
  if (std::isnan(v)) return "";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::string format_u64(std::uint64_t v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

CsvWriter::CsvWriter(const std::string& path) : out_(path, std::ios::binary) {
  if (!out_) throw DomainError("CsvWriter: cannot open " + path);
}

void CsvWriter::row(const std::vector<std::string>& fields) {
  for (std::size_t k = 0; k < fields.size(); ++k) {
    if (k) out_ << ',';
    const std::string& f = fields[k];
    if (f.find_first_of(",\"\r\n") == std::string::npos) {
      out_ << f;
    } else {
      out_ << '"';
      for (char c : f) {
        if (c == '"') out_ << '"';
        out_ << c;
      }
      out_ << '"';
    }
  }
  out_ << "\r\n";
}

void write_meta_sidecar(const std::string& csv_path, const std::string& canonical_config,
                        std::uint64_t seed) {
  nlohmann::json meta;
  meta["tool"] = kToolName;
  meta["version"] = kToolVersion;
  meta["seed"] = seed;
  char hex[24];
  std::snprintf(hex, sizeof(hex), "%016llx",
                static_cast<unsigned long long>(fnv1a64(canonical_config)));
  meta["config_hash"] = hex;
  std::ofstream out(csv_path + ".meta.json", std::ios::binary);
  if (!out) throw DomainError("write_meta_sidecar: cannot open " + csv_path + ".meta.json");
  out << meta.dump(2) << "\n";
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  for (char c : line) {
    if (c == ',') {
      out.push_back(field);
      field.clear();
    } else if (c != '\r') {
      field.push_back(c);
    }
  }
  out.push_back(field);
  return out;
}

}  // namespace

MatchingPatterns read_patterns_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DomainError("read_patterns_csv: cannot open " + path);

  std::string line;
  if (!std::getline(in, line)) throw DomainError("read_patterns_csv: empty file");
  auto header = split_csv_line(line);
  if (header.size() != 3 || header[0] != "x" || header[1] != "y" || header[2] != "mass")
    throw DomainError("read_patterns_csv: expected header x,y,mass in " + path);

  struct Row {
    int x, y;
    double mass;
  };
  std::vector<Row> rows;
  int max_x = 0, max_y = 0;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    auto fields = split_csv_line(line);
    if (fields.size() != 3)
      throw DomainError("read_patterns_csv: bad row at line " + std::to_string(lineno));
    Row r;
    try {
      r = Row{std::stoi(fields[0]), std::stoi(fields[1]), std::stod(fields[2])};
    } catch (const std::exception&) {
      throw DomainError("read_patterns_csv: unparseable number at line " +
                        std::to_string(lineno));
    }
    if (r.x < 0 || r.y < 0 || (r.x == 0 && r.y == 0))
      throw DomainError("read_patterns_csv: invalid cell (" + fields[0] + "," + fields[1] +
                        ") at line " + std::to_string(lineno));
    if (r.mass < 0)
      throw DomainError("read_patterns_csv: negative mass at line " + std::to_string(lineno));
    max_x = std::max(max_x, r.x);
    max_y = std::max(max_y, r.y);
    rows.push_back(r);
  }
  if (max_x == 0 || max_y == 0)
    throw DomainError("read_patterns_csv: no marriage cells in " + path);

  Eigen::MatrixXd mu = Eigen::MatrixXd::Zero(max_x, max_y);
  Eigen::VectorXd mu_x0 = Eigen::VectorXd::Zero(max_x);
  Eigen::VectorXd mu_0y = Eigen::VectorXd::Zero(max_y);
  for (const auto& r : rows) {
    if (r.y == 0)
      mu_x0[r.x - 1] += r.mass;
    else if (r.x == 0)
      mu_0y[r.y - 1] += r.mass;
    else
      mu(r.x - 1, r.y - 1) += r.mass;
  }
  return MatchingPatterns(std::move(mu), std::move(mu_x0), std::move(mu_0y));
}

void write_patterns_csv(const std::string& path, const MatchingPatterns& mu) {
  CsvWriter csv(path);
  csv.row({"x", "y", "mass"});
  for (int x = 0; x < mu.X(); ++x)
    for (int y = 0; y < mu.Y(); ++y)
      csv.row({std::to_string(x + 1), std::to_string(y + 1), format_double(mu.mu(x, y))});
  for (int x = 0; x < mu.X(); ++x)
    csv.row({std::to_string(x + 1), "0", format_double(mu.mu_x0[x])});
  for (int y = 0; y < mu.Y(); ++y)
    csv.row({"0", std::to_string(y + 1), format_double(mu.mu_0y[y])});
}

}  // namespace tumatch
