#include "cusphere/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace cusphere::io {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Same digits as printf("%.17g") but independent of the C locale.
void append_g17(std::string& out, double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  out.append(buf, res.ptr);
}

}  // namespace

double parse_double(std::string_view text) {
  text = trim(text);
  double v = 0.0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  if (!text.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last || text.empty()) {
    throw std::invalid_argument("not a number: '" + std::string(text) + "'");
  }
  return v;
}

long parse_long(std::string_view text) {
  text = trim(text);
  long v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
    throw std::invalid_argument("not an integer: '" + std::string(text) + "'");
  }
  return v;
}

std::string field_csv(const SphereGrid& g, const CellField& f) {
  std::string out;
  out.reserve(g.size() * 200);
  out.append(kCsvHeader);
  out.push_back('\n');
  for (const Cell& c : g.cells) {
    out.append(std::to_string(c.id));
    for (double v : {c.center.lambda, c.center.phi, c.phi1, c.phi2, c.lambda1, c.lambda2, c.area, f[c.id]}) {
      out.push_back(',');
      append_g17(out, v);
    }
    out.push_back('\n');
  }
  return out;
}

void write_field_csv(std::ostream& os, const SphereGrid& g, const CellField& f) { os << field_csv(g, f); }

std::vector<CsvRow> read_field_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || trim(line) != kCsvHeader) {
    throw std::runtime_error("CSV header mismatch: expected '" + std::string(kCsvHeader) + "'");
  }
  static constexpr const char* columns[] = {"cell_id", "lambda_center", "phi_center", "phi1", "phi2",
                                            "lambda1", "lambda2",       "area",       "u"};
  std::vector<CsvRow> rows;
  long line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::vector<std::string_view> fields;
    std::string_view rest = line;
    for (;;) {
      const auto comma = rest.find(',');
      fields.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (fields.size() != 9) {
      throw std::runtime_error("line " + std::to_string(line_no) + ": expected 9 columns, got " +
                               std::to_string(fields.size()));
    }
    CsvRow r{};
    double* targets[] = {&r.lambda_center, &r.phi_center, &r.phi1, &r.phi2, &r.lambda1, &r.lambda2, &r.area, &r.u};
    try {
      r.cell_id = static_cast<int>(parse_long(fields[0]));
    } catch (const std::invalid_argument&) {
      throw std::runtime_error("line " + std::to_string(line_no) + ": bad value in column cell_id");
    }
    for (std::size_t k = 1; k < 9; ++k) {
      try {
        *targets[k - 1] = parse_double(fields[k]);
      } catch (const std::invalid_argument&) {
        throw std::runtime_error("line " + std::to_string(line_no) + ": bad value in column " + columns[k]);
      }
    }
    rows.push_back(r);
  }
  return rows;
}

std::string normalize_key(std::string key) {
  for (char& c : key) {
    if (c == '_') c = '-';
  }
  return std::string(trim(key));
}

std::map<std::string, std::string> parse_key_values(std::istream& is, const std::string& source) {
  std::map<std::string, std::string> kv;
  std::string line;
  long line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    std::string_view view = line;
    if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) {
      throw std::invalid_argument(source + ":" + std::to_string(line_no) + ": expected key=value");
    }
    const std::string key = normalize_key(std::string(view.substr(0, eq)));
    if (key.empty()) throw std::invalid_argument(source + ":" + std::to_string(line_no) + ": empty key");
    kv[key] = std::string(trim(view.substr(eq + 1)));
  }
  return kv;
}

std::map<std::string, std::string> read_key_value_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file " + path.string());
  return parse_key_values(in, path.string());
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace cusphere::io
