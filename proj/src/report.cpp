#include "steinshrink/report.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <map>
#include <sstream>
#include <tuple>

namespace steinshrink {

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

std::string PrialReport::to_csv() const {
  std::string out(kPrialCsvHeader);
  out += '\n';
  for (const PrialRow& row : rows) {
    out += to_string(row.structure);
    out += ',' + std::to_string(row.p);
    out += ',' + std::to_string(row.n);
    out += ',' + std::to_string(row.r);
    out += ',' + format_double(row.alpha);
    out += ',' + format_double(row.prial_percent);
    out += ',' + format_double(row.se_percent);
    out += ',' + std::to_string(row.replications);
    out += ',' + std::to_string(row.seed);
    out += '\n';
  }
  return out;
}

namespace {

std::string fixed(double x, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, x);
  return buf;
}

}  // namespace

std::string PrialReport::to_markdown() const {
  std::ostringstream os;
  os << "# PRIAL of Haff-type estimators over a_o S\n\n";
  os << "PRIAL = 100 (R(a_o S) - R(Haff)) / R(a_o S) under Stein loss. "
        "All estimators of a setting share the same sampled data; the standard "
        "error is the delta-method SE of the ratio of paired mean losses.\n\n";

  // Settings as rows, alphas as columns, in first-seen order.
  using Key = std::tuple<Structure, Index, Index, Index>;
  std::vector<Key> order;
  std::vector<double> alphas;
  std::map<Key, std::map<double, const PrialRow*>> grid;
  for (const PrialRow& row : rows) {
    const Key key{row.structure, row.p, row.n, row.r};
    if (!grid.contains(key)) order.push_back(key);
    grid[key][row.alpha] = &row;
    if (std::find(alphas.begin(), alphas.end(), row.alpha) == alphas.end()) {
      alphas.push_back(row.alpha);
    }
  }
  if (!order.empty()) {
    os << "| Sigma | (p,n) | r |";
    for (double a : alphas) os << " alpha=" << format_double(a) << " |";
    os << "\n|---|---|---|";
    for (std::size_t i = 0; i < alphas.size(); ++i) os << "---|";
    os << '\n';
    for (const Key& key : order) {
      os << "| " << to_string(std::get<0>(key)) << " | (" << std::get<1>(key) << ","
         << std::get<2>(key) << ") | " << std::get<3>(key) << " |";
      for (double a : alphas) {
        const auto& cells = grid[key];
        auto it = cells.find(a);
        if (it == cells.end()) {
          os << "  |";
        } else {
          os << ' ' << fixed(it->second->prial_percent, 2) << " ± "
             << fixed(it->second->se_percent, 2) << " |";
        }
      }
      os << '\n';
    }
    os << '\n';
  }

  os << "| structure | p | n | r | alpha | PRIAL % | SE % | replications | seed |\n";
  os << "|---|---|---|---|---|---|---|---|---|\n";
  for (const PrialRow& row : rows) {
    os << "| " << to_string(row.structure) << " | " << row.p << " | " << row.n << " | "
       << row.r << " | " << format_double(row.alpha) << " | "
       << fixed(row.prial_percent, 2) << " | " << fixed(row.se_percent, 2) << " | "
       << row.replications << " | " << row.seed << " |\n";
  }
  return os.str();
}

namespace {

template <typename T>
T parse_number(std::string_view field, std::size_t line, const char* column) {
  T value{};
  const char* first = field.data();
  const char* last = field.data() + field.size();
  const auto res = std::from_chars(first, last, value);
  if (res.ec != std::errc() || res.ptr != last) {
    std::ostringstream os;
    os << "prial.csv line " << line << ": bad " << column << " value '" << field << "'";
    throw ParameterError(os.str());
  }
  return value;
}

}  // namespace

PrialReport PrialReport::from_csv(std::string_view text) {
  PrialReport report;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool header_seen = false;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!header_seen) {
      if (line != kPrialCsvHeader) {
        throw ParameterError("prial.csv line 1: unexpected header '" + std::string(line) + "'");
      }
      header_seen = true;
      continue;
    }
    if (line.empty()) continue;

    std::vector<std::string_view> f;
    std::size_t start = 0;
    for (;;) {
      const std::size_t comma = line.find(',', start);
      f.push_back(line.substr(start, comma == std::string_view::npos ? comma : comma - start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (f.size() != 9) {
      std::ostringstream os;
      os << "prial.csv line " << line_no << ": expected 9 fields, found " << f.size();
      throw ParameterError(os.str());
    }
    PrialRow row;
    try {
      row.structure = parse_structure(f[0]);
    } catch (const ParameterError& ex) {
      std::ostringstream os;
      os << "prial.csv line " << line_no << ": " << ex.what();
      throw ParameterError(os.str());
    }
    row.p = parse_number<Index>(f[1], line_no, "p");
    row.n = parse_number<Index>(f[2], line_no, "n");
    row.r = parse_number<Index>(f[3], line_no, "r");
    row.alpha = parse_number<double>(f[4], line_no, "alpha");
    row.prial_percent = parse_number<double>(f[5], line_no, "prial_percent");
    row.se_percent = parse_number<double>(f[6], line_no, "se_percent");
    row.replications = parse_number<Index>(f[7], line_no, "replications");
    row.seed = parse_number<std::uint64_t>(f[8], line_no, "seed");
    report.rows.push_back(row);
  }
  if (!header_seen) throw ParameterError("prial.csv: empty input");
  return report;
}

}  // namespace steinshrink
