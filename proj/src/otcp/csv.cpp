#include "otcp/csv.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <system_error>
#include <unistd.h>

#include "otcp/error.hpp"

namespace otcp {
namespace {

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> SplitFields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.push_back(Trim(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::vector<std::string_view> SplitLines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t nl = text.find('\n', start);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = Trim(text.substr(start, nl - start));
    if (!line.empty()) lines.push_back(line);
    start = nl + 1;
  }
  return lines;
}

// Parses "<prefix><index>" and checks index == expected.
bool IsIndexedColumn(std::string_view name, std::string_view prefix, std::size_t expected) {
  if (name.substr(0, prefix.size()) != prefix) return false;
  std::size_t idx = 0;
  const auto rest = name.substr(prefix.size());
  const auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), idx);
  return ec == std::errc() && ptr == rest.data() + rest.size() && idx == expected;
}

std::size_t CountRun(const std::vector<std::string_view>& cols, std::size_t& pos,
                     std::string_view prefix) {
  std::size_t count = 0;
  while (pos < cols.size() && IsIndexedColumn(cols[pos], prefix, count + 1)) {
    ++count;
    ++pos;
  }
  return count;
}

double ParseNumber(std::string_view field, std::size_t line_no) {
  double v = 0.0;
  // from_chars rejects a leading '+'.
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (field.empty() || ec != std::errc() || ptr != field.data() + field.size()) {
    Fail(ErrorCode::kMalformedData,
         "line " + std::to_string(line_no) + ": cannot parse '" + std::string(field) + "'");
  }
  if (!std::isfinite(v)) {
    Fail(ErrorCode::kMalformedData, "line " + std::to_string(line_no) + ": non-finite value");
  }
  return v;
}

struct ParsedTable {
  CsvLayout layout;
  std::vector<std::vector<double>> rows;
};

ParsedTable ParseTable(std::string_view text) {
  const auto lines = SplitLines(text);
  if (lines.empty()) Fail(ErrorCode::kMalformedData, "missing header row");
  ParsedTable table{ParseHeader(lines[0]), {}};
  const std::size_t width = table.layout.features +
                            table.layout.outputs * (table.layout.kind == DataKind::kRegression ? 2 : 1) +
                            (table.layout.has_label ? 1 : 0);
  table.rows.reserve(lines.size() - 1);
  for (std::size_t l = 1; l < lines.size(); ++l) {
    const auto fields = SplitFields(lines[l]);
    if (fields.size() != width) {
      Fail(ErrorCode::kMalformedData, "line " + std::to_string(l + 1) + ": expected " +
                                          std::to_string(width) + " fields, got " +
                                          std::to_string(fields.size()));
    }
    std::vector<double> row(width);
    for (std::size_t c = 0; c < width; ++c) row[c] = ParseNumber(fields[c], l + 1);
    table.rows.push_back(std::move(row));
  }
  if (table.rows.empty()) Fail(ErrorCode::kMalformedData, "no data rows");
  return table;
}

void AppendRow(std::string& out, std::span<const double> values) {
  for (std::size_t k = 0; k < values.size(); ++k) {
    out += FormatDouble(values[k]);
    out += ',';
  }
}

void AppendHeader(std::string& out, std::string_view prefix, std::size_t count) {
  for (std::size_t k = 1; k <= count; ++k) {
    out += prefix;
    out += std::to_string(k);
    out += ',';
  }
}

void FinishLine(std::string& out) {
  if (!out.empty() && out.back() == ',') out.back() = '\n';
  else out += '\n';
}

}  // namespace

CsvLayout ParseHeader(std::string_view header_line) {
  const auto cols = SplitFields(Trim(header_line));
  std::size_t pos = 0;
  CsvLayout layout;
  layout.features = CountRun(cols, pos, "x_");
  if (pos < cols.size() && IsIndexedColumn(cols[pos], "fhat_", 1)) {
    layout.kind = DataKind::kRegression;
    layout.outputs = CountRun(cols, pos, "fhat_");
    const std::size_t ys = CountRun(cols, pos, "y_");
    if (ys != layout.outputs) {
      Fail(ErrorCode::kMalformedData, "header has " + std::to_string(layout.outputs) +
                                          " fhat columns but " + std::to_string(ys) + " y columns");
    }
  } else if (pos < cols.size() && IsIndexedColumn(cols[pos], "pi_", 1)) {
    layout.kind = DataKind::kClassification;
    layout.outputs = CountRun(cols, pos, "pi_");
    if (pos < cols.size() && cols[pos] == "label") {
      layout.has_label = true;
      ++pos;
    }
  } else {
    Fail(ErrorCode::kMalformedData, "header must be x_1..x_p then fhat_/y_ or pi_ columns");
  }
  if (pos != cols.size()) {
    Fail(ErrorCode::kMalformedData, "unexpected header column '" + std::string(cols[pos]) + "'");
  }
  return layout;
}

RegressionData ParseRegressionCsv(std::string_view text) {
  ParsedTable t = ParseTable(text);
  if (t.layout.kind != DataKind::kRegression) Fail(ErrorCode::kMalformedData, "expected regression columns");
  const std::size_t n = t.rows.size(), p = t.layout.features, d = t.layout.outputs;
  RegressionData data{PointSet(n, p), PointSet(n, d), PointSet(n, d)};
  for (std::size_t i = 0; i < n; ++i) {
    const auto& r = t.rows[i];
    for (std::size_t k = 0; k < p; ++k) data.features(i, k) = r[k];
    for (std::size_t k = 0; k < d; ++k) {
      data.fhat(i, k) = r[p + k];
      data.y(i, k) = r[p + d + k];
    }
  }
  return data;
}

ClassificationData ParseClassificationCsv(std::string_view text, bool require_label) {
  ParsedTable t = ParseTable(text);
  if (t.layout.kind != DataKind::kClassification) {
    Fail(ErrorCode::kMalformedData, "expected classification columns");
  }
  if (require_label && !t.layout.has_label) Fail(ErrorCode::kMalformedData, "missing label column");
  const std::size_t n = t.rows.size(), p = t.layout.features, K = t.layout.outputs;
  ClassificationData data{PointSet(n, p), PointSet(n, K), {}};
  if (t.layout.has_label) data.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& r = t.rows[i];
    for (std::size_t k = 0; k < p; ++k) data.features(i, k) = r[k];
    for (std::size_t k = 0; k < K; ++k) data.probs(i, k) = r[p + k];
    if (t.layout.has_label) {
      const double label = r[p + K];
      if (label != std::floor(label) || label < 1.0 || label > static_cast<double>(K)) {
        Fail(ErrorCode::kInvalidLabel, "line " + std::to_string(i + 2) + ": label must be an integer in 1.." +
                                           std::to_string(K));
      }
      data.labels[i] = static_cast<std::size_t>(label) - 1;
    }
  }
  return data;
}

std::string ReadTextFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorCode::kIo, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) Fail(ErrorCode::kIo, "read error on '" + path + "'");
  return ss.str();
}

DataKind DetectDataKind(const std::string& path) {
  const std::string text = ReadTextFile(path);
  return ParseHeader(std::string_view(text).substr(0, text.find('\n'))).kind;
}

RegressionData ReadRegressionCsv(const std::string& path) { return ParseRegressionCsv(ReadTextFile(path)); }

ClassificationData ReadClassificationCsv(const std::string& path, bool require_label) {
  return ParseClassificationCsv(ReadTextFile(path), require_label);
}

std::string FormatRegressionCsv(const RegressionData& data) {
  std::string out;
  AppendHeader(out, "x_", data.features.dim());
  AppendHeader(out, "fhat_", data.fhat.dim());
  AppendHeader(out, "y_", data.y.dim());
  FinishLine(out);
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (data.features.dim() > 0) AppendRow(out, data.features.row(i));
    AppendRow(out, data.fhat.row(i));
    AppendRow(out, data.y.row(i));
    FinishLine(out);
  }
  return out;
}

std::string FormatClassificationCsv(const ClassificationData& data) {
  std::string out;
  AppendHeader(out, "x_", data.features.dim());
  AppendHeader(out, "pi_", data.probs.dim());
  out += "label\n";
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (data.features.dim() > 0) AppendRow(out, data.features.row(i));
    AppendRow(out, data.probs.row(i));
    out += std::to_string(data.labels[i] + 1);
    out += '\n';
  }
  return out;
}

std::string FormatDouble(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) Fail(ErrorCode::kInvalidArgument, "cannot format number");
  return std::string(buf, ptr);
}

void WriteTextFileAtomic(const std::string& path, std::string_view contents) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) Fail(ErrorCode::kIo, "cannot write '" + tmp.string() + "'");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) {
      std::error_code ignored;
      fs::remove(tmp, ignored);
      Fail(ErrorCode::kIo, "write error on '" + tmp.string() + "'");
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    std::error_code ignored;
    fs::remove(tmp, ignored);
    Fail(ErrorCode::kIo, "cannot rename onto '" + path + "': " + ec.message());
  }
}

}  // namespace otcp
