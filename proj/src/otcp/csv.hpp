#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "otcp/synthetic.hpp"

namespace otcp {

// Flat prediction dumps, one row per instance, header mandatory.
//   regression:     x_1..x_p, fhat_1..fhat_d, y_1..y_d
//   classification: x_1..x_p, pi_1..pi_K, label      (label in 1..K)
// p may be 0. Malformed content throws MalformedData, unreadable files Io.

enum class DataKind { kRegression, kClassification };

struct CsvLayout {
  DataKind kind = DataKind::kRegression;
  std::size_t features = 0;  // p
  std::size_t outputs = 0;   // d for regression, K for classification
  bool has_label = false;
};

CsvLayout ParseHeader(std::string_view header_line);

RegressionData ParseRegressionCsv(std::string_view text);
// With require_label = false the label column may be absent (prediction
// queries); labels are then left empty.
ClassificationData ParseClassificationCsv(std::string_view text, bool require_label = true);

std::string ReadTextFile(const std::string& path);
DataKind DetectDataKind(const std::string& path);
RegressionData ReadRegressionCsv(const std::string& path);
ClassificationData ReadClassificationCsv(const std::string& path, bool require_label = true);

std::string FormatRegressionCsv(const RegressionData& data);
std::string FormatClassificationCsv(const ClassificationData& data);

// Shortest decimal form that parses back to the same double.
std::string FormatDouble(double v);

// Writes to a sibling temporary file and renames it over `path`, so a
// failed run leaves no partial output.
void WriteTextFileAtomic(const std::string& path, std::string_view contents);

}  // namespace otcp
