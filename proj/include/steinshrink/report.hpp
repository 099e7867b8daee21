#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "steinshrink/linalg.hpp"
#include "steinshrink/model.hpp"

namespace steinshrink {

inline constexpr std::string_view kPrialCsvHeader =
    "structure,p,n,r,alpha,prial_percent,se_percent,replications,seed";

struct PrialRow {
  Structure structure = Structure::identity;
  Index p = 0;
  Index n = 0;
  Index r = 0;
  double alpha = 0.0;
  double prial_percent = 0.0;
  double se_percent = 0.0;
  Index replications = 0;
  std::uint64_t seed = 0;

  // Not part of the CSV.
  double b = 0.0;
  double risk_ref = 0.0;
  double risk_alt = 0.0;
  /// Paired mean of (Haff loss - optimal loss) and its standard error.
  double diff_mean = 0.0;
  double diff_se = 0.0;
};

struct PrialReport {
  std::vector<PrialRow> rows;

  /// Header plus one line per row, LF endings. Reals use the shortest
  /// representation that parses back to the same double.
  std::string to_csv() const;
  std::string to_markdown() const;

  /// Inverse of to_csv for the CSV columns. Throws ParameterError naming the
  /// first malformed line.
  static PrialReport from_csv(std::string_view text);
};

/// Shortest round-trip decimal form of x.
std::string format_double(double x);

}  // namespace steinshrink
