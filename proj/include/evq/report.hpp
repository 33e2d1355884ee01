#pragma once

#include <string>
#include <vector>

namespace evq {

// Two-decimal fixed point for human-facing tables.
std::string fixed2(double x);

// 17 significant digits, enough for a binary64 to survive a text round trip.
std::string full(double x);

std::string csv_line(const std::vector<std::string>& cells);

// Column-aligned text table. The first column is left-aligned (labels), the
// rest right-aligned (numbers); csv() emits the same cells machine-readably.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  explicit Table(std::vector<std::string> hdr) : header(std::move(hdr)) {}
  void add(std::vector<std::string> row);
  std::string text() const;
  std::string csv() const;
};

}  // namespace evq
