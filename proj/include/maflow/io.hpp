#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "maflow/grid.hpp"

namespace maflow {

// Field dumps: one JSON header line
//   {"shape": [...], "dtype": "f64", "byte_order": "little", "layout": "row-major",
//    "grid": {"n": .., "N": .., "period": ..}}
// followed by raw little-endian doubles. Matrix fields are stored as
// interleaved (re, im) per entry in (point, i, j) order.

void write_field_dump(const std::string& path, const ScalarField& f);
void write_field_dump(const std::string& path, const HermitianField& f);

struct FieldDump {
  std::string header;
  std::vector<std::size_t> shape;
  std::vector<double> data;
};

/// Throws maflow::Error on a malformed file.
FieldDump read_field_dump(const std::string& path);

void write_text_file(const std::string& path, const std::string& text);

}  // namespace maflow
