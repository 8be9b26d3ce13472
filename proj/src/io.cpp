#include "maflow/io.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "json.hpp"
#include "maflow/errors.hpp"

namespace maflow {

namespace {

using json = nlohmann::json;

json grid_json(const TorusGrid& g) {
  return {{"n", g.complex_dim()}, {"N", g.points_per_axis()}, {"period", g.period()}};
}

void write_dump(const std::string& path, const json& header, const std::vector<double>& data) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open '" + path + "' for writing");
  f << header.dump() << '\n';
  if constexpr (std::endian::native == std::endian::little) {
    f.write(reinterpret_cast<const char*>(data.data()),
            static_cast<std::streamsize>(data.size() * sizeof(double)));
  } else {
    for (double v : data) {
      auto bits = std::bit_cast<std::uint64_t>(v);
      bits = __builtin_bswap64(bits);
      f.write(reinterpret_cast<const char*>(&bits), sizeof bits);
    }
  }
  if (!f) throw Error("write to '" + path + "' failed");
}

json header(const TorusGrid& g, const std::vector<std::size_t>& shape) {
  return {{"shape", shape},          {"dtype", "f64"}, {"byte_order", "little"},
          {"layout", "row-major"}, {"grid", grid_json(g)}};
}

}  // namespace

void write_field_dump(const std::string& path, const ScalarField& f) {
  std::vector<std::size_t> shape(f.grid.real_dim(), f.grid.points_per_axis());
  write_dump(path, header(f.grid, shape), f.values);
}

void write_field_dump(const std::string& path, const HermitianField& f) {
  const int n = f.dim();
  const std::size_t P = f.size();
  std::vector<double> data;
  data.reserve(P * n * n * 2);
  for (std::size_t p = 0; p < P; ++p) {
    const HermMat m = f.at(p);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        data.push_back(m(i, j).real());
        data.push_back(m(i, j).imag());
      }
    }
  }
  std::vector<std::size_t> shape(f.grid().real_dim(), f.grid().points_per_axis());
  shape.insert(shape.end(), {static_cast<std::size_t>(n), static_cast<std::size_t>(n), 2});
  write_dump(path, header(f.grid(), shape), data);
}

FieldDump read_field_dump(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open '" + path + "'");
  FieldDump d;
  if (!std::getline(f, d.header)) throw Error("'" + path + "' has no header line");
  json h;
  try {
    h = json::parse(d.header);
    d.shape = h.at("shape").get<std::vector<std::size_t>>();
    if (h.at("dtype") != "f64" || h.at("byte_order") != "little") throw Error("unsupported dump");
  } catch (const json::exception& e) {
    throw Error("bad dump header in '" + path + "': " + e.what());
  }
  std::size_t count = 1;
  for (std::size_t s : d.shape) count *= s;
  d.data.resize(count);
  for (std::size_t k = 0; k < count; ++k) {
    std::uint64_t bits = 0;
    if (!f.read(reinterpret_cast<char*>(&bits), sizeof bits)) {
      throw Error("'" + path + "' is truncated");
    }
    if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
    d.data[k] = std::bit_cast<double>(bits);
  }
  return d;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open '" + path + "' for writing");
  f << text;
  if (!f) throw Error("write to '" + path + "' failed");
}

}  // namespace maflow
