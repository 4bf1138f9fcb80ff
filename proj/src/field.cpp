#include "fraclab/field.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "fraclab/fft.hpp"

namespace fraclab {
namespace {

constexpr std::array<char, 4> kMagic{'F', 'R', 'L', 'B'};

static_assert(std::endian::native == std::endian::little,
              "binary snapshot I/O assumes a little-endian host");

void append_number(std::string& out, double v) {
  std::array<char, 40> buf{};
  std::snprintf(buf.data(), buf.size(), "%.17g", v);
  out += buf.data();
}

}  // namespace

void PeriodicGrid::validate() const {
  if (!(length > 0.0)) {
    throw std::invalid_argument("PeriodicGrid: length must be positive");
  }
  if (points < 8 || !fft::is_power_of_two(points)) {
    throw std::invalid_argument("PeriodicGrid: points must be a power of two >= 8");
  }
  if (dim != 1 && dim != 2) {
    throw std::invalid_argument("PeriodicGrid: dim must be 1 or 2");
  }
}

double Field::spacing() const {
  if (periodic) {
    return length / static_cast<double>(points);
  }
  return length / static_cast<double>(points - 1);
}

double Field::cell_volume() const { return dim == 1 ? spacing() : spacing() * spacing(); }

void Field::validate() const {
  if (dim != 1 && dim != 2) {
    throw std::invalid_argument("Field: dim must be 1 or 2");
  }
  if (points < 2 || !(length > 0.0)) {
    throw std::invalid_argument("Field: need at least 2 points and a positive length");
  }
  const std::size_t expected = dim == 1 ? points : points * points;
  if (values.size() != expected) {
    throw std::invalid_argument("Field: sample count does not match points^dim");
  }
}

Field sample_periodic(const PeriodicGrid& grid, const PointFn& fn) {
  grid.validate();
  Field f;
  f.dim = grid.dim;
  f.points = grid.points;
  f.length = grid.length;
  f.periodic = true;
  f.values.resize(grid.size());
  const double h = grid.spacing();
  if (grid.dim == 1) {
    for (std::size_t i = 0; i < grid.points; ++i) {
      const double x = h * static_cast<double>(i);
      f.values[i] = fn(std::span<const double>(&x, 1));
    }
  } else {
    for (std::size_t i = 0; i < grid.points; ++i) {
      for (std::size_t j = 0; j < grid.points; ++j) {
        const std::array<double, 2> x{h * static_cast<double>(i), h * static_cast<double>(j)};
        f.values[i * grid.points + j] = fn(x);
      }
    }
  }
  return f;
}

Field sample_periodic_1d(const PeriodicGrid& grid, const std::function<double(double)>& fn) {
  if (grid.dim != 1) {
    throw std::invalid_argument("sample_periodic_1d: grid must be one-dimensional");
  }
  return sample_periodic(grid, [&](std::span<const double> x) { return fn(x[0]); });
}

Field sample_box_1d(double a, double b, std::size_t points, const std::function<double(double)>& fn) {
  if (!(b > a) || points < 2) {
    throw std::invalid_argument("sample_box_1d: need b > a and at least 2 points");
  }
  Field f;
  f.dim = 1;
  f.points = points;
  f.origin = a;
  f.length = b - a;
  f.periodic = false;
  f.values.resize(points);
  for (std::size_t i = 0; i < points; ++i) {
    f.values[i] = fn(f.coord(i));
  }
  return f;
}

Field with_values(const Field& like, std::vector<double> values) {
  Field f = like;
  f.values = std::move(values);
  f.boundary_layer.clear();
  f.validate();
  return f;
}

std::string field_to_csv(const Field& field) {
  field.validate();
  std::string out = field.dim == 1 ? "x,u\n" : "x,y,u\n";
  if (field.dim == 1) {
    for (std::size_t i = 0; i < field.points; ++i) {
      append_number(out, field.coord(i));
      out += ',';
      append_number(out, field.values[i]);
      out += '\n';
    }
  } else {
    for (std::size_t i = 0; i < field.points; ++i) {
      for (std::size_t j = 0; j < field.points; ++j) {
        append_number(out, field.coord(i));
        out += ',';
        append_number(out, field.coord(j));
        out += ',';
        append_number(out, field.values[i * field.points + j]);
        out += '\n';
      }
    }
  }
  return out;
}

void write_field_csv(const std::string& path, const Field& field) {
  std::ofstream os(path, std::ios::binary);
  if (!os) {
    throw std::runtime_error("write_field_csv: cannot open " + path);
  }
  os << field_to_csv(field);
}

void write_field_binary(const std::string& path, std::span<const Field> snapshots) {
  if (snapshots.empty()) {
    throw std::invalid_argument("write_field_binary: no snapshots");
  }
  const int dim = snapshots.front().dim;
  const std::size_t points = snapshots.front().points;
  std::ofstream os(path, std::ios::binary);
  if (!os) {
    throw std::runtime_error("write_field_binary: cannot open " + path);
  }
  const auto dim32 = static_cast<std::uint32_t>(dim);
  const auto points64 = static_cast<std::uint64_t>(points);
  os.write(kMagic.data(), kMagic.size());
  os.write(reinterpret_cast<const char*>(&dim32), sizeof dim32);
  os.write(reinterpret_cast<const char*>(&points64), sizeof points64);
  for (const Field& f : snapshots) {
    f.validate();
    if (f.dim != dim || f.points != points) {
      throw std::invalid_argument("write_field_binary: snapshots must share dim and points");
    }
    os.write(reinterpret_cast<const char*>(f.values.data()),
             static_cast<std::streamsize>(f.values.size() * sizeof(double)));
  }
}

BinarySnapshots read_field_binary(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) {
    throw std::runtime_error("read_field_binary: cannot open " + path);
  }
  std::array<char, 4> magic{};
  std::uint32_t dim32 = 0;
  std::uint64_t points64 = 0;
  is.read(magic.data(), magic.size());
  is.read(reinterpret_cast<char*>(&dim32), sizeof dim32);
  is.read(reinterpret_cast<char*>(&points64), sizeof points64);
  if (!is || magic != kMagic) {
    throw std::runtime_error("read_field_binary: bad header in " + path);
  }
  if (dim32 != 1 && dim32 != 2) {
    throw std::runtime_error("read_field_binary: unsupported dim in " + path);
  }
  BinarySnapshots snap;
  snap.dim = static_cast<int>(dim32);
  snap.points = static_cast<std::size_t>(points64);
  const std::size_t row = dim32 == 1 ? snap.points : snap.points * snap.points;
  std::vector<double> buffer(row);
  while (is.read(reinterpret_cast<char*>(buffer.data()),
                 static_cast<std::streamsize>(row * sizeof(double)))) {
    snap.rows.push_back(buffer);
  }
  if (is.gcount() != 0) {
    throw std::runtime_error("read_field_binary: truncated row in " + path);
  }
  return snap;
}

}  // namespace fraclab
