#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace fraclab {

/// Uniform periodic grid on [0, length)^dim with `points` nodes per axis.
struct PeriodicGrid {
  double length = 0.0;
  std::size_t points = 0;
  int dim = 1;

  /// Throws std::invalid_argument unless length > 0, points >= 8 is a power
  /// of two and dim is 1 or 2.
  void validate() const;
  double spacing() const { return length / static_cast<double>(points); }
  std::size_t size() const { return dim == 1 ? points : points * points; }
};

/// Uniformly sampled scalar field, row-major for dim 2.
///
/// Periodic fields hold `points` samples per axis at origin + i * length /
/// points. Boxed fields include both endpoints: origin + i * length /
/// (points - 1). `boundary_layer` is filled by operators that treat boxed
/// edges one-sidedly (1 marks a sample influenced by the clamped edge).
struct Field {
  int dim = 1;
  std::size_t points = 0;
  double origin = 0.0;
  double length = 0.0;
  bool periodic = true;
  std::vector<double> values;
  std::vector<std::uint8_t> boundary_layer;

  double spacing() const;
  double coord(std::size_t i) const { return origin + spacing() * static_cast<double>(i); }
  std::size_t size() const { return values.size(); }
  /// Cell volume spacing()^dim.
  double cell_volume() const;
  /// Throws std::invalid_argument if the metadata and sample count disagree.
  void validate() const;
};

using PointFn = std::function<double(std::span<const double>)>;

Field sample_periodic(const PeriodicGrid& grid, const PointFn& fn);
Field sample_periodic_1d(const PeriodicGrid& grid, const std::function<double(double)>& fn);
Field sample_box_1d(double a, double b, std::size_t points, const std::function<double(double)>& fn);

/// Field with the same layout and new values.
Field with_values(const Field& like, std::vector<double> values);

/// CSV snapshot: header `x,u` (or `x,y,u`), LF line endings, %.17g values.
std::string field_to_csv(const Field& field);
void write_field_csv(const std::string& path, const Field& field);

/// Binary snapshots: 16-byte little-endian header {char magic[4] = "FRLB",
/// uint32 dim, uint64 points} followed by one row of points^dim float64 values
/// per snapshot. All snapshots must share dim and points.
void write_field_binary(const std::string& path, std::span<const Field> snapshots);

struct BinarySnapshots {
  int dim = 0;
  std::size_t points = 0;
  std::vector<std::vector<double>> rows;
};
BinarySnapshots read_field_binary(const std::string& path);

}  // namespace fraclab
