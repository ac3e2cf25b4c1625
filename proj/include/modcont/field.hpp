#pragma once

// Scalar samples on a uniform lattice. Point (i, j, k) sits at
// origin + h·(i, j, k), axis 0 first; storage is row-major with the last
// axis contiguous. The domain box is [origin, origin + (shape − 1)·h].

#include <array>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace modcont {

using Point = std::array<double, 3>;
using Index = std::array<int, 3>;

class SampledField {
 public:
  SampledField(std::vector<int> shape, double h, std::vector<double> origin,
               std::vector<double> values);

  /// Samples fn at every lattice point. Unused coordinates of the point
  /// passed to fn are zero.
  static SampledField sample(std::vector<int> shape, double h, std::vector<double> origin,
                             const std::function<double(const Point&)>& fn);

  /// Square/cubic lattice with n points per axis covering [lo, hi]^dim.
  static SampledField sample_box(int dim, int n, double lo, double hi,
                                 const std::function<double(const Point&)>& fn);

  int dim() const { return static_cast<int>(shape_.size()); }
  const std::vector<int>& shape() const { return shape_; }
  double h() const { return h_; }
  const std::vector<double>& origin() const { return origin_; }
  std::span<const double> values() const { return values_; }
  std::size_t size() const { return values_.size(); }

  /// Smallest box side, (min shape − 1)·h.
  double min_side() const;

  std::size_t flat(const Index& idx) const;
  Index unflat(std::size_t k) const;
  Point point(const Index& idx) const;
  double at(const Index& idx) const { return values_[flat(idx)]; }

  bool contains(const Point& x) const;
  /// Multilinear interpolation; throws DomainError outside the box.
  double interpolate(const Point& x) const;

  /// Lattice points whose index is at least `layers` away from every face.
  SampledField shrink(int layers) const;
  /// Keeps the central part of the box, dropping `fraction` of each side at
  /// both ends (fraction in [0, 0.5)).
  SampledField crop_margin(double fraction) const;

  SampledField scaled(double c) const;
  SampledField shifted(double c) const;
  SampledField minus(const SampledField& other) const;
  double max_abs() const;

 private:
  std::vector<int> shape_;
  double h_;
  std::vector<double> origin_;
  std::vector<double> values_;
  std::array<std::size_t, 3> stride_{};
};

// Text format: header lines "# dim D", "# shape n0 ...", "# spacing h",
// "# origin x0 ...", then one line per lattice row (last axis, comma
// separated) in row-major order.
//
// Binary format (little endian): magic "MCFIELD1", uint32 dim, uint32 shape
// per axis, float64 h, float64 origin per axis, float64 values row-major.
void write_csv(const SampledField& f, std::ostream& os);
SampledField read_csv(std::istream& is);
void write_binary(const SampledField& f, std::ostream& os);
SampledField read_binary(std::istream& is);

/// Dispatches on extension: ".bin" is binary, anything else is text.
void save_field(const SampledField& f, const std::string& path);
SampledField load_field(const std::string& path);

}  // namespace modcont
