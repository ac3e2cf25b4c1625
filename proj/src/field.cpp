#include "modcont/field.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "modcont/errors.hpp"

namespace modcont {

SampledField::SampledField(std::vector<int> shape, double h, std::vector<double> origin,
                           std::vector<double> values)
    : shape_(std::move(shape)), h_(h), origin_(std::move(origin)), values_(std::move(values)) {
  const int d = dim();
  if (d < 1 || d > 3) throw std::invalid_argument("SampledField: dimension must be 1, 2 or 3");
  if (static_cast<int>(origin_.size()) != d)
    throw std::invalid_argument("SampledField: origin length must match dimension");
  if (!(h_ > 0.0) || !std::isfinite(h_))
    throw std::invalid_argument("SampledField: spacing must be positive");
  std::size_t n = 1;
  for (int s : shape_) {
    if (s < 1) throw std::invalid_argument("SampledField: extents must be positive");
    n *= static_cast<std::size_t>(s);
  }
  if (values_.size() != n) throw std::invalid_argument("SampledField: value count mismatch");
  for (double v : values_)
    if (!std::isfinite(v)) throw std::invalid_argument("SampledField: non-finite value");
  stride_ = {0, 0, 0};
  std::size_t s = 1;
  for (int a = d - 1; a >= 0; --a) {
    stride_[a] = s;
    s *= static_cast<std::size_t>(shape_[a]);
  }
}

SampledField SampledField::sample(std::vector<int> shape, double h, std::vector<double> origin,
                                  const std::function<double(const Point&)>& fn) {
  std::size_t n = 1;
  for (int s : shape) n *= static_cast<std::size_t>(std::max(s, 0));
  SampledField f(shape, h, origin, std::vector<double>(n, 0.0));
  for (std::size_t k = 0; k < n; ++k) f.values_[k] = fn(f.point(f.unflat(k)));
  for (double v : f.values_)
    if (!std::isfinite(v)) throw std::invalid_argument("SampledField: non-finite value");
  return f;
}

SampledField SampledField::sample_box(int dim, int n, double lo, double hi,
                                      const std::function<double(const Point&)>& fn) {
  if (n < 2) throw std::invalid_argument("sample_box: need at least 2 points per axis");
  return sample(std::vector<int>(dim, n), (hi - lo) / (n - 1), std::vector<double>(dim, lo), fn);
}

double SampledField::min_side() const {
  return (*std::min_element(shape_.begin(), shape_.end()) - 1) * h_;
}

std::size_t SampledField::flat(const Index& idx) const {
  std::size_t k = 0;
  for (int a = 0; a < dim(); ++a) k += stride_[a] * static_cast<std::size_t>(idx[a]);
  return k;
}

Index SampledField::unflat(std::size_t k) const {
  Index idx{0, 0, 0};
  for (int a = 0; a < dim(); ++a) {
    idx[a] = static_cast<int>(k / stride_[a]);
    k %= stride_[a];
  }
  return idx;
}

Point SampledField::point(const Index& idx) const {
  Point p{0, 0, 0};
  for (int a = 0; a < dim(); ++a) p[a] = origin_[a] + h_ * idx[a];
  return p;
}

bool SampledField::contains(const Point& x) const {
  for (int a = 0; a < dim(); ++a) {
    const double t = (x[a] - origin_[a]) / h_;
    if (t < -1e-9 || t > shape_[a] - 1 + 1e-9) return false;
  }
  return true;
}

double SampledField::interpolate(const Point& x) const {
  if (!contains(x)) throw DomainError("interpolate: point outside the field box");
  Index base{0, 0, 0};
  std::array<double, 3> w{0, 0, 0};
  for (int a = 0; a < dim(); ++a) {
    const double t = std::clamp((x[a] - origin_[a]) / h_, 0.0, double(shape_[a] - 1));
    int i = std::min(static_cast<int>(std::floor(t)), std::max(shape_[a] - 2, 0));
    base[a] = i;
    w[a] = shape_[a] > 1 ? t - i : 0.0;
  }
  double sum = 0.0;
  for (int corner = 0; corner < (1 << dim()); ++corner) {
    double weight = 1.0;
    Index idx = base;
    for (int a = 0; a < dim(); ++a) {
      const bool up = corner >> a & 1;
      if (up) {
        if (w[a] == 0.0) { weight = 0.0; break; }
        ++idx[a];
      }
      weight *= up ? w[a] : 1.0 - w[a];
    }
    if (weight != 0.0) sum += weight * at(idx);
  }
  return sum;
}

SampledField SampledField::shrink(int layers) const {
  std::vector<int> shape(shape_);
  std::vector<double> origin(origin_);
  for (int a = 0; a < dim(); ++a) {
    shape[a] -= 2 * layers;
    origin[a] += layers * h_;
    if (shape[a] < 1) throw std::invalid_argument("shrink: lattice too small");
  }
  std::size_t n = 1;
  for (int s : shape) n *= static_cast<std::size_t>(s);
  SampledField out(shape, h_, origin, std::vector<double>(n, 0.0));
  for (std::size_t k = 0; k < n; ++k) {
    Index idx = out.unflat(k);
    for (int a = 0; a < dim(); ++a) idx[a] += layers;
    out.values_[k] = at(idx);
  }
  return out;
}

SampledField SampledField::crop_margin(double fraction) const {
  if (!(fraction >= 0.0 && fraction < 0.5))
    throw std::invalid_argument("crop_margin: fraction must lie in [0, 0.5)");
  const int lo = static_cast<int>(std::ceil(fraction * (*std::min_element(shape_.begin(), shape_.end()) - 1) - 1e-9));
  return shrink(lo);
}

SampledField SampledField::scaled(double c) const {
  SampledField out = *this;
  for (double& v : out.values_) v *= c;
  return out;
}

SampledField SampledField::shifted(double c) const {
  SampledField out = *this;
  for (double& v : out.values_) v += c;
  return out;
}

SampledField SampledField::minus(const SampledField& other) const {
  if (other.shape_ != shape_) throw std::invalid_argument("minus: shape mismatch");
  SampledField out = *this;
  for (std::size_t k = 0; k < values_.size(); ++k) out.values_[k] -= other.values_[k];
  return out;
}

double SampledField::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

// ---------------------------------------------------------------- I/O

void write_csv(const SampledField& f, std::ostream& os) {
  os.precision(17);
  os << "# dim " << f.dim() << "\n# shape";
  for (int s : f.shape()) os << ' ' << s;
  os << "\n# spacing " << f.h() << "\n# origin";
  for (double o : f.origin()) os << ' ' << o;
  os << '\n';
  const int row = f.shape().back();
  auto v = f.values();
  for (std::size_t k = 0; k < v.size(); ++k) {
    os << v[k] << ((k + 1) % row == 0 ? '\n' : ',');
  }
}

SampledField read_csv(std::istream& is) {
  int dim = 0;
  std::vector<int> shape;
  double h = 0.0;
  std::vector<double> origin, values;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream ls(line.substr(1));
      std::string key;
      ls >> key;
      if (key == "dim") {
        ls >> dim;
      } else if (key == "shape") {
        for (int s; ls >> s;) shape.push_back(s);
      } else if (key == "spacing") {
        ls >> h;
      } else if (key == "origin") {
        for (double o; ls >> o;) origin.push_back(o);
      }
      continue;
    }
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    for (double v; ls >> v;) values.push_back(v);
  }
  if (dim == 0 || static_cast<int>(shape.size()) != dim)
    throw std::runtime_error("read_csv: missing or inconsistent header");
  return SampledField(shape, h, origin, values);
}

namespace {
constexpr char kMagic[8] = {'M', 'C', 'F', 'I', 'E', 'L', 'D', '1'};

template <class T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}
template <class T>
T get(std::istream& is) {
  T v{};
  if (!is.read(reinterpret_cast<char*>(&v), sizeof v))
    throw std::runtime_error("read_binary: truncated input");
  return v;
}
}  // namespace

void write_binary(const SampledField& f, std::ostream& os) {
  os.write(kMagic, sizeof kMagic);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(f.dim()));
  for (int s : f.shape()) put<std::uint32_t>(os, static_cast<std::uint32_t>(s));
  put<double>(os, f.h());
  for (double o : f.origin()) put<double>(os, o);
  auto v = f.values();
  os.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size_bytes()));
}

SampledField read_binary(std::istream& is) {
  char magic[8];
  if (!is.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof magic) != 0)
    throw std::runtime_error("read_binary: bad magic");
  const auto dim = get<std::uint32_t>(is);
  if (dim < 1 || dim > 3) throw std::runtime_error("read_binary: bad dimension");
  std::vector<int> shape;
  std::size_t n = 1;
  for (std::uint32_t a = 0; a < dim; ++a) {
    shape.push_back(static_cast<int>(get<std::uint32_t>(is)));
    n *= static_cast<std::size_t>(shape.back());
  }
  const double h = get<double>(is);
  std::vector<double> origin;
  for (std::uint32_t a = 0; a < dim; ++a) origin.push_back(get<double>(is));
  std::vector<double> values(n);
  if (!is.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(n * sizeof(double))))
    throw std::runtime_error("read_binary: truncated values");
  return SampledField(shape, h, origin, std::move(values));
}

namespace {
bool is_binary_path(const std::string& path) {
  return path.size() >= 4 && path.compare(path.size() - 4, 4, ".bin") == 0;
}
}  // namespace

void save_field(const SampledField& f, const std::string& path) {
  const bool bin = is_binary_path(path);
  std::ofstream os(path, bin ? std::ios::binary : std::ios::out);
  if (!os) throw std::runtime_error("save_field: cannot open " + path);
  bin ? write_binary(f, os) : write_csv(f, os);
}

SampledField load_field(const std::string& path) {
  const bool bin = is_binary_path(path);
  std::ifstream is(path, bin ? std::ios::binary : std::ios::in);
  if (!is) throw std::runtime_error("load_field: cannot open " + path);
  return bin ? read_binary(is) : read_csv(is);
}

}  // namespace modcont
