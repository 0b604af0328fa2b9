#pragma once

// Uniform periodic lattice in one or two dimensions and the second-order
// difference operators used by the solver. Values are stored row-major:
// node (i0, i1) lives at index i0 * n + i1, axis 0 being x.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <functional>
#include <span>
#include <sstream>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "thermoflux/error.hpp"

namespace thermoflux {

class PeriodicGrid {
 public:
  static constexpr int kMinNodes = 8;

  PeriodicGrid(int dim, int n, double length) : dim_(dim), n_(n), length_(length) {
    if (dim != 1 && dim != 2) {
      throw ConfigError("grid dimension must be 1 or 2, got " + std::to_string(dim));
    }
    if (n < kMinNodes) {
      throw ConfigError("grid needs at least " + std::to_string(kMinNodes) +
                        " nodes per axis, got " + std::to_string(n));
    }
    if (!(length > 0.0) || !std::isfinite(length)) {
      throw ConfigError("grid length must be positive and finite");
    }
  }

  int dim() const noexcept { return dim_; }
  int n() const noexcept { return n_; }
  double length() const noexcept { return length_; }
  double spacing() const noexcept { return length_ / n_; }
  std::size_t size() const noexcept {
    return dim_ == 1 ? static_cast<std::size_t>(n_)
                     : static_cast<std::size_t>(n_) * static_cast<std::size_t>(n_);
  }
  /// Measure of one cell, h^dim.
  double cell_volume() const noexcept {
    const double h = spacing();
    return dim_ == 1 ? h : h * h;
  }

  /// Coordinate along `axis` of the node with flat index `idx`.
  double coordinate(std::size_t idx, int axis) const noexcept {
    const auto n = static_cast<std::size_t>(n_);
    const std::size_t i = dim_ == 1 ? idx : (axis == 0 ? idx / n : idx % n);
    return static_cast<double>(i) * spacing();
  }

  /// Flat index of the periodic neighbour `offset` steps along `axis`.
  std::size_t neighbor(std::size_t idx, int axis, int offset) const noexcept {
    const auto n = static_cast<std::ptrdiff_t>(n_);
    if (dim_ == 1) {
      return static_cast<std::size_t>(((static_cast<std::ptrdiff_t>(idx) + offset) % n + n) % n);
    }
    auto i0 = static_cast<std::ptrdiff_t>(idx) / n;
    auto i1 = static_cast<std::ptrdiff_t>(idx) % n;
    if (axis == 0) {
      i0 = ((i0 + offset) % n + n) % n;
    } else {
      i1 = ((i1 + offset) % n + n) % n;
    }
    return static_cast<std::size_t>(i0 * n + i1);
  }

  bool operator==(const PeriodicGrid&) const = default;

 private:
  int dim_;
  int n_;
  double length_;
};

class ScalarField {
 public:
  explicit ScalarField(const PeriodicGrid& grid, double fill = 0.0)
      : grid_(grid), values_(grid.size(), fill) {}

  ScalarField(const PeriodicGrid& grid, std::vector<double> values)
      : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.size()) {
      throw ShapeError("field has " + std::to_string(values_.size()) +
                       " values but grid has " + std::to_string(grid_.size()) + " nodes");
    }
  }

  /// Samples `fn(x)` (1D) or `fn(x, y)` (2D) at every node.
  template <class Fn>
  static ScalarField sample(const PeriodicGrid& grid, Fn&& fn) {
    ScalarField out(grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if constexpr (std::is_invocable_r_v<double, Fn, double, double>) {
        out[i] = fn(grid.coordinate(i, 0), grid.dim() == 2 ? grid.coordinate(i, 1) : 0.0);
      } else {
        out[i] = fn(grid.coordinate(i, 0));
      }
    }
    return out;
  }

  const PeriodicGrid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }

  double& operator[](std::size_t i) noexcept { return values_[i]; }
  double operator[](std::size_t i) const noexcept { return values_[i]; }

  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }

  double min() const { return *std::min_element(values_.begin(), values_.end()); }
  double max() const { return *std::max_element(values_.begin(), values_.end()); }

  bool all_finite() const {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
  }

  /// Pointwise map into a new field.
  template <class Fn>
  ScalarField map(Fn&& fn) const {
    ScalarField out(grid_);
    for (std::size_t i = 0; i < values_.size(); ++i) out[i] = fn(values_[i]);
    return out;
  }

  ScalarField& operator+=(const ScalarField& other) {
    require_same_grid(other);
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
    return *this;
  }

  ScalarField& operator*=(double s) {
    for (auto& v : values_) v *= s;
    return *this;
  }

  /// this += s * x
  ScalarField& axpy(double s, const ScalarField& x) {
    require_same_grid(x);
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += s * x.values_[i];
    return *this;
  }

  void require_same_grid(const ScalarField& other) const {
    if (!(grid_ == other.grid_)) throw ShapeError("fields live on different grids");
  }

  bool operator==(const ScalarField&) const = default;

 private:
  PeriodicGrid grid_;
  std::vector<double> values_;
};

/// One component per axis.
using VectorField = std::vector<ScalarField>;

/// Pointwise combination of two fields on the same grid.
template <class Fn>
ScalarField zip_with(const ScalarField& x, const ScalarField& y, Fn&& fn) {
  x.require_same_grid(y);
  ScalarField out(x.grid());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = fn(x[i], y[i]);
  return out;
}

/// Second-order periodic Laplacian; sum of per-axis three-point stencils.
inline ScalarField laplacian(const ScalarField& f) {
  const PeriodicGrid& g = f.grid();
  const double inv_h2 = 1.0 / (g.spacing() * g.spacing());
  ScalarField out(g);
  for (std::size_t i = 0; i < f.size(); ++i) {
    double acc = 0.0;
    for (int axis = 0; axis < g.dim(); ++axis) {
      acc += f[g.neighbor(i, axis, -1)] - 2.0 * f[i] + f[g.neighbor(i, axis, +1)];
    }
    out[i] = acc * inv_h2;
  }
  return out;
}

/// Conservative discretisation of div(a grad b). The flux through the face
/// between node i and its + neighbour is 0.5 (a_i + a_{i+1}) (b_{i+1} - b_i) / h.
inline ScalarField div_a_grad_b(const ScalarField& a, const ScalarField& b) {
  a.require_same_grid(b);
  const PeriodicGrid& g = a.grid();
  const double inv_h2 = 1.0 / (g.spacing() * g.spacing());
  ScalarField out(g);
  for (std::size_t i = 0; i < a.size(); ++i) {
    double acc = 0.0;
    for (int axis = 0; axis < g.dim(); ++axis) {
      const std::size_t ip = g.neighbor(i, axis, +1);
      const std::size_t im = g.neighbor(i, axis, -1);
      const double flux_right = 0.5 * (a[i] + a[ip]) * (b[ip] - b[i]);
      const double flux_left = 0.5 * (a[im] + a[i]) * (b[i] - b[im]);
      acc += flux_right - flux_left;
    }
    out[i] = acc * inv_h2;
  }
  return out;
}

/// Central-difference gradient, one component per axis.
inline VectorField gradient(const ScalarField& f) {
  const PeriodicGrid& g = f.grid();
  const double inv_2h = 0.5 / g.spacing();
  VectorField out(static_cast<std::size_t>(g.dim()), ScalarField(g));
  for (int axis = 0; axis < g.dim(); ++axis) {
    auto& component = out[static_cast<std::size_t>(axis)];
    for (std::size_t i = 0; i < f.size(); ++i) {
      component[i] = (f[g.neighbor(i, axis, +1)] - f[g.neighbor(i, axis, -1)]) * inv_2h;
    }
  }
  return out;
}

/// Discrete integral over the torus, h^dim * sum(values), summed in index order.
inline double total(const ScalarField& f) {
  double sum = 0.0;
  for (double v : f.values()) sum += v;
  return sum * f.grid().cell_volume();
}

/// Squared Euclidean norm of a vector field at one node.
inline double norm_squared(const VectorField& v, std::size_t i) {
  double s = 0.0;
  for (const auto& c : v) s += c[i] * c[i];
  return s;
}

// ---------------------------------------------------------------------------
// Snapshot files: <base>.bin holds little-endian float64 values in row-major
// order; <base>.meta is a text sidecar with dim, n, length, time and name.

struct Snapshot {
  ScalarField field;
  double time;
  std::string name;
};

namespace detail {

inline std::uint64_t to_little_endian(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::big) {
    std::uint64_t r = 0;
    for (int i = 0; i < 8; ++i) r |= ((v >> (8 * i)) & 0xffu) << (8 * (7 - i));
    return r;
  }
  return v;
}

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

inline void write_snapshot(const std::string& base, const ScalarField& field, double time,
                           const std::string& name) {
  std::ofstream bin(base + ".bin", std::ios::binary);
  if (!bin) throw Error("cannot open " + base + ".bin for writing");
  for (double v : field.values()) {
    std::uint64_t bits = 0;
    std::memcpy(&bits, &v, sizeof bits);
    bits = detail::to_little_endian(bits);
    bin.write(reinterpret_cast<const char*>(&bits), sizeof bits);
  }
  std::ofstream meta(base + ".meta");
  if (!meta) throw Error("cannot open " + base + ".meta for writing");
  const PeriodicGrid& g = field.grid();
  meta << "dim = " << g.dim() << "\n"
       << "n = " << g.n() << "\n"
       << "length = " << detail::format_double(g.length()) << "\n"
       << "time = " << detail::format_double(time) << "\n"
       << "field = " << name << "\n";
}

inline Snapshot read_snapshot(const std::string& base) {
  std::ifstream meta(base + ".meta");
  if (!meta) throw Error("cannot open " + base + ".meta");
  int dim = 0;
  int n = 0;
  double length = 0.0;
  double time = 0.0;
  std::string name;
  std::string line;
  while (std::getline(meta, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "dim") dim = std::stoi(value);
    else if (key == "n") n = std::stoi(value);
    else if (key == "length") length = std::stod(value);
    else if (key == "time") time = std::stod(value);
    else if (key == "field") name = value;
  }
  PeriodicGrid grid(dim, n, length);
  std::ifstream bin(base + ".bin", std::ios::binary);
  if (!bin) throw Error("cannot open " + base + ".bin");
  std::vector<double> values(grid.size());
  for (auto& v : values) {
    std::uint64_t bits = 0;
    if (!bin.read(reinterpret_cast<char*>(&bits), sizeof bits)) {
      throw Error(base + ".bin is shorter than its metadata says");
    }
    bits = detail::to_little_endian(bits);
    std::memcpy(&v, &bits, sizeof v);
  }
  return {ScalarField(grid, std::move(values)), time, name};
}

}  // namespace thermoflux
