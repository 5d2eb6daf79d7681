#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace wl {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Invalid parameters, preconditions, mismatched shapes in configuration.
struct ParamError : Error {
  using Error::Error;
};

// Grid/field shape disagreement.
struct ConformanceError : Error {
  using Error::Error;
};

// Layer cannot be resolved on the given grid.
struct ResolutionError : Error {
  using Error::Error;
};

// Layer region is empty (h vanishes or eps*h below min spacing).
struct DegenerateLayerError : Error {
  using Error::Error;
};

// Constraint set does not determine a unique solution.
struct WellPosednessError : Error {
  using Error::Error;
};

// Iterative solver hit its iteration cap; message carries the residual.
struct ConvergenceError : Error {
  double residual = 0.0;
  int iterations = 0;
  ConvergenceError(const std::string& msg, double res, int iters)
      : Error(msg), residual(res), iterations(iters) {}
};

struct IoError : Error {
  using Error::Error;
};

// Dense row-major 2D array; the workhorse container for staggered fields.
template <typename T>
class Array2 {
 public:
  Array2() = default;
  Array2(int nx, int ny, T init = T{})
      : nx_(nx), ny_(ny), data_(static_cast<size_t>(nx) * ny, init) {}

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  bool empty() const { return data_.empty(); }

  T& operator()(int i, int j) { return data_[static_cast<size_t>(j) * nx_ + i]; }
  const T& operator()(int i, int j) const {
    return data_[static_cast<size_t>(j) * nx_ + i];
  }

  void fill(T v) { data_.assign(data_.size(), v); }
  const std::vector<T>& raw() const { return data_; }
  std::vector<T>& raw() { return data_; }

  bool same_shape(const Array2& o) const { return nx_ == o.nx_ && ny_ == o.ny_; }

 private:
  int nx_ = 0, ny_ = 0;
  std::vector<T> data_;
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw ParamError(msg);
}

}  // namespace wl
