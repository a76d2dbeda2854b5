#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace kleinian {

using cplx = std::complex<double>;

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Mat = MatrixX<double>;
using Vec = VectorX<double>;
using CMat = MatrixX<cplx>;
using CVec = VectorX<cplx>;

constexpr double kPi = 3.14159265358979323846264338327950288;

// Error categories map onto CLI exit codes: config -> 2, precondition -> 3,
// numerical -> 4.
enum class ErrorKind { config, precondition, numerical };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

inline Error config_error(const std::string& w) { return {ErrorKind::config, w}; }
inline Error precondition_error(const std::string& w) {
  return {ErrorKind::precondition, w};
}
inline Error numerical_error(const std::string& w) {
  return {ErrorKind::numerical, w};
}

// Thrown when a meromorphic quantity is evaluated at (or numerically on) a pole.
class PoleError : public Error {
 public:
  PoleError(const std::string& what, cplx location, int order)
      : Error(ErrorKind::numerical, what), location_(location), order_(order) {}
  cplx location() const { return location_; }
  int order() const { return order_; }

 private:
  cplx location_;
  int order_;
};

// Worker count used by the parallel loops. Results never depend on it.
void set_num_threads(int k);
int num_threads();

// Runs body(i) for i in [0, count). Each index must write only its own slot.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

// Neumaier-compensated accumulator.
template <typename T>
class CompensatedSum {
 public:
  void add(T x) {
    T t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  T value() const { return sum_ + comp_; }

 private:
  T sum_{};
  T comp_{};
};

}  // namespace kleinian
