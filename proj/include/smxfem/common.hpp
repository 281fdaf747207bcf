#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace smx {

using Vec2 = Eigen::Vector2d;
/// Voigt strain/stress ordering: [e11, e22, g12] with engineering shear.
using Voigt3 = Eigen::Vector3d;
using Stiffness = Eigen::Matrix3d;

/// Which side of the interface a point or cell belongs to.
/// phi < 0 is the particle, phi >= 0 the matrix.
enum class Phase : std::uint8_t { Matrix = 0, Particle = 1 };

inline Phase phase_of(double phi) { return phi < 0.0 ? Phase::Particle : Phase::Matrix; }

enum class ErrorKind {
  InvalidArgument,
  Geometry,
  Singular,
  Config,
  Io,
  Runtime,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

}  // namespace smx
