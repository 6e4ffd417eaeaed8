#pragma once

#include "mintime/drift.hpp"
#include "mintime/geometry.hpp"

namespace mintime {

// State equation dy/dt = F(y) + B u. The control moves ran(B) ("fast"
// directions) at unlimited amplitude; the orthogonal complement H is only
// moved by the drift.
class ControlSystem {
 public:
  ControlSystem(Matrix b, DriftField drift);

  Eigen::Index state_dimension() const { return n_; }
  Eigen::Index control_dimension() const { return m_; }
  Eigen::Index slow_dimension() const { return slow_.dimension(); }

  const Matrix& control_matrix() const { return b_; }
  const DriftField& drift() const { return drift_; }
  const Basis& fast_basis() const { return fast_; }  // ran(B)
  const Basis& slow_basis() const { return slow_; }  // H = ran(B)^perp

  Vector slow_projection(const Vector& y) const { return project(y, slow_); }
  Vector fast_projection(const Vector& y) const { return project(y, fast_); }

  // Least-squares u with B u = w; w must lie in ran(B) for an exact match.
  Vector control_for(const Vector& w) const;

  Vector closed_loop(const Vector& y, const Vector& u) const { return drift_.eval(y) + b_ * u; }

 private:
  Matrix b_;
  DriftField drift_;
  Eigen::Index n_ = 0;
  Eigen::Index m_ = 0;
  Basis fast_;
  Basis slow_;
  Eigen::ColPivHouseholderQR<Matrix> b_solver_;
};

}  // namespace mintime
