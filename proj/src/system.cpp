#include "mintime/system.hpp"

namespace mintime {

ControlSystem::ControlSystem(Matrix b, DriftField drift)
    : b_(std::move(b)), drift_(std::move(drift)), n_(b_.rows()), m_(b_.cols()) {
  if (n_ == 0 || m_ == 0) throw Error("system: B must be a nonempty n x m matrix");
  if (drift_.dimension() != n_) throw Error("system: drift dimension does not match B rows");
  if (m_ > n_) throw Error("system: more controls than states");
  fast_ = orthonormalize(b_);
  if (fast_.dimension() != m_) throw Error("system: B must have full column rank m");
  slow_ = complement_basis(fast_);
  b_solver_.compute(b_);
}

Vector ControlSystem::control_for(const Vector& w) const {
  if (w.size() != n_) throw Error("control_for: target velocity dimension mismatch");
  return b_solver_.solve(w);
}

}  // namespace mintime
