#include "mwl/integrator.hpp"

#include "mwl/errors.hpp"

#include <cmath>

namespace mwl {

int Layout::add(std::string name, int size, BlockKind kind) {
  if (size <= 0) throw Error(ErrorKind::InvalidArgument, "block '" + name + "' has no entries");
  if (find(name)) throw Error(ErrorKind::InvalidArgument, "duplicate block '" + name + "'");
  if (kind == BlockKind::Rotation && size != 9) {
    throw Error(ErrorKind::InvalidArgument, "rotation block '" + name + "' must have 9 entries");
  }
  blocks_.push_back(Block{std::move(name), size_, size, kind});
  size_ += size;
  return blocks_.back().offset;
}

const Block* Layout::find(const std::string& name) const {
  for (const auto& b : blocks_) {
    if (b.name == name) return &b;
  }
  return nullptr;
}

const Block& Layout::block(const std::string& name) const {
  if (const Block* b = find(name)) return *b;
  throw Error(ErrorKind::InvalidArgument, "no state block named '" + name + "'");
}

namespace {

void check_finite(const Vector& x) {
  if (!x.allFinite()) {
    throw Error(ErrorKind::NonFiniteState, "integration produced a non-finite state");
  }
}

}  // namespace

Vector step(const Rhs& rhs, const Vector& x, double t, const StepConfig& cfg) {
  if (!(cfg.dt > 0.0)) throw Error(ErrorKind::InvalidArgument, "step size must be positive");
  const double h = cfg.dt;
  Vector out;
  if (cfg.method == Method::Euler) {
    out = x + h * rhs(t, x);
  } else {
    const Vector k1 = rhs(t, x);
    const Vector k2 = rhs(t + 0.5 * h, x + (0.5 * h) * k1);
    const Vector k3 = rhs(t + 0.5 * h, x + (0.5 * h) * k2);
    const Vector k4 = rhs(t + h, x + h * k3);
    out = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  check_finite(out);
  return out;
}

StateVector step(const Rhs& rhs, const StateVector& x, double t, const StepConfig& cfg) {
  StateVector out(x.layout);
  out.values = step(rhs, x.values, t, cfg);
  return out;
}

Mat3 unpack_rotation(const Eigen::Ref<const Vector>& nine) {
  Mat3 m;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) m(r, c) = nine(3 * r + c);
  return m;
}

void pack_rotation(const Mat3& m, Eigen::Ref<Vector> nine) {
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) nine(3 * r + c) = m(r, c);
}

Mat3 nearest_rotation(const Mat3& m) {
  // Newton iteration for the orthogonal polar factor; quadratic convergence
  // from the nearly orthogonal matrices an integrator step produces.
  Mat3 x = m;
  for (int it = 0; it < 8; ++it) {
    if ((x.transpose() * x - Mat3::Identity()).norm() < 1e-14) break;
    const auto inv = inverse3(x);
    if (!inv) throw Error(ErrorKind::ZeroNorm, "rotation block is singular");
    x = 0.5 * (x + inv->transpose());
  }
  if (x.determinant() < 0.0) {
    throw Error(ErrorKind::InvalidArgument, "rotation block flipped orientation");
  }
  return x;
}

void renormalize_in_place(const Layout& layout, Vector& values) {
  for (const Block& b : layout.blocks()) {
    auto seg = values.segment(b.offset, b.size);
    if (b.kind == BlockKind::UnitVector) {
      const double norm = seg.norm();
      if (!(norm >= 1e-12)) {
        throw Error(ErrorKind::ZeroNorm, "unit-vector block '" + b.name + "' has zero norm");
      }
      if (std::abs(norm - 1.0) > 1e-12) seg /= norm;
    } else if (b.kind == BlockKind::Rotation) {
      pack_rotation(nearest_rotation(unpack_rotation(seg)), seg);
    }
  }
}

StateVector renormalize_rotation_block(const StateVector& x) {
  StateVector out = x;
  renormalize_in_place(out.layout, out.values);
  return out;
}

}  // namespace mwl
