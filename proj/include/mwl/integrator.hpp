#pragma once

#include "mwl/geometry.hpp"

#include <Eigen/Core>

#include <functional>
#include <string>
#include <vector>

namespace mwl {

using Vector = Eigen::VectorXd;

enum class BlockKind {
  Plain,
  UnitVector,  // rescaled to unit norm after each step
  Rotation,    // 9 entries, row-major 3x3; projected back onto SO(3)
};

struct Block {
  std::string name;
  int offset = 0;
  int size = 0;
  BlockKind kind = BlockKind::Plain;
};

/// Named, disjoint index ranges covering a flat state array. Blocks are
/// appended in order so coverage holds by construction.
class Layout {
 public:
  int add(std::string name, int size, BlockKind kind = BlockKind::Plain);

  int size() const { return size_; }
  const std::vector<Block>& blocks() const { return blocks_; }
  const Block& block(const std::string& name) const;
  const Block* find(const std::string& name) const;

 private:
  std::vector<Block> blocks_;
  int size_ = 0;
};

struct StateVector {
  Layout layout;
  Vector values;

  explicit StateVector(Layout l) : layout(std::move(l)), values(Vector::Zero(layout.size())) {}

  auto segment(const std::string& name) {
    const Block& b = layout.block(name);
    return values.segment(b.offset, b.size);
  }
  auto segment(const std::string& name) const {
    const Block& b = layout.block(name);
    return values.segment(b.offset, b.size);
  }
};

enum class Method { RK4, Euler };

struct StepConfig {
  double dt = 1e-3;
  Method method = Method::RK4;
};

using Rhs = std::function<Vector(double t, const Vector& x)>;

/// One fixed step of the chosen explicit scheme. Throws NonFiniteState if
/// the result contains NaN or Inf. Does not renormalize.
Vector step(const Rhs& rhs, const Vector& x, double t, const StepConfig& cfg);
StateVector step(const Rhs& rhs, const StateVector& x, double t, const StepConfig& cfg);

/// Rescales UnitVector blocks and re-orthonormalizes Rotation blocks.
/// Throws ZeroNorm when a unit-vector block has norm < 1e-12.
StateVector renormalize_rotation_block(const StateVector& x);
void renormalize_in_place(const Layout& layout, Vector& values);

/// Closest rotation in the Frobenius sense (polar factor).
Mat3 nearest_rotation(const Mat3& m);

// Row-major packing used by Rotation blocks.
Mat3 unpack_rotation(const Eigen::Ref<const Vector>& nine);
void pack_rotation(const Mat3& m, Eigen::Ref<Vector> nine);

}  // namespace mwl
