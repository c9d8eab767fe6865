#pragma once

#include <Eigen/Core>
#include <Eigen/Dense>

#include <string_view>

namespace elastowave {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

enum class DomainKind { Elastic, Acoustic };

enum class BoundaryCondition { Dirichlet, Neumann, Absorbing };

std::string_view to_string(DomainKind kind);
std::string_view to_string(BoundaryCondition bc);

}  // namespace elastowave
