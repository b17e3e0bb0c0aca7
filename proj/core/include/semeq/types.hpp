#pragma once

#include <Eigen/Core>

namespace semeq {

/// Point in the shared 2-D semantic space through which agents communicate.
using Symbol = Eigen::Vector2d;

/// Action-value vector Q(., o), one entry per action.
using ActionValues = Eigen::Vector4d;

}  // namespace semeq
