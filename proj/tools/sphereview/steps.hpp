#pragma once

#include <string>
#include <vector>

#include "sphereview/mobius.hpp"

namespace sphereview::cli {

struct TransformStep {
    enum class Kind { RotateH, RotateV, RotateAxis, Zoom };
    Kind kind = Kind::RotateH;
    double angle_rad = 0.0;               // rotations
    UnitVector3 axis{0.0, 0.0, 1.0};      // RotateAxis
    double rho = 1.0;                     // Zoom
    UnitVector3 center{0.0, 0.0, -1.0};   // Zoom
};

// Pulls the ordered step flags (--rotate-h, --rotate-v, --rotate, --zoom,
// --center, --then) out of args, leaving everything else for the regular
// option parser. --center retargets the zoom step immediately before it;
// --then is an optional readability separator.
std::vector<std::string> extract_steps(const std::vector<std::string>& args,
                                       std::vector<TransformStep>& steps);

// Left-to-right composition: the first step acts first.
MobiusTransform compose_steps(const std::vector<TransformStep>& steps);

} // namespace sphereview::cli
