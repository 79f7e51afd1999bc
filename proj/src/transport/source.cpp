// Copyright 2026 The radfield Authors.
// SPDX-License-Identifier: Apache-2.0
#include "radfield/transport/source.hpp"

#include "radfield/errors.hpp"

namespace radfield {

const char* channel_name(Component c) {
    switch (c) {
        case Component::Beam:
            return "beam";
        case Component::Patient:
            return "patient";
        case Component::Scatter:
            return "scatter";
    }
    return "?";
}

void SourceConfig::validate() const {
    if (!position_m.allFinite()) {
        throw InputError("source: position must be finite");
    }
    if (!direction.allFinite() || std::abs(direction.norm() - 1.0) > 1e-9) {
        throw InputError("source: direction must be a unit vector");
    }
    if (const auto* cone = std::get_if<ConeShape>(&shape)) {
        if (!(cone->opening_angle_deg > 0.0 && cone->opening_angle_deg < 180.0)) {
            throw InputError("source: cone opening angle must lie in (0, 180) degrees");
        }
        return;
    }
    const auto& p = std::get<PyramidShape>(shape);
    if (!(p.rect_w_m > 0.0 && p.rect_h_m > 0.0 && p.at_distance_m > 0.0) ||
        !std::isfinite(p.rect_w_m + p.rect_h_m + p.at_distance_m)) {
        throw InputError("source: pyramid width, height and distance must be positive");
    }
}

}  // namespace radfield
