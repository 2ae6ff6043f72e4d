#ifndef RDMASS_SVG_HPP
#define RDMASS_SVG_HPP

#include <string>

#include "rdmass/monitor.hpp"

namespace rdmass {

/// Writes a self-contained static SVG with line charts of the run: one panel
/// of per-species sup norms over time, one of the weighted total mass over
/// time, and (when complete windows exist) one of the window aggregates over
/// the window start. Linear scales, labeled axes, no external assets.
///
/// Requires a nonempty record series; nothing is written otherwise.
void emit_svg(const Monitor& monitor, const std::string& path);

} // namespace rdmass

#endif
