#pragma once

#include <string>
#include <vector>

#include "stargeo/adversarial.hpp"
#include "stargeo/starbody.hpp"
#include "stargeo/starnet.hpp"
#include "stargeo/weakconvex.hpp"

namespace stargeo {

/// 17 significant digits, which round-trips every double.
std::string format_double(double x);

/// One row per grid node: theta,rho,x,y (d = 2) or x,y,z,rho (d = 3).
std::string boundary_csv(const StarBody& k);

/// Same rows for several bodies with a leading body column.
std::string bodies_csv(const std::vector<StarBody>& bodies);

std::string erm_trace_csv(const std::vector<ErmTraceRow>& trace);
std::string train_trace_csv(const std::vector<TrainTraceRow>& trace);

/// rho,is_convex rows followed by a summary comment line.
std::string weak_convexity_csv(const WeakConvexityReport& r);

/// Planar boundaries overlaid with equal axes and a legend. 3-D bodies are
/// drawn through their z = 0 section.
std::string figure_svg(const std::vector<StarBody>& bodies, const std::string& title);

void write_text_file(const std::string& path, const std::string& text);

}  // namespace stargeo
