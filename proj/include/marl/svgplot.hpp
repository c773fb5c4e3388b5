#pragma once

#include <string>
#include <vector>

namespace marl {

struct Curve {
  std::string label;
  std::vector<double> x, y;
};

// Learning-curve plot (timestep vs mean return), one polyline per curve with
// a legend. Pure function of its inputs: identical curves yield a
// byte-identical document.
std::string render_svg(const std::vector<Curve>& curves,
                       const std::string& title = "mean evaluation return");

}  // namespace marl
