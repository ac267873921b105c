#pragma once

#include <string>
#include <utility>
#include <vector>

#include "cproc/rocbands.hpp"

namespace cproc::cli {

struct PlotBand {
  std::string name;
  RocBand band;
};

// ROC-plane plot over [0,1]^2: one shaded region per band (upper envelope
// (spe_lo, sen_up), lower envelope (spe_up, sen_lo)), an optional ROC
// staircase, the chance diagonal and a legend. `comment` is embedded as an
// XML comment.
std::string render_svg(const std::vector<PlotBand>& bands, const std::vector<std::pair<double, double>>& roc,
                       const std::string& comment);

}  // namespace cproc::cli
