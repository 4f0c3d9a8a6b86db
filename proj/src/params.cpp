#include "afc/params.hpp"

#include <cmath>
#include <sstream>

#include "afc/errors.hpp"

namespace afc {

void MemoryParams::validate() const {
  std::ostringstream msg;
  if (!(std::isfinite(period_T) && period_T > 0.0))
    msg << "period_T must be positive and finite (got " << period_T << "); ";
  if (!(std::isfinite(length_L) && length_L >= 0.0))
    msg << "length_L must be non-negative and finite (got " << length_L << "); ";
  if (!(std::isfinite(alpha_max) && alpha_max > 0.0))
    msg << "alpha_max must be positive and finite (got " << alpha_max << "); ";
  if (!(std::isfinite(alpha_bg) && alpha_bg >= 0.0 && alpha_bg < alpha_max))
    msg << "alpha_bg must satisfy 0 <= alpha_bg < alpha_max (got " << alpha_bg << "); ";
  if (!(std::isfinite(gamma) && gamma >= 0.0))
    msg << "gamma must be non-negative (got " << gamma << "); ";
  const auto text = msg.str();
  if (!text.empty())
    throw InvalidParams("invalid memory parameters: " + text);
}

MemoryParams MemoryParams::dimensionless(double od, double background_od) {
  if (!(std::isfinite(od) && od >= 0.0))
    throw InvalidParams("optical depth must be non-negative");
  if (!(std::isfinite(background_od) && background_od >= 0.0))
    throw InvalidParams("background optical depth must be non-negative");
  MemoryParams p;
  p.period_T = 1.0;
  if (od == 0.0) {
    p.alpha_max = 1.0;
    p.length_L = 0.0;
    p.alpha_bg = 0.0;
  } else {
    p.alpha_max = od;
    p.length_L = 1.0;
    p.alpha_bg = background_od;
  }
  p.validate();
  return p;
}

} // namespace afc
