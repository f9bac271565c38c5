#include "mtx/params.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace mtx {

Params Params::make(double alpha, double beta) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw std::invalid_argument("alpha must be positive and finite");
  }
  if (!(beta >= 0.0) || !(beta < 2.0)) {
    throw std::invalid_argument("beta must lie in [0, 2): the weight |x|^-beta is not integrable otherwise");
  }
  double crit = 4.0 * kPi * (1.0 - 0.5 * beta);
  double level = alpha / (4.0 * kPi) + 0.5 * beta;
  Params p;
  p.beta = beta;
  if (std::abs(alpha - crit) <= 1e-6 * crit) {
    p.alpha = crit;
    p.on_boundary = true;
  } else if (level > 1.0) {
    std::ostringstream os;
    os << "inadmissible parameters: alpha/(4 pi) + beta/2 = " << level << " > 1";
    throw std::invalid_argument(os.str());
  } else {
    p.alpha = alpha;
    p.on_boundary = false;
  }
  return p;
}

}  // namespace mtx
