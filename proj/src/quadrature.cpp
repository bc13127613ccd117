#include "radsol/quadrature.hpp"

#include <stdexcept>

namespace radsol::quad {

double simpson(std::span<const double> f, double h) {
    if (f.size() < 3 || f.size() % 2 == 0) throw std::invalid_argument("Simpson rule needs an odd number (>= 3) of samples");
    double s = f.front() + f.back();
    for (std::size_t i = 1; i + 1 < f.size(); ++i) s += (i % 2 ? 4.0 : 2.0) * f[i];
    return s * h / 3.0;
}

}  // namespace radsol::quad
