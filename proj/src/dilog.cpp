#include <cmath>
#include <numbers>

#include "vpcalc/errors.hpp"
#include "vpcalc/quadrature.hpp"

namespace vpcalc::quad {

namespace {

constexpr double kPi2over6 = 1.6449340668482264364724151666460252;

// Li2(w) for |w| <= 1/2 by power series.
double li2_series(double w) {
    double term = w, sum = w;
    for (int k = 2; k < 80; ++k) {
        term *= w;
        const double add = term / (k * static_cast<double>(k));
        sum += add;
        if (std::abs(add) < 1e-18 * (1.0 + std::abs(sum))) break;
    }
    return sum;
}

// Standard-convention dilogarithm Li2 on the real line for w < 1.
double li2(double w) {
    if (w == 0.0) return 0.0;
    if (w < -1.0) {
        const double l = std::log(-w);
        return -kPi2over6 - 0.5 * l * l - li2(1.0 / w);
    }
    if (w < -0.5) {
        // Landen: Li2(w) = -Li2(w/(w-1)) - ln^2(1-w)/2
        const double l = std::log1p(-w);
        return -li2(w / (w - 1.0)) - 0.5 * l * l;
    }
    if (w <= 0.5) return li2_series(w);
    // 0.5 < w < 1: reflection Li2(w) = pi^2/6 - ln(w)ln(1-w) - Li2(1-w)
    return kPi2over6 - std::log(w) * std::log1p(-w) - li2_series(1.0 - w);
}

} // namespace

double dilog(double z) {
    if (!(z > 0.0)) throw DomainError("dilog(z) requires z > 0 on the real branch");
    // This library's convention: dilog(z) = int_1^z ln(t)/(1-t) dt = Li2(1-z).
    return li2(1.0 - z);
}

} // namespace vpcalc::quad
