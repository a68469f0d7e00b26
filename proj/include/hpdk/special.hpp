#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <numbers>

#include "hpd_core.hpp"

namespace hpdk {

namespace detail {

// log sin(pi z) that does not overflow for large |Im z|.
inline cd log_sin_pi(cd z) {
    const double pi = std::numbers::pi;
    const cd w = pi * z;
    const cd i(0.0, 1.0);
    if (w.imag() > 20.0) return -i * w + std::log((std::exp(2.0 * i * w) - 1.0) / (2.0 * i));
    if (w.imag() < -20.0) return i * w + std::log((1.0 - std::exp(-2.0 * i * w)) / (2.0 * i));
    return std::log(std::sin(w));
}

inline cd lanczos_log_gamma(cd z) {
    // 15-term Lanczos series with g = 607/128.
    static constexpr std::array<double, 14> cof = {
        57.1562356658629235,     -59.5979603554754912,    14.1360979747417471,
        -0.491913816097620199,   .339946499848118887e-4,  .465236289270485756e-4,
        -.983744753048795646e-4, .158088703224912494e-3,  -.210264441724104883e-3,
        .217439618115212643e-3,  -.164318106536763890e-3, .844182239838527433e-4,
        -.261908384015814087e-4, .368991826595316234e-5};
    cd ser = 0.999999999999997092;
    for (std::size_t j = 0; j < cof.size(); ++j) ser += cof[j] / (z + static_cast<double>(j + 1));
    const cd tmp = z + 5.24218750000000000;
    return (z + 0.5) * std::log(tmp) - tmp + std::log(2.5066282746310005 * ser / z);
}

}  // namespace detail

inline constexpr double kPoleTol = 1e-8;

// A logarithm of Gamma(z); the imaginary part is not reduced to the principal branch.
inline cd log_gamma(cd z) {
    const double nearest = std::round(z.real());
    if (nearest <= 0.0 && std::abs(z - cd(nearest, 0.0)) < kPoleTol)
        throw Error(ErrorKind::PoleError, "Gamma pole near " + std::to_string(nearest));
    if (z.real() < 0.5) {
        return std::log(std::numbers::pi) - detail::log_sin_pi(z) - detail::lanczos_log_gamma(1.0 - z);
    }
    return detail::lanczos_log_gamma(z);
}

inline cd gamma(cd z) { return std::exp(log_gamma(z)); }

inline int half_pairs(int n) { return n * (n - 1) / 2; }

// log of (2 pi)^{N(N-1)/2} prod_k Gamma(lambda_k - k + 1), k = 1..N
inline cd log_gamma_m(const CVec& lambda) {
    const int n = static_cast<int>(lambda.size());
    cd acc = static_cast<double>(half_pairs(n)) * std::log(2.0 * std::numbers::pi);
    for (int k = 0; k < n; ++k) acc += log_gamma(lambda(k) - static_cast<double>(k));
    return acc;
}

inline cd gamma_m(const CVec& lambda) { return std::exp(log_gamma_m(lambda)); }

// Gamma_M at the constant vector (a, ..., a).
inline double log_gamma_m_scalar(int n, double a) {
    return log_gamma_m(CVec::Constant(n, cd(a, 0.0))).real();
}

}  // namespace hpdk
