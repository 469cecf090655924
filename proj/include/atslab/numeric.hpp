#pragma once
#include <charconv>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace ats {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.141592653589793238462643383279502884;

inline double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

inline double norm_pdf(double x) {
    return std::exp(-0.5 * x * x) / std::sqrt(2.0 * kPi);
}

// Acklam's rational approximation, refined by one Halley step. Good to ~1e-15.
double norm_quantile(double p);

// exp(z)-1 without cancellation for small |z|.
inline cplx expm1_cplx(cplx z) {
    if (std::abs(z) < 1e-4) {
        return z * (1.0 + z * (0.5 + z * (1.0 / 6.0 + z / 24.0)));
    }
    return std::exp(z) - 1.0;
}

// Locale-independent shortest-or-fixed significant-digit formatting (CSV currency).
inline std::string fmt_sig(double v, int digits = 12) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, digits);
    if (res.ec != std::errc()) throw std::runtime_error("fmt_sig: to_chars failed");
    return std::string(buf, res.ptr);
}

} // namespace ats
