#pragma once

#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <utility>
#include <vector>

#include "detail/quadrature.hpp"
#include "errors.hpp"

namespace qid {

/// Isotropic stable tail of a quasi-Levy measure: the density C |x|^{-(d+alpha)}
/// on R^d \ {0}.  Always part of the positive component.
struct StableTail {
    double alpha = 1.0;  ///< stability index, in (0, 2)
    double C = 1.0;      ///< positive scale constant
};

namespace stable {

inline void validate(const StableTail& st) {
    require(st.alpha > 0.0 && st.alpha < 2.0, ErrKind::BadInput,
            "stable index must lie in (0, 2)");
    require(st.C > 0.0, ErrKind::BadInput, "stable scale constant must be positive");
}

/// Surface area of the unit sphere S^{d-1} (2 for d = 1).
inline double sphere_area(int d) {
    require(d >= 1, ErrKind::BadInput, "dimension must be positive");
    static const double kPi = 3.14159265358979323846;
    return 2.0 * std::pow(kPi, 0.5 * d) / std::tgamma(0.5 * d);
}

/// Normalised spherical cosine average Lambda_d(t), the angular factor left
/// after reducing int cos(t<e,u>) over S^{d-1} by isotropy.  Lambda_d(0) = 1.
inline double angular_kernel(int d, double t) {
    t = std::abs(t);
    if (t < 0.5) {
        // power series: sum_j (-1)^j (t^2/4)^j / (j! prod_{i<j} (d/2 + i))
        double term = 1.0, sum = 1.0;
        const double q = 0.25 * t * t;
        for (int j = 1; j < 24; ++j) {
            term *= -q / (j * (0.5 * d + j - 1));
            sum += term;
            if (std::abs(term) < 1e-18) break;
        }
        return sum;
    }
    switch (d) {
        case 1: return std::cos(t);
        case 2: return std::cyl_bessel_j(0.0, t);
        case 3: return std::sin(t) / t;
        default: {
            const double nu = 0.5 * d - 1.0;
            return std::tgamma(0.5 * d) * std::pow(2.0 / t, nu) * std::cyl_bessel_j(nu, t);
        }
    }
}

/// int_{r0 < |x| <= r1} |x|^p d nu_stable.  r1 may be +inf; returns +inf when
/// the integral diverges at either end.
inline double power_ring_mass(int d, const StableTail& st, double p, double r0, double r1) {
    validate(st);
    const double q = p - st.alpha;
    const double scale = st.C * sphere_area(d);
    const double inf = std::numeric_limits<double>::infinity();
    if (r0 == 0.0 && q <= 0.0) return inf;
    if (std::isinf(r1) && q >= 0.0) return inf;
    if (q == 0.0) return scale * std::log(r1 / r0);
    const double hi = std::isinf(r1) ? 0.0 : std::pow(r1, q);
    const double lo = (r0 == 0.0) ? 0.0 : std::pow(r0, q);
    return scale * (hi - lo) / q;
}

/// Gram integral over the centred ball: int_{|x|<=r} x x^T d nu_stable equals
/// gram_coefficient(d, st, r) * I_d by isotropy.
inline double gram_coefficient(int d, const StableTail& st, double r) {
    validate(st);
    return st.C * sphere_area(d) * std::pow(r, 2.0 - st.alpha) / (d * (2.0 - st.alpha));
}

/// int (1 ^ |x|^2) d nu_stable, the finiteness functional of a Levy measure.
inline double one_wedge(int d, const StableTail& st) {
    validate(st);
    return st.C * sphere_area(d) * (1.0 / (2.0 - st.alpha) + 1.0 / st.alpha);
}

/// int f_{a,b}(|x|) d nu_stable for the continuous ramp that is 0 on [0,a],
/// 1 on [b,inf) and linear in between.  Radial quadrature on the ramp plus the
/// exact power tail.
inline double ramp_mass(int d, const StableTail& st, double a, double b, double abstol = 1e-12) {
    validate(st);
    require(0.0 < a && a < b, ErrKind::BadInput, "ramp needs 0 < a < b");
    const double alpha = st.alpha;
    const double ramp = detail::adaptive_simpson(
        [a, b, alpha](double s) { return (s - a) / (b - a) * std::pow(s, -1.0 - alpha); }, a, b,
        abstol);
    return st.C * sphere_area(d) * (ramp + std::pow(b, -alpha) / alpha);
}

/// Radial profile I(d, alpha) = int_0^inf (Lambda_d(t) - 1) t^{-1-alpha} dt,
/// a negative constant.  Series head below t0, adaptive Simpson through the
/// first oscillations, exact power tail for the -1 part and Wynn-accelerated
/// block sums for the remaining oscillatory Bessel tail.  Cached per (d, alpha).
inline double psi_profile(int d, double alpha) {
    require(d >= 1, ErrKind::BadInput, "dimension must be positive");
    require(alpha > 0.0 && alpha < 2.0, ErrKind::BadInput, "stable index must lie in (0, 2)");

    static std::mutex mu;
    static std::map<std::pair<int, double>, double> cache;
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find({d, alpha});
        if (it != cache.end()) return it->second;
    }

    static const double kPi = 3.14159265358979323846;
    const double t0 = 0.5, T = 40.0;

    // [0, t0]: integrate the angular series term by term
    double head = 0.0, term = 1.0;
    for (int j = 1; j < 40; ++j) {
        term *= -0.25 / (j * (0.5 * d + j - 1));
        const double piece = term * std::pow(t0, 2.0 * j - alpha) / (2.0 * j - alpha);
        head += piece;
        if (std::abs(piece) < 1e-18) break;
    }

    // [t0, T]
    const double mid = detail::adaptive_simpson(
        [d, alpha](double t) {
            return (angular_kernel(d, t) - 1.0) * std::pow(t, -1.0 - alpha);
        },
        t0, T, 1e-13);

    // beyond T the -1 part integrates exactly; the Lambda part oscillates with
    // period ~2pi, so accumulate pi-length blocks and accelerate
    const double flat_tail = -std::pow(T, -alpha) / alpha;
    std::vector<double> partial;
    double acc = 0.0;
    const int blocks = 60, panels = 32;
    for (int k = 0; k < blocks; ++k) {
        const double lo = T + k * kPi, hi = lo + kPi;
        const double h = (hi - lo) / panels;
        double block = 0.0;
        for (int i = 0; i < panels; ++i) {
            const double x0 = lo + i * h, x1 = x0 + h, xm = x0 + 0.5 * h;
            auto g = [d, alpha](double t) {
                return angular_kernel(d, t) * std::pow(t, -1.0 - alpha);
            };
            block += h / 6.0 * (g(x0) + 4.0 * g(xm) + g(x1));
        }
        acc += block;
        partial.push_back(acc);
    }
    const detail::AccelResult tail = detail::wynn_epsilon(partial, 1e-12, 1e-14);
    require(tail.converged, ErrKind::QuadratureFailure,
            "oscillatory tail of the stable profile integral did not stabilise");

    const double value = head + mid + flat_tail + tail.value;
    std::lock_guard<std::mutex> lock(mu);
    cache[{d, alpha}] = value;
    return value;
}

/// Characteristic-exponent contribution of the stable tail at frequency z:
/// a negative real, C omega_d I(d, alpha) |z|^alpha.  The centering term drops
/// out by symmetry in every representation mode.
inline double exponent_value(int d, const StableTail& st, double znorm) {
    validate(st);
    if (znorm == 0.0) return 0.0;
    return st.C * sphere_area(d) * psi_profile(d, st.alpha) * std::pow(znorm, st.alpha);
}

}  // namespace stable
}  // namespace qid
