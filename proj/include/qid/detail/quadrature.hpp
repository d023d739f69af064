#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "../errors.hpp"

namespace qid::detail {

/// Adaptive Simpson integration on a finite interval.  Tolerance is absolute;
/// throws QuadratureFailure when the recursion depth is exhausted before the
/// local error bound is met.
template <class F>
double adaptive_simpson(F&& f, double a, double b, double abstol) {
    struct Rec {
        const std::remove_reference_t<F>& f;
        int worst = 0;

        double run(double a, double b, double fa, double fm, double fb, double whole,
                   double tol, int depth) {
            const double m = 0.5 * (a + b);
            const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
            const double flm = f(lm), frm = f(rm);
            const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
            const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
            const double delta = left + right - whole;
            if (std::abs(delta) <= 15.0 * tol || (b - a) < 1e-14 * (std::abs(a) + std::abs(b)))
                return left + right + delta / 15.0;
            if (depth <= 0) {
                worst = 1;
                return left + right + delta / 15.0;
            }
            return run(a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
                   run(m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
        }
    };

    if (!(b > a)) return 0.0;
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    Rec rec{f};
    const double v = rec.run(a, b, fa, fm, fb, whole, abstol, 48);
    require(rec.worst == 0, ErrKind::QuadratureFailure,
            "adaptive Simpson did not reach the requested tolerance");
    return v;
}

struct AccelResult {
    double value = 0.0;
    double err = 0.0;      ///< spread of the last diagonal estimates
    bool converged = false;
};

/// Wynn epsilon acceleration of a partial-sum sequence.  Returns the best
/// even-column estimate; used both for oscillatory radial tails and for
/// alternating atomic series whose plain sum diverges.
inline AccelResult wynn_epsilon(const std::vector<double>& s, double reltol = 1e-12,
                                double abstol = 1e-13) {
    AccelResult out;
    const std::size_t n = s.size();
    if (n == 0) return out;
    if (n == 1) {
        out.value = s[0];
        out.converged = true;
        return out;
    }

    std::vector<long double> prev(n, 0.0L);       // epsilon_{-1}
    std::vector<long double> cur(s.begin(), s.end());  // epsilon_0
    long double best_val = cur.back();
    long double last_even = cur.back();
    double best_err = std::abs(static_cast<double>(s[n - 1] - s[n - 2]));

    for (std::size_t col = 1; col < n; ++col) {
        std::vector<long double> next(n - col);
        bool degenerate = false;
        for (std::size_t i = 0; i + col < n; ++i) {
            const long double diff = cur[i + 1] - cur[i];
            if (std::abs(static_cast<double>(diff)) < 1e-300) {
                // the table has converged exactly at this entry
                out.value = static_cast<double>(cur[i + 1]);
                out.err = 0.0;
                out.converged = true;
                return out;
            }
            next[i] = prev[i + 1] + 1.0L / diff;
            if (!std::isfinite(static_cast<double>(next[i]))) degenerate = true;
        }
        if (degenerate) break;
        prev.swap(cur);
        cur.swap(next);
        if (col % 2 == 0) {
            // even columns approximate the limit; keep the most stable one,
            // deeper columns of a noisy table can degrade again
            const long double cand = cur.back();
            const double spread = std::abs(static_cast<double>(cand - last_even));
            if (spread <= best_err) {
                best_err = spread;
                best_val = cand;
            }
            last_even = cand;
        }
    }

    out.value = static_cast<double>(best_val);
    out.err = best_err;
    out.converged = out.err <= std::max(abstol, reltol * std::abs(out.value));
    return out;
}

}  // namespace qid::detail
