#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "detail/parallel.hpp"
#include "stable.hpp"
#include "triplet.hpp"

namespace qid {

enum class Side { plus, minus };

inline const char* to_string(Side s) { return s == Side::plus ? "plus" : "minus"; }

/// Truncated second-moment matrix int_{|x| <= r} x x^T of one Jordan side.
/// The atomic part is an exact sum of outer products; an isotropic stable
/// part (always on the plus side) contributes its closed form
/// (C omega_d / (d(2-alpha))) r^{2-alpha} I.
inline Eigen::MatrixXd gram_matrix(const QuasiLevyMeasure& nu, Side side, double r) {
    require(r > 0.0 && std::isfinite(r), ErrKind::BadInput, "gram radius must be positive");
    const int d = nu.dim();
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(d, d);
    for (const auto& [p, w] : nu.atomic().atoms()) {
        const double weight = side == Side::plus ? std::max(w, 0.0) : std::max(-w, 0.0);
        if (weight == 0.0) continue;
        const auto x = point_view(p);
        if (x.norm() <= r) g.noalias() += weight * (x * x.transpose());
    }
    if (side == Side::plus && nu.has_stable())
        g += stable::gram_coefficient(d, *nu.stable_tail(), r) * Eigen::MatrixXd::Identity(d, d);
    return g;
}

/// Eigen decomposition summary of a gram matrix.  The extremal eigenvalues
/// and the trace are all derived from the same clamped eigenvalue array, so
/// the sandwich inequalities lambda_min <= trace <= d lambda_max hold exactly
/// in floating point, not merely up to solver noise.
struct GramSummary {
    Eigen::MatrixXd gram;
    Eigen::VectorXd eigenvalues;  ///< ascending, negatives clamped at the eigen tolerance
    double lambda_min = 0.0;
    double lambda_max = 0.0;
    double trace = 0.0;           ///< sum of the clamped eigenvalues
};

inline GramSummary gram_summary(const QuasiLevyMeasure& nu, Side side, double r) {
    GramSummary s;
    s.gram = gram_matrix(nu, side, r);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s.gram, Eigen::EigenvaluesOnly);
    s.eigenvalues = es.eigenvalues();
    const double clamp = 1e-12 * std::abs(s.gram.trace());
    for (int i = 0; i < s.eigenvalues.size(); ++i) {
        if (s.eigenvalues[i] < 0.0) {
            require(s.eigenvalues[i] >= -clamp, ErrKind::NotPSD,
                    "gram matrix of a non-negative measure has a negative eigenvalue");
            s.eigenvalues[i] = 0.0;
        }
        s.trace += s.eigenvalues[i];
    }
    s.lambda_min = s.eigenvalues[0];
    s.lambda_max = s.eigenvalues[s.eigenvalues.size() - 1];
    return s;
}

/// Smallest eigenvalue of the plus-side gram matrix at radius r.
inline double G_plus(const CharTriplet& t, double r) {
    return gram_summary(t.nu(), Side::plus, r).lambda_min;
}

/// Largest eigenvalue of the minus-side gram matrix at radius r.
inline double G_minus(const CharTriplet& t, double r) {
    return gram_summary(t.nu(), Side::minus, r).lambda_max;
}

/// Truncated second moment int_{|x| <= r} |x|^2 of the plus side.
inline double g_plus(const CharTriplet& t, double r) {
    return gram_summary(t.nu(), Side::plus, r).trace;
}

inline double g_minus(const CharTriplet& t, double r) {
    return gram_summary(t.nu(), Side::minus, r).trace;
}

/// Mass of the minus side outside the ball of radius r.  The stable part is
/// a non-negative density and never contributes here.
inline double nu_minus_tail_mass(const CharTriplet& t, double r) {
    double m = 0.0;
    for (const auto& [p, w] : t.nu().atomic().atoms())
        if (w < 0.0 && point_norm(p) > r) m -= w;
    return m;
}

/// Finite-r value of the smoothness criterion
///   r^{-2} |log r|^{-1} ( G+(r)/3  -  2 r^2 nu-(|x|>r)  -  (2/3) G-(r) ),
/// written so that G+(r) = 0 cleanly yields 0 without a division.  The
/// density criterion asks this to diverge as r -> 0.
inline double kallenberg_index(const CharTriplet& t, double r) {
    require(r > 0.0 && r < 1.0, ErrKind::BadInput, "smoothness index needs 0 < r < 1");
    const GramSummary plus = gram_summary(t.nu(), Side::plus, r);
    if (plus.lambda_min == 0.0) return 0.0;
    const double gminus = gram_summary(t.nu(), Side::minus, r).lambda_max;
    const double tail = nu_minus_tail_mass(t, r);
    const double bracket = plus.lambda_min / 3.0 - 2.0 * r * r * tail - (2.0 / 3.0) * gminus;
    return bracket / (r * r * std::abs(std::log(r)));
}

/// Default evaluation grid: 20 logarithmically spaced radii from 1 down to 1e-6.
inline std::vector<double> default_r_grid() {
    std::vector<double> g(20);
    for (int i = 0; i < 20; ++i) g[static_cast<std::size_t>(i)] = std::pow(10.0, -6.0 * i / 19.0);
    return g;
}

enum class DensityVerdict {
    smooth_density_certified_by_A,
    condition_holds_on_grid,
    condition_fails,
    inconclusive,
};

inline const char* to_string(DensityVerdict v) {
    switch (v) {
        case DensityVerdict::smooth_density_certified_by_A:
            return "smooth_density_certified_by_A";
        case DensityVerdict::condition_holds_on_grid:
            return "condition_holds_on_grid";
        case DensityVerdict::condition_fails:
            return "condition_fails";
        case DensityVerdict::inconclusive:
            return "inconclusive";
    }
    return "?";
}

struct DensityReport {
    std::vector<double> r;
    std::vector<double> G_plus, G_minus, g_plus, g_minus;
    std::vector<double> nu_minus_tail;
    std::vector<double> index;  ///< NaN where r >= 1 (the index is undefined there)
    DensityVerdict verdict = DensityVerdict::inconclusive;
    // trend thresholds used by the verdict, echoed for reproducibility
    double trend_ratio = 10.0;
    double trend_floor = 1e3;
};

namespace detail {

inline void check_r_grid(const std::vector<double>& r) {
    require(r.size() >= 2, ErrKind::BadInput, "radius grid needs at least two points");
    for (std::size_t i = 0; i < r.size(); ++i) {
        require(r[i] > 0.0 && std::isfinite(r[i]), ErrKind::BadInput,
                "radius grid must be positive");
        require(i == 0 || r[i] < r[i - 1], ErrKind::BadInput,
                "radius grid must be strictly decreasing");
    }
    require(r.back() <= 1e-4, ErrKind::BadInput, "radius grid must reach 1e-4 or below");
}

/// Index of the grid point one decade above the smallest radius (the largest
/// index i with r[i] >= 10 r_min), or npos when the grid has no such point.
inline std::size_t decade_anchor(const std::vector<double>& r) {
    const double target = 10.0 * r.back();
    std::size_t anchor = std::string::npos;
    for (std::size_t i = 0; i + 1 < r.size(); ++i)
        if (r[i] >= target) anchor = i;
    return anchor;
}

}  // namespace detail

/// Grid evaluation of the smoothness criterion.  A strictly positive definite
/// Gaussian part certifies a smooth density outright; otherwise the verdict
/// is a trend classification of the index across the grid, never a proof
/// (the criterion is a statement about the r -> 0 limit).
inline DensityReport check_kallenberg(const CharTriplet& t, std::vector<double> r_grid = {}) {
    if (r_grid.empty()) r_grid = default_r_grid();
    detail::check_r_grid(r_grid);

    DensityReport rep;
    rep.r = std::move(r_grid);
    const std::size_t n = rep.r.size();
    rep.G_plus.resize(n);
    rep.G_minus.resize(n);
    rep.g_plus.resize(n);
    rep.g_minus.resize(n);
    rep.nu_minus_tail.resize(n);
    rep.index.assign(n, std::numeric_limits<double>::quiet_NaN());

    detail::parallel_for(n, [&](std::size_t i) {
        const double r = rep.r[i];
        const GramSummary plus = gram_summary(t.nu(), Side::plus, r);
        const GramSummary minus = gram_summary(t.nu(), Side::minus, r);
        rep.G_plus[i] = plus.lambda_min;
        rep.G_minus[i] = minus.lambda_max;
        rep.g_plus[i] = plus.trace;
        rep.g_minus[i] = minus.trace;
        rep.nu_minus_tail[i] = nu_minus_tail_mass(t, r);
        if (r < 1.0) {
            const double bracket = plus.lambda_min / 3.0 - 2.0 * r * r * rep.nu_minus_tail[i] -
                                   (2.0 / 3.0) * minus.lambda_max;
            rep.index[i] =
                plus.lambda_min == 0.0 ? 0.0 : bracket / (r * r * std::abs(std::log(r)));
        }
    });

    // a strictly positive definite Gaussian part settles the question exactly
    {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t.A(), Eigen::EigenvaluesOnly);
        const double lmin = es.eigenvalues()[0];
        if (lmin > 1e-12 * std::max(1.0, std::abs(t.A().trace()))) {
            rep.verdict = DensityVerdict::smooth_density_certified_by_A;
            return rep;
        }
    }

    const std::size_t anchor = detail::decade_anchor(rep.r);
    const double last = rep.index.back();
    if (anchor != std::string::npos && std::isfinite(rep.index[anchor]) &&
        std::isfinite(last) && last > rep.trend_ratio * rep.index[anchor] &&
        last > rep.trend_floor) {
        rep.verdict = DensityVerdict::condition_holds_on_grid;
        return rep;
    }

    bool all_zero_small_r = true;
    for (std::size_t i = 0; i < n; ++i)
        if (rep.r[i] <= 10.0 * rep.r.back() && rep.index[i] != 0.0) all_zero_small_r = false;
    rep.verdict =
        all_zero_small_r ? DensityVerdict::condition_fails : DensityVerdict::inconclusive;
    return rep;
}

struct OreyReport {
    double beta = 0.0;
    std::vector<double> r;
    std::vector<double> a_plus;   ///< r^{-beta} G+(r)
    std::vector<double> a_minus;  ///< r^{-beta} G-(r)
    bool holds_on_grid = false;
};

/// Grid diagnostic for the power-scaled criterion: holds when r^{-beta} G+(r)
/// stays bounded away from zero over the last decade of the grid while
/// r^{-beta} G-(r) has decayed below 1e-6 at the smallest radius.
inline OreyReport check_orey(const CharTriplet& t, double beta, std::vector<double> r_grid = {}) {
    require(beta > 0.0 && beta < 2.0, ErrKind::BadInput, "scaling exponent must lie in (0, 2)");
    if (r_grid.empty()) r_grid = default_r_grid();
    detail::check_r_grid(r_grid);

    OreyReport rep;
    rep.beta = beta;
    rep.r = std::move(r_grid);
    const std::size_t n = rep.r.size();
    rep.a_plus.resize(n);
    rep.a_minus.resize(n);
    detail::parallel_for(n, [&](std::size_t i) {
        const double s = std::pow(rep.r[i], -beta);
        rep.a_plus[i] = s * G_plus(t, rep.r[i]);
        rep.a_minus[i] = s * G_minus(t, rep.r[i]);
    });

    const std::size_t anchor = detail::decade_anchor(rep.r);
    bool positive_tail = anchor != std::string::npos;
    if (positive_tail)
        for (std::size_t i = anchor; i < n; ++i)
            if (!(rep.a_plus[i] > 0.0)) positive_tail = false;
    const bool non_decaying =
        positive_tail && rep.a_plus.back() >= 0.5 * rep.a_plus[anchor];
    rep.holds_on_grid = non_decaying && rep.a_minus.back() < 1e-6;
    return rep;
}

}  // namespace qid
