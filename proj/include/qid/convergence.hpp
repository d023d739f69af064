#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <vector>

#include "density.hpp"
#include "stable.hpp"
#include "triplet.hpp"

namespace qid {

/// Radial ramp test function: 0 on |x| <= a, 1 on |x| >= b, linear between.
/// A one-parameter stand-in for the bounded continuous functions vanishing
/// near the origin that the weak-convergence conditions quantify over.
struct RampFn {
    double a = 0.0;
    double b = 0.0;

    RampFn(double a_, double b_) : a(a_), b(b_) {
        require(0.0 < a && a < b && std::isfinite(b), ErrKind::BadInput,
                "ramp needs 0 < a < b");
    }

    double operator()(double norm) const {
        if (norm <= a) return 0.0;
        if (norm >= b) return 1.0;
        return (norm - a) / (b - a);
    }
};

/// Integral of a ramp against one Jordan side: exact atomic sum plus the
/// radial closed form and quadrature for the stable tail.
inline double cs_integral(const QuasiLevyMeasure& nu, Side side, const RampFn& f) {
    double s = 0.0;
    for (const auto& [p, w] : nu.atomic().atoms()) {
        const double weight = side == Side::plus ? std::max(w, 0.0) : std::max(-w, 0.0);
        if (weight == 0.0) continue;
        s += weight * f(point_norm(p));
    }
    if (side == Side::plus && nu.has_stable())
        s += stable::ramp_mass(nu.dim(), *nu.stable_tail(), f.a, f.b);
    return s;
}

/// Second moment of the minus side inside the eps-ball: the quantity whose
/// double limit (eps down, then along the sequence) must vanish.
inline double small_ball_second_moment(const QuasiLevyMeasure& nu, double eps) {
    require(eps > 0.0 && std::isfinite(eps), ErrKind::BadInput, "ball radius must be positive");
    double s = 0.0;
    for (const auto& [p, w] : nu.atomic().atoms()) {
        if (w >= 0.0) continue;
        const double n = point_norm(p);
        if (n <= eps) s += (-w) * n * n;
    }
    return s;
}

/// Quadratic form of the eps-augmented Gaussian part of one sequence member,
/// <z, A_n z> + int_{|x|<=eps} <z,x>^2 dnu_n^+, and its deviation from the
/// target form <z, A z>.
inline std::pair<double, double> a_form(const CharTriplet& tn, const CharTriplet& target,
                                        double eps, const Eigen::VectorXd& z) {
    require(tn.dim() == target.dim(), ErrKind::BadInput, "dimension mismatch");
    require(z.size() == tn.dim(), ErrKind::BadInput, "direction dimension mismatch");
    require(eps > 0.0 && std::isfinite(eps), ErrKind::BadInput, "eps must be positive");
    double form = z.dot(tn.A() * z);
    for (const auto& [p, w] : tn.nu().atomic().atoms()) {
        if (w <= 0.0) continue;
        const auto x = point_view(p);
        if (x.norm() <= eps) {
            const double zx = z.dot(x);
            form += w * zx * zx;
        }
    }
    if (tn.nu().has_stable())
        form += stable::gram_coefficient(tn.dim(), *tn.nu().stable_tail(), eps) * z.squaredNorm();
    return {form, std::abs(form - z.dot(target.A() * z))};
}

enum class Trend { improving, flat, degrading };

inline const char* to_string(Trend t) {
    switch (t) {
        case Trend::improving:
            return "improving";
        case Trend::flat:
            return "flat";
        case Trend::degrading:
            return "degrading";
    }
    return "?";
}

struct ConvergenceRow {
    double label = 0.0;                    ///< caller-supplied index, e.g. n
    std::vector<double> f_plus, f_minus;   ///< per ramp, int f dnu_n^{+/-}
    std::vector<double> f_dev;             ///< per ramp, |signed integral - target|
    std::vector<double> a_dev;             ///< per eps, ||A_n + gram_eps(nu_n^+) - A||_2
    std::vector<double> small_ball;        ///< per eps, minus-side second moment
    double gamma_dist = 0.0;               ///< |gamma_n - gamma| in matching modes
};

struct ConvergenceReport {
    std::vector<double> eps_grid;
    std::vector<RampFn> family;
    std::vector<ConvergenceRow> rows;
    // trend of the worst deviation per condition between first and last index;
    // diagnostics only, a finite index list cannot certify a limit
    Trend cond1 = Trend::flat;
    Trend cond2 = Trend::flat;
    Trend cond3 = Trend::flat;
    Trend cond4 = Trend::flat;
};

namespace detail {

inline Trend classify_trend(double first, double last) {
    if (std::abs(last - first) <= 1e-14 * std::max(1.0, std::abs(first))) return Trend::flat;
    if (last <= 0.5 * first) return Trend::improving;
    if (last >= 2.0 * first) return Trend::degrading;
    return Trend::flat;
}

}  // namespace detail

/// Tabulates the four sufficient-condition quantities for each supplied
/// sequence member against the target triplet.  Labels default to 1..n.
inline ConvergenceReport convergence_report(const std::vector<CharTriplet>& seq,
                                            const CharTriplet& target,
                                            std::vector<double> eps_grid = {},
                                            std::vector<RampFn> family = {},
                                            std::vector<double> labels = {}) {
    require(!seq.empty(), ErrKind::BadInput, "sequence must be non-empty");
    if (eps_grid.empty()) eps_grid = {0.5, 0.1, 0.01};
    if (family.empty()) family = {RampFn(0.1, 0.5), RampFn(0.5, 1.0), RampFn(1.0, 2.0)};
    if (labels.empty()) {
        labels.resize(seq.size());
        for (std::size_t i = 0; i < seq.size(); ++i) labels[i] = static_cast<double>(i + 1);
    }
    require(labels.size() == seq.size(), ErrKind::BadInput, "one label per sequence member");
    for (double e : eps_grid)
        require(e > 0.0 && std::isfinite(e), ErrKind::BadInput, "eps grid must be positive");

    ConvergenceReport rep;
    rep.eps_grid = std::move(eps_grid);
    rep.family = std::move(family);
    rep.rows.resize(seq.size());

    detail::parallel_for(seq.size(), [&](std::size_t i) {
        const CharTriplet& tn = seq[i];
        require(tn.dim() == target.dim(), ErrKind::BadInput, "dimension mismatch in sequence");
        require(tn.mode() == target.mode(), ErrKind::ModeMismatch,
                "sequence and target must share a representation mode");
        ConvergenceRow row;
        row.label = labels[i];
        for (const RampFn& f : rep.family) {
            const double plus = cs_integral(tn.nu(), Side::plus, f);
            const double minus = cs_integral(tn.nu(), Side::minus, f);
            const double tgt = cs_integral(target.nu(), Side::plus, f) -
                               cs_integral(target.nu(), Side::minus, f);
            row.f_plus.push_back(plus);
            row.f_minus.push_back(minus);
            row.f_dev.push_back(std::abs(plus - minus - tgt));
        }
        for (double eps : rep.eps_grid) {
            Eigen::MatrixXd dev = tn.A() + gram_matrix(tn.nu(), Side::plus, eps) - target.A();
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (dev + dev.transpose()),
                                                              Eigen::EigenvaluesOnly);
            row.a_dev.push_back(es.eigenvalues().cwiseAbs().maxCoeff());
            row.small_ball.push_back(small_ball_second_moment(tn.nu(), eps));
        }
        row.gamma_dist = (tn.gamma() - target.gamma()).norm();
        rep.rows[i] = std::move(row);
    });

    const auto worst = [](const std::vector<double>& v) {
        double m = 0.0;
        for (double x : v) m = std::max(m, x);
        return m;
    };
    const ConvergenceRow& first = rep.rows.front();
    const ConvergenceRow& last = rep.rows.back();
    rep.cond1 = detail::classify_trend(worst(first.f_dev), worst(last.f_dev));
    rep.cond2 = detail::classify_trend(worst(first.a_dev), worst(last.a_dev));
    rep.cond3 = detail::classify_trend(worst(first.small_ball), worst(last.small_ball));
    rep.cond4 = detail::classify_trend(first.gamma_dist, last.gamma_dist);
    return rep;
}

}  // namespace qid
