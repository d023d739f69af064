#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "density.hpp"
#include "detail/quadrature.hpp"
#include "stable.hpp"
#include "triplet.hpp"

namespace qid {

/// Expectation of the represented law: the location parameter in center mode.
/// Requires the big-jump first moment of |nu| to be finite, which for the
/// stable part means alpha > 1 (the atomic part is always a finite sum).
inline Eigen::VectorXd mean(const CharTriplet& t) {
    if (t.nu().has_stable())
        require(t.nu().stable_tail()->alpha > 1.0, ErrKind::HypothesisFails,
                "stable big-jump tail has no first moment (alpha <= 1)");
    return convert_mode(t, ReprMode::center).gamma();
}

/// Covariance of the represented law: A plus the full signed second-moment
/// matrix of nu.  A stable part always fails the hypothesis, its second
/// moment diverges at infinity for every alpha < 2.
inline Eigen::MatrixXd covariance(const CharTriplet& t) {
    require(!t.nu().has_stable(), ErrKind::HypothesisFails,
            "stable big-jump tail has no second moment");
    const int d = t.dim();
    Eigen::MatrixXd cov = t.A();
    for (const auto& [p, w] : t.nu().atomic().atoms()) {
        const auto x = point_view(p);
        cov.noalias() += w * (x * x.transpose());
    }
    return cov;
}

struct ExpMomentResult {
    double value = 1.0;
    double exponent = 0.0;        ///< log of value, the quantity actually summed
    bool hypothesis_held = true;  ///< big-jump terms looked absolutely summable
    bool resummed = false;        ///< epsilon acceleration was needed
    double resum_err = 0.0;       ///< stability estimate of the accelerated sum
    bool tail_warning = false;    ///< nu is a truncation of an infinite series
};

namespace detail {

/// Atom integrand of the exponential-moment formula in standard mode.
inline double exp_moment_term(const Point& p, double w, const Eigen::VectorXd& alpha) {
    const auto x = point_view(p);
    const double ax = alpha.dot(x);
    double v = std::expm1(ax);
    if (x.norm() <= 1.0) v -= ax;
    return w * v;
}

}  // namespace detail

/// E exp<alpha, X> from the triplet:
///   exp( <alpha, gamma_std> + (1/2)<alpha, A alpha>
///        + int (e^{<alpha,x>} - 1 - <alpha,x> 1_{|x|<=1}) dnu ).
/// For an exact finite atomic nu the sum is computed directly.  When nu is a
/// truncation of an infinite series (tail bound > 0) and the big-jump terms
/// grow along increasing <alpha, x>, the plain truncated sum is meaningless;
/// a signed series is then resummed by epsilon acceleration (reported in the
/// result), while a non-negative nu with growing terms means the moment of
/// the represented law is genuinely infinite.
inline ExpMomentResult exp_moment(const CharTriplet& t, const Eigen::VectorXd& alpha) {
    require(alpha.size() == t.dim(), ErrKind::BadInput, "moment direction dimension mismatch");
    if (t.nu().has_stable())
        require(alpha.norm() == 0.0, ErrKind::HypothesisFails,
                "stable big-jump tail has no exponential moment");

    ExpMomentResult out;
    out.tail_warning = t.nu().tail_bound() > 0.0;

    const Eigen::VectorXd gamma_std = detail::standard_gamma_of(t);
    double base = alpha.dot(gamma_std) + 0.5 * alpha.dot(t.A() * alpha);

    // order atoms by <alpha, x>; map order breaks ties deterministically
    std::vector<std::pair<double, double>> terms;  // (<alpha,x>, integrand term)
    terms.reserve(t.nu().atomic().atoms().size());
    std::vector<std::pair<double, double>> big;  // (|x|, |term|) over big jumps
    for (const auto& [p, w] : t.nu().atomic().atoms()) {
        const double term = detail::exp_moment_term(p, w, alpha);
        terms.emplace_back(point_view(p).dot(alpha), term);
        if (point_norm(p) > 1.0) big.emplace_back(point_norm(p), std::abs(term));
    }
    std::stable_sort(terms.begin(), terms.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });

    // the truncation frontier sits at the largest |x|; the direct sum is only
    // trusted when term sizes shrink towards that edge
    bool growing = false;
    if (out.tail_warning && big.size() >= 4) {
        std::stable_sort(big.begin(), big.end(),
                         [](const auto& a, const auto& b) { return a.first < b.first; });
        const std::size_t look = std::min<std::size_t>(8, big.size() / 2);
        const std::size_t lo = big.size() - look;
        for (std::size_t i = lo; i + 1 < big.size(); ++i)
            if (big[i + 1].second > big[i].second) growing = true;
    }

    if (!growing) {
        double s = 0.0;
        for (const auto& [ax, v] : terms) s += v;
        out.exponent = base + s;
        out.value = std::exp(out.exponent);
        return out;
    }

    out.hypothesis_held = false;
    if (!t.nu().atomic().has_negative_atoms())
        fail(ErrKind::HypothesisFails,
             "exponential moment of the represented law is infinite: non-negative "
             "big-jump terms grow without bound");

    std::vector<double> partial(terms.size());
    double s = 0.0;
    for (std::size_t i = 0; i < terms.size(); ++i) {
        s += terms[i].second;
        partial[i] = s;
    }
    const detail::AccelResult acc = detail::wynn_epsilon(partial, 1e-10, 5e-10);
    require(acc.converged, ErrKind::HypothesisFails,
            "alternating big-jump series did not stabilize under acceleration");
    out.resummed = true;
    out.resum_err = acc.err;
    out.exponent = base + acc.value;
    out.value = std::exp(out.exponent);
    return out;
}

/// Test functions for big-jump moment checks: |x|^p or exp<alpha, x>.
struct HFunc {
    enum class Kind { abs_power, exp_linear };
    Kind kind = Kind::abs_power;
    double p = 1.0;
    Eigen::VectorXd alpha;

    static HFunc abs_power(double p) {
        require(p > 0.0 && std::isfinite(p), ErrKind::BadInput, "power must be positive");
        HFunc h;
        h.kind = Kind::abs_power;
        h.p = p;
        return h;
    }
    static HFunc exp_linear(Eigen::VectorXd alpha) {
        HFunc h;
        h.kind = Kind::exp_linear;
        h.alpha = std::move(alpha);
        return h;
    }

    double operator()(const Point& x) const {
        if (kind == Kind::abs_power) return std::pow(point_norm(x), p);
        return std::exp(alpha.dot(point_view(x)));
    }
};

struct HMomentResult {
    bool finite = true;
    double value = 0.0;          ///< defined only when finite
    bool truncation_flag = false;  ///< truncated series whose h-weighted terms grow
};

/// Big-jump h-moment of one Jordan side, int_{|x|>1} h d nu^{side}.  Atomic
/// sums are exact; the stable tail integrates in closed form and is finite
/// only for power weights with p < alpha (or the constant weight).
inline HMomentResult h_moment_tail(const QuasiLevyMeasure& nu, Side side, const HFunc& h) {
    if (h.kind == HFunc::Kind::exp_linear)
        require(h.alpha.size() == nu.dim(), ErrKind::BadInput,
                "moment direction dimension mismatch");

    HMomentResult out;
    std::vector<std::pair<double, double>> terms;  // (|x|, h(x) * side weight)
    for (const auto& [p, w] : nu.atomic().atoms()) {
        const double weight = side == Side::plus ? std::max(w, 0.0) : std::max(-w, 0.0);
        if (weight == 0.0 || point_norm(p) <= 1.0) continue;
        const double hv = h(p);
        out.value += hv * weight;
        terms.emplace_back(point_norm(p), hv * weight);
    }

    if (side == Side::plus && nu.has_stable()) {
        const StableTail& st = *nu.stable_tail();
        const bool constant_weight =
            h.kind == HFunc::Kind::exp_linear && h.alpha.norm() == 0.0;
        if (h.kind == HFunc::Kind::abs_power && h.p < st.alpha) {
            out.value += stable::power_ring_mass(nu.dim(), st, h.p, 1.0,
                                                 std::numeric_limits<double>::infinity());
        } else if (constant_weight) {
            out.value += stable::power_ring_mass(nu.dim(), st, 0.0, 1.0,
                                                 std::numeric_limits<double>::infinity());
        } else {
            out.finite = false;
            out.value = 0.0;
            return out;
        }
    }

    if (nu.tail_bound() > 0.0 && terms.size() >= 2) {
        std::stable_sort(terms.begin(), terms.end(),
                         [](const auto& a, const auto& b) { return a.first < b.first; });
        const std::size_t look = std::min<std::size_t>(8, terms.size());
        const std::size_t lo = terms.size() - look;
        for (std::size_t i = lo; i + 1 < terms.size(); ++i)
            if (terms[i + 1].second > terms[i].second) out.truncation_flag = true;
    }
    return out;
}

}  // namespace qid
