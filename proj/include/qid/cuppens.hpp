#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <utility>

#include "triplet.hpp"

namespace qid {

struct CuppensResult {
    CharTriplet triplet;
    int K = 0;                   ///< number of convolution powers summed
    double r = 0.0;              ///< series ratio (1 - lambda) / lambda
    double tail_bound = 0.0;     ///< r^{K+1} / ((K+1)(1-r)), total variation of the tail
    double rho_total_mass = 0.0; ///< signed mass of the partial sum, origin included
    double origin_mass = 0.0;    ///< mass removed at the origin
    double mass_residual = 0.0;  ///< |rho_total_mass + log lambda|
    double lambda = 0.0;
    double tol = 0.0;
};

/// Quasi-Levy measure of a law with a dominant atom, mu = lambda delta_a +
/// (1 - lambda) sigma with lambda > 1/2.  The log of the characteristic
/// function expands into the alternating series
///     sum_k (-1)^{k+1} k^{-1} r^k tau^{*k},   tau = delta_{-a} * sigma,
/// which is summed until the geometric tail drops below tol.  Mass landing on
/// the origin is removed after summation (it belongs to no quasi-Levy
/// measure); the result has Gaussian part zero and drift a.
inline CuppensResult cuppens_triplet(double lambda, const Eigen::VectorXd& a,
                                     const AtomicSignedMeasure& sigma, double tol = 1e-10) {
    require(lambda > 0.5 && lambda <= 1.0, ErrKind::LambdaOutOfRange,
            "atom mass must lie in (1/2, 1]");
    require(tol > 0.0, ErrKind::BadInput, "tolerance must be positive");
    const int d = sigma.dim();
    require(a.size() == d, ErrKind::BadInput, "atom location dimension mismatch");
    require(!sigma.has_negative_atoms(), ErrKind::BadInput,
            "sigma must be a non-negative measure");
    require(std::abs(sigma.total_mass() - 1.0) <= 1e-12, ErrKind::BadInput,
            "sigma must have total mass one");
    require(sigma.mass_at(a) == 0.0, ErrKind::BadInput, "sigma must carry no mass at a");

    const double r = (1.0 - lambda) / lambda;

    CuppensResult out{CharTriplet(Eigen::MatrixXd::Zero(d, d), QuasiLevyMeasure::zero(d), a,
                                  ReprMode::drift),
                      0, r, 0.0, 0.0, 0.0, 0.0, lambda, tol};
    if (r == 0.0) return out;  // pure atom, empty series

    // smallest K with r^{K+1} / ((K+1)(1-r)) < tol
    int K = 0;
    double rpow = r;  // r^{K+1}
    while (rpow / ((K + 1) * (1.0 - r)) >= tol) {
        ++K;
        rpow *= r;
        require(K <= 200000, ErrKind::BadInput, "truncation order exceeds sanity bound");
    }
    out.K = K;
    out.tail_bound = rpow / ((K + 1) * (1.0 - r));

    Eigen::VectorXd shift = -a;
    AtomicSignedMeasure tau = translate(sigma, shift);
    AtomicSignedMeasure rho(d);
    AtomicSignedMeasure power = tau;  // tau^{*k}
    double rk = 1.0;
    for (int k = 1; k <= K; ++k) {
        rk *= r;
        const double coeff = (k % 2 == 1 ? 1.0 : -1.0) * rk / static_cast<double>(k);
        rho += power.scaled(coeff);
        if (k < K) power = convolve_atomic(power, tau);
    }

    out.rho_total_mass = rho.total_mass();
    out.origin_mass = rho.mass_at_origin();
    out.mass_residual = std::abs(out.rho_total_mass + std::log(lambda));

    QuasiLevyMeasure nu(rho.without_origin());
    nu.set_tail_bound(out.tail_bound);
    out.triplet =
        CharTriplet(Eigen::MatrixXd::Zero(d, d), std::move(nu), a, ReprMode::drift);
    return out;
}

/// Conservation check on the truncated series: the full series carries total
/// mass -log lambda, so the partial sum must match within tol plus the tail
/// bound.  Returns the residual for the caller to compare.
inline double mass_identity_check(const CuppensResult& res) { return res.mass_residual; }

}  // namespace qid
