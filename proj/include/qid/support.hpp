#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <utility>
#include <vector>

#include "lattice.hpp"
#include "triplet.hpp"

namespace qid {

/// Polyhedral cone K = {x : <n_i, x> >= 0 for all i}.  The caller is
/// responsible for properness (no full line inside K); membership is a plain
/// half-space evaluation with a small absolute slack, since tested points
/// often carry extraction noise.
struct Cone {
    static constexpr double kSlack = 1e-12;

    Cone(int dim, std::vector<Eigen::VectorXd> normals)
        : dim_(dim), normals_(std::move(normals)) {
        require(dim_ >= 1, ErrKind::BadInput, "cone dimension must be positive");
        require(!normals_.empty(), ErrKind::BadInput, "cone needs at least one normal");
        for (const auto& n : normals_) {
            require(n.size() == dim_, ErrKind::BadInput, "cone normal dimension mismatch");
            require(n.norm() > 0.0, ErrKind::BadInput, "cone normal must be nonzero");
        }
    }

    /// The non-negative orthant [0, inf)^d.
    static Cone nonneg_orthant(int dim) {
        std::vector<Eigen::VectorXd> normals;
        for (int i = 0; i < dim; ++i) {
            Eigen::VectorXd e = Eigen::VectorXd::Zero(dim);
            e[i] = 1.0;
            normals.push_back(std::move(e));
        }
        return Cone(dim, std::move(normals));
    }

    int dim() const { return dim_; }
    const std::vector<Eigen::VectorXd>& normals() const { return normals_; }

    bool contains(const Eigen::VectorXd& x) const {
        for (const auto& n : normals_)
            if (n.dot(x) < -kSlack) return false;
        return true;
    }

  private:
    int dim_;
    std::vector<Eigen::VectorXd> normals_;
};

enum class ConeConclusion { supported_in_K, supported_in_translate, conditions_fail };

inline const char* to_string(ConeConclusion c) {
    switch (c) {
        case ConeConclusion::supported_in_K:
            return "supported_in_K";
        case ConeConclusion::supported_in_translate:
            return "supported_in_translate";
        case ConeConclusion::conditions_fail:
            return "conditions_fail";
    }
    return "?";
}

struct ConeCheck {
    bool a_zero = false;           ///< Gaussian part vanishes
    bool nu_plus_in_K = false;
    bool nu_minus_in_K = false;
    bool small_jumps_integrable = false;  ///< |x| integrable near 0, exact for atomic nu
    bool cond_i = false;           ///< the nu^- half of the translate criterion
    bool cond_ii = false;          ///< A = 0, supp nu^+ in K, small jumps integrable
    bool drift_in_K = false;
    ConeConclusion conclusion = ConeConclusion::conditions_fail;
};

/// Cone-support criterion: A = 0 together with supp(nu^+) in K and an
/// integrable small-jump part puts the law in a translate of K; a drift
/// inside K then pins the support in K itself.  The nu^- half of the
/// equivalent condition is evaluated alongside as a cross-check.
inline ConeCheck check_cone_conditions(const CharTriplet& t, const Cone& K) {
    require(t.mode() == ReprMode::standard, ErrKind::ModeMismatch,
            "cone check expects the standard representation");
    require(!t.nu().has_stable(), ErrKind::StableUnsupported,
            "an isotropic stable part is never supported in a proper cone");
    require(K.dim() == t.dim(), ErrKind::BadInput, "cone dimension mismatch");

    ConeCheck out;
    out.a_zero = t.A().cwiseAbs().maxCoeff() <= 1e-12;
    out.small_jumps_integrable = true;  // finite atomic measure, the integral is a finite sum

    out.nu_plus_in_K = true;
    out.nu_minus_in_K = true;
    for (const auto& [p, w] : t.nu().atomic().atoms()) {
        const Eigen::VectorXd x = point_view(p);
        if (w > 0.0 && !K.contains(x)) out.nu_plus_in_K = false;
        if (w < 0.0 && !K.contains(x)) out.nu_minus_in_K = false;
    }

    out.cond_ii = out.a_zero && out.nu_plus_in_K && out.small_jumps_integrable;
    out.cond_i = out.nu_minus_in_K && out.small_jumps_integrable;

    const Eigen::VectorXd drift = convert_mode(t, ReprMode::drift).gamma();
    out.drift_in_K = K.contains(drift);

    if (out.cond_ii)
        out.conclusion = out.drift_in_K ? ConeConclusion::supported_in_K
                                        : ConeConclusion::supported_in_translate;
    return out;
}

/// For an infinitely divisible law (non-negative nu) with integrable small
/// jumps, the drift belongs to the support.  Checks that expectation against
/// a reference pmf: true when some pmf atom coincides with the drift within
/// the lattice snap tolerance.
inline bool drift_in_support_check(const CharTriplet& t, const LatticePMF& pmf) {
    require(!t.nu().has_stable() && !t.nu().atomic().has_negative_atoms(),
            ErrKind::NotApplicable,
            "drift-in-support holds for infinitely divisible laws; the quasi-Levy "
            "measure here is not a non-negative atomic measure");
    require(pmf.dim() == t.dim(), ErrKind::BadInput, "reference pmf dimension mismatch");
    const Eigen::VectorXd drift = convert_mode(t, ReprMode::drift).gamma();
    for (const auto& [k, p] : pmf.probs()) {
        if ((pmf.point(k) - drift).cwiseAbs().maxCoeff() <= AtomicSignedMeasure::kDefaultSnap)
            return true;
    }
    return false;
}

}  // namespace qid
