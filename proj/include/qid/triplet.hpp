#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "measure.hpp"

namespace qid {

/// Centering convention of a characteristic triplet.  standard truncates the
/// compensator at the unit ball, drift uses no compensator (needs integrable
/// small jumps), center compensates every jump (needs integrable big jumps).
enum class ReprMode { standard, drift, center };

inline const char* to_string(ReprMode m) {
    switch (m) {
        case ReprMode::standard: return "standard";
        case ReprMode::drift:    return "drift";
        case ReprMode::center:   return "center";
    }
    return "standard";
}

inline ReprMode mode_from_string(const std::string& s) {
    if (s == "standard") return ReprMode::standard;
    if (s == "drift") return ReprMode::drift;
    if (s == "center") return ReprMode::center;
    fail(ErrKind::BadInput, "unknown representation mode '" + s + "'");
}

/// Characteristic triplet (A, nu, gamma) of a quasi-infinitely divisible law
/// in a given representation mode.  Value type; operations return new
/// triplets.  Converted triplets remember the standard-mode location exactly
/// so mode round trips reproduce gamma bit for bit.
class CharTriplet {
  public:
    CharTriplet(Eigen::MatrixXd A, QuasiLevyMeasure nu, Eigen::VectorXd gamma, ReprMode mode)
        : A_(std::move(A)), nu_(std::move(nu)), gamma_(std::move(gamma)), mode_(mode) {
        const int d = nu_.dim();
        require(A_.rows() == d && A_.cols() == d, ErrKind::BadInput,
                "gaussian matrix shape does not match dimension");
        require(gamma_.size() == d, ErrKind::BadInput, "location dimension mismatch");
        require(gamma_.allFinite() && A_.allFinite(), ErrKind::BadInput,
                "triplet entries must be finite");
        if (mode_ == ReprMode::standard) std_anchor_ = gamma_;
    }

    int dim() const { return nu_.dim(); }
    const Eigen::MatrixXd& A() const { return A_; }
    const QuasiLevyMeasure& nu() const { return nu_; }
    const Eigen::VectorXd& gamma() const { return gamma_; }
    ReprMode mode() const { return mode_; }

    friend CharTriplet convert_mode(const CharTriplet& t, ReprMode target);
    friend CharTriplet convolve(const CharTriplet& a, const CharTriplet& b);

  private:
    Eigen::MatrixXd A_;
    QuasiLevyMeasure nu_;
    Eigen::VectorXd gamma_;
    ReprMode mode_;
    std::optional<Eigen::VectorXd> std_anchor_;
};

namespace detail {

/// int_{|x|<=1} x d nu, atomic part (the stable tail contributes zero by
/// symmetry whenever it is integrable there at all).
inline Eigen::VectorXd small_jump_vector(const QuasiLevyMeasure& nu) {
    Eigen::VectorXd s = Eigen::VectorXd::Zero(nu.dim());
    for (const auto& [p, w] : nu.atomic().atoms())
        if (point_norm(p) <= 1.0) s += w * point_view(p);
    return s;
}

/// int_{|x|>1} x d nu, atomic part.
inline Eigen::VectorXd big_jump_vector(const QuasiLevyMeasure& nu) {
    Eigen::VectorXd s = Eigen::VectorXd::Zero(nu.dim());
    for (const auto& [p, w] : nu.atomic().atoms())
        if (point_norm(p) > 1.0) s += w * point_view(p);
    return s;
}

inline void check_mode_integrability(const QuasiLevyMeasure& nu, ReprMode mode) {
    if (!nu.has_stable()) return;
    const double alpha = nu.stable_tail()->alpha;
    if (mode == ReprMode::drift)
        require(alpha < 1.0, ErrKind::NotIntegrable,
                "drift mode needs integrable small jumps (stable index >= 1)");
    if (mode == ReprMode::center)
        require(alpha > 1.0, ErrKind::NotIntegrable,
                "center mode needs integrable big jumps (stable index <= 1)");
}

inline Eigen::VectorXd standard_gamma_of(const CharTriplet& t) {
    switch (t.mode()) {
        case ReprMode::standard: return t.gamma();
        case ReprMode::drift:    return t.gamma() + small_jump_vector(t.nu());
        case ReprMode::center:   return t.gamma() - big_jump_vector(t.nu());
    }
    return t.gamma();
}

}  // namespace detail

/// Checks the structural invariants and returns a normalised copy: A must be
/// symmetric within 1e-10 * ||A|| and its spectrum non-negative within the
/// same scale (tiny negative eigenvalues are clamped to zero; genuinely
/// negative ones raise NotPSD, the computable face of the non-negativity
/// forced on the gaussian part).
inline CharTriplet validate(const CharTriplet& t) {
    const Eigen::MatrixXd& A = t.A();
    const double scale = A.cwiseAbs().maxCoeff();
    const double tol = 1e-10 * scale;
    require((A - A.transpose()).cwiseAbs().maxCoeff() <= tol, ErrKind::NotSymmetric,
            "gaussian matrix is not symmetric");

    Eigen::MatrixXd sym = 0.5 * (A + A.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
    require(es.info() == Eigen::Success, ErrKind::BadInput, "eigen decomposition failed");
    Eigen::VectorXd lam = es.eigenvalues();
    require(lam.minCoeff() >= -tol, ErrKind::NotPSD,
            "gaussian matrix has a negative eigenvalue");
    lam = lam.cwiseMax(0.0);
    Eigen::MatrixXd clamped = es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
    clamped = 0.5 * (clamped + clamped.transpose());

    detail::check_mode_integrability(t.nu(), t.mode());
    return CharTriplet(std::move(clamped), t.nu(), t.gamma(), t.mode());
}

/// Levy-Khintchine exponent Psi(z) of the triplet; exp(Psi) is the
/// characteristic function.  The stable tail enters as a negative real by
/// isotropy, identical in every mode.
inline std::complex<double> char_exponent(const CharTriplet& t, const Eigen::VectorXd& z) {
    require(z.size() == t.dim(), ErrKind::BadInput, "frequency dimension mismatch");
    const std::complex<double> i(0.0, 1.0);
    std::complex<double> psi = i * t.gamma().dot(z) - 0.5 * z.dot(t.A() * z);

    const bool std_mode = t.mode() == ReprMode::standard;
    const bool center_mode = t.mode() == ReprMode::center;
    for (const auto& [p, w] : t.nu().atomic().atoms()) {
        const double zx = point_view(p).dot(z);
        std::complex<double> term = std::polar(1.0, zx) - 1.0;
        if (center_mode || (std_mode && point_norm(p) <= 1.0)) term -= i * zx;
        psi += w * term;
    }
    if (t.nu().has_stable())
        psi += stable::exponent_value(t.dim(), *t.nu().stable_tail(), z.norm());
    return psi;
}

/// Analytic continuation of the exponent to complex frequencies; defined for
/// purely atomic measures (the stable tail has no entire extension).
inline std::complex<double> char_exponent(const CharTriplet& t, const Eigen::VectorXcd& z) {
    require(z.size() == t.dim(), ErrKind::BadInput, "frequency dimension mismatch");
    require(!t.nu().has_stable(), ErrKind::StableUnsupported,
            "complex frequencies need a purely atomic measure");
    const std::complex<double> i(0.0, 1.0);
    std::complex<double> psi = i * (t.gamma().transpose() * z).value() -
                               0.5 * (z.transpose() * t.A() * z).value();
    const bool std_mode = t.mode() == ReprMode::standard;
    const bool center_mode = t.mode() == ReprMode::center;
    for (const auto& [p, w] : t.nu().atomic().atoms()) {
        const std::complex<double> zx = (point_view(p).transpose() * z).value();
        std::complex<double> term = std::exp(i * zx) - 1.0;
        if (center_mode || (std_mode && point_norm(p) <= 1.0)) term -= i * zx;
        psi += w * term;
    }
    return psi;
}

/// Triplet of the convolution (independent sum): componentwise sums within a
/// common representation mode.
inline CharTriplet convolve(const CharTriplet& a, const CharTriplet& b) {
    require(a.dim() == b.dim(), ErrKind::BadInput, "dimension mismatch in convolution");
    require(a.mode() == b.mode(), ErrKind::ModeMismatch,
            "convolution needs both triplets in the same mode");
    CharTriplet out(a.A() + b.A(), add(a.nu(), b.nu()), a.gamma() + b.gamma(), a.mode());
    if (a.std_anchor_ && b.std_anchor_) out.std_anchor_ = *a.std_anchor_ + *b.std_anchor_;
    return out;
}

/// Triplet of MX + b from the triplet of X (standard mode).  The location
/// picks up the usual recentering sum because the unit-ball indicator moves.
inline CharTriplet affine_image(const CharTriplet& t, const Eigen::MatrixXd& M,
                                const Eigen::VectorXd& b) {
    require(t.mode() == ReprMode::standard, ErrKind::ModeMismatch,
            "affine images are taken in standard mode; convert first");
    require(M.cols() == t.dim(), ErrKind::BadInput, "map dimension mismatch");
    const int n = static_cast<int>(M.rows());
    require(b.size() == n, ErrKind::BadInput, "offset dimension mismatch");

    Eigen::MatrixXd A_img = M * t.A() * M.transpose();

    std::optional<StableTail> st_img;
    if (t.nu().has_stable()) {
        // only scalar multiples of orthogonal maps preserve isotropy
        require(n == t.dim(), ErrKind::UnsupportedStableImage,
                "stable tail image needs a square conformal map");
        const Eigen::MatrixXd MtM = M.transpose() * M;
        const double c2 = MtM.trace() / t.dim();
        require(c2 > 0.0 && (MtM - c2 * Eigen::MatrixXd::Identity(t.dim(), t.dim()))
                                    .cwiseAbs()
                                    .maxCoeff() <= 1e-12 * std::max(1.0, c2),
                ErrKind::UnsupportedStableImage,
                "stable tail image needs a nonzero scalar multiple of an orthogonal map");
        const StableTail& st = *t.nu().stable_tail();
        st_img = StableTail{st.alpha, st.C * std::pow(std::sqrt(c2), st.alpha)};
    }

    Eigen::VectorXd gamma_img = b + M * t.gamma();
    for (const auto& [p, w] : t.nu().atomic().atoms()) {
        const Eigen::VectorXd y = M * point_view(p);
        const double in_new = y.norm() <= 1.0 ? 1.0 : 0.0;
        const double in_old = point_norm(p) <= 1.0 ? 1.0 : 0.0;
        if (in_new != in_old) gamma_img += w * (in_new - in_old) * y;
    }

    QuasiLevyMeasure nu_img(pushforward(t.nu().atomic(), M, /*drop_origin=*/true), st_img);
    nu_img.set_tail_bound(t.nu().tail_bound());
    return CharTriplet(std::move(A_img), std::move(nu_img), std::move(gamma_img),
                       ReprMode::standard);
}

/// Rewrites the triplet in another centering convention.  Round trips through
/// standard mode return the original location exactly.
inline CharTriplet convert_mode(const CharTriplet& t, ReprMode target) {
    if (target == t.mode()) return t;
    detail::check_mode_integrability(t.nu(), target);

    const Eigen::VectorXd gamma_std =
        t.std_anchor_ ? *t.std_anchor_ : detail::standard_gamma_of(t);

    Eigen::VectorXd g;
    switch (target) {
        case ReprMode::standard: g = gamma_std; break;
        case ReprMode::drift:    g = gamma_std - detail::small_jump_vector(t.nu()); break;
        case ReprMode::center:   g = gamma_std + detail::big_jump_vector(t.nu()); break;
    }
    CharTriplet out(t.A(), t.nu(), std::move(g), target);
    out.std_anchor_ = gamma_std;
    return out;
}

/// Triplet of a product measure with independent one-dimensional factors:
/// block-diagonal gaussian part, quasi-Levy atoms embedded on the axes.
inline CharTriplet product_triplet(const std::vector<CharTriplet>& parts) {
    require(!parts.empty(), ErrKind::BadInput, "product of zero factors");
    const int d = static_cast<int>(parts.size());
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(d, d);
    Eigen::VectorXd gamma(d);
    AtomicSignedMeasure atoms(d);
    for (int k = 0; k < d; ++k) {
        const CharTriplet& p = parts[static_cast<std::size_t>(k)];
        require(p.dim() == 1, ErrKind::BadInput, "product factors must be one-dimensional");
        require(p.mode() == ReprMode::standard, ErrKind::ModeMismatch,
                "product factors must be in standard mode");
        require(!p.nu().has_stable(), ErrKind::StableUnsupported,
                "an axis-embedded stable tail is not isotropic; factors must be atomic");
        A(k, k) = p.A()(0, 0);
        gamma[k] = p.gamma()[0];
        Eigen::VectorXd x = Eigen::VectorXd::Zero(d);
        for (const auto& [q, w] : p.nu().atomic().atoms()) {
            x[k] = q[0];
            atoms.add_atom(x, w);
        }
    }
    return CharTriplet(std::move(A), QuasiLevyMeasure(std::move(atoms)), std::move(gamma),
                       ReprMode::standard);
}

/// A characteristic exponent as a black box, tagged with where it came from.
struct CharExponentFn {
    enum class Provenance { from_triplet, user_supplied };

    std::function<std::complex<double>(const Eigen::VectorXd&)> eval;
    Provenance provenance = Provenance::user_supplied;
    int dim = 1;

    static CharExponentFn from_triplet(CharTriplet t) {
        CharExponentFn fn;
        fn.dim = t.dim();
        fn.provenance = Provenance::from_triplet;
        fn.eval = [t = std::move(t)](const Eigen::VectorXd& z) { return char_exponent(t, z); };
        return fn;
    }

    static CharExponentFn user_supplied(
        std::function<std::complex<double>(const Eigen::VectorXd&)> f, int dim) {
        CharExponentFn fn;
        fn.dim = dim;
        fn.provenance = Provenance::user_supplied;
        fn.eval = std::move(f);
        return fn;
    }
};

struct ProbeReport {
    enum class Verdict { converges, diverges, inconclusive };

    std::vector<double> t;
    std::vector<double> q;       ///< q(t) = -2 t^{-2} Re Psi(t z)
    Verdict verdict = Verdict::inconclusive;
    double limit = 0.0;          ///< gaussian form estimate, set when converges
};

inline const char* to_string(ProbeReport::Verdict v) {
    switch (v) {
        case ProbeReport::Verdict::converges:    return "converges";
        case ProbeReport::Verdict::diverges:     return "diverges";
        case ProbeReport::Verdict::inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

/// Scaling probe for the gaussian form: q(t) = -2 t^{-2} Re Psi(t z) tends to
/// <z, Az> for genuine exponents and blows up when no non-negative gaussian
/// part exists.  Divergence needs a 10x rise over max(1, q(t_min)) with a
/// monotone final decade; convergence needs the final decade flat within 5%.
inline ProbeReport gaussian_probe(const CharExponentFn& psi, const Eigen::VectorXd& z,
                                  const std::vector<double>& t_grid) {
    require(psi.eval != nullptr, ErrKind::BadInput, "probe needs an exponent");
    require(z.size() == psi.dim && z.norm() > 0.0, ErrKind::BadInput,
            "probe direction must be a nonzero vector of matching dimension");
    require(t_grid.size() >= 4, ErrKind::BadInput, "probe grid needs at least 4 points");
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        require(t_grid[i] > 0.0, ErrKind::BadInput, "probe grid must be positive");
        require(i == 0 || t_grid[i] > t_grid[i - 1], ErrKind::BadInput,
                "probe grid must be strictly increasing");
    }
    require(t_grid.back() >= 100.0 * t_grid.front() * (1.0 - 1e-12), ErrKind::BadInput,
            "probe grid must span at least two decades");

    ProbeReport rep;
    rep.t = t_grid;
    rep.q.reserve(t_grid.size());
    bool any_nan = false;
    for (double t : t_grid) {
        const double re = psi.eval(t * z).real();
        const double q = -2.0 * re / (t * t);
        if (std::isnan(q)) any_nan = true;
        rep.q.push_back(q);
    }

    const double t_last = t_grid.back();
    std::size_t decade_start = 0;
    while (decade_start + 1 < t_grid.size() &&
           t_grid[decade_start] < 0.1 * t_last * (1.0 - 1e-12))
        ++decade_start;

    bool monotone = true;
    double lo = rep.q[decade_start], hi = rep.q[decade_start];
    for (std::size_t i = decade_start; i < rep.q.size(); ++i) {
        if (i > decade_start && rep.q[i] < rep.q[i - 1]) monotone = false;
        lo = std::min(lo, rep.q[i]);
        hi = std::max(hi, rep.q[i]);
    }
    const double q_first = rep.q.front(), q_last = rep.q.back();

    if (any_nan) {
        rep.verdict = ProbeReport::Verdict::inconclusive;
    } else if (q_last > 10.0 * std::max(1.0, q_first) && monotone) {
        rep.verdict = ProbeReport::Verdict::diverges;
    } else if (std::isfinite(q_last) &&
               hi - lo <= std::max(0.05, 0.05 * std::abs(q_last))) {
        rep.verdict = ProbeReport::Verdict::converges;
        rep.limit = std::max(q_last, 0.0);
    }
    return rep;
}

}  // namespace qid
