#pragma once

#include <Eigen/Core>
#include <cmath>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "stable.hpp"

namespace qid {

/// Atom location, stored as snapped coordinates so map keys compare exactly.
using Point = std::vector<double>;

inline Eigen::Map<const Eigen::VectorXd> point_view(const Point& p) {
    return Eigen::Map<const Eigen::VectorXd>(p.data(), static_cast<Eigen::Index>(p.size()));
}

inline double point_norm(const Point& p) { return point_view(p).norm(); }

/// Finite signed measure on R^d held as a sparse atom map.  This is the
/// computable core of a quasi-Levy measure: convolution powers, pushforwards
/// and Jordan splits all stay inside this class.
///
/// Atom keys are snapped to a fixed grid resolution before comparison, and
/// atoms whose accumulated weight falls below the prune threshold are removed,
/// so the map stays canonical under reordering of insertions.
class AtomicSignedMeasure {
  public:
    static constexpr double kDefaultSnap = 1e-12;
    static constexpr double kDefaultPrune = 1e-15;

    explicit AtomicSignedMeasure(int dim, double snap = kDefaultSnap,
                                 double prune = kDefaultPrune)
        : dim_(dim), snap_(snap), prune_(prune) {
        require(dim >= 1, ErrKind::BadInput, "measure dimension must be positive");
        require(snap > 0.0 && prune >= 0.0, ErrKind::BadInput, "invalid snap/prune tolerances");
    }

    int dim() const { return dim_; }
    double snap() const { return snap_; }
    double prune() const { return prune_; }

    const std::map<Point, double>& atoms() const { return atoms_; }
    std::size_t size() const { return atoms_.size(); }
    bool empty() const { return atoms_.empty(); }

    Point snap_point(const Eigen::VectorXd& x) const {
        require(x.size() == dim_, ErrKind::BadInput, "point dimension mismatch");
        Point p(static_cast<std::size_t>(dim_));
        for (int i = 0; i < dim_; ++i) {
            const double xi = x[i];
            require(std::isfinite(xi), ErrKind::BadInput, "atom coordinates must be finite");
            double y = std::round(xi / snap_) * snap_;
            if (!std::isfinite(y)) y = xi;
            if (y == 0.0) y = 0.0;  // normalise -0.0
            p[static_cast<std::size_t>(i)] = y;
        }
        return p;
    }

    /// Accumulates weight w at x (after snapping); prunes the atom when the
    /// accumulated weight is below the prune threshold.
    void add_atom(const Eigen::VectorXd& x, double w) { accumulate(snap_point(x), w); }

    void add_atom(std::initializer_list<double> x, double w) {
        add_atom(Eigen::Map<const Eigen::VectorXd>(x.begin(),
                                                   static_cast<Eigen::Index>(x.size())),
                 w);
    }

    double mass_at(const Eigen::VectorXd& x) const {
        auto it = atoms_.find(snap_point(x));
        return it == atoms_.end() ? 0.0 : it->second;
    }

    double mass_at_origin() const {
        auto it = atoms_.find(Point(static_cast<std::size_t>(dim_), 0.0));
        return it == atoms_.end() ? 0.0 : it->second;
    }

    double total_mass() const {
        double s = 0.0;
        for (const auto& [p, w] : atoms_) s += w;
        return s;
    }

    double total_variation() const {
        double s = 0.0;
        for (const auto& [p, w] : atoms_) s += std::abs(w);
        return s;
    }

    bool has_negative_atoms() const {
        for (const auto& [p, w] : atoms_)
            if (w < 0.0) return true;
        return false;
    }

    AtomicSignedMeasure without_origin() const {
        AtomicSignedMeasure out(*this);
        out.atoms_.erase(Point(static_cast<std::size_t>(dim_), 0.0));
        return out;
    }

    /// Jordan decomposition (plus, minus); both parts are non-negative and
    /// plus - minus reproduces the measure.
    std::pair<AtomicSignedMeasure, AtomicSignedMeasure> jordan() const {
        AtomicSignedMeasure plus(dim_, snap_, prune_), minus(dim_, snap_, prune_);
        for (const auto& [p, w] : atoms_) {
            if (w > 0.0)
                plus.atoms_.emplace(p, w);
            else
                minus.atoms_.emplace(p, -w);
        }
        return {plus, minus};
    }

    AtomicSignedMeasure scaled(double c) const {
        AtomicSignedMeasure out(dim_, snap_, prune_);
        if (c == 0.0) return out;
        for (const auto& [p, w] : atoms_) out.accumulate(p, c * w);
        return out;
    }

    AtomicSignedMeasure& operator+=(const AtomicSignedMeasure& other) {
        require(other.dim_ == dim_, ErrKind::BadInput, "dimension mismatch in measure sum");
        for (const auto& [p, w] : other.atoms_) accumulate(snapped_copy(p), w);
        return *this;
    }

    friend AtomicSignedMeasure operator+(AtomicSignedMeasure a, const AtomicSignedMeasure& b) {
        a += b;
        return a;
    }

    friend AtomicSignedMeasure convolve_atomic(const AtomicSignedMeasure& a,
                                               const AtomicSignedMeasure& b);
    friend AtomicSignedMeasure pushforward(const AtomicSignedMeasure& m,
                                           const Eigen::MatrixXd& M, bool drop_origin);
    friend AtomicSignedMeasure translate(const AtomicSignedMeasure& m,
                                         const Eigen::VectorXd& shift);

  private:
    int dim_;
    double snap_, prune_;
    std::map<Point, double> atoms_;

    Point snapped_copy(const Point& p) const {
        return snap_point(Eigen::Map<const Eigen::VectorXd>(
            p.data(), static_cast<Eigen::Index>(p.size())));
    }

    void accumulate(Point p, double w) {
        require(std::isfinite(w), ErrKind::BadInput, "atom weight must be finite");
        auto [it, inserted] = atoms_.try_emplace(std::move(p), w);
        if (!inserted) it->second += w;
        if (std::abs(it->second) < prune_) atoms_.erase(it);
    }
};

/// Convolution of two finite atomic measures: atoms at pairwise sums of
/// locations, weights multiplied, collisions accumulated.
inline AtomicSignedMeasure convolve_atomic(const AtomicSignedMeasure& a,
                                           const AtomicSignedMeasure& b) {
    require(a.dim() == b.dim(), ErrKind::BadInput, "dimension mismatch in convolution");
    AtomicSignedMeasure out(a.dim(), a.snap(), a.prune());
    Eigen::VectorXd x(a.dim());
    for (const auto& [pa, wa] : a.atoms()) {
        for (const auto& [pb, wb] : b.atoms()) {
            for (int i = 0; i < a.dim(); ++i) x[i] = pa[static_cast<std::size_t>(i)] +
                                                     pb[static_cast<std::size_t>(i)];
            out.accumulate(out.snap_point(x), wa * wb);
        }
    }
    return out;
}

/// Image measure under x -> Mx.  M may be rectangular (n x d).  Mass landing
/// at the origin is discarded when drop_origin is set, matching restriction to
/// the punctured space.
inline AtomicSignedMeasure pushforward(const AtomicSignedMeasure& m, const Eigen::MatrixXd& M,
                                       bool drop_origin) {
    require(M.cols() == m.dim(), ErrKind::BadInput, "matrix/measure dimension mismatch");
    const int n = static_cast<int>(M.rows());
    AtomicSignedMeasure out(n, m.snap(), m.prune());
    for (const auto& [p, w] : m.atoms()) {
        const Eigen::VectorXd y = M * point_view(p);
        Point key = out.snap_point(y);
        if (drop_origin && point_norm(key) == 0.0) continue;
        out.accumulate(std::move(key), w);
    }
    return out;
}

inline AtomicSignedMeasure translate(const AtomicSignedMeasure& m, const Eigen::VectorXd& shift) {
    require(shift.size() == m.dim(), ErrKind::BadInput, "shift dimension mismatch");
    AtomicSignedMeasure out(m.dim(), m.snap(), m.prune());
    for (const auto& [p, w] : m.atoms())
        out.accumulate(out.snap_point(point_view(p) + shift), w);
    return out;
}

/// Quasi-Levy measure: finite signed atomic part plus an optional isotropic
/// stable tail.  No atom may sit at the origin; drop it explicitly before
/// construction (Jordan parts of the atomic piece and the stable tail give
/// nu+ and nu-, the stable tail always counting as positive).
class QuasiLevyMeasure {
  public:
    explicit QuasiLevyMeasure(AtomicSignedMeasure atomic,
                              std::optional<StableTail> stable_tail = std::nullopt)
        : atomic_(std::move(atomic)), stable_(std::move(stable_tail)) {
        require(atomic_.mass_at_origin() == 0.0, ErrKind::BadInput,
                "quasi-Levy measures assign no mass to the origin");
        if (stable_) stable::validate(*stable_);
    }

    static QuasiLevyMeasure zero(int dim) { return QuasiLevyMeasure(AtomicSignedMeasure(dim)); }

    int dim() const { return atomic_.dim(); }
    const AtomicSignedMeasure& atomic() const { return atomic_; }
    const std::optional<StableTail>& stable_tail() const { return stable_; }
    bool has_stable() const { return stable_.has_value(); }

    /// Total-variation mass possibly discarded by a series truncation that
    /// produced this measure; zero for exact constructions.
    double tail_bound() const { return tail_bound_; }
    void set_tail_bound(double b) {
        require(b >= 0.0 && std::isfinite(b), ErrKind::BadInput, "invalid tail bound");
        tail_bound_ = b;
    }

    AtomicSignedMeasure atomic_plus() const { return atomic_.jordan().first; }
    AtomicSignedMeasure atomic_minus() const { return atomic_.jordan().second; }

    /// int (1 ^ |x|^2) d|nu|, finite by construction; closed form for the
    /// stable part.
    double one_wedge_total() const {
        double s = 0.0;
        for (const auto& [p, w] : atomic_.atoms()) {
            const double n2 = point_view(p).squaredNorm();
            s += std::abs(w) * std::min(1.0, n2);
        }
        if (stable_) s += stable::one_wedge(dim(), *stable_);
        return s;
    }

    friend QuasiLevyMeasure add(const QuasiLevyMeasure& a, const QuasiLevyMeasure& b) {
        require(a.dim() == b.dim(), ErrKind::BadInput, "dimension mismatch in measure sum");
        std::optional<StableTail> st;
        if (a.stable_ && b.stable_) {
            require(a.stable_->alpha == b.stable_->alpha, ErrKind::Unsupported,
                    "cannot combine stable tails with different indices");
            st = StableTail{a.stable_->alpha, a.stable_->C + b.stable_->C};
        } else if (a.stable_) {
            st = a.stable_;
        } else if (b.stable_) {
            st = b.stable_;
        }
        QuasiLevyMeasure out(a.atomic_ + b.atomic_, st);
        out.tail_bound_ = a.tail_bound_ + b.tail_bound_;
        return out;
    }

  private:
    AtomicSignedMeasure atomic_;
    std::optional<StableTail> stable_;
    double tail_bound_ = 0.0;
};

}  // namespace qid
