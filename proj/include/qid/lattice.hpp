#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "detail/fft.hpp"
#include "detail/parallel.hpp"
#include "triplet.hpp"

namespace qid {

using MultiIndex = std::vector<long long>;

/// Probability mass function supported on the affine lattice M Z^d + b with
/// finitely many atoms.  The analyser works on the reduced integer pmf; M and
/// b only re-enter when results are mapped back to physical coordinates.
class LatticePMF {
  public:
    static constexpr double kMassTol = 1e-12;

    LatticePMF(Eigen::MatrixXd M, Eigen::VectorXd b, std::map<MultiIndex, double> probs)
        : M_(std::move(M)), b_(std::move(b)), probs_(std::move(probs)) {
        const int d = static_cast<int>(b_.size());
        require(d >= 1, ErrKind::BadInput, "lattice dimension must be positive");
        require(M_.rows() == d && M_.cols() == d, ErrKind::BadInput,
                "lattice map must be square of matching dimension");
        Eigen::FullPivLU<Eigen::MatrixXd> lu(M_);
        require(lu.isInvertible(), ErrKind::BadInput, "lattice map must be invertible");
        require(!probs_.empty(), ErrKind::BadInput, "pmf needs at least one atom");
        double total = 0.0;
        for (const auto& [k, p] : probs_) {
            require(static_cast<int>(k.size()) == d, ErrKind::BadInput,
                    "pmf index dimension mismatch");
            require(p > 0.0 && std::isfinite(p), ErrKind::BadInput,
                    "pmf probabilities must be positive");
            total += p;
            for (long long ki : k)
                radius_ = std::max(radius_, static_cast<int>(std::llabs(ki)));
        }
        require(std::abs(total - 1.0) <= kMassTol, ErrKind::BadInput,
                "pmf probabilities must sum to one");
    }

    static LatticePMF integer_lattice(int dim, std::map<MultiIndex, double> probs) {
        return LatticePMF(Eigen::MatrixXd::Identity(dim, dim), Eigen::VectorXd::Zero(dim),
                          std::move(probs));
    }

    int dim() const { return static_cast<int>(b_.size()); }
    const Eigen::MatrixXd& M() const { return M_; }
    const Eigen::VectorXd& b() const { return b_; }
    const std::map<MultiIndex, double>& probs() const { return probs_; }

    /// Support bound m = max |k_i| of the reduced integer pmf.
    int support_radius() const { return radius_; }

    /// Physical location of the atom with reduced index k.
    Eigen::VectorXd point(const MultiIndex& k) const {
        Eigen::VectorXd kv(dim());
        for (int i = 0; i < dim(); ++i) kv[i] = static_cast<double>(k[static_cast<std::size_t>(i)]);
        return M_ * kv + b_;
    }

  private:
    Eigen::MatrixXd M_;
    Eigen::VectorXd b_;
    std::map<MultiIndex, double> probs_;
    int radius_ = 0;
};

/// Characteristic function of the reduced integer pmf, an exact trigonometric
/// polynomial sum p_k e^{i<z,k>}.
inline std::complex<double> char_poly(const LatticePMF& pmf, const Eigen::VectorXd& z) {
    require(z.size() == pmf.dim(), ErrKind::BadInput, "frequency dimension mismatch");
    std::complex<double> s = 0.0;
    for (const auto& [k, p] : pmf.probs()) {
        double zk = 0.0;
        for (int i = 0; i < pmf.dim(); ++i)
            zk += z[i] * static_cast<double>(k[static_cast<std::size_t>(i)]);
        s += p * std::polar(1.0, zk);
    }
    return s;
}

/// Characteristic function of the affine lattice law itself.
inline std::complex<double> char_full(const LatticePMF& pmf, const Eigen::VectorXd& z) {
    return std::polar(1.0, pmf.b().dot(z)) * char_poly(pmf, pmf.M().transpose() * z);
}

namespace detail {

/// Values of the reduced characteristic function on the uniform torus grid
/// {2 pi j / N}, row major with the last axis fastest, computed exactly by a
/// zero-padded DFT (lattice wraparound is exact on the grid).
inline std::vector<cplx> lattice_grid_values(const LatticePMF& pmf, std::size_t N) {
    const int d = pmf.dim();
    std::size_t total = 1;
    for (int i = 0; i < d; ++i) total *= N;
    std::vector<cplx> a(total, cplx(0.0, 0.0));
    for (const auto& [k, p] : pmf.probs()) {
        std::size_t flat = 0;
        for (int i = 0; i < d; ++i) {
            const long long wrapped =
                ((k[static_cast<std::size_t>(i)] % static_cast<long long>(N)) +
                 static_cast<long long>(N)) % static_cast<long long>(N);
            flat = flat * N + static_cast<std::size_t>(wrapped);
        }
        a[flat] += p;
    }
    fft_nd(a, std::vector<std::size_t>(static_cast<std::size_t>(d), N), +1);
    return a;
}

inline std::vector<double> unflatten(std::size_t flat, int d, std::size_t N) {
    std::vector<double> j(static_cast<std::size_t>(d));
    for (int i = d; i-- > 0;) {
        j[static_cast<std::size_t>(i)] = static_cast<double>(flat % N);
        flat /= N;
    }
    return j;
}

}  // namespace detail

struct ZeroFreeCertificate {
    std::size_t N = 0;          ///< effective grid size per axis (power of two)
    double min_modulus = 0.0;
    double lipschitz = 0.0;     ///< gradient bound sum |k| p_k of the reduced pmf
    double threshold = 0.0;     ///< lipschitz times the grid cell half-diagonal
    bool certified = false;
    std::optional<Eigen::VectorXd> witness;           ///< reduced frequency of a zero
    std::optional<Eigen::VectorXd> witness_original;  ///< same zero for the affine law
    double witness_modulus = 0.0;
};

namespace detail {

/// Local minimisation of |char_poly| by damped Gauss-Newton on (Re, Im).
inline std::pair<Eigen::VectorXd, double> polish_zero(const LatticePMF& pmf,
                                                      Eigen::VectorXd z) {
    const int d = pmf.dim();
    Eigen::VectorXd best_z = z;
    double best = std::abs(char_poly(pmf, z));
    for (int iter = 0; iter < 120 && best > 1e-15; ++iter) {
        const std::complex<double> v = char_poly(pmf, z);
        Eigen::Vector2d F(v.real(), v.imag());
        Eigen::MatrixXd J(2, d);
        for (int j = 0; j < d; ++j) {
            std::complex<double> dv = 0.0;
            for (const auto& [k, p] : pmf.probs()) {
                double zk = 0.0;
                for (int i = 0; i < d; ++i)
                    zk += z[i] * static_cast<double>(k[static_cast<std::size_t>(i)]);
                dv += p * std::complex<double>(0.0, static_cast<double>(
                                                        k[static_cast<std::size_t>(j)])) *
                      std::polar(1.0, zk);
            }
            J(0, j) = dv.real();
            J(1, j) = dv.imag();
        }
        Eigen::VectorXd step = J.completeOrthogonalDecomposition().solve(-F);
        if (!step.allFinite() || step.norm() < 1e-16) break;
        double scale = 1.0;
        bool accepted = false;
        for (int h = 0; h < 25; ++h) {
            const Eigen::VectorXd cand = z + scale * step;
            const double m = std::abs(char_poly(pmf, cand));
            if (m < best) {
                z = cand;
                best = m;
                best_z = cand;
                accepted = true;
                break;
            }
            scale *= 0.5;
        }
        if (!accepted) break;
    }
    // wrap into [0, 2pi)
    static const double kTwoPi = 6.283185307179586476925286766559;
    for (int i = 0; i < d; ++i) {
        best_z[i] = std::fmod(best_z[i], kTwoPi);
        if (best_z[i] < 0.0) best_z[i] += kTwoPi;
    }
    return {best_z, best};
}

}  // namespace detail

/// Grid certification that the reduced characteristic function has no zero on
/// the torus: certified when the grid minimum clears the Lipschitz bound over
/// one cell half-diagonal.  A grid minimum that polishes below 1e-13 is
/// reported as a zero witness; otherwise an uncertified result has no witness
/// and the caller should retry with a larger N.
inline ZeroFreeCertificate certify_zero_free(const LatticePMF& pmf, std::size_t N) {
    const int d = pmf.dim();
    const int m = pmf.support_radius();
    require(N >= 4 * static_cast<std::size_t>(m + 1), ErrKind::BadInput,
            "certification grid must satisfy N >= 4(m+1)");
    const std::size_t Neff = detail::next_pow2(N);

    std::vector<detail::cplx> values = detail::lattice_grid_values(pmf, Neff);
    const std::size_t total = values.size();

    // deterministic parallel min scan: per-chunk argmins reduced in order
    const std::size_t chunks = std::min<std::size_t>(std::max<std::size_t>(
                                                         detail::max_threads() * 4, 1),
                                                     total);
    const std::size_t chunk_len = (total + chunks - 1) / chunks;
    std::vector<std::pair<double, std::size_t>> local(chunks,
                                                      {std::numeric_limits<double>::infinity(), 0});
    detail::parallel_for(chunks, [&](std::size_t c) {
        const std::size_t lo = c * chunk_len, hi = std::min(total, lo + chunk_len);
        double best = std::numeric_limits<double>::infinity();
        std::size_t arg = lo;
        for (std::size_t i = lo; i < hi; ++i) {
            const double m2 = std::abs(values[i]);
            if (m2 < best) {
                best = m2;
                arg = i;
            }
        }
        if (lo < hi) local[c] = {best, arg};
    });
    double min_mod = std::numeric_limits<double>::infinity();
    std::size_t argmin = 0;
    for (const auto& [v, i] : local) {
        if (v < min_mod) {
            min_mod = v;
            argmin = i;
        }
    }

    double lip = 0.0;
    for (const auto& [k, p] : pmf.probs()) {
        double n2 = 0.0;
        for (long long ki : k) n2 += static_cast<double>(ki) * static_cast<double>(ki);
        lip += p * std::sqrt(n2);
    }

    static const double kPi = 3.14159265358979323846;
    ZeroFreeCertificate cert;
    cert.N = Neff;
    cert.min_modulus = min_mod;
    cert.lipschitz = lip;
    cert.threshold = lip * kPi * std::sqrt(static_cast<double>(d)) / static_cast<double>(Neff);
    cert.certified = min_mod > cert.threshold;

    if (!cert.certified) {
        const std::vector<double> j = detail::unflatten(argmin, d, Neff);
        Eigen::VectorXd z0(d);
        for (int i = 0; i < d; ++i)
            z0[i] = 2.0 * kPi * j[static_cast<std::size_t>(i)] / static_cast<double>(Neff);
        auto [zw, mod] = detail::polish_zero(pmf, z0);
        if (mod < 1e-13) {
            cert.witness = zw;
            cert.witness_modulus = mod;
            cert.witness_original = pmf.M().transpose().fullPivLu().solve(zw).eval();
        }
    }
    return cert;
}

/// Distinguished logarithm samples of the reduced characteristic function on
/// the N^d torus grid, and the integer winding vector.
struct LogGrid {
    std::size_t N = 0;
    std::vector<std::complex<double>> values;  ///< log|.| + i (unwrapped phase), row major
    Eigen::VectorXi winding;
};

/// Phase-continuous logarithm with log(1) = 0 at the origin.  Unwrap order is
/// deterministic: the axis-1 ray from the origin first, then for each fixed
/// prefix a sweep of the next axis, i.e. each grid point takes its phase from
/// the neighbour below it on its last nonzero axis.  Any neighbour phase jump
/// of pi/2 or more aborts with GridTooCoarse.
inline LogGrid distinguished_log(const LatticePMF& pmf, std::size_t N) {
    const int d = pmf.dim();
    require(N >= 4 * static_cast<std::size_t>(pmf.support_radius() + 1), ErrKind::BadInput,
            "log grid must satisfy N >= 4(m+1)");
    const std::size_t Neff = detail::next_pow2(N);
    std::vector<detail::cplx> values = detail::lattice_grid_values(pmf, Neff);
    const std::size_t total = values.size();

    static const double kPi = 3.14159265358979323846;
    static const double kTwoPi = 6.283185307179586476925286766559;

    std::vector<std::size_t> stride(static_cast<std::size_t>(d), 1);
    for (int i = d - 1; i-- > 0;)
        stride[static_cast<std::size_t>(i)] = stride[static_cast<std::size_t>(i + 1)] * Neff;

    std::vector<double> phase(total, 0.0);
    std::vector<std::size_t> idx(static_cast<std::size_t>(d), 0);
    for (std::size_t flat = 1; flat < total; ++flat) {
        // advance the running multi-index (row major, last axis fastest)
        for (int a = d; a-- > 0;) {
            if (++idx[static_cast<std::size_t>(a)] < Neff) break;
            idx[static_cast<std::size_t>(a)] = 0;
        }
        int last = d - 1;
        while (idx[static_cast<std::size_t>(last)] == 0) --last;  // flat > 0, some axis nonzero
        const std::size_t pred = flat - stride[static_cast<std::size_t>(last)];

        const detail::cplx ratio = values[flat] / values[pred];
        require(std::abs(values[flat]) > 0.0, ErrKind::ZeroFound,
                "characteristic function vanishes on the grid");
        const double jump = std::arg(ratio);
        require(std::abs(jump) < 0.5 * kPi, ErrKind::GridTooCoarse,
                "phase step of pi/2 or more between grid neighbours; raise N");
        phase[flat] = phase[pred] + jump;
    }

    // winding per axis: total principal-branch phase around the axis loop
    Eigen::VectorXi winding(d);
    for (int a = 0; a < d; ++a) {
        double loop = 0.0;
        std::size_t prev = 0;
        for (std::size_t j = 1; j <= Neff; ++j) {
            const std::size_t cur = (j % Neff) * stride[static_cast<std::size_t>(a)];
            const double jump = std::arg(values[cur] / values[prev]);
            require(std::abs(jump) < 0.5 * kPi, ErrKind::GridTooCoarse,
                    "phase step of pi/2 or more between grid neighbours; raise N");
            loop += jump;
            prev = cur;
        }
        const double w = loop / kTwoPi;
        const long long wi = std::llround(w);
        require(std::abs(w - static_cast<double>(wi)) < 1e-6, ErrKind::GridTooCoarse,
                "axis winding is not an integer; raise N");
        winding[a] = static_cast<int>(wi);
    }

    LogGrid out;
    out.N = Neff;
    out.winding = winding;
    out.values.resize(total);
    for (std::size_t flat = 0; flat < total; ++flat)
        out.values[flat] = std::complex<double>(std::log(std::abs(values[flat])), phase[flat]);
    return out;
}

struct ExtractionReport {
    std::size_t N = 0;
    double mass_tol = 0.0;
    std::size_t kept_atoms = 0;
    double max_imag = 0.0;        ///< largest |Im c_k| over the resolved band
    double alias_residual = 0.0;  ///< |c_0 + sum of in-band c_k|, should vanish
    bool alias_warning = false;
    double discarded_mass = 0.0;  ///< below-tolerance plus out-of-band coefficient mass
};

struct Extraction {
    CharTriplet triplet;
    Eigen::VectorXi winding;
    ExtractionReport report;
};

/// Recovers the characteristic triplet of a lattice law from log samples: the
/// winding term is split off as the integer drift, the remaining periodic part
/// is inverted by DFT and its Fourier coefficients are the quasi-Levy masses.
/// Precondition: certify_zero_free succeeded for this pmf at this N.
inline Extraction extract_triplet(const LatticePMF& pmf, std::size_t N,
                                  double mass_tol = 1e-10) {
    require(mass_tol > 0.0, ErrKind::BadInput, "mass tolerance must be positive");
    const int d = pmf.dim();
    LogGrid lg = distinguished_log(pmf, N);
    const std::size_t Neff = lg.N;
    const std::size_t total = lg.values.size();

    static const double kTwoPi = 6.283185307179586476925286766559;

    // subtract the linear winding phase i<w, z_j>; what is left is periodic
    std::vector<detail::cplx> psi(total);
    {
        std::vector<std::size_t> idx(static_cast<std::size_t>(d), 0);
        for (std::size_t flat = 0; flat < total; ++flat) {
            double wz = 0.0;
            for (int a = 0; a < d; ++a)
                wz += lg.winding[a] * kTwoPi *
                      static_cast<double>(idx[static_cast<std::size_t>(a)]) /
                      static_cast<double>(Neff);
            psi[flat] = lg.values[flat] - detail::cplx(0.0, wz);
            for (int a = d; a-- > 0;) {
                if (++idx[static_cast<std::size_t>(a)] < Neff) break;
                idx[static_cast<std::size_t>(a)] = 0;
            }
        }
    }

    detail::fft_nd(psi, std::vector<std::size_t>(static_cast<std::size_t>(d), Neff), -1);
    const double inv_total = 1.0 / static_cast<double>(total);
    for (auto& c : psi) c *= inv_total;

    ExtractionReport rep;
    rep.N = Neff;
    rep.mass_tol = mass_tol;

    AtomicSignedMeasure atoms(d);
    std::complex<double> band_sum = 0.0;
    std::complex<double> c0 = 0.0;
    const long long half = static_cast<long long>(Neff) / 2;

    std::vector<std::size_t> idx(static_cast<std::size_t>(d), 0);
    Eigen::VectorXd kv(d);
    for (std::size_t flat = 0; flat < total; ++flat) {
        bool in_band = true;
        bool at_origin = true;
        for (int a = 0; a < d; ++a) {
            const long long raw = static_cast<long long>(idx[static_cast<std::size_t>(a)]);
            const long long k = raw < half ? raw : raw - static_cast<long long>(Neff);
            if (std::llabs(k) >= half) in_band = false;
            if (k != 0) at_origin = false;
            kv[a] = static_cast<double>(k);
        }
        const std::complex<double> c = psi[flat];
        if (in_band) {
            rep.max_imag = std::max(rep.max_imag, std::abs(c.imag()));
            if (at_origin) {
                c0 = c;
            } else {
                band_sum += c;
                if (std::abs(c) >= mass_tol) {
                    atoms.add_atom((pmf.M() * kv).eval(), c.real());
                    ++rep.kept_atoms;
                } else {
                    rep.discarded_mass += std::abs(c);
                }
            }
        } else if (!at_origin) {
            rep.discarded_mass += std::abs(c);
        }
        for (int a = d; a-- > 0;) {
            if (++idx[static_cast<std::size_t>(a)] < Neff) break;
            idx[static_cast<std::size_t>(a)] = 0;
        }
    }

    require(rep.max_imag <= 100.0 * mass_tol, ErrKind::ImaginaryLeak,
            "imaginary part of extracted masses exceeds its bound; unwrap failed");
    rep.alias_residual = std::abs(c0 + band_sum);
    rep.alias_warning = rep.alias_residual > mass_tol;

    QuasiLevyMeasure nu(atoms.without_origin());
    nu.set_tail_bound(rep.discarded_mass + rep.alias_residual);

    Eigen::VectorXd gamma0 = pmf.M() * lg.winding.cast<double>() + pmf.b();
    CharTriplet triplet(Eigen::MatrixXd::Zero(d, d), std::move(nu), std::move(gamma0),
                        ReprMode::drift);
    return Extraction{std::move(triplet), lg.winding, rep};
}

/// Default analysis grid: max(64, 8(m+1)) per axis, rounded up to a power of two.
inline std::size_t default_grid_size(const LatticePMF& pmf) {
    return detail::next_pow2(std::max<std::size_t>(
        64, 8 * static_cast<std::size_t>(pmf.support_radius() + 1)));
}

struct AnalyzeResult {
    ZeroFreeCertificate certificate;
    Extraction extraction;
};

/// Full pipeline: certify the reduced characteristic function is zero free,
/// then extract the triplet.  Zero witnesses and uncertified grids raise.
inline AnalyzeResult analyze_pmf(const LatticePMF& pmf, std::size_t N = 0,
                                 double mass_tol = 1e-10) {
    if (N == 0) N = default_grid_size(pmf);
    ZeroFreeCertificate cert = certify_zero_free(pmf, N);
    if (!cert.certified) {
        if (cert.witness) {
            std::string loc = "(";
            for (int i = 0; i < cert.witness->size(); ++i)
                loc += (i ? ", " : "") + std::to_string((*cert.witness)[i]);
            loc += ")";
            fail(ErrKind::ZeroFound,
                 "zero of the characteristic function at z = " + loc +
                     "; the law is not quasi-infinitely divisible on this lattice");
        }
        fail(ErrKind::Inconclusive,
             "grid minimum " + std::to_string(cert.min_modulus) +
                 " is below the certification threshold " + std::to_string(cert.threshold) +
                 "; raise N");
    }
    Extraction ex = extract_triplet(pmf, cert.N, mass_tol);
    return AnalyzeResult{std::move(cert), std::move(ex)};
}

struct ProjectionCheck {
    bool id = false;            ///< projection has a non-negative quasi-Levy measure
    double min_weight = 0.0;    ///< most negative projected atom weight
    std::optional<std::pair<double, double>> witness;  ///< (location, weight) when not id
};

/// One-dimensional Cramer-Wold slice: pushes the quasi-Levy atoms forward
/// under x -> <a, x> and declares infinite divisibility when no projected atom
/// is more negative than -mass_tol.
inline ProjectionCheck projection_id_check(const CharTriplet& t, const Eigen::VectorXi& a,
                                           double mass_tol = 1e-10) {
    require(a.size() == t.dim(), ErrKind::BadInput, "projection vector dimension mismatch");
    require(!t.nu().has_stable(), ErrKind::StableUnsupported,
            "projection check expects a finite atomic measure");
    Eigen::MatrixXd row(1, t.dim());
    row.row(0) = a.cast<double>();
    const AtomicSignedMeasure proj = pushforward(t.nu().atomic(), row, /*drop_origin=*/true);

    ProjectionCheck out;
    out.id = true;
    double min_w = 0.0;
    const Point* min_p = nullptr;
    for (const auto& [p, w] : proj.atoms()) {
        if (w < min_w) {
            min_w = w;
            min_p = &p;
        }
    }
    out.min_weight = min_w;
    if (min_w < -mass_tol) {
        out.id = false;
        out.witness = std::make_pair((*min_p)[0], min_w);
    }
    return out;
}

}  // namespace qid
