#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <json.hpp>
#include <string>
#include <utility>
#include <vector>

#include "convergence.hpp"
#include "cuppens.hpp"
#include "density.hpp"
#include "lattice.hpp"
#include "moments.hpp"
#include "support.hpp"
#include "triplet.hpp"

namespace qid {

/// Insertion-ordered JSON keeps output byte-identical run to run.
using json = nlohmann::ordered_json;

namespace detail {

inline json vec_to_json(const Eigen::VectorXd& v) {
    json a = json::array();
    for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

inline Eigen::VectorXd vec_from_json(const json& a, const char* what) {
    require(a.is_array(), ErrKind::BadInput, std::string(what) + " must be an array");
    Eigen::VectorXd v(static_cast<int>(a.size()));
    int i = 0;
    for (const auto& x : a) {
        require(x.is_number(), ErrKind::BadInput, std::string(what) + " entries must be numbers");
        v[i++] = x.get<double>();
    }
    return v;
}

inline json mat_to_json(const Eigen::MatrixXd& m) {
    json a = json::array();
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) a.push_back(m(i, j));
    return a;
}

inline Eigen::MatrixXd mat_from_json(const json& a, int d, const char* what) {
    require(a.is_array() && static_cast<int>(a.size()) == d * d, ErrKind::BadInput,
            std::string(what) + " must be a row-major array of d*d numbers");
    Eigen::MatrixXd m(d, d);
    int k = 0;
    for (const auto& x : a) {
        require(x.is_number(), ErrKind::BadInput, std::string(what) + " entries must be numbers");
        m(k / d, k % d) = x.get<double>();
        ++k;
    }
    return m;
}

inline json dvec_to_json(const std::vector<double>& v) {
    json a = json::array();
    for (double x : v) {
        if (std::isfinite(x))
            a.push_back(x);
        else
            a.push_back(nullptr);
    }
    return a;
}

}  // namespace detail

// ---- measures -------------------------------------------------------------

inline json measure_to_json(const QuasiLevyMeasure& nu) {
    json j;
    j["dim"] = nu.dim();
    json atoms = json::array();
    for (const auto& [p, w] : nu.atomic().atoms()) {
        json row = json::array();
        for (double x : p) row.push_back(x);
        row.push_back(w);
        atoms.push_back(std::move(row));
    }
    j["atoms"] = std::move(atoms);
    if (nu.has_stable())
        j["stable"] = {{"alpha", nu.stable_tail()->alpha}, {"C", nu.stable_tail()->C}};
    else
        j["stable"] = nullptr;
    j["tail_bound"] = nu.tail_bound();
    return j;
}

inline AtomicSignedMeasure atomic_from_json(const json& j) {
    require(j.is_object() && j.contains("dim") && j["dim"].is_number_integer(),
            ErrKind::BadInput, "measure needs an integer 'dim'");
    const int d = j["dim"].get<int>();
    require(d >= 1, ErrKind::BadInput, "measure dimension must be positive");
    AtomicSignedMeasure m(d);
    require(j.contains("atoms") && j["atoms"].is_array(), ErrKind::BadInput,
            "measure needs an 'atoms' array");
    for (const auto& row : j["atoms"]) {
        require(row.is_array() && static_cast<int>(row.size()) == d + 1, ErrKind::BadInput,
                "each atom row must hold d coordinates and a weight");
        Eigen::VectorXd x(d);
        for (int i = 0; i < d; ++i) {
            require(row[static_cast<std::size_t>(i)].is_number(), ErrKind::BadInput,
                    "atom coordinates must be numbers");
            x[i] = row[static_cast<std::size_t>(i)].get<double>();
        }
        require(row[static_cast<std::size_t>(d)].is_number(), ErrKind::BadInput,
                "atom weight must be a number");
        m.add_atom(x, row[static_cast<std::size_t>(d)].get<double>());
    }
    return m;
}

inline QuasiLevyMeasure measure_from_json(const json& j) {
    AtomicSignedMeasure atoms = atomic_from_json(j);
    std::optional<StableTail> st;
    if (j.contains("stable") && !j["stable"].is_null()) {
        const json& s = j["stable"];
        require(s.is_object() && s.contains("alpha") && s.contains("C"), ErrKind::BadInput,
                "stable part needs 'alpha' and 'C'");
        st = StableTail{s["alpha"].get<double>(), s["C"].get<double>()};
        stable::validate(*st);
    }
    QuasiLevyMeasure nu(std::move(atoms), st);
    if (j.contains("tail_bound")) nu.set_tail_bound(j["tail_bound"].get<double>());
    return nu;
}

// ---- triplets ---------------------------------------------------------------

inline json triplet_to_json(const CharTriplet& t) {
    json j;
    j["dim"] = t.dim();
    j["mode"] = to_string(t.mode());
    j["A"] = detail::mat_to_json(t.A());
    j["gamma"] = detail::vec_to_json(t.gamma());
    j["nu"] = measure_to_json(t.nu());
    return j;
}

inline CharTriplet triplet_from_json(const json& j) {
    require(j.is_object(), ErrKind::BadInput, "triplet must be an object");
    for (const char* key : {"dim", "mode", "A", "gamma", "nu"})
        require(j.contains(key), ErrKind::BadInput,
                std::string("triplet needs '") + key + "'");
    const int d = j["dim"].get<int>();
    require(d >= 1, ErrKind::BadInput, "triplet dimension must be positive");
    const ReprMode mode = mode_from_string(j["mode"].get<std::string>());
    Eigen::MatrixXd A = detail::mat_from_json(j["A"], d, "A");
    Eigen::VectorXd gamma = detail::vec_from_json(j["gamma"], "gamma");
    require(gamma.size() == d, ErrKind::BadInput, "gamma length must equal dim");
    QuasiLevyMeasure nu = measure_from_json(j["nu"]);
    require(nu.dim() == d, ErrKind::BadInput, "nu dimension must equal dim");
    return validate(CharTriplet(std::move(A), std::move(nu), std::move(gamma), mode));
}

// ---- lattice pmfs -----------------------------------------------------------

inline json pmf_to_json(const LatticePMF& pmf) {
    json j;
    j["dim"] = pmf.dim();
    j["M"] = detail::mat_to_json(pmf.M());
    j["b"] = detail::vec_to_json(pmf.b());
    json probs = json::array();
    for (const auto& [k, p] : pmf.probs()) {
        json row = json::array();
        for (long long ki : k) row.push_back(ki);
        row.push_back(p);
        probs.push_back(std::move(row));
    }
    j["probs"] = std::move(probs);
    return j;
}

inline LatticePMF pmf_from_json(const json& j) {
    require(j.is_object() && j.contains("dim") && j["dim"].is_number_integer(),
            ErrKind::BadInput, "pmf needs an integer 'dim'");
    const int d = j["dim"].get<int>();
    require(d >= 1, ErrKind::BadInput, "pmf dimension must be positive");
    Eigen::MatrixXd M = j.contains("M") ? detail::mat_from_json(j["M"], d, "M")
                                        : Eigen::MatrixXd::Identity(d, d);
    Eigen::VectorXd b =
        j.contains("b") ? detail::vec_from_json(j["b"], "b") : Eigen::VectorXd::Zero(d);
    require(b.size() == d, ErrKind::BadInput, "b length must equal dim");
    require(j.contains("probs") && j["probs"].is_array(), ErrKind::BadInput,
            "pmf needs a 'probs' array");
    std::map<MultiIndex, double> probs;
    for (const auto& row : j["probs"]) {
        require(row.is_array() && static_cast<int>(row.size()) == d + 1, ErrKind::BadInput,
                "each probs row must hold d integer indices and a probability");
        MultiIndex k(static_cast<std::size_t>(d));
        for (int i = 0; i < d; ++i) {
            const auto& e = row[static_cast<std::size_t>(i)];
            require(e.is_number_integer(), ErrKind::BadInput,
                    "pmf indices must be integers");
            k[static_cast<std::size_t>(i)] = e.get<long long>();
        }
        require(row[static_cast<std::size_t>(d)].is_number(), ErrKind::BadInput,
                "pmf probabilities must be numbers");
        const double p = row[static_cast<std::size_t>(d)].get<double>();
        require(probs.emplace(std::move(k), p).second, ErrKind::BadInput,
                "duplicate pmf index");
    }
    return LatticePMF(std::move(M), std::move(b), std::move(probs));
}

// ---- cones -----------------------------------------------------------------

inline json cone_to_json(const Cone& K) {
    json normals = json::array();
    for (const auto& n : K.normals()) normals.push_back(detail::vec_to_json(n));
    return json{{"normals", std::move(normals)}};
}

inline Cone cone_from_json(const json& j) {
    require(j.is_object() && j.contains("normals") && j["normals"].is_array() &&
                !j["normals"].empty(),
            ErrKind::BadInput, "cone needs a non-empty 'normals' array");
    std::vector<Eigen::VectorXd> normals;
    for (const auto& n : j["normals"]) normals.push_back(detail::vec_from_json(n, "normal"));
    const int d = static_cast<int>(normals.front().size());
    return Cone(d, std::move(normals));
}

// ---- reports ----------------------------------------------------------------

inline json certificate_to_json(const ZeroFreeCertificate& c) {
    json j;
    j["N"] = c.N;
    j["min_modulus"] = c.min_modulus;
    j["lipschitz"] = c.lipschitz;
    j["threshold"] = c.threshold;
    j["certified"] = c.certified;
    j["witness"] = c.witness ? detail::vec_to_json(*c.witness) : json(nullptr);
    j["witness_original"] =
        c.witness_original ? detail::vec_to_json(*c.witness_original) : json(nullptr);
    j["witness_modulus"] = c.witness ? json(c.witness_modulus) : json(nullptr);
    return j;
}

inline json extraction_to_json(const Extraction& ex) {
    json j;
    j["triplet"] = triplet_to_json(ex.triplet);
    json w = json::array();
    for (int i = 0; i < ex.winding.size(); ++i) w.push_back(ex.winding[i]);
    j["winding"] = std::move(w);
    j["report"] = {{"N", ex.report.N},
                   {"mass_tol", ex.report.mass_tol},
                   {"kept_atoms", ex.report.kept_atoms},
                   {"max_imag", ex.report.max_imag},
                   {"alias_residual", ex.report.alias_residual},
                   {"alias_warning", ex.report.alias_warning},
                   {"discarded_mass", ex.report.discarded_mass}};
    return j;
}

inline json analyze_to_json(const AnalyzeResult& r) {
    json j = extraction_to_json(r.extraction);
    json out;
    out["certificate"] = certificate_to_json(r.certificate);
    out["triplet"] = std::move(j["triplet"]);
    out["winding"] = std::move(j["winding"]);
    out["report"] = std::move(j["report"]);
    return out;
}

inline json cuppens_to_json(const CuppensResult& r) {
    json j;
    j["triplet"] = triplet_to_json(r.triplet);
    j["K"] = r.K;
    j["r"] = r.r;
    j["tail_bound"] = r.tail_bound;
    j["rho_total_mass"] = r.rho_total_mass;
    j["origin_mass"] = r.origin_mass;
    j["mass_residual"] = r.mass_residual;
    j["lambda"] = r.lambda;
    j["tol"] = r.tol;
    return j;
}

inline json density_report_to_json(const DensityReport& rep) {
    json j;
    j["verdict"] = to_string(rep.verdict);
    j["trend_ratio"] = rep.trend_ratio;
    j["trend_floor"] = rep.trend_floor;
    j["r"] = detail::dvec_to_json(rep.r);
    j["G_plus"] = detail::dvec_to_json(rep.G_plus);
    j["G_minus"] = detail::dvec_to_json(rep.G_minus);
    j["g_plus"] = detail::dvec_to_json(rep.g_plus);
    j["g_minus"] = detail::dvec_to_json(rep.g_minus);
    j["nu_minus_tail"] = detail::dvec_to_json(rep.nu_minus_tail);
    j["index"] = detail::dvec_to_json(rep.index);
    return j;
}

inline json orey_report_to_json(const OreyReport& rep) {
    json j;
    j["beta"] = rep.beta;
    j["holds_on_grid"] = rep.holds_on_grid;
    j["r"] = detail::dvec_to_json(rep.r);
    j["a_plus"] = detail::dvec_to_json(rep.a_plus);
    j["a_minus"] = detail::dvec_to_json(rep.a_minus);
    return j;
}

inline json probe_report_to_json(const ProbeReport& rep) {
    json j;
    j["t"] = detail::dvec_to_json(rep.t);
    j["q"] = detail::dvec_to_json(rep.q);
    j["verdict"] = to_string(rep.verdict);
    j["limit"] =
        rep.verdict == ProbeReport::Verdict::converges ? json(rep.limit) : json(nullptr);
    return j;
}

inline json cone_check_to_json(const ConeCheck& c) {
    json j;
    j["a_zero"] = c.a_zero;
    j["nu_plus_in_K"] = c.nu_plus_in_K;
    j["nu_minus_in_K"] = c.nu_minus_in_K;
    j["small_jumps_integrable"] = c.small_jumps_integrable;
    j["cond_i"] = c.cond_i;
    j["cond_ii"] = c.cond_ii;
    j["drift_in_K"] = c.drift_in_K;
    j["conclusion"] = to_string(c.conclusion);
    return j;
}

inline json projection_check_to_json(const ProjectionCheck& c) {
    json j;
    j["id"] = c.id;
    j["min_weight"] = c.min_weight;
    j["witness"] = c.witness ? json{{"location", c.witness->first},
                                    {"weight", c.witness->second}}
                             : json(nullptr);
    return j;
}

inline json exp_moment_to_json(const ExpMomentResult& r) {
    json j;
    j["value"] = r.value;
    j["exponent"] = r.exponent;
    j["hypothesis_held"] = r.hypothesis_held;
    j["resummed"] = r.resummed;
    j["resum_err"] = r.resum_err;
    j["tail_warning"] = r.tail_warning;
    return j;
}

inline json convergence_report_to_json(const ConvergenceReport& rep) {
    json j;
    j["eps_grid"] = detail::dvec_to_json(rep.eps_grid);
    json fam = json::array();
    for (const RampFn& f : rep.family) fam.push_back(json{{"a", f.a}, {"b", f.b}});
    j["family"] = std::move(fam);
    json rows = json::array();
    for (const ConvergenceRow& r : rep.rows) {
        json row;
        row["label"] = r.label;
        row["f_plus"] = detail::dvec_to_json(r.f_plus);
        row["f_minus"] = detail::dvec_to_json(r.f_minus);
        row["f_dev"] = detail::dvec_to_json(r.f_dev);
        row["a_dev"] = detail::dvec_to_json(r.a_dev);
        row["small_ball"] = detail::dvec_to_json(r.small_ball);
        row["gamma_dist"] = r.gamma_dist;
        rows.push_back(std::move(row));
    }
    j["rows"] = std::move(rows);
    j["trends"] = {{"cond1", to_string(rep.cond1)},
                   {"cond2", to_string(rep.cond2)},
                   {"cond3", to_string(rep.cond3)},
                   {"cond4", to_string(rep.cond4)}};
    return j;
}

}  // namespace qid
