#include <catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "qid/cuppens.hpp"
#include "qid/json_io.hpp"

using namespace qid;

namespace {

Eigen::VectorXd vec1(double x) {
    Eigen::VectorXd v(1);
    v << x;
    return v;
}

Eigen::VectorXd vec2(double x, double y) {
    Eigen::VectorXd v(2);
    v << x, y;
    return v;
}

}  // namespace

TEST_CASE("measure round trip preserves atoms, stable part, tail bound", "[json]") {
    AtomicSignedMeasure m(2);
    m.add_atom(vec2(1.0, -0.5), 0.25);
    m.add_atom(vec2(0.125, 2.0), -0.0625);
    QuasiLevyMeasure nu(m, StableTail{1.25, 0.5});
    nu.set_tail_bound(3e-11);

    const QuasiLevyMeasure back = measure_from_json(measure_to_json(nu));
    CHECK(back.dim() == 2);
    CHECK(back.atomic().mass_at(vec2(1.0, -0.5)) == 0.25);
    CHECK(back.atomic().mass_at(vec2(0.125, 2.0)) == -0.0625);
    REQUIRE(back.has_stable());
    CHECK(back.stable_tail()->alpha == 1.25);
    CHECK(back.stable_tail()->C == 0.5);
    CHECK(back.tail_bound() == 3e-11);
}

TEST_CASE("measure parsing rejects malformed input", "[json]") {
    CHECK_THROWS_AS(measure_from_json(json::parse(R"({"atoms": []})")), Error);
    CHECK_THROWS_AS(measure_from_json(json::parse(R"({"dim": 0, "atoms": []})")), Error);
    CHECK_THROWS_AS(
        measure_from_json(json::parse(R"({"dim": 2, "atoms": [[1.0, 0.5]]})")), Error);
    CHECK_THROWS_AS(
        measure_from_json(json::parse(R"({"dim": 1, "atoms": [["x", 0.5]]})")), Error);
    CHECK_THROWS_AS(measure_from_json(json::parse(
                        R"({"dim": 1, "atoms": [], "stable": {"alpha": 2.5, "C": 1}})")),
                    Error);
}

TEST_CASE("triplet round trip in every mode", "[json]") {
    AtomicSignedMeasure m(1);
    m.add_atom(vec1(0.5), 0.75);
    m.add_atom(vec1(2.0), -0.125);
    Eigen::MatrixXd A(1, 1);
    A << 0.25;
    const CharTriplet base(A, QuasiLevyMeasure(m), vec1(-0.5), ReprMode::standard);

    for (ReprMode mode : {ReprMode::standard, ReprMode::drift, ReprMode::center}) {
        const CharTriplet t = convert_mode(base, mode);
        const CharTriplet back = triplet_from_json(triplet_to_json(t));
        CHECK(back.mode() == mode);
        CHECK((back.gamma() - t.gamma()).cwiseAbs().maxCoeff() == 0.0);
        CHECK((back.A() - t.A()).cwiseAbs().maxCoeff() == 0.0);
        const Eigen::VectorXd z = vec1(1.1);
        CHECK(std::abs(char_exponent(back, z) - char_exponent(t, z)) < 1e-15);
    }
}

TEST_CASE("triplet parsing validates the gaussian part", "[json]") {
    json j = triplet_to_json(CharTriplet(Eigen::MatrixXd::Identity(2, 2),
                                         QuasiLevyMeasure::zero(2), vec2(0.0, 0.0),
                                         ReprMode::standard));
    // A is stored row major, so entry (0, 1) of the 2x2 block sits at index 1
    j["A"][1] = 0.5;  // breaks symmetry
    CHECK_THROWS_AS(triplet_from_json(j), Error);
    j["A"][1] = 0.0;
    j["A"][0] = -1.0;  // breaks positivity
    CHECK_THROWS_AS(triplet_from_json(j), Error);
    j["A"][0] = 1.0;
    j["mode"] = "sideways";
    CHECK_THROWS_AS(triplet_from_json(j), Error);
}

TEST_CASE("pmf round trip and defaults", "[json]") {
    Eigen::MatrixXd M(2, 2);
    M << 2.0, 0.0, 1.0, 1.0;
    const LatticePMF pmf(M, vec2(0.5, -0.5),
                         {{{0, 0}, 0.5}, {{1, -1}, 0.25}, {{2, 3}, 0.25}});
    const LatticePMF back = pmf_from_json(pmf_to_json(pmf));
    CHECK(back.dim() == 2);
    CHECK((back.M() - M).cwiseAbs().maxCoeff() == 0.0);
    CHECK((back.b() - vec2(0.5, -0.5)).cwiseAbs().maxCoeff() == 0.0);
    CHECK(back.probs() == pmf.probs());

    // M and b default to the identity frame
    const LatticePMF plain =
        pmf_from_json(json::parse(R"({"dim": 1, "probs": [[0, 0.5], [1, 0.5]]})"));
    CHECK(plain.M()(0, 0) == 1.0);
    CHECK(plain.b()[0] == 0.0);

    CHECK_THROWS_AS(
        pmf_from_json(json::parse(R"({"dim": 1, "probs": [[0.5, 1.0]]})")), Error);
    CHECK_THROWS_AS(
        pmf_from_json(json::parse(R"({"dim": 1, "probs": [[0, 0.5], [0, 0.5]]})")), Error);
}

TEST_CASE("cone round trip", "[json]") {
    const Cone K = Cone::nonneg_orthant(3);
    const Cone back = cone_from_json(cone_to_json(K));
    CHECK(back.dim() == 3);
    CHECK(back.normals().size() == 3);
    CHECK(back.contains((Eigen::VectorXd(3) << 1.0, 0.0, 2.0).finished()));
    CHECK_FALSE(back.contains((Eigen::VectorXd(3) << -1.0, 0.0, 2.0).finished()));
    CHECK_THROWS_AS(cone_from_json(json::parse(R"({"normals": []})")), Error);
}

TEST_CASE("analysis report serialisation carries the certificate", "[json]") {
    const LatticePMF coin = LatticePMF::integer_lattice(1, {{{0}, 0.7}, {{1}, 0.3}});
    const AnalyzeResult res = analyze_pmf(coin);
    const json j = analyze_to_json(res);
    CHECK(j["certificate"]["certified"] == true);
    CHECK(j["certificate"]["witness"].is_null());
    CHECK(j["certificate"]["N"] == 64);
    CHECK(j["triplet"]["mode"] == "drift");
    CHECK(j["winding"][0] == 0);
    CHECK(j["report"]["alias_warning"] == false);
    CHECK(j["report"]["mass_tol"] == 1e-10);

    // a failed certification serialises its witness location
    const ZeroFreeCertificate cert = certify_zero_free(
        LatticePMF::integer_lattice(1, {{{0}, 0.5}, {{1}, 0.5}}), 64);
    const json cj = certificate_to_json(cert);
    CHECK(cj["certified"] == false);
    REQUIRE(cj["witness"].is_array());
    CHECK(cj["witness_modulus"].get<double>() < 1e-12);
}

TEST_CASE("series construction report serialisation", "[json]") {
    AtomicSignedMeasure sigma(1);
    sigma.add_atom(vec1(1.0), 1.0);
    const CuppensResult res = cuppens_triplet(0.7, vec1(0.0), sigma, 1e-10);
    const json j = cuppens_to_json(res);
    CHECK(j["K"] == res.K);
    CHECK(j["lambda"] == 0.7);
    CHECK(j["tol"] == 1e-10);
    CHECK(j["tail_bound"] == res.tail_bound);
    CHECK(j["mass_residual"] == res.mass_residual);
    CHECK(j["triplet"]["nu"]["tail_bound"] == res.tail_bound);
}

TEST_CASE("density report serialisation echoes tolerances and verdict", "[json]") {
    const CharTriplet t(Eigen::MatrixXd::Identity(2, 2), QuasiLevyMeasure::zero(2),
                        vec2(0.0, 0.0), ReprMode::standard);
    const DensityReport rep = check_kallenberg(t);
    const json j = density_report_to_json(rep);
    CHECK(j["verdict"] == "smooth_density_certified_by_A");
    CHECK(j["trend_ratio"] == 10.0);
    CHECK(j["trend_floor"] == 1e3);
    REQUIRE(j["r"].size() == 20);
    CHECK(j["index"][0].is_null());  // NaN at r = 1 serialises as null
}

TEST_CASE("probe report serialisation", "[json]") {
    const CharExponentFn fn = CharExponentFn::from_triplet(CharTriplet(
        Eigen::MatrixXd::Identity(1, 1), QuasiLevyMeasure::zero(1), vec1(0.0),
        ReprMode::standard));
    std::vector<double> grid;
    for (int i = 0; i < 20; ++i) grid.push_back(std::pow(10.0, 3.0 * i / 19.0));
    const ProbeReport rep = gaussian_probe(fn, vec1(1.0), grid);
    const json j = probe_report_to_json(rep);
    CHECK(j["verdict"] == "converges");
    CHECK(j["limit"].get<double>() == Catch::Approx(1.0).epsilon(1e-6));
    REQUIRE(j["t"].size() == 20);

    ProbeReport divergent;
    divergent.t = {1.0, 10.0};
    divergent.q = {1.0, 100.0};
    divergent.verdict = ProbeReport::Verdict::diverges;
    CHECK(probe_report_to_json(divergent)["limit"].is_null());
}

TEST_CASE("serialisation is deterministic", "[json]") {
    const LatticePMF coin = LatticePMF::integer_lattice(1, {{{0}, 0.7}, {{1}, 0.3}});
    const std::string a = analyze_to_json(analyze_pmf(coin)).dump(2);
    const std::string b = analyze_to_json(analyze_pmf(coin)).dump(2);
    CHECK(a == b);
    // object keys come out in insertion order, stable across runs
    CHECK(a.find("\"certificate\"") < a.find("\"triplet\""));
    CHECK(a.find("\"triplet\"") < a.find("\"winding\""));
}
