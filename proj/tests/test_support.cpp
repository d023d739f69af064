#include <catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <cmath>

#include "qid/cuppens.hpp"
#include "qid/lattice.hpp"
#include "qid/support.hpp"

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

CharTriplet coin03_std() {
    AtomicSignedMeasure sigma(1);
    sigma.add_atom(vec1(1.0), 1.0);
    return convert_mode(cuppens_triplet(0.7, vec1(0.0), sigma, 1e-12).triplet,
                        ReprMode::standard);
}

}  // namespace

TEST_CASE("cone membership with slack", "[support]") {
    const Cone K = Cone::nonneg_orthant(2);
    CHECK(K.contains(vec2(1.0, 2.0)));
    CHECK(K.contains(vec2(0.0, 0.0)));
    CHECK(K.contains(vec2(-1e-13, 1.0)));  // extraction noise is forgiven
    CHECK_FALSE(K.contains(vec2(-1.0, 0.5)));

    Eigen::VectorXd n(2);
    n << 1.0, -1.0;  // half plane x >= y
    const Cone H(2, {n});
    CHECK(H.contains(vec2(2.0, 1.0)));
    CHECK_FALSE(H.contains(vec2(1.0, 2.0)));

    CHECK_THROWS_AS(Cone(2, {}), Error);
    CHECK_THROWS_AS(Cone(2, {vec1(1.0)}), Error);
    CHECK_THROWS_AS(Cone(2, {vec2(0.0, 0.0)}), Error);
}

TEST_CASE("coin law is supported in the non-negative half line", "[support]") {
    const ConeCheck chk = check_cone_conditions(coin03_std(), Cone::nonneg_orthant(1));
    CHECK(chk.a_zero);
    CHECK(chk.nu_plus_in_K);
    CHECK(chk.small_jumps_integrable);
    CHECK(chk.cond_ii);
    CHECK(chk.drift_in_K);
    CHECK(chk.conclusion == ConeConclusion::supported_in_K);
}

TEST_CASE("gaussian part defeats any cone support", "[support]") {
    const CharTriplet n01(Eigen::MatrixXd::Identity(1, 1), QuasiLevyMeasure::zero(1),
                          vec1(0.0), ReprMode::standard);
    const ConeCheck chk = check_cone_conditions(n01, Cone::nonneg_orthant(1));
    CHECK_FALSE(chk.a_zero);
    CHECK_FALSE(chk.cond_ii);
    CHECK(chk.conclusion == ConeConclusion::conditions_fail);
}

TEST_CASE("drift outside the cone keeps only the translate conclusion", "[support]") {
    AtomicSignedMeasure m(1);
    m.add_atom(vec1(1.0), 0.5);
    const CharTriplet t(Eigen::MatrixXd::Zero(1, 1), QuasiLevyMeasure(m), vec1(0.25),
                        ReprMode::standard);
    // standard gamma 0.25 but drift gamma 0.25 - 0.5 = -0.25 lies outside
    const ConeCheck chk = check_cone_conditions(t, Cone::nonneg_orthant(1));
    CHECK(chk.cond_ii);
    CHECK_FALSE(chk.drift_in_K);
    CHECK(chk.conclusion == ConeConclusion::supported_in_translate);
}

TEST_CASE("positive atoms outside the cone break the criterion", "[support]") {
    AtomicSignedMeasure m(2);
    m.add_atom(vec2(1.0, -1.0), 0.5);
    m.add_atom(vec2(-0.5, 0.5), -0.25);
    const CharTriplet t(Eigen::MatrixXd::Zero(2, 2), QuasiLevyMeasure(m), vec2(0.0, 0.0),
                        ReprMode::standard);
    const ConeCheck chk = check_cone_conditions(t, Cone::nonneg_orthant(2));
    CHECK_FALSE(chk.nu_plus_in_K);
    CHECK_FALSE(chk.nu_minus_in_K);
    CHECK_FALSE(chk.cond_ii);
    CHECK(chk.conclusion == ConeConclusion::conditions_fail);
}

TEST_CASE("cone check wants the standard representation", "[support]") {
    AtomicSignedMeasure m(1);
    m.add_atom(vec1(1.0), 0.5);
    const CharTriplet t(Eigen::MatrixXd::Zero(1, 1), QuasiLevyMeasure(m), vec1(0.0),
                        ReprMode::drift);
    try {
        check_cone_conditions(t, Cone::nonneg_orthant(1));
        FAIL("expected ModeMismatch");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrKind::ModeMismatch);
    }

    const QuasiLevyMeasure st(AtomicSignedMeasure(1), StableTail{0.5, 1.0});
    const CharTriplet u(Eigen::MatrixXd::Zero(1, 1), st, vec1(0.0), ReprMode::standard);
    CHECK_THROWS_AS(check_cone_conditions(u, Cone::nonneg_orthant(1)), Error);

    CHECK_THROWS_AS(check_cone_conditions(coin03_std(), Cone::nonneg_orthant(2)), Error);
}

TEST_CASE("drift of a Poisson-type law sits in its support", "[support]") {
    // nu = 0.7 delta_1 with drift 0 is a Poisson law on {0, 1, 2, ...}
    AtomicSignedMeasure m(1);
    m.add_atom(vec1(1.0), 0.7);
    const CharTriplet t(Eigen::MatrixXd::Zero(1, 1), QuasiLevyMeasure(m), vec1(0.0),
                        ReprMode::drift);
    const LatticePMF ref = LatticePMF::integer_lattice(
        1, {{{0}, 0.5}, {{1}, 0.35}, {{2}, 0.15}});
    CHECK(drift_in_support_check(t, ref));

    // against a pmf that misses the drift point the check reports false
    const LatticePMF shifted = LatticePMF::integer_lattice(1, {{{1}, 0.6}, {{2}, 0.4}});
    CHECK_FALSE(drift_in_support_check(t, shifted));
}

TEST_CASE("drift-in-support applies only to genuinely divisible laws", "[support]") {
    const LatticePMF ref = LatticePMF::integer_lattice(1, {{{0}, 0.7}, {{1}, 0.3}});
    AtomicSignedMeasure m(1);
    m.add_atom(vec1(1.0), 0.5);
    m.add_atom(vec1(2.0), -0.1);
    const CharTriplet signedt(Eigen::MatrixXd::Zero(1, 1), QuasiLevyMeasure(m), vec1(0.0),
                              ReprMode::drift);
    try {
        drift_in_support_check(signedt, ref);
        FAIL("expected NotApplicable");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrKind::NotApplicable);
    }

    const QuasiLevyMeasure st(AtomicSignedMeasure(1), StableTail{0.5, 1.0});
    const CharTriplet stt(Eigen::MatrixXd::Zero(1, 1), st, vec1(0.0), ReprMode::standard);
    CHECK_THROWS_AS(drift_in_support_check(stt, ref), Error);
}
