#include <catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <cmath>
#include <complex>

#include "qid/triplet.hpp"

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

CharTriplet gaussian1(double a, double g) {
    Eigen::MatrixXd A(1, 1);
    A << a;
    return CharTriplet(A, QuasiLevyMeasure::zero(1), vec1(g), ReprMode::standard);
}

// compound Poisson piece with one inner and one outer atom, signed
CharTriplet mixed_triplet() {
    AtomicSignedMeasure m(1);
    m.add_atom(vec1(0.5), 0.8);
    m.add_atom(vec1(2.0), -0.3);
    Eigen::MatrixXd A(1, 1);
    A << 0.25;
    return CharTriplet(A, QuasiLevyMeasure(m), vec1(0.7), ReprMode::standard);
}

}  // namespace

TEST_CASE("triplet construction checks shapes and finiteness", "[triplet]") {
    CHECK_THROWS_AS(CharTriplet(Eigen::MatrixXd::Zero(2, 2), QuasiLevyMeasure::zero(1),
                                vec1(0.0), ReprMode::standard),
                    Error);
    CHECK_THROWS_AS(CharTriplet(Eigen::MatrixXd::Zero(1, 1), QuasiLevyMeasure::zero(1),
                                vec2(0.0, 0.0), ReprMode::standard),
                    Error);
    Eigen::MatrixXd bad(1, 1);
    bad << std::nan("");
    CHECK_THROWS_AS(
        CharTriplet(bad, QuasiLevyMeasure::zero(1), vec1(0.0), ReprMode::standard), Error);
}

TEST_CASE("validation rejects asymmetry and negative spectra", "[triplet]") {
    Eigen::MatrixXd skew(2, 2);
    skew << 1.0, 0.5, -0.5, 1.0;
    CHECK_THROWS_AS(validate(CharTriplet(skew, QuasiLevyMeasure::zero(2), vec2(0.0, 0.0),
                                         ReprMode::standard)),
                    Error);

    Eigen::MatrixXd indef(2, 2);
    indef << 1.0, 0.0, 0.0, -0.5;
    try {
        validate(CharTriplet(indef, QuasiLevyMeasure::zero(2), vec2(0.0, 0.0),
                             ReprMode::standard));
        FAIL("negative eigenvalue accepted");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrKind::NotPSD);
    }
}

TEST_CASE("validation symmetrises and clamps within tolerance", "[triplet]") {
    Eigen::MatrixXd nearly(2, 2);
    nearly << 1.0, 0.5 + 1e-12, 0.5, 1.0;
    const CharTriplet v = validate(
        CharTriplet(nearly, QuasiLevyMeasure::zero(2), vec2(0.0, 0.0), ReprMode::standard));
    CHECK((v.A() - v.A().transpose()).cwiseAbs().maxCoeff() == 0.0);

    // eigenvalue at exactly zero survives, tiny negative noise is clamped up
    Eigen::MatrixXd singular(2, 2);
    singular << 1.0, 1.0, 1.0, 1.0 - 1e-12;
    const CharTriplet s = validate(CharTriplet(singular, QuasiLevyMeasure::zero(2),
                                               vec2(0.0, 0.0), ReprMode::standard));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s.A(), Eigen::EigenvaluesOnly);
    CHECK(es.eigenvalues().minCoeff() >= -1e-15);
}

TEST_CASE("gaussian exponent closed form", "[triplet]") {
    const CharTriplet t = gaussian1(2.0, 0.5);
    const std::complex<double> psi = char_exponent(t, vec1(3.0));
    CHECK(psi.real() == Catch::Approx(-0.5 * 9.0 * 2.0).epsilon(1e-14));
    CHECK(psi.imag() == Catch::Approx(0.5 * 3.0).epsilon(1e-14));
}

TEST_CASE("compound Poisson exponent closed form in drift mode", "[triplet]") {
    AtomicSignedMeasure m(1);
    m.add_atom(vec1(1.0), 0.5);
    const CharTriplet t(Eigen::MatrixXd::Zero(1, 1), QuasiLevyMeasure(m), vec1(0.0),
                        ReprMode::drift);
    const double z = 1.3;
    const std::complex<double> psi = char_exponent(t, vec1(z));
    const std::complex<double> expect = 0.5 * (std::polar(1.0, z) - 1.0);
    CHECK(std::abs(psi - expect) < 1e-15);
}

TEST_CASE("exponent is invariant under mode conversion", "[triplet]") {
    const CharTriplet t = mixed_triplet();
    const Eigen::VectorXd z = vec1(0.9);
    const std::complex<double> ref = char_exponent(t, z);
    for (ReprMode mode : {ReprMode::drift, ReprMode::center, ReprMode::standard}) {
        const std::complex<double> got = char_exponent(convert_mode(t, mode), z);
        CHECK(std::abs(got - ref) < 1e-14);
    }
}

TEST_CASE("mode round trips restore the location exactly", "[triplet]") {
    const CharTriplet t = mixed_triplet();
    const CharTriplet back =
        convert_mode(convert_mode(convert_mode(t, ReprMode::drift), ReprMode::center),
                     ReprMode::standard);
    CHECK(back.gamma() == t.gamma());  // bit-for-bit via the stored anchor
    CHECK(back.mode() == ReprMode::standard);
}

TEST_CASE("drift location subtracts the small-jump integral", "[triplet]") {
    const CharTriplet t = mixed_triplet();
    const CharTriplet d = convert_mode(t, ReprMode::drift);
    // only the atom at 0.5 is a small jump: gamma_drift = 0.7 - 0.8 * 0.5
    CHECK(d.gamma()[0] == Catch::Approx(0.7 - 0.4).margin(1e-15));
    const CharTriplet c = convert_mode(t, ReprMode::center);
    // the atom at 2.0 is the big jump: gamma_center = 0.7 + (-0.3) * 2.0
    CHECK(c.gamma()[0] == Catch::Approx(0.7 - 0.6).margin(1e-15));
}

TEST_CASE("mode conversion respects stable integrability", "[triplet]") {
    const QuasiLevyMeasure heavy(AtomicSignedMeasure(1), StableTail{1.5, 1.0});
    const CharTriplet t(Eigen::MatrixXd::Zero(1, 1), heavy, vec1(0.0), ReprMode::standard);
    CHECK_THROWS_AS(convert_mode(t, ReprMode::drift), Error);   // alpha >= 1
    CHECK_NOTHROW(convert_mode(t, ReprMode::center));           // alpha > 1

    const QuasiLevyMeasure light(AtomicSignedMeasure(1), StableTail{0.5, 1.0});
    const CharTriplet u(Eigen::MatrixXd::Zero(1, 1), light, vec1(0.0), ReprMode::standard);
    CHECK_NOTHROW(convert_mode(u, ReprMode::drift));
    CHECK_THROWS_AS(convert_mode(u, ReprMode::center), Error);
}

TEST_CASE("convolution adds exponents", "[triplet]") {
    const CharTriplet a = mixed_triplet();
    const CharTriplet b = gaussian1(1.0, -0.25);
    const CharTriplet c = convolve(a, b);
    for (double zv : {0.3, 1.7, -2.2}) {
        const Eigen::VectorXd z = vec1(zv);
        const std::complex<double> lhs = char_exponent(c, z);
        const std::complex<double> rhs = char_exponent(a, z) + char_exponent(b, z);
        CHECK(std::abs(lhs - rhs) < 1e-14);
    }
    CHECK_THROWS_AS(convolve(a, convert_mode(b, ReprMode::drift)), Error);
}

TEST_CASE("affine image matches the exponent identity", "[triplet]") {
    const CharTriplet t = mixed_triplet();
    Eigen::MatrixXd M(1, 1);
    M << -2.0;
    const Eigen::VectorXd b = vec1(0.3);
    const CharTriplet img = affine_image(t, M, b);
    for (double zv : {0.4, 1.1}) {
        const Eigen::VectorXd z = vec1(zv);
        const std::complex<double> lhs = char_exponent(img, z);
        const std::complex<double> rhs =
            std::complex<double>(0.0, b.dot(z)) + char_exponent(t, (M.transpose() * z).eval());
        CHECK(std::abs(lhs - rhs) < 1e-13);
    }
    CHECK_THROWS_AS(affine_image(convert_mode(t, ReprMode::drift), M, b), Error);
}

TEST_CASE("rectangular affine images project", "[triplet]") {
    AtomicSignedMeasure m(2);
    m.add_atom(vec2(1.0, 1.0), 0.5);
    const CharTriplet t(Eigen::MatrixXd::Identity(2, 2), QuasiLevyMeasure(m),
                        vec2(1.0, -1.0), ReprMode::standard);
    Eigen::MatrixXd P(1, 2);
    P << 1.0, 1.0;
    const CharTriplet img = affine_image(t, P, vec1(0.0));
    REQUIRE(img.dim() == 1);
    CHECK(img.A()(0, 0) == Catch::Approx(2.0).epsilon(1e-14));
    const Eigen::VectorXd z = vec1(0.8);
    const std::complex<double> rhs = char_exponent(t, (P.transpose() * z).eval());
    CHECK(std::abs(char_exponent(img, z) - rhs) < 1e-13);
}

TEST_CASE("stable tails only survive conformal affine maps", "[triplet]") {
    const QuasiLevyMeasure nu(AtomicSignedMeasure(2), StableTail{1.0, 1.0});
    const CharTriplet t(Eigen::MatrixXd::Zero(2, 2), nu, vec2(0.0, 0.0), ReprMode::standard);

    Eigen::MatrixXd rot(2, 2);
    const double th = 0.7;
    rot << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
    const CharTriplet r = affine_image(t, (3.0 * rot).eval(), vec2(0.0, 0.0));
    REQUIRE(r.nu().has_stable());
    // C picks up the factor c^alpha = 3
    CHECK(r.nu().stable_tail()->C == Catch::Approx(3.0).epsilon(1e-12));

    Eigen::MatrixXd shear(2, 2);
    shear << 1.0, 1.0, 0.0, 1.0;
    CHECK_THROWS_AS(affine_image(t, shear, vec2(0.0, 0.0)), Error);
}

TEST_CASE("product triplets sum the factor exponents coordinatewise", "[triplet]") {
    AtomicSignedMeasure m1(1);
    m1.add_atom(vec1(1.0), 0.4);
    m1.add_atom(vec1(2.0), -0.1);
    const CharTriplet f1(Eigen::MatrixXd::Zero(1, 1), QuasiLevyMeasure(m1), vec1(0.2),
                         ReprMode::standard);
    const CharTriplet f2 = gaussian1(0.5, -1.0);

    const CharTriplet prod = product_triplet({f1, f2});
    REQUIRE(prod.dim() == 2);
    const Eigen::VectorXd z = vec2(0.6, -1.2);
    const std::complex<double> expect =
        char_exponent(f1, vec1(z[0])) + char_exponent(f2, vec1(z[1]));
    CHECK(std::abs(char_exponent(prod, z) - expect) < 1e-14);

    CHECK_THROWS_AS(product_triplet({}), Error);
    CHECK_THROWS_AS(product_triplet({f1, convert_mode(f2, ReprMode::drift)}), Error);
}

TEST_CASE("complex frequency exponent extends the real one", "[triplet]") {
    const CharTriplet t = mixed_triplet();
    Eigen::VectorXcd zc(1);
    zc << std::complex<double>(0.7, 0.0);
    const std::complex<double> a = char_exponent(t, zc);
    const std::complex<double> b = char_exponent(t, vec1(0.7));
    CHECK(std::abs(a - b) < 1e-14);

    // purely imaginary frequency turns the oscillation into a real tilt
    zc << std::complex<double>(0.0, -1.0);
    const std::complex<double> tilted = char_exponent(t, zc);
    CHECK(std::abs(tilted.imag()) < 1e-14);

    const QuasiLevyMeasure nu(AtomicSignedMeasure(1), StableTail{1.0, 1.0});
    const CharTriplet st(Eigen::MatrixXd::Zero(1, 1), nu, vec1(0.0), ReprMode::standard);
    CHECK_THROWS_AS(char_exponent(st, zc), Error);
}

TEST_CASE("probe converges on a gaussian form", "[triplet]") {
    const CharTriplet t = mixed_triplet();
    const CharExponentFn fn = CharExponentFn::from_triplet(t);
    std::vector<double> grid;
    for (int i = 0; i < 40; ++i) grid.push_back(0.1 * std::pow(10.0, 4.0 * i / 39.0));
    const ProbeReport rep = gaussian_probe(fn, vec1(1.0), grid);
    CHECK(rep.verdict == ProbeReport::Verdict::converges);
    CHECK(rep.limit == Catch::Approx(0.25).epsilon(0.05));
}

TEST_CASE("probe flags exponents with no gaussian form", "[triplet]") {
    const CharExponentFn polya = CharExponentFn::user_supplied(
        [](const Eigen::VectorXd& z) {
            return std::complex<double>(1.0 - std::exp(z.norm()), 0.0);
        },
        1);
    std::vector<double> grid;
    for (int i = 0; i < 30; ++i) grid.push_back(0.1 * std::pow(10.0, 3.0 * i / 29.0));
    const ProbeReport rep = gaussian_probe(polya, vec1(1.0), grid);
    CHECK(rep.verdict == ProbeReport::Verdict::diverges);
}

TEST_CASE("probe validates its grid", "[triplet]") {
    const CharExponentFn fn = CharExponentFn::from_triplet(gaussian1(1.0, 0.0));
    CHECK_THROWS_AS(gaussian_probe(fn, vec1(1.0), {1.0, 2.0, 3.0}), Error);
    CHECK_THROWS_AS(gaussian_probe(fn, vec1(1.0), {1.0, 2.0, 3.0, 4.0}), Error);  // < 2 decades
    CHECK_THROWS_AS(gaussian_probe(fn, vec1(0.0), {1.0, 10.0, 50.0, 100.0}), Error);
    CHECK_NOTHROW(gaussian_probe(fn, vec1(1.0), {1.0, 10.0, 50.0, 100.0}));
}
