#include <catch_amalgamated.hpp>

#include <cmath>
#include <limits>

#include "qid/stable.hpp"

using namespace qid;

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kInf = std::numeric_limits<double>::infinity();
}  // namespace

TEST_CASE("stable tail validation", "[stable]") {
    CHECK_THROWS_AS(stable::validate(StableTail{0.0, 1.0}), Error);
    CHECK_THROWS_AS(stable::validate(StableTail{2.0, 1.0}), Error);
    CHECK_THROWS_AS(stable::validate(StableTail{1.0, 0.0}), Error);
    CHECK_NOTHROW(stable::validate(StableTail{0.5, 3.0}));
}

TEST_CASE("sphere areas", "[stable]") {
    CHECK(stable::sphere_area(1) == Catch::Approx(2.0).epsilon(1e-14));
    CHECK(stable::sphere_area(2) == Catch::Approx(2.0 * kPi).epsilon(1e-14));
    CHECK(stable::sphere_area(3) == Catch::Approx(4.0 * kPi).epsilon(1e-14));
    CHECK(stable::sphere_area(4) == Catch::Approx(2.0 * kPi * kPi).epsilon(1e-14));
    CHECK_THROWS_AS(stable::sphere_area(0), Error);
}

TEST_CASE("angular kernel normalisation and known closed forms", "[stable]") {
    for (int d = 1; d <= 5; ++d) CHECK(stable::angular_kernel(d, 0.0) == 1.0);
    // series head and closed form agree where they meet
    for (int d = 1; d <= 4; ++d) {
        const double lo = stable::angular_kernel(d, 0.499999);
        const double hi = stable::angular_kernel(d, 0.500001);
        CHECK(lo == Catch::Approx(hi).margin(1e-10));
    }
    CHECK(stable::angular_kernel(1, 2.0) == Catch::Approx(std::cos(2.0)).epsilon(1e-14));
    CHECK(stable::angular_kernel(3, 2.0) == Catch::Approx(std::sin(2.0) / 2.0).epsilon(1e-13));
}

TEST_CASE("power ring masses match the radial antiderivative", "[stable]") {
    const StableTail st{0.5, 1.0};
    // p = 0 over (1, inf): 2 * int_1^inf s^{-3/2} ds = 4
    CHECK(stable::power_ring_mass(1, st, 0.0, 1.0, kInf) == Catch::Approx(4.0).epsilon(1e-14));
    // p = 2 over (0, 1]: 2 * int_0^1 s^{1/2} ds = 4/3
    CHECK(stable::power_ring_mass(1, st, 2.0, 0.0, 1.0) ==
          Catch::Approx(4.0 / 3.0).epsilon(1e-14));
    // logarithmic case p = alpha
    const StableTail one{1.0, 1.0};
    CHECK(stable::power_ring_mass(1, one, 1.0, 0.1, 10.0) ==
          Catch::Approx(2.0 * std::log(100.0)).epsilon(1e-14));
    // scale linearity in C and the surface factor in d
    const StableTail scaled{0.5, 3.0};
    CHECK(stable::power_ring_mass(2, scaled, 0.0, 1.0, kInf) ==
          Catch::Approx(3.0 * kPi * 4.0 / 2.0 * 2.0).epsilon(1e-13));
}

TEST_CASE("power ring masses diverge at the documented ends", "[stable]") {
    const StableTail st{1.0, 1.0};
    CHECK(std::isinf(stable::power_ring_mass(1, st, 0.5, 0.0, 1.0)));   // origin blowup
    CHECK(std::isinf(stable::power_ring_mass(1, st, 1.0, 1.0, kInf)));  // tail blowup
    CHECK(std::isinf(stable::power_ring_mass(1, st, 2.0, 1.0, kInf)));
    CHECK(std::isfinite(stable::power_ring_mass(1, st, 0.5, 1.0, kInf)));
}

TEST_CASE("gram coefficients at frozen reference values", "[stable]") {
    CHECK(stable::gram_coefficient(1, StableTail{0.5, 1.0}, 0.1) ==
          Catch::Approx(0.04216370213557839).epsilon(1e-13));
    CHECK(stable::gram_coefficient(1, StableTail{0.5, 1.0}, 1.0) ==
          Catch::Approx(1.3333333333333333).epsilon(1e-13));
    CHECK(stable::gram_coefficient(2, StableTail{1.0, 1.0}, 0.1) ==
          Catch::Approx(0.3141592653589793).epsilon(1e-13));
    CHECK(stable::gram_coefficient(2, StableTail{1.0, 1.0}, 1.0) ==
          Catch::Approx(3.141592653589793).epsilon(1e-13));
    CHECK(stable::gram_coefficient(3, StableTail{1.5, 1.0}, 0.1) ==
          Catch::Approx(2.649223537545627).epsilon(1e-13));
    CHECK(stable::gram_coefficient(3, StableTail{1.5, 1.0}, 1.0) ==
          Catch::Approx(8.377580409572781).epsilon(1e-13));
}

TEST_CASE("one wedge closed form", "[stable]") {
    // C omega_d (1/(2-alpha) + 1/alpha); the bracket is 8/3, 2, 8/3
    CHECK(stable::one_wedge(1, StableTail{0.5, 1.0}) ==
          Catch::Approx(2.0 * (2.0 / 3.0 + 2.0)).epsilon(1e-14));
    CHECK(stable::one_wedge(1, StableTail{1.0, 1.0}) ==
          Catch::Approx(2.0 * 2.0).epsilon(1e-14));
    CHECK(stable::one_wedge(1, StableTail{1.5, 1.0}) ==
          Catch::Approx(2.0 * (2.0 + 2.0 / 3.0)).epsilon(1e-14));
    CHECK(stable::one_wedge(2, StableTail{1.0, 0.5}) ==
          Catch::Approx(0.5 * 2.0 * kPi * 2.0).epsilon(1e-14));
}

TEST_CASE("ramp mass matches the analytic antiderivative", "[stable]") {
    // int_a^b (s-a)/(b-a) s^{-1-alpha} ds + b^{-alpha}/alpha, alpha = 1/2, a = 1/2, b = 1
    const double a = 0.5, b = 1.0;
    const double I1 = 2.0 * (std::sqrt(b) - std::sqrt(a));          // int s^{-1/2}
    const double I2 = 2.0 * (1.0 / std::sqrt(a) - 1.0 / std::sqrt(b));  // int s^{-3/2}
    const double exact = 2.0 * ((I1 - a * I2) / (b - a) + std::pow(b, -0.5) / 0.5);
    CHECK(stable::ramp_mass(1, StableTail{0.5, 1.0}, a, b) ==
          Catch::Approx(exact).epsilon(1e-10));
    CHECK_THROWS_AS(stable::ramp_mass(1, StableTail{0.5, 1.0}, 1.0, 0.5), Error);
    CHECK_THROWS_AS(stable::ramp_mass(1, StableTail{0.5, 1.0}, 0.0, 0.5), Error);
}

TEST_CASE("radial exponent profile at frozen reference values", "[stable]") {
    // independently computed values of int_0^inf (Lambda_d(t) - 1) t^{-1-alpha} dt
    CHECK(stable::psi_profile(1, 0.5) == Catch::Approx(-2.5066282746310007).epsilon(1e-8));
    CHECK(stable::psi_profile(1, 1.0) == Catch::Approx(-1.5707963267948966).epsilon(1e-8));
    CHECK(stable::psi_profile(2, 0.5) == Catch::Approx(-1.9119551899445004).epsilon(1e-8));
    CHECK(stable::psi_profile(2, 1.0) == Catch::Approx(-1.0).epsilon(1e-8));
    CHECK(stable::psi_profile(3, 1.5) == Catch::Approx(-0.6684342065682669).epsilon(1e-8));
}

TEST_CASE("exponent value scales as C |z|^alpha", "[stable]") {
    const StableTail st{1.5, 2.0};
    const double base = stable::exponent_value(3, st, 1.0);
    CHECK(base < 0.0);
    CHECK(stable::exponent_value(3, st, 2.0) ==
          Catch::Approx(base * std::pow(2.0, 1.5)).epsilon(1e-12));
    CHECK(stable::exponent_value(3, StableTail{1.5, 4.0}, 1.0) ==
          Catch::Approx(2.0 * base).epsilon(1e-12));
    CHECK(stable::exponent_value(3, st, 0.0) == 0.0);
    // d = 1, alpha = 1 is the Cauchy exponent -pi C |z|
    CHECK(stable::exponent_value(1, StableTail{1.0, 1.0}, 3.0) ==
          Catch::Approx(-3.0 * kPi).epsilon(1e-8));
}
