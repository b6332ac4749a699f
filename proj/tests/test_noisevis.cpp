#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <sstream>

#include "spin1bell/analyzer.hpp"
#include "spin1bell/noisevis.hpp"
#include "spin1bell/qstate.hpp"

using namespace spin1bell;

namespace {

constexpr double kPi = 3.14159265358979323846;

double cos4(double deg)
{
    const double c = std::cos(deg * kPi / 180.0);
    return c * c * c * c;
}

} // namespace

TEST_CASE("pure fringe at fixed angle 45 is a cos^4 law")
{
    for (double theta = -90.0; theta <= 90.0; theta += 7.5)
        CHECK(std::abs(fringe_probability(1.0, 45.0, theta) -
                       cos4(45.0 - theta) / 3.0) < 1e-13);
}

TEST_CASE("noisy fringe values at the recorded points")
{
    // p = 0.69, fixed angle 45: maximum and crossed position.
    CHECK(std::abs(fringe_probability(0.69, 45.0, 45.0) - 0.26875) < 1e-13);
    CHECK(std::abs(fringe_probability(0.69, 45.0, -45.0) - 0.03875) < 1e-13);

    // The absolute scan minimum sits away from the crossed position, near
    // theta = -62.63.
    double lo = 1.0;
    for (double theta = -90.0; theta <= 90.0; theta += 0.01)
        lo = std::min(lo, fringe_probability(0.69, 45.0, theta));
    CHECK(std::abs(lo - 0.0363806706) < 1e-8);
    CHECK(lo < 0.03875);
}

TEST_CASE("fringe probability equals the (+1,-1) cell of the joint grid")
{
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> angle(-90.0, 90.0);
    std::uniform_real_distribution<double> noise(0.0, 1.0);
    for (int trial = 0; trial < 25; ++trial) {
        const double p = noise(rng), f = angle(rng), th = angle(rng);
        const OutcomeGrid g = joint_probabilities(make_noisy_state(p), f, th);
        CHECK(std::abs(fringe_probability(p, f, th) - g.at(0, 2)) < 1e-13);
    }
}

TEST_CASE("fringe scan sampling and validation")
{
    const FringeScan scan = fringe_scan(0.69, 45.0, 1.0);
    REQUIRE(scan.samples.size() == 181);
    CHECK(scan.samples.front().first == -90.0);
    CHECK(scan.samples.back().first == 90.0);
    CHECK(scan.fixed_angle_deg == 45.0);
    for (const auto& [theta, prob] : scan.samples)
        CHECK(std::abs(prob - fringe_probability(0.69, 45.0, theta)) < 1e-15);

    CHECK_THROWS_AS(fringe_scan(0.69, 45.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(fringe_scan(0.69, 45.0, 5.5), std::invalid_argument);
    CHECK_THROWS_AS(fringe_scan(1.2, 45.0, 1.0), std::invalid_argument);
}

TEST_CASE("fixed angle 0 gives a perfect fringe at any noise level")
{
    for (double p : {0.0, 0.3, 0.69, 1.0})
        CHECK(std::abs(fringe_contrast(p, 0.0) - 1.0) < 1e-9);
}

TEST_CASE("visibility closed form 4p/(3+p) on the inverted branch")
{
    for (double p : {1.0 / 3.0, 0.4, 0.5, 0.69, 0.8, 0.9, 1.0})
        CHECK(std::abs(visibility(p) - 4.0 * p / (3.0 + p)) < 1e-8);
    CHECK(std::abs(visibility(0.69) - 0.7479674796747967) < 1e-8);
    CHECK(std::abs(visibility(1.0) - 1.0) < 1e-12);
    CHECK(std::abs(visibility(0.0)) < 1e-9);
}

TEST_CASE("visibility grows with p")
{
    double prev = -1.0;
    for (int k = 0; k <= 13; ++k) {
        const double p = std::min(1.0, 0.35 + 0.05 * k);
        const double v = visibility(p);
        CHECK(v > prev);
        prev = v;
    }
}

TEST_CASE("p_from_visibility inverts the noise model")
{
    CHECK(std::abs(p_from_visibility(0.75) - 9.0 / 13.0) < 1e-7);
    CHECK(std::abs(p_from_visibility(0.4) - 1.0 / 3.0) < 1e-7);
    CHECK(std::abs(p_from_visibility(1.0) - 1.0) < 1e-6);
    for (double p : {0.5, 0.75, 0.9})
        CHECK(std::abs(p_from_visibility(visibility(p)) - p) < 1e-6);
    CHECK_THROWS_AS(p_from_visibility(0.39), std::invalid_argument);
    CHECK_THROWS_AS(p_from_visibility(1.01), std::invalid_argument);
}

TEST_CASE("fringe CSV format")
{
    FringeScan scan;
    scan.samples = {{-90.0, 0.125}, {0.0, 0.26875}};
    std::ostringstream os;
    write_fringe_csv(os, scan);
    CHECK(os.str() == "theta_deg,probability\n-90,0.125\n0,0.26875\n");
}
