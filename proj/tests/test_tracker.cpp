// SPDX-License-Identifier: Apache-2.0

#include "support.hpp"

#include <gtest/gtest.h>

using namespace mmtrack;

namespace {

Geometry geom_d(double d)
{
    Geometry g;
    g.tx_pos = {d, 0.0};
    return g;
}

// Forward-simulates exact Doppler pairs for a known piecewise-constant
// velocity sequence, using the position at the start of each step.
std::vector<FusedPair> pairs_from_truth(const TargetTrack& t, const Geometry& g)
{
    std::vector<FusedPair> out;
    for (std::size_t k = 0; k < t.size(); ++k) {
        FusedPair fp{t.times_s[k], 0.0, 0.0};
        if (k + 1 < t.size()) {
            const Vec2 d = t.positions_m[k + 1] - t.positions_m[k];
            const double dt = t.times_s[k + 1] - t.times_s[k];
            const auto f = doppler_from_motion(t.positions_m[k], d.norm() / dt, d.angle(), g);
            fp.f1 = f.f1;
            fp.f2 = f.f2;
        }
        out.push_back(fp);
    }
    return out;
}

InitialObservation exact_obs(Vec2 p, const Geometry& g)
{
    const auto a = angles_from_position(p, g);
    return {a.aoa_rx1, a.aoa_rx2, 0.0};
}

DopplerTrack make_track(double t0, double hop, std::size_t n, double value = 5.0)
{
    DopplerTrack t;
    for (std::size_t k = 0; k < n; ++k) {
        t.sensing_times_s.push_back(t0 + hop * static_cast<double>(k));
        t.doppler_hz.emplace_back(value + static_cast<double>(k));
    }
    return t;
}

} // namespace

TEST(Angles, AxisAndDiagonal)
{
    const auto a = angles_from_position({0.0, 1.0}, geom_d(2.0));
    EXPECT_NEAR(rad2deg(a.aoa_rx1), 90.0, 1e-12);
    EXPECT_NEAR(rad2deg(a.aoa_rx2), 135.0, 1e-12);
    EXPECT_NEAR(rad2deg(a.aod), 153.434948822922, 1e-9);
}

TEST(Angles, CollinearBetweenRx1AndTx)
{
    Geometry g = geom_d(2.0);
    g.rx2_pos = {0.0, 1.0};
    const auto a = angles_from_position({1.5, 0.0}, g);
    EXPECT_DOUBLE_EQ(a.aoa_rx1, 0.0);
    EXPECT_NEAR(rad2deg(a.aod), 180.0, 1e-12);
}

TEST(Angles, NodeCoincidenceThrows)
{
    EXPECT_THROW(angles_from_position({0.0, 0.0}, Geometry{}), DegenerateGeometryError);
    EXPECT_THROW(angles_from_position({2.5, 0.0}, Geometry{}), DegenerateGeometryError);
    EXPECT_THROW(angles_from_position({1.0, 0.0}, Geometry{}), DegenerateGeometryError);
}

TEST(DopplerFromMotion, Examples)
{
    const auto g0 = geom_d(1e-12);
    EXPECT_EQ(doppler_from_motion({0.0, 1.0}, 0.0, 1.0, Geometry{}).f1, 0.0);
    EXPECT_NEAR(doppler_from_motion({0.0, 1.0}, 0.1, kPi / 2, g0).f1, -40.0277, 1e-3);
    const Vec2 p{0.4, 0.8};
    const auto a = angles_from_position(p, Geometry{});
    const double mu = 0.5 * (a.aoa_rx1 + a.aod);
    EXPECT_NEAR(doppler_from_motion(p, 0.7, mu + kPi / 2, Geometry{}).f1, 0.0, 1e-12);
    EXPECT_THROW(doppler_from_motion(p, -0.1, 0.0, Geometry{}), ContractError);
}

TEST(SolveVelocity, ZeroDopplerKeepsHeading)
{
    const auto v = solve_velocity(0.0, 0.0, {0.5, 0.5}, Geometry{}, 1.234);
    EXPECT_EQ(v.speed, 0.0);
    EXPECT_EQ(v.heading, 1.234);
}

TEST(SolveVelocity, RoundTripExample)
{
    const Vec2 p{0.3, 1.0};
    const auto f = doppler_from_motion(p, 0.1, kPi / 2, Geometry{});
    const auto v = solve_velocity(f.f1, f.f2, p, Geometry{});
    EXPECT_NEAR(v.speed, 0.1, 1e-10);
    EXPECT_NEAR(v.heading, kPi / 2, 1e-9);
}

TEST(SolveVelocity, RandomRoundTrips)
{
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> ux(-1.0, 3.0), uy(0.05, 2.0), uv(1e-3, 1.0), uth(-kPi, kPi);
    const Geometry g;
    int solved = 0;
    for (int i = 0; i < 10'000; ++i) {
        const Vec2 p{ux(rng), uy(rng)};
        const double v = uv(rng), th = uth(rng);
        const auto f = doppler_from_motion(p, v, th, g);
        try {
            const auto est = solve_velocity(f.f1, f.f2, p, g);
            const Vec2 want = v * Vec2{std::cos(th), std::sin(th)};
            const Vec2 got = est.speed * Vec2{std::cos(est.heading), std::sin(est.heading)};
            ASSERT_LT(distance(got, want) / v, 1e-9) << "p=(" << p.x << "," << p.y << ")";
            ++solved;
        } catch (const DegenerateGeometryError&) {
        }
    }
    EXPECT_GT(solved, 9'900);
}

TEST(SolveVelocity, ParallelBisectorsAreDegenerate)
{
    // rx2 on the rx1 ray through p: phi_1 = phi_2, so both rows coincide.
    Geometry g;
    g.rx2_pos = {0.25, 0.25};
    EXPECT_THROW(solve_velocity(1.0, 1.0, {0.5, 0.5}, g), DegenerateGeometryError);
}

TEST(SolveVelocity, OnBaselineIsDegenerate)
{
    // Beyond the transmitter on the x-axis: delta = 90 deg for both receivers.
    EXPECT_THROW(solve_velocity(1.0, 1.0, {3.0, 0.0}, Geometry{}), DegenerateGeometryError);
}

TEST(InitialPosition, Examples)
{
    const Geometry g;
    auto t = initial_position({deg2rad(45.0), deg2rad(135.0), 0.0}, g);
    EXPECT_NEAR(t.position.x, 0.5, 1e-12);
    EXPECT_NEAR(t.position.y, 0.5, 1e-12);
    EXPECT_FALSE(t.behind_receiver);
    t = initial_position({deg2rad(90.0), deg2rad(135.0), 0.0}, g);
    EXPECT_NEAR(t.position.x, 0.0, 1e-12);
    EXPECT_NEAR(t.position.y, 1.0, 1e-12);
    EXPECT_THROW(initial_position({0.0, 0.0, 0.0}, g), DegenerateGeometryError);
}

TEST(InitialPosition, BehindReceiverIsFlagged)
{
    const auto t = initial_position({deg2rad(135.0), deg2rad(45.0), 0.0}, Geometry{});
    EXPECT_TRUE(t.behind_receiver);
    EXPECT_LT(t.position.y, 0.0);
}

TEST(InitialPosition, TriangulationIdentity)
{
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> ux(-1.0, 3.0), uy(0.05, 2.0);
    const Geometry g;
    for (int i = 0; i < 1000; ++i) {
        const Vec2 p{ux(rng), uy(rng)};
        const auto t = initial_position(exact_obs(p, g), g);
        EXPECT_LT(distance(t.position, p), 1e-9);
    }
}

TEST(InitialPosition, AoaErrorIsAppliedToBothAngles)
{
    const Geometry g;
    const auto t = initial_position({deg2rad(35.0), deg2rad(125.0), deg2rad(10.0)}, g);
    EXPECT_NEAR(t.position.x, 0.5, 1e-12);
    EXPECT_NEAR(t.position.y, 0.5, 1e-12);
}

TEST(StepPosition, Examples)
{
    auto p = step_position({0.0, 0.0}, 0.1, 0.0, 0.01);
    EXPECT_NEAR(p.x, 0.001, 1e-15);
    EXPECT_EQ(p.y, 0.0);
    EXPECT_EQ(step_position({0.3, 0.2}, 0.0, 1.0, 0.01), (Vec2{0.3, 0.2}));
    p = step_position({0.001, 0.0}, 0.1, kPi, 0.01);
    EXPECT_NEAR(p.x, 0.0, 1e-15);
    EXPECT_NEAR(p.y, 0.0, 1e-15);
    EXPECT_THROW(step_position({0, 0}, 0.1, 0.0, 0.0), ContractError);
}

TEST(AlignTracks, IdentityPairing)
{
    const auto a = make_track(0.05, 0.01, 20), b = make_track(0.05, 0.01, 20, 100.0);
    const auto pairs = align_tracks(a, b);
    ASSERT_EQ(pairs.size(), 20u);
    for (std::size_t k = 0; k < 20; ++k) {
        EXPECT_EQ(pairs[k].f1, a.doppler_hz[k]);
        EXPECT_EQ(pairs[k].f2, b.doppler_hz[k]);
    }
}

TEST(AlignTracks, TenMillisecondOffsetShiftsOneFrame)
{
    const auto a = make_track(0.05, 0.01, 20), b = make_track(0.06, 0.01, 20, 100.0);
    const auto pairs = align_tracks(a, b);
    // rx1 frame k+1 pairs with rx2 frame k; rx1's first frame has no partner.
    ASSERT_EQ(pairs.size(), 19u);
    for (std::size_t k = 0; k < pairs.size(); ++k) EXPECT_EQ(pairs[k].f2, b.doppler_hz[k]);
    EXPECT_EQ(pairs.front().f1, a.doppler_hz[1]);
}

TEST(AlignTracks, FourMillisecondOffsetDropsNothing)
{
    const auto a = make_track(0.05, 0.01, 20), b = make_track(0.054, 0.01, 20, 100.0);
    const auto pairs = align_tracks(a, b);
    ASSERT_EQ(pairs.size(), 20u);
    for (std::size_t k = 0; k < 20; ++k) {
        ASSERT_TRUE(pairs[k].complete());
        EXPECT_EQ(pairs[k].f2, b.doppler_hz[k]);
    }
}

TEST(AlignTracks, MissingAndNonOverlapping)
{
    auto a = make_track(0.05, 0.01, 5);
    a.doppler_hz[2].reset();
    const auto pairs = align_tracks(a, make_track(0.05, 0.01, 5));
    EXPECT_FALSE(pairs[2].complete());
    EXPECT_THROW(align_tracks(a, make_track(5.0, 0.01, 5)), ContractError);
    EXPECT_THROW(align_tracks(a, DopplerTrack{}), ContractError);
}

TEST(TrackTrajectory, AllZeroPairsStayPut)
{
    std::vector<FusedPair> pairs;
    for (int k = 0; k < 30; ++k) pairs.push_back({0.01 * k, 0.0, 0.0});
    const auto tr = track_trajectory(pairs, {deg2rad(45.0), deg2rad(135.0), 0.0}, Geometry{});
    for (const auto& p : tr.points_m) {
        EXPECT_NEAR(p.x, 0.5, 1e-12);
        EXPECT_NEAR(p.y, 0.5, 1e-12);
    }
}

TEST(TrackTrajectory, StraightLineEndpoint)
{
    const Geometry g;
    TargetTrack t;
    const Vec2 p0{0.45, 0.6};
    const double th = 0.8;
    for (int k = 0; k <= 50; ++k) {  // 5 cm at 0.1 m/s
        t.times_s.push_back(0.01 * k);
        t.positions_m.push_back(p0 + 0.001 * k * Vec2{std::cos(th), std::sin(th)});
    }
    const auto tr = track_trajectory(pairs_from_truth(t, g), exact_obs(p0, g), g);
    EXPECT_LT(distance(tr.points_m.back(), t.positions_m.back()), 1e-4);
    for (auto f : tr.flags) EXPECT_EQ(f, PointFlag::tracked);
}

TEST(TrackTrajectory, FirstOrderConvergence)
{
    // Curved path; Doppler sampled at the true instantaneous velocity.
    const Geometry g;
    auto run = [&](double step) {
        std::vector<FusedPair> pairs;
        const double r = 0.05, w = 2.0;  // 0.1 m/s on a 5 cm circle
        auto pos = [&](double t) { return Vec2{0.5 + r * std::cos(w * t), 0.6 + r * std::sin(w * t)}; };
        const auto n = static_cast<int>(std::llround(1.0 / step));
        for (int k = 0; k <= n; ++k) {
            const double t = k * step;
            const auto f = doppler_from_motion(pos(t), r * w, w * t + kPi / 2, g);
            pairs.push_back({t, f.f1, f.f2});
        }
        const auto tr = track_trajectory(pairs, exact_obs(pos(0.0), g), g);
        return distance(tr.points_m.back(), pos(1.0));
    };
    const double e1 = run(0.01), e2 = run(0.005);
    EXPECT_NEAR(e1 / e2, 2.0, 0.2);
}

TEST(TrackTrajectory, MissingHoldsAndDegenerateFlags)
{
    const Geometry g;
    std::vector<FusedPair> pairs{{0.0, 10.0, -10.0}, {0.01, std::nullopt, 5.0}, {0.02, 1e6, 1e6}, {0.03, 0.0, 0.0}};
    const auto tr = track_trajectory(pairs, {deg2rad(45.0), deg2rad(135.0), 0.0}, g);
    EXPECT_EQ(tr.flags[0], PointFlag::tracked);
    EXPECT_EQ(tr.flags[1], PointFlag::held);
    EXPECT_EQ(tr.flags[2], PointFlag::degenerate);  // implies > 1 m/s
    EXPECT_EQ(tr.points_m[1], tr.points_m[2]);
    EXPECT_EQ(tr.points_m[2], tr.points_m[3]);
    for (std::size_t k = 1; k < tr.size(); ++k) EXPECT_LE(distance(tr.points_m[k], tr.points_m[k - 1]), 1.0 * 0.01 + 1e-12);
}

TEST(TrackTrajectory, MedianPrefilterIsOptIn)
{
    std::vector<std::optional<double>> f{1, 2, 100, 4, 5};
    EXPECT_EQ(detail::moving_median(f, 0), f);
    const auto m = detail::moving_median(f, 3);
    EXPECT_EQ(m[2], 4.0);
}

TEST(TrackTrajectory, EmptyAndBadInitialThrow)
{
    EXPECT_THROW(track_trajectory({}, {0.5, 2.0, 0.0}, Geometry{}), ContractError);
    EXPECT_THROW(track_trajectory({{0.0, 0.0, 0.0}}, {0.0, 0.0, 0.0}, Geometry{}), DegenerateGeometryError);
}
