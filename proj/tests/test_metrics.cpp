#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <vector>

#include <doctest.h>

#include "facebench/core/error.hpp"
#include "facebench/core/rng.hpp"
#include "facebench/metrics/det.hpp"

using namespace facebench;
using namespace facebench::metrics;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Independent brute-force reference: straight counting loops, no shared code
// with the library implementation.
struct NaivePoint {
    double fpir = 0.0;
    double fnir = 0.0;
};

NaivePoint naive_open_set(const ScoreSet& s, double t) {
    const bool higher = s.polarity == Polarity::HigherIsBetter;
    auto passes = [&](double score) { return higher ? score >= t : score <= t; };
    int false_accepts = 0;
    for (double score : s.nonmated) {
        if (passes(score)) ++false_accepts;
    }
    int misses = 0;
    for (const MatedScore& m : s.mated) {
        if (!m.rank1_correct || !passes(m.score)) ++misses;
    }
    return {static_cast<double>(false_accepts) / s.nonmated.size(),
            static_cast<double>(misses) / s.mated.size()};
}

NaivePoint naive_verification(const std::vector<double>& genuine,
                              const std::vector<double>& impostor, double t) {
    int fa = 0;
    for (double d : impostor) {
        if (d <= t) ++fa;
    }
    int fr = 0;
    for (double d : genuine) {
        if (d > t) ++fr;
    }
    return {static_cast<double>(fa) / impostor.size(), static_cast<double>(fr) / genuine.size()};
}

} // namespace

TEST_CASE("closed set accuracy counts rank failures") {
    const ClosedSetAccuracy perfect = closed_set_accuracy({true, true, true});
    CHECK(perfect.fnir == 0.0);
    CHECK(perfect.gar == 1.0);

    const ClosedSetAccuracy half = closed_set_accuracy({true, false, false, true});
    CHECK(half.fnir == doctest::Approx(0.5));
    CHECK(half.gar == doctest::Approx(0.5));

    CHECK_THROWS_AS(closed_set_accuracy({}), ContractViolation);
}

TEST_CASE("default threshold grid is sorted, distinct, and sentineled") {
    const std::vector<double> grid = default_thresholds({0.4, 0.1, 0.4, 0.9});
    REQUIRE(grid.size() == 5);
    CHECK(grid.front() == -kInf);
    CHECK(grid.back() == kInf);
    CHECK(std::is_sorted(grid.begin(), grid.end()));
    CHECK(grid[1] == 0.1);
    CHECK(grid[2] == 0.4);
    CHECK(grid[3] == 0.9);
}

TEST_CASE("open set sweep endpoints behave as documented") {
    ScoreSet s;
    s.polarity = Polarity::HigherIsBetter;
    s.mated = {{0.9, true}, {0.8, true}, {0.4, false}};
    s.nonmated = {0.7, 0.3};

    const DETCurve strict = open_set_sweep(s, {kInf});
    CHECK(strict.points[0].error_x == 0.0); // nothing passes
    CHECK(strict.points[0].error_y == 1.0);

    const DETCurve loose = open_set_sweep(s, {-kInf});
    CHECK(loose.points[0].error_x == 1.0); // everything passes
    // Only the rank failure remains.
    CHECK(loose.points[0].error_y ==
          doctest::Approx(closed_set_accuracy({true, true, false}).fnir));
}

TEST_CASE("open set sweep reproduces the worked three-plus-two example") {
    ScoreSet s;
    s.polarity = Polarity::HigherIsBetter;
    s.mated = {{0.9, true}, {0.8, true}, {0.4, true}};
    s.nonmated = {0.7, 0.3};

    const DETCurve at75 = open_set_sweep(s, {0.75});
    CHECK(at75.points[0].error_x == 0.0);                    // top nonmated 0.7 fails
    CHECK(at75.points[0].error_y == doctest::Approx(1.0 / 3.0)); // the 0.4 fails

    const std::vector<double> grid = {0.3, 0.4, 0.7, 0.8, 0.9};
    const DETCurve swept = open_set_sweep(s, grid);
    REQUIRE(swept.points.size() == grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const NaivePoint ref = naive_open_set(s, grid[i]);
        CHECK(swept.points[i].error_x == doctest::Approx(ref.fpir));
        CHECK(swept.points[i].error_y == doctest::Approx(ref.fnir));
    }
}

TEST_CASE("open set sweep validates inputs") {
    ScoreSet s;
    s.mated = {{0.5, true}};
    CHECK_THROWS_AS(open_set_sweep(s, {0.0}), ContractViolation); // nonmated empty
    s.nonmated = {0.1};
    CHECK_THROWS_AS(open_set_sweep(s, {1.0, 0.0}), ContractViolation); // unsorted grid
    ScoreSet empty_mated;
    empty_mated.nonmated = {0.1};
    CHECK_THROWS_AS(open_set_sweep(empty_mated, {0.0}), ContractViolation);
}

TEST_CASE("verification sweep separated case and worked example") {
    const DETCurve sep = verification_sweep({0.1, 0.2}, {0.8, 0.9}, {0.5});
    CHECK(sep.points[0].error_x == 0.0);
    CHECK(sep.points[0].error_y == 0.0);

    const DETCurve at3 = verification_sweep({0.1, 0.2, 0.4}, {0.3, 0.5, 0.6}, {0.3});
    CHECK(at3.points[0].error_x == doctest::Approx(1.0 / 3.0)); // impostor 0.3 accepted
    CHECK(at3.points[0].error_y == doctest::Approx(1.0 / 3.0)); // genuine 0.4 rejected

    CHECK_THROWS_AS(verification_sweep({}, {0.1}, {0.0}), ContractViolation);
    CHECK_THROWS_AS(verification_sweep({0.1}, {}, {0.0}), ContractViolation);
}

TEST_CASE("eer of the worked three-plus-three distance example is one third") {
    const std::vector<double> genuine = {0.1, 0.2, 0.4};
    const std::vector<double> impostor = {0.3, 0.5, 0.6};
    std::vector<double> all = genuine;
    all.insert(all.end(), impostor.begin(), impostor.end());
    const DETCurve curve = verification_sweep(genuine, impostor, default_thresholds(all));
    const EERResult eer = compute_eer(curve);
    CHECK_FALSE(eer.no_crossing);
    CHECK(std::fabs(eer.eer - 1.0 / 3.0) <= 1e-12);
}

TEST_CASE("identical genuine and impostor distributions give eer one half") {
    const std::vector<double> scores = {0.1, 0.25, 0.4, 0.6, 0.85};
    const DETCurve curve = verification_sweep(scores, scores, default_thresholds(scores));
    // The curve passes through FAR == FRR complements at every grid point.
    for (const DetPoint& p : curve.points) {
        CHECK(p.error_x == doctest::Approx(1.0 - p.error_y));
    }
    const EERResult eer = compute_eer(curve);
    CHECK(eer.eer == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("perfectly separated scores give eer zero") {
    const std::vector<double> genuine = {0.05, 0.1, 0.15};
    const std::vector<double> impostor = {0.7, 0.8, 0.9};
    std::vector<double> all = genuine;
    all.insert(all.end(), impostor.begin(), impostor.end());
    const EERResult eer = compute_eer(verification_sweep(genuine, impostor, default_thresholds(all)));
    CHECK(eer.eer == doctest::Approx(0.0));
}

TEST_CASE("eer flags curves that never cross") {
    DETCurve curve;
    curve.points = {{0.0, 0.2, 0.6}, {1.0, 0.1, 0.7}, {2.0, 0.0, 0.9}};
    const EERResult eer = compute_eer(curve);
    CHECK(eer.no_crossing);
    CHECK(eer.eer == doctest::Approx(0.6)); // max error at the minimal-gap point
    DETCurve degenerate;
    degenerate.points = {{0.0, 0.5, 0.5}};
    CHECK_THROWS_AS(compute_eer(degenerate), ContractViolation);
}

TEST_CASE("randomized sweeps match the brute-force oracle") {
    Rng rng(2024);
    for (int trial = 0; trial < 100; ++trial) {
        const int n_mated = 1 + rng.index(7);
        const int n_nonmated = 1 + rng.index(7);
        ScoreSet s;
        s.polarity = trial % 2 == 0 ? Polarity::HigherIsBetter : Polarity::LowerIsBetter;
        for (int i = 0; i < n_mated; ++i) {
            s.mated.push_back({rng.uniform(), rng.uniform() < 0.8});
        }
        for (int i = 0; i < n_nonmated; ++i) s.nonmated.push_back(rng.uniform());

        std::vector<double> all;
        for (const MatedScore& m : s.mated) all.push_back(m.score);
        all.insert(all.end(), s.nonmated.begin(), s.nonmated.end());
        const std::vector<double> grid = default_thresholds(all);

        const DETCurve open = open_set_sweep(s, grid);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const NaivePoint ref = naive_open_set(s, grid[i]);
            CHECK(open.points[i].error_x == ref.fpir);
            CHECK(open.points[i].error_y == ref.fnir);
        }

        std::vector<double> genuine;
        std::vector<double> impostor;
        for (const MatedScore& m : s.mated) genuine.push_back(m.score);
        impostor = s.nonmated;
        const DETCurve veri = verification_sweep(genuine, impostor, grid);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const NaivePoint ref = naive_verification(genuine, impostor, grid[i]);
            CHECK(veri.points[i].error_x == ref.fpir);
            CHECK(veri.points[i].error_y == ref.fnir);
        }
    }
}

TEST_CASE("sweep errors are monotone in the threshold") {
    Rng rng(77);
    std::vector<double> genuine;
    std::vector<double> impostor;
    for (int i = 0; i < 40; ++i) {
        genuine.push_back(rng.gaussian(0.3, 0.1));
        impostor.push_back(rng.gaussian(0.7, 0.15));
    }
    std::vector<double> all = genuine;
    all.insert(all.end(), impostor.begin(), impostor.end());
    const DETCurve curve = verification_sweep(genuine, impostor, default_thresholds(all));
    for (std::size_t i = 1; i < curve.points.size(); ++i) {
        CHECK(curve.points[i].error_x >= curve.points[i - 1].error_x); // FAR grows with t
        CHECK(curve.points[i].error_y <= curve.points[i - 1].error_y); // FRR shrinks with t
    }
}

TEST_CASE("closed set fnir equals the open set sweep at the loosest threshold") {
    Rng rng(31);
    ScoreSet s;
    s.polarity = Polarity::LowerIsBetter;
    std::vector<bool> flags;
    for (int i = 0; i < 25; ++i) {
        const bool correct = rng.uniform() < 0.7;
        s.mated.push_back({rng.uniform(), correct});
        flags.push_back(correct);
    }
    for (int i = 0; i < 10; ++i) s.nonmated.push_back(rng.uniform());
    const DETCurve curve = open_set_sweep(s, {kInf}); // loosest for lower-is-better
    CHECK(curve.points[0].error_y == doctest::Approx(closed_set_accuracy(flags).fnir));
}

TEST_CASE("axis labels follow the curve kind") {
    CHECK(axes_label_x(CurveAxes::FarFrr) == "far");
    CHECK(axes_label_y(CurveAxes::FarFrr) == "frr");
    CHECK(axes_label_x(CurveAxes::FpirFnir) == "fpir");
    CHECK(axes_label_y(CurveAxes::FpirFnir) == "fnir");
}
