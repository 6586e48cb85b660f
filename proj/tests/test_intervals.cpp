#include <doctest.h>

#include <cmath>

#include "common.hpp"

using namespace texptest;

TEST_CASE("petal.width splits induce the four documented intervals") {
    TreeEnsemble te = load_fixture("iris_rfmv.json");
    IntervalTable table = build_interval_table(te);
    const int pw = 3;
    REQUIRE(table.splits[pw] == std::vector<double>{0.75, 1.55, 1.65});
    REQUIRE(table.num_intervals(pw) == 4);
    CHECK(table.interval_lo(pw, 1) == 0.0);
    CHECK(table.interval_hi(pw, 1) == 0.75);
    CHECK(table.interval_lo(pw, 2) == 0.75);
    CHECK(table.interval_hi(pw, 2) == 1.55);
    CHECK(table.interval_lo(pw, 3) == 1.55);
    CHECK(table.interval_hi(pw, 3) == 1.65);
    CHECK(table.interval_lo(pw, 4) == 1.65);
    CHECK(table.interval_hi(pw, 4) == 3.0);
    CHECK(table.hi_closed(pw, 4));
    CHECK_FALSE(table.hi_closed(pw, 3));

    // the instance of the running example sits in the first interval
    CHECK(locate(table, pw, 0.2) == 1);

    // duplicated thresholds across trees collapse (0.75 and 1.55 appear twice)
    int uses = 0;
    for (const auto& t : te.trees)
        for (const auto& n : t.nodes)
            if (!n.leaf && n.feature == pw) ++uses;
    CHECK(uses > 3);
}

TEST_CASE("disease feature splits and unused features") {
    TreeEnsemble te = load_fixture("disease.json");
    IntervalTable table = build_interval_table(te);
    CHECK(table.splits[0] == std::vector<double>{60});
    CHECK(table.num_intervals(0) == 2);
    CHECK(table.interval_lo(0, 1) == 20.0);
    CHECK(table.interval_hi(0, 2) == 80.0);

    // a model leaving a feature unsplit gives it one full-domain interval
    TreeEnsemble iris = load_fixture("iris_rfmv.json");
    IntervalTable it = build_interval_table(iris);
    CHECK(it.num_intervals(0) == 1);  // sepal.length never split
    CHECK(it.interval_lo(0, 1) == 4.3);
    CHECK(it.interval_hi(0, 1) == 7.9);
}

TEST_CASE("locate: boundary values take the right-hand interval") {
    TreeEnsemble te = load_fixture("iris_rfmv.json");
    IntervalTable table = build_interval_table(te);
    CHECK(locate(table, 3, 0.75) == 2);  // half-open boundary
    CHECK(locate(table, 3, 0.0) == 1);
    CHECK(locate(table, 3, 3.0) == 4);  // closed last interval
    CHECK_THROWS_AS(locate(table, 3, 3.01), DataError);
    CHECK_THROWS_AS(locate(table, 3, -0.5), DataError);
}

TEST_CASE("locate agrees with a linear scan on random values") {
    Rng rng(201);
    TreeEnsemble te = random_ensemble(rng);
    IntervalTable table = build_interval_table(te);
    for (int k = 0; k < 1000; ++k) {
        int i = rand_int(rng, 0, te.num_features() - 1);
        double v = rand_real(rng, table.domains[i].lo, table.domains[i].hi);
        int expected = table.num_intervals(i);
        for (int j = 1; j <= static_cast<int>(table.splits[i].size()); ++j)
            if (v < table.splits[i][j - 1]) {
                expected = j;
                break;
            }
        CHECK(locate(table, i, v) == expected);
    }
}

TEST_CASE("proportion sizes partition each feature") {
    Rng rng(202);
    for (int round = 0; round < 10; ++round) {
        TreeEnsemble te = random_ensemble(rng);
        IntervalTable table = build_interval_table(te);
        SizeMeasure m = SizeMeasure::proportion(table);
        for (int i = 0; i < te.num_features(); ++i) {
            double sum = 0;
            for (int j = 1; j <= table.num_intervals(i); ++j) {
                double s = m.interval_size(i, j);
                CHECK(s > 0.0);
                CHECK(s <= 1.0);
                sum += s;
            }
            CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
        }
    }
}

TEST_CASE("interval weight on the disease fixture") {
    TreeEnsemble te = load_fixture("disease.json");
    IntervalTable table = build_interval_table(te);
    SizeMeasure m = SizeMeasure::proportion(table);
    // [60, 80] over a [20, 80] domain
    CHECK(interval_weight(table, m, 0, 2, 2) ==
          doctest::Approx(std::log(1.0 / 3.0)).epsilon(1e-12));
    CHECK(interval_weight(table, m, 0, 1, 2) == 0.0);  // full domain, exactly
    // monotone: widening above the instance interval never lowers the weight
    CHECK(interval_weight(table, m, 1, 1, 2) >= interval_weight(table, m, 1, 1, 1));
}

TEST_CASE("fsc of the disease max region") {
    ProblemSetup s(load_fixture("disease.json"), {65, 85});
    Region r;
    r.ranges = {IdxRange{2, 2}, IdxRange{2, 2}};
    double expected = std::log(1.0 / 3.0) + std::log(7.0 / 10.0);
    CHECK(fsc(r, s.table, s.measure) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(fsc(Region::all_free(s.table), s.table, s.measure) == 0.0);
    CHECK(coverage_percent(expected) == doctest::Approx(23.3333).epsilon(1e-4));
}

TEST_CASE("fsc equals the log of the direct product of proportions") {
    Rng rng(203);
    for (int round = 0; round < 25; ++round) {
        TreeEnsemble te = random_ensemble(rng);
        IntervalTable table = build_interval_table(te);
        SizeMeasure m = SizeMeasure::proportion(table);
        ExplanationProblem p =
            make_problem(te, table, m, make_instance(te, random_point(rng, te)));
        Region r = random_region(rng, p);
        double product = 1.0;
        for (int i = 0; i < te.num_features(); ++i)
            product *= m.run_size(i, r.ranges[i].lo, r.ranges[i].hi);
        CHECK(fsc(r, table, m) == doctest::Approx(std::log(product)).epsilon(1e-12));
        // exp(FSC) is the geometric volume fraction of the region's box
        double volume = 1.0;
        for (int i = 0; i < te.num_features(); ++i) {
            double len = table.interval_hi(i, r.ranges[i].hi) -
                         table.interval_lo(i, r.ranges[i].lo);
            volume *= len / table.domains[i].width();
        }
        CHECK(std::exp(fsc(r, table, m)) == doctest::Approx(volume).epsilon(1e-9));
    }
}

TEST_CASE("fsc is monotone under region widening") {
    Rng rng(204);
    for (int round = 0; round < 25; ++round) {
        TreeEnsemble te = random_ensemble(rng);
        IntervalTable table = build_interval_table(te);
        SizeMeasure m = SizeMeasure::proportion(table);
        ExplanationProblem p =
            make_problem(te, table, m, make_instance(te, random_point(rng, te)));
        Region r = random_region(rng, p);
        double base = fsc(r, table, m);
        for (int i = 0; i < te.num_features(); ++i) {
            Region wider = r;
            if (wider.ranges[i].lo > 1) --wider.ranges[i].lo;
            if (wider.ranges[i].hi < table.num_intervals(i)) ++wider.ranges[i].hi;
            CHECK(fsc(wider, table, m) >= base - 1e-12);
        }
    }
}

TEST_CASE("data-proportion measure smooths empty intervals") {
    TreeEnsemble te = load_fixture("disease.json");
    IntervalTable table = build_interval_table(te);
    // every row sits below both thresholds: upper intervals stay positive
    Dataset data = parse_dataset("x2,x3\n25,55\n30,60\n35,65\n40,70\n");
    SizeMeasure m = SizeMeasure::data_proportion(table, te.feature_space, data);
    CHECK(m.kind() == MeasureKind::DataProportion);
    for (int i = 0; i < 2; ++i) {
        double sum = 0.0;
        for (int j = 1; j <= table.num_intervals(i); ++j) {
            CHECK(m.interval_size(i, j) > 0.0);
            sum += m.interval_size(i, j);
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(m.run_size(i, 1, table.num_intervals(i)) == 1.0);  // exactly
    }
    // counts 4 and 0 with +1 smoothing over 4 rows and 2 intervals
    CHECK(m.interval_size(0, 1) == doctest::Approx(5.0 / 6.0));
    CHECK(m.interval_size(0, 2) == doctest::Approx(1.0 / 6.0));
}
