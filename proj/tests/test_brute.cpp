#include <doctest.h>

#include <cmath>

#include "common.hpp"

using namespace texptest;

TEST_CASE("disease grid has exactly one high-risk box") {
    ProblemSetup s(load_fixture("disease.json"), {65, 85});
    std::vector<int> labels = classify_grid(s.te, s.table);
    REQUIRE(labels.size() == 4);
    int high = s.te.class_index("high");
    // mixed-radix order, last feature fastest: (1,1) (1,2) (2,1) (2,2)
    CHECK(labels[0] != high);
    CHECK(labels[1] != high);
    CHECK(labels[2] != high);
    CHECK(labels[3] == high);

    BruteOracle brute(s.problem);
    CHECK_FALSE(brute.kappa_constant());
    CHECK(brute.box_label(std::vector<int>{2, 2}) == high);
}

TEST_CASE("every box is constant: interior samples agree with the midpoint") {
    Rng rng(301);
    for (int round = 0; round < 15; ++round) {
        TreeEnsemble te = random_ensemble(rng);
        IntervalTable table = build_interval_table(te);
        std::vector<int> labels = classify_grid(te, table);
        int m = te.num_features();
        std::vector<int> box(m, 1);
        for (std::size_t n = 0; n < labels.size(); ++n) {
            for (int k = 0; k < 5; ++k) {
                std::vector<double> point(m);
                for (int i = 0; i < m; ++i) {
                    double lo = table.interval_lo(i, box[i]);
                    double hi = table.interval_hi(i, box[i]);
                    point[i] = lo + (hi - lo) * rand_real(rng, 0.05, 0.95);
                }
                CHECK(predict(te, point) == labels[n]);
            }
            for (int i = m - 1; i >= 0; --i) {
                if (box[i] < table.num_intervals(i)) {
                    ++box[i];
                    break;
                }
                box[i] = 1;
            }
        }
    }
}

TEST_CASE("weak inflated-axp check on the disease fixture") {
    ProblemSetup s(load_fixture("disease.json"), {65, 85});
    BruteOracle brute(s.problem);
    Region good;
    good.ranges = {IdxRange{2, 2}, IdxRange{2, 2}};
    CHECK(brute.is_weak_iaxp(good));
    CHECK_FALSE(brute.is_weak_iaxp(Region::all_free(s.table)));
    Region half;
    half.ranges = {IdxRange{2, 2}, IdxRange{1, 2}};
    CHECK_FALSE(brute.is_weak_iaxp(half));
}

TEST_CASE("prefix counting matches direct box enumeration") {
    Rng rng(302);
    for (int round = 0; round < 20; ++round) {
        TreeEnsemble te = random_ensemble(rng);
        IntervalTable table = build_interval_table(te);
        SizeMeasure m = SizeMeasure::proportion(table);
        ExplanationProblem p =
            make_problem(te, table, m, make_instance(te, random_point(rng, te)));
        BruteOracle brute(p);
        for (int k = 0; k < 20; ++k) {
            Region r = random_region(rng, p);
            // direct scan
            bool clean = true;
            std::vector<int> box(p.num_features());
            std::function<void(int)> rec = [&](int i) {
                if (!clean) return;
                if (i == p.num_features()) {
                    if (brute.box_label(box) != p.target()) clean = false;
                    return;
                }
                for (int j = r.ranges[i].lo; j <= r.ranges[i].hi; ++j) {
                    box[i] = j;
                    rec(i + 1);
                }
            };
            rec(0);
            CHECK(brute.is_weak_iaxp(r) == clean);
        }
    }
}

TEST_CASE("exhaustive maximum region on the disease fixture") {
    ProblemSetup s(load_fixture("disease.json"), {65, 85});
    BruteOracle brute(s.problem);
    auto [region, best] = brute.max_iaxp();
    CHECK(best == doctest::Approx(std::log(1.0 / 3.0) + std::log(7.0 / 10.0))
                      .epsilon(1e-9));
    CHECK(region.ranges[0] == IdxRange{2, 2});
    CHECK(region.ranges[1] == IdxRange{2, 2});
}

TEST_CASE("single-split model: maximum region is the instance's side") {
    std::string doc = R"({"kind":"rf_weighted","classes":["a","b"],
        "features":[{"name":"x","lo":0,"hi":10}],
        "trees":[[{"id":0,"feature":0,"threshold":4,"left":1,"right":2},
                  {"id":1,"leaf_class":"a","weight":1.0},
                  {"id":2,"leaf_class":"b","weight":1.0}]]})";
    ProblemSetup s(parse_model(doc), {8.0});
    BruteOracle brute(s.problem);
    auto [region, best] = brute.max_iaxp();
    CHECK(region.ranges[0] == IdxRange{2, 2});
    CHECK(best == doctest::Approx(std::log(0.6)));
}

TEST_CASE("explanation enumeration on the disease fixture") {
    ProblemSetup s(load_fixture("disease.json"), {65, 85});
    BruteOracle brute(s.problem);
    auto sets = brute.enumerate_explanations();
    REQUIRE(sets.iaxps.size() == 1);
    CHECK(sets.iaxps[0].ranges[0] == IdxRange{2, 2});
    CHECK(sets.iaxps[0].ranges[1] == IdxRange{2, 2});
    // the two single-feature contrastive boxes [20,60) and [50,80)
    bool low_x2 = false, low_x3 = false;
    for (const Icxp& icxp : sets.icxps) {
        if (icxp.features == std::vector<int>{0} && icxp.box[0] == IdxRange{1, 1})
            low_x2 = true;
        if (icxp.features == std::vector<int>{1} && icxp.box[1] == IdxRange{1, 1})
            low_x3 = true;
    }
    CHECK(low_x2);
    CHECK(low_x3);
}

TEST_CASE("a flip-everywhere model has at least one contrastive box per feature") {
    // two features; flipping either one away from the instance changes the class
    std::string doc = R"({"kind":"rf_weighted","classes":["a","b"],
        "features":[{"name":"x","lo":0,"hi":10},{"name":"y","lo":0,"hi":10}],
        "trees":[[{"id":0,"feature":0,"threshold":5,"left":1,"right":2},
                  {"id":1,"feature":1,"threshold":5,"left":3,"right":4},
                  {"id":3,"leaf_class":"a","weight":1.0},
                  {"id":4,"leaf_class":"b","weight":1.0},
                  {"id":2,"leaf_class":"b","weight":1.0}]]})";
    ProblemSetup s(parse_model(doc), {2.0, 2.0});
    BruteOracle brute(s.problem);
    auto sets = brute.enumerate_explanations();
    int with[2] = {0, 0};
    for (const Icxp& icxp : sets.icxps)
        if (icxp.features.size() == 1) ++with[icxp.features[0]];
    CHECK(with[0] >= 1);
    CHECK(with[1] >= 1);
}

TEST_CASE("grid cap is enforced") {
    Rng rng(303);
    TreeEnsemble te = random_ensemble(rng);
    IntervalTable table = build_interval_table(te);
    CHECK_THROWS_AS(classify_grid(te, table, 1), CapExceeded);
}
