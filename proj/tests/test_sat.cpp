#include <doctest.h>

#include "common.hpp"

using namespace texptest;
using sat::Lit;
using sat::Solver;

namespace {

// reference verdict by truth-table enumeration
bool tt_satisfiable(int nv, const std::vector<std::vector<Lit>>& clauses,
                    const std::vector<Lit>& assumptions = {}) {
    for (std::uint64_t bits = 0; bits < (1ull << nv); ++bits) {
        auto lit_true = [&](Lit l) {
            bool v = (bits >> l.var()) & 1ull;
            return l.sign() ? !v : v;
        };
        bool ok = true;
        for (Lit a : assumptions)
            if (!lit_true(a)) ok = false;
        for (const auto& cl : clauses) {
            if (!ok) break;
            bool sat = false;
            for (Lit l : cl)
                if (lit_true(l)) sat = true;
            if (!sat) ok = false;
        }
        if (ok) return true;
    }
    return false;
}

}  // namespace

TEST_CASE("empty formula is satisfiable") {
    Solver s;
    CHECK(s.solve() == Solver::Status::Sat);
}

TEST_CASE("contradiction gives unsat with empty core") {
    Solver s;
    sat::Var a = s.new_var();
    s.add_clause({Lit::make(a)});
    s.add_clause({Lit::make(a, false)});
    CHECK(s.solve() == Solver::Status::Unsat);
    CHECK(s.core().empty());
}

TEST_CASE("assumption cores are genuine subsets") {
    Solver s;
    sat::Var a = s.new_var(), b = s.new_var(), c = s.new_var();
    s.add_clause({Lit::make(a, false), Lit::make(b, false)});
    std::vector<Lit> assumptions{Lit::make(c), Lit::make(a), Lit::make(b)};
    REQUIRE(s.solve(assumptions) == Solver::Status::Unsat);
    const auto& core = s.core();
    CHECK(!core.empty());
    for (Lit l : core)
        CHECK(std::find(assumptions.begin(), assumptions.end(), l) != assumptions.end());
    // c alone is innocent
    CHECK(std::find(core.begin(), core.end(), Lit::make(c)) == core.end());
}

TEST_CASE("random 3-cnf agrees with truth-table enumeration") {
    Rng rng(20250801);
    for (int round = 0; round < 300; ++round) {
        int nv = rand_int(rng, 1, 15);
        int nc = rand_int(rng, 1, 4 * nv);
        std::vector<std::vector<Lit>> clauses;
        Solver s;
        for (int v = 0; v < nv; ++v) s.new_var();
        for (int i = 0; i < nc; ++i) {
            std::vector<Lit> cl;
            for (int j = 0, k = rand_int(rng, 1, 3); j < k; ++j)
                cl.push_back(Lit::make(rand_int(rng, 0, nv - 1), rand_int(rng, 0, 1) == 0));
            clauses.push_back(cl);
            s.add_clause(cl);
        }
        bool expected = tt_satisfiable(nv, clauses);
        Solver::Status got = s.solve();
        REQUIRE((got == Solver::Status::Sat) == expected);
        if (got == Solver::Status::Sat) {
            for (const auto& cl : clauses) {
                bool sat = false;
                for (Lit l : cl)
                    if (s.model_lit(l)) sat = true;
                REQUIRE(sat);
            }
        }
    }
}

TEST_CASE("cores under random assumptions stay unsatisfiable") {
    Rng rng(42);
    for (int round = 0; round < 150; ++round) {
        int nv = rand_int(rng, 2, 10);
        std::vector<std::vector<Lit>> clauses;
        Solver s;
        for (int v = 0; v < nv; ++v) s.new_var();
        for (int i = 0, nc = rand_int(rng, 1, 3 * nv); i < nc; ++i) {
            std::vector<Lit> cl;
            for (int j = 0, k = rand_int(rng, 1, 3); j < k; ++j)
                cl.push_back(Lit::make(rand_int(rng, 0, nv - 1), rand_int(rng, 0, 1) == 0));
            clauses.push_back(cl);
            s.add_clause(cl);
        }
        std::vector<Lit> assumptions;
        for (int v = 0; v < nv; ++v)
            if (rand_int(rng, 0, 2) == 0)
                assumptions.push_back(Lit::make(v, rand_int(rng, 0, 1) == 0));
        bool expected = tt_satisfiable(nv, clauses, assumptions);
        Solver::Status got = s.solve(assumptions);
        REQUIRE((got == Solver::Status::Sat) == expected);
        if (got == Solver::Status::Unsat)
            REQUIRE_FALSE(tt_satisfiable(nv, clauses, s.core()));
    }
}

TEST_CASE("planted solutions are recovered on larger instances") {
    Rng rng(5);
    for (int round = 0; round < 10; ++round) {
        const int nv = 150;
        Solver s;
        std::vector<bool> planted(nv);
        for (int v = 0; v < nv; ++v) {
            s.new_var();
            planted[v] = rand_int(rng, 0, 1) == 1;
        }
        std::vector<std::vector<Lit>> clauses;
        while (clauses.size() < 640) {
            std::vector<Lit> cl;
            bool sat = false;
            for (int j = 0; j < 3; ++j) {
                Lit l = Lit::make(rand_int(rng, 0, nv - 1), rand_int(rng, 0, 1) == 0);
                cl.push_back(l);
                if (planted[l.var()] != l.sign()) sat = true;
            }
            if (!sat) continue;  // keep the planted assignment a solution
            s.add_clause(cl);
            clauses.push_back(std::move(cl));
        }
        REQUIRE(s.solve() == Solver::Status::Sat);
        for (const auto& cl : clauses) {
            bool sat = false;
            for (Lit l : cl) sat = sat || s.model_lit(l);
            REQUIRE(sat);
        }
    }
}

TEST_CASE("pigeonhole formulas stay unsat through clause reduction") {
    Solver s;
    const int pigeons = 8, holes = 7;
    std::vector<std::vector<sat::Var>> x(pigeons, std::vector<sat::Var>(holes));
    for (auto& row : x)
        for (sat::Var& v : row) v = s.new_var();
    for (int p = 0; p < pigeons; ++p) {
        std::vector<Lit> cl;
        for (int h = 0; h < holes; ++h) cl.push_back(Lit::make(x[p][h]));
        s.add_clause(cl);
    }
    for (int h = 0; h < holes; ++h)
        for (int p = 0; p < pigeons; ++p)
            for (int q = p + 1; q < pigeons; ++q)
                s.add_clause({Lit::make(x[p][h], false), Lit::make(x[q][h], false)});
    CHECK(s.solve() == Solver::Status::Unsat);
    CHECK(s.conflicts() > 1000);  // deep enough to exercise the learnt DB
}

TEST_CASE("budget feasibility matches enumeration on random instances") {
    Rng rng(77);
    for (int round = 0; round < 200; ++round) {
        int nv = rand_int(rng, 2, 12);
        Solver s;
        std::vector<std::vector<Lit>> clauses;
        for (int v = 0; v < nv; ++v) s.new_var();
        for (int i = 0, nc = rand_int(rng, 0, 2 * nv); i < nc; ++i) {
            std::vector<Lit> cl;
            for (int j = 0, k = rand_int(rng, 1, 3); j < k; ++j)
                cl.push_back(Lit::make(rand_int(rng, 0, nv - 1), rand_int(rng, 0, 1) == 0));
            clauses.push_back(cl);
            s.add_clause(cl);
        }
        std::vector<sat::BudgetItem> items;
        std::vector<std::int64_t> weight_of(nv, 0);
        std::vector<bool> pays_positive(nv, false);
        for (int v = 0; v < nv; ++v)
            if (rand_int(rng, 0, 1) == 0) {
                bool pos = rand_int(rng, 0, 1) == 0;
                std::int64_t w = rand_int(rng, 1, 50);
                items.push_back({Lit::make(v, pos), w});
                weight_of[v] = w;
                pays_positive[v] = pos;
            }
        std::int64_t bound = rand_int(rng, 0, 150);
        s.set_budget(items, bound);

        bool expected = false;
        for (std::uint64_t bits = 0; bits < (1ull << nv) && !expected; ++bits) {
            auto lit_true = [&](Lit l) {
                bool v = (bits >> l.var()) & 1ull;
                return l.sign() ? !v : v;
            };
            bool ok = true;
            for (const auto& cl : clauses) {
                bool sat = false;
                for (Lit l : cl)
                    if (lit_true(l)) sat = true;
                if (!sat) ok = false;
            }
            if (!ok) continue;
            std::int64_t total = 0;
            for (int v = 0; v < nv; ++v)
                if (weight_of[v] && ((bits >> v) & 1ull) == pays_positive[v])
                    total += weight_of[v];
            expected = total <= bound;
        }
        Solver::Status got = s.solve();
        REQUIRE((got == Solver::Status::Sat) == expected);
        if (got == Solver::Status::Sat) {
            std::int64_t total = 0;
            for (const auto& it : items)
                if (s.model_lit(it.lit)) total += it.weight;
            REQUIRE(total <= bound);
        }
    }
}

TEST_CASE("budget constraint prunes exactly over the bound") {
    Solver s;
    std::vector<sat::BudgetItem> items;
    for (int i = 0; i < 5; ++i) {
        sat::Var v = s.new_var();
        items.push_back({Lit::make(v), 10});
    }
    // at least three of the five true: every 3-subset holds a true literal
    for (int a = 0; a < 5; ++a)
        for (int b = a + 1; b < 5; ++b)
            for (int c = b + 1; c < 5; ++c)
                s.add_clause({Lit::make(a), Lit::make(b), Lit::make(c)});

    s.set_budget(items, 30);
    REQUIRE(s.solve() == Solver::Status::Sat);
    int trues = 0;
    for (int i = 0; i < 5; ++i)
        if (s.model_value(i) == sat::Value::True) ++trues;
    CHECK(trues == 3);
    s.set_budget(items, 29);
    CHECK(s.solve() == Solver::Status::Unsat);
    // relaxing the budget later stays sound despite learned clauses
    s.set_budget(items, 50);
    REQUIRE(s.solve() == Solver::Status::Sat);
    // incremental clause addition after budgets stays sound
    s.clear_budget();
    s.add_clause({Lit::make(0, false)});
    s.add_clause({Lit::make(1, false)});
    REQUIRE(s.solve() == Solver::Status::Sat);
    for (int i = 2; i < 5; ++i) CHECK(s.model_value(i) == sat::Value::True);
    s.set_budget(items, 29);
    CHECK(s.solve() == Solver::Status::Unsat);
}
