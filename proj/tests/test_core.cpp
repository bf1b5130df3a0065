#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "transport/core.hpp"

using namespace transport;

namespace {

Stratum v(int level) { return Stratum({{"V", level}}); }

StratifiedCounts one_cell(long long events, long long nonevents) {
    StratifiedCounts c({"V"});
    c.add(kStudy, v(0), 1, 1, events);
    c.add(kStudy, v(0), 1, 0, nonevents);
    return c;
}

} // namespace

TEST_CASE("risk from cell counts") {
    CHECK(risk(one_cell(20, 80), kStudy, v(0), 1).value() == doctest::Approx(0.20));
    CHECK(risk(one_cell(0, 50), kStudy, v(0), 1).value() == 0.0);
    CHECK_THROWS_AS(risk(one_cell(0, 0), kStudy, v(0), 1), EmptyCell);
    // the untreated arm of one_cell is empty too
    CHECK_THROWS_AS(risk(one_cell(20, 80), kStudy, v(0), 0), EmptyCell);
}

TEST_CASE("risk keeps the exact fraction") {
    Risk r = risk(one_cell(1, 2), kStudy, v(0), 1);
    CHECK(r.num == 1);
    CHECK(r.den == 3);
    CHECK(r.rat() == Rat(1, 3));
}

TEST_CASE("effect measures") {
    Risk r1{3, 10}, r0{1, 10};
    CHECK(effect_measure(MeasureKind::RD, r1, r0).value == doctest::Approx(0.2));
    CHECK(effect_measure(MeasureKind::RR, Risk{2, 10}, r0).value == doctest::Approx(2.0));
    CHECK(effect_measure(MeasureKind::OR, Risk{1, 2}, Risk{1, 2}).value ==
          doctest::Approx(1.0));
}

TEST_CASE("effect measure boundaries") {
    Risk zero{0, 10}, one{10, 10}, mid{3, 10};
    CHECK_THROWS_AS(effect_measure(MeasureKind::RR, mid, zero), UndefinedMeasure);
    CHECK_THROWS_AS(effect_measure(MeasureKind::OR, mid, zero), UndefinedMeasure);
    CHECK_THROWS_AS(effect_measure(MeasureKind::OR, one, mid), UndefinedMeasure);
    CHECK_THROWS_AS(effect_measure(MeasureKind::OR, mid, one), UndefinedMeasure);
    // RD is defined everywhere
    CHECK(effect_measure(MeasureKind::RD, one, zero).value == doctest::Approx(1.0));
}

TEST_CASE("null effect and symmetry identities") {
    std::vector<Risk> risks = {{1, 10}, {1, 3}, {7, 9}, {99, 100}};
    for (const Risk& r : risks) {
        CHECK(effect_measure(MeasureKind::RD, r, r).value == doctest::Approx(0.0));
        CHECK(effect_measure(MeasureKind::RR, r, r).value == doctest::Approx(1.0));
        CHECK(effect_measure(MeasureKind::OR, r, r).value == doctest::Approx(1.0));
    }
    for (const Risk& a : risks)
        for (const Risk& b : risks) {
            CHECK(effect_measure(MeasureKind::RD, a, b).value ==
                  doctest::Approx(-effect_measure(MeasureKind::RD, b, a).value));
            CHECK(effect_measure(MeasureKind::OR, a, b).value ==
                  doctest::Approx(1.0 / effect_measure(MeasureKind::OR, b, a).value));
        }
}

TEST_CASE("marginal risk pools strata exactly") {
    StratifiedCounts c({"V"});
    SUBCASE("two equal strata 0.1 and 0.3") {
        c.add(kStudy, v(0), 1, 1, 10);
        c.add(kStudy, v(0), 1, 0, 90);
        c.add(kStudy, v(1), 1, 1, 30);
        c.add(kStudy, v(1), 1, 0, 70);
        CHECK(marginal_risk(c, kStudy, 1).value() == doctest::Approx(0.2));
    }
    SUBCASE("single stratum is the identity") {
        c.add(kStudy, v(0), 1, 1, 25);
        c.add(kStudy, v(0), 1, 0, 75);
        CHECK(marginal_risk(c, kStudy, 1).value() == doctest::Approx(0.25));
    }
    SUBCASE("strata sized 100/300 with risks 0.1/0.2") {
        c.add(kStudy, v(0), 1, 1, 10);
        c.add(kStudy, v(0), 1, 0, 90);
        c.add(kStudy, v(1), 1, 1, 60);
        c.add(kStudy, v(1), 1, 0, 240);
        Risk m = marginal_risk(c, kStudy, 1);
        CHECK(m.value() == doctest::Approx(0.175));
        CHECK(m.rat() == Rat(70, 400));
    }
}

TEST_CASE("marginal risk equals the stratum-size-weighted average") {
    StratifiedCounts c({"V"});
    long long cells[3][2] = {{3, 11}, {7, 2}, {1, 29}};
    Rat expect(0);
    long long total = 0;
    for (int i = 0; i < 3; ++i) {
        c.add(kStudy, v(i), 1, 1, cells[i][0]);
        c.add(kStudy, v(i), 1, 0, cells[i][1]);
        long long n = cells[i][0] + cells[i][1];
        expect += Rat(cells[i][0], n) * Rat(n);
        total += n;
    }
    expect /= Rat(total);
    CHECK(marginal_risk(c, kStudy, 1).rat() == expect);
}

TEST_CASE("add creates all four cells and sums duplicates") {
    StratifiedCounts c({"V"});
    c.add(kStudy, v(0), 1, 1, 5);
    c.add(kStudy, v(0), 1, 1, 3);
    CHECK(c.cell(kStudy, v(0), 1, 1) == 8);
    CHECK(c.cell(kStudy, v(0), 0, 0) == 0);
    CHECK(c.cells().size() == 4);
    CHECK(c.stratum_total(kStudy, v(0)) == 8);
}

TEST_CASE("counts CSV round-trip") {
    StratifiedCounts c({"V"});
    c.add(kStudy, v(0), 1, 1, 12);
    c.add(kStudy, v(0), 0, 1, 4);
    c.add(kTarget, v(1), 1, 0, 7);
    std::ostringstream out;
    write_counts_csv(c, out);
    std::istringstream in(out.str());
    StratifiedCounts back = read_counts_csv(in);
    CHECK(back.cells() == c.cells());
    CHECK(back.covariates() == c.covariates());
}

TEST_CASE("counts CSV rejects malformed input") {
    std::istringstream bad_header("pop,V,a,y,n\ns,0,1,1,5\n");
    CHECK_THROWS_AS(read_counts_csv(bad_header), ParseError);
    std::istringstream bad_field("population,V,a,y,count\ns,0,1,1,x\n");
    CHECK_THROWS_AS(read_counts_csv(bad_field), ParseError);
    std::istringstream bad_level("population,V,a,y,count\ns,0,2,1,5\n");
    CHECK_THROWS_AS(read_counts_csv(bad_level), ParseError);
    std::istringstream negative("population,V,a,y,count\ns,0,1,1,-2\n");
    CHECK_THROWS_AS(read_counts_csv(negative), ParseError);
}

TEST_CASE("marginalize collapses covariates") {
    StratifiedCounts c({"U", "V"});
    c.add(kStudy, Stratum({{"U", 0}, {"V", 0}}), 1, 1, 5);
    c.add(kStudy, Stratum({{"U", 1}, {"V", 0}}), 1, 1, 7);
    StratifiedCounts m = c.marginalize({"V"});
    CHECK(m.cell(kStudy, v(0), 1, 1) == 12);
    CHECK(m.covariates() == std::vector<std::string>{"V"});
}

TEST_CASE("stratum keys and validation") {
    CHECK(Stratum().key() == "-");
    CHECK(Stratum({{"V2", 1}, {"V1", 0}}).key() == "V1=0,V2=1");
    CHECK_THROWS_AS(Stratum({{"V", 0}, {"V", 1}}), ParseError);
    CHECK(v(0).level("V") == 0);
    CHECK_THROWS_AS(v(0).level("W"), UnknownNode);
}

TEST_CASE("measure names round-trip") {
    for (MeasureKind k : {MeasureKind::RD, MeasureKind::RR, MeasureKind::OR})
        CHECK(measure_from_name(measure_name(k)) == k);
    CHECK_THROWS_AS(measure_from_name("hr"), ParseError);
}

TEST_CASE("rational parsing forms") {
    CHECK(Rat::parse("3/8") == Rat(3, 8));
    CHECK(Rat::parse("0.125") == Rat(1, 8));
    CHECK(Rat::parse("1") == Rat(1));
    CHECK(Rat::parse("12%") == Rat(3, 25));
    CHECK_THROWS_AS(Rat::parse("abc"), ParseError);
    CHECK_THROWS_AS(Rat::parse("1/0"), ParseError);
}

TEST_CASE("rational arithmetic is exact and guarded") {
    CHECK(Rat(1, 3) + Rat(1, 6) == Rat(1, 2));
    CHECK(Rat(2, 3) * Rat(3, 4) == Rat(1, 2));
    CHECK(Rat(1, 3) - Rat(1, 2) == Rat(-1, 6));
    CHECK((Rat(-1, 6)).abs() == Rat(1, 6));
    CHECK(Rat(1, 3) < Rat(1, 2));
    CHECK_THROWS_AS(Rat(1, 2) / Rat(0), std::domain_error);
    Rat huge(INT64_MAX - 1, 1);
    CHECK_THROWS_AS(huge * huge, std::overflow_error);
}
