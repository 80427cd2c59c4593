#include "snowball/error.hpp"
#include "snowball/interaction.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

using namespace snowball;

namespace {

Engagement ev(std::uint32_t author, std::uint32_t interactor, unsigned bits) {
    return {node_at(author), node_at(interactor), InteractionPattern(bits)};
}

// Authors a=0, b=1, c=2; interactors x=3, y=4, z=5 (the events_small fixture after merging).
std::vector<Engagement> fixture() {
    return {ev(0, 3, 0b1000), ev(0, 4, 0b1100), ev(0, 5, 0b0010), ev(0, 3, 0b1100),
            ev(1, 3, 0b0001), ev(1, 4, 0b1000), ev(1, 5, 0b1010), ev(1, 4, 0b1100),
            ev(2, 3, 0b1000), ev(2, 4, 0b1000), ev(2, 5, 0b1111), ev(2, 4, 0b0010)};
}

std::vector<Engagement> random_corpus(std::mt19937_64& rng, std::size_t max_events) {
    std::uniform_int_distribution<std::size_t> size(1, max_events);
    std::uniform_int_distribution<std::uint32_t> user(0, 29);
    std::uniform_int_distribution<unsigned> pattern(1, 15);
    std::vector<Engagement> out;
    const auto n = size(rng);
    for (std::size_t i = 0; i < n; ++i) {
        auto a = user(rng), b = user(rng);
        if (a == b) b = (b + 1) % 30;
        out.push_back(ev(a, b, pattern(rng)));
    }
    return out;
}

FrequencyTable table(CountingScheme scheme, FrequencyKind kind,
                     std::initializer_list<std::pair<const unsigned, double>> v) {
    return {scheme, kind, std::map<unsigned, double>(v)};
}

} // namespace

TEST(CountEvents, DistinctIncrementsOnlyOwnPattern) {
    const std::vector<Engagement> one{ev(0, 1, 0b1100)};
    const auto c = count_events(one, CountingScheme::Distinct);
    for (unsigned code = 1; code <= 15; ++code) EXPECT_EQ(c.global[code], code == 0b1100 ? 1u : 0u);
    EXPECT_EQ(c.total_events, 1u);
}

TEST(CountEvents, NestedIncrementsEverySubset) {
    const std::vector<Engagement> one{ev(0, 1, 0b1100)};
    const auto c = count_events(one, CountingScheme::Nested);
    for (unsigned code = 1; code <= 15; ++code) {
        const bool subset = code == 0b1000 || code == 0b0100 || code == 0b1100;
        EXPECT_EQ(c.global[code], subset ? 1u : 0u) << code;
    }
    EXPECT_EQ(c.total_events, 1u);
}

TEST(CountEvents, AudienceFacingCollapsesThenNests) {
    const std::vector<Engagement> one{ev(0, 1, 0b0101)};
    const auto c = count_events(one, CountingScheme::AudienceFacing);
    EXPECT_EQ(c.global[0b001], 1u);
    for (unsigned code = 2; code <= 7; ++code) EXPECT_EQ(c.global[code], 0u);
    const auto d = count_events(std::vector{ev(0, 1, 0b1100)}, CountingScheme::AudienceFacingDistinct);
    EXPECT_EQ(d.global[0b101], 1u);
    EXPECT_EQ(d.global[0b100], 0u);
}

TEST(NormalizeGlobal, SinglePatternIsHundredPercent) {
    const auto t = normalize_global(count_events(std::vector{ev(0, 1, 4), ev(2, 1, 4)}, CountingScheme::Distinct));
    EXPECT_DOUBLE_EQ(t.at(4), 100.0);
    EXPECT_DOUBLE_EQ(t.sum(), 100.0);
}

TEST(NormalizeGlobal, ThreeToOne) {
    const auto t = normalize_global(
        count_events(std::vector{ev(0, 1, 8), ev(0, 2, 8), ev(3, 1, 8), ev(0, 1, 2)}, CountingScheme::Distinct));
    EXPECT_DOUBLE_EQ(t.at(8), 75.0);
    EXPECT_DOUBLE_EQ(t.at(2), 25.0);
}

TEST(NormalizeGlobal, EmptyCorpus) {
    try {
        normalize_global(count_events({}, CountingScheme::Distinct));
        FAIL();
    } catch (const DataError& e) {
        EXPECT_STREQ(e.what(), "empty corpus");
    }
    EXPECT_THROW(normalize_source(count_events({}, CountingScheme::Distinct)), DataError);
    EXPECT_THROW(normalize_target(count_events({}, CountingScheme::Distinct)), DataError);
}

TEST(NormalizeSource, SingleSourceEqualsGlobal) {
    const auto c = count_events(std::vector{ev(0, 1, 8), ev(0, 2, 12), ev(0, 3, 8)}, CountingScheme::Distinct);
    const auto g = normalize_global(c), s = normalize_source(c);
    for (unsigned code = 1; code <= 15; ++code) EXPECT_DOUBLE_EQ(g.at(code), s.at(code));
}

TEST(NormalizeSource, UnweightedAverageOfRows) {
    // source 0: three events of 1000; source 1: one event of 0001
    const auto c = count_events(std::vector{ev(0, 5, 8), ev(0, 6, 8), ev(0, 7, 8), ev(1, 5, 1)},
                                CountingScheme::Distinct);
    const auto s = normalize_source(c);
    EXPECT_DOUBLE_EQ(s.at(8), 50.0);
    EXPECT_DOUBLE_EQ(s.at(1), 50.0);
}

TEST(NormalizeTarget, UnweightedAverageOfRows) {
    const auto c = count_events(std::vector{ev(5, 0, 2), ev(6, 0, 2), ev(7, 1, 4)}, CountingScheme::Distinct);
    const auto t = normalize_target(c);
    EXPECT_DOUBLE_EQ(t.at(2), 50.0);
    EXPECT_DOUBLE_EQ(t.at(4), 50.0);
    const auto single = count_events(std::vector{ev(5, 0, 2), ev(6, 0, 4)}, CountingScheme::Distinct);
    const auto g = normalize_global(single), tt = normalize_target(single);
    for (unsigned code = 1; code <= 15; ++code) EXPECT_DOUBLE_EQ(g.at(code), tt.at(code));
}

TEST(Calibrate, HandComputedFixture) {
    const auto cal = calibrate(count_events(fixture(), CountingScheme::Distinct));
    // global: n(1000)=4, n(1100)=3, n(0010)=2, one each of 0001, 1010, 1111; N=12
    EXPECT_NEAR(cal.global.at(0b1000), 100.0 * 4 / 12, 1e-12);
    EXPECT_NEAR(cal.global.at(0b1100), 25.0, 1e-12);
    EXPECT_NEAR(cal.global.at(0b0001), 100.0 / 12, 1e-12);
    // every author has four events: a (25,50,25), b (25 x4), c (50,25,25)
    EXPECT_NEAR(cal.source.at(0b1000), (25.0 + 25.0 + 50.0) / 3, 1e-12);
    EXPECT_NEAR(cal.source.at(0b1100), (50.0 + 25.0) / 3, 1e-12);
    // interactors x (4 events), y (5), z (3)
    EXPECT_NEAR(cal.target.at(0b1000), (50.0 + 40.0) / 3, 1e-12);
    EXPECT_NEAR(cal.target.at(0b1100), (25.0 + 40.0) / 3, 1e-12);
    EXPECT_NEAR(cal.target.at(0b0010), (20.0 + 100.0 / 3) / 3, 1e-12);
    EXPECT_NEAR(cal.target.at(0b1111), 100.0 / 9, 1e-12);
    const double star_1000 = (100.0 / 3 + 100.0 / 3 + 30.0) / 3;
    EXPECT_NEAR(cal.balanced.at(0b1000), star_1000, 1e-12);
    EXPECT_NEAR(cal.weights.omega.at(0b1000), 1.0 / star_1000, 1e-12);
    EXPECT_DOUBLE_EQ(cal.weights.omega_star.at(0b1000), 0.03);
    // unobserved patterns are outside the weight domain
    EXPECT_EQ(cal.balanced.values.size(), 6u);
    EXPECT_FALSE(cal.weights.lookup(0b0111));
}

TEST(Balance, Examples) {
    const auto s = CountingScheme::Distinct;
    const auto b = balance(table(s, FrequencyKind::Global, {{1, 2.2560}, {15, 0.0084}}),
                           table(s, FrequencyKind::Source, {{1, 2.0575}, {15, 0.0169}}),
                           table(s, FrequencyKind::Target, {{1, 1.4276}, {15, 0.0207}}));
    EXPECT_NEAR(b.at(1), 1.9137, 5e-5);
    EXPECT_NEAR(b.at(15), 0.0153, 5e-5);
    const auto same = balance(table(s, FrequencyKind::Global, {{3, 7.5}}),
                              table(s, FrequencyKind::Source, {{3, 7.5}}),
                              table(s, FrequencyKind::Target, {{3, 7.5}}));
    EXPECT_DOUBLE_EQ(same.at(3), 7.5);
}

TEST(Balance, DropsAllZeroPatternsAndChecksSchemes) {
    const auto s = CountingScheme::Nested;
    const auto b = balance(table(s, FrequencyKind::Global, {{1, 0.0}, {2, 1.0}}),
                           table(s, FrequencyKind::Source, {{1, 0.0}, {2, 2.0}}),
                           table(s, FrequencyKind::Target, {{1, 0.0}, {2, 3.0}}));
    EXPECT_EQ(b.values.count(1), 0u);
    EXPECT_DOUBLE_EQ(b.at(2), 2.0);
    EXPECT_THROW(balance(table(s, FrequencyKind::Global, {{2, 1.0}}),
                         table(CountingScheme::Distinct, FrequencyKind::Source, {{2, 1.0}}),
                         table(s, FrequencyKind::Target, {{2, 1.0}})),
                 DataError);
    EXPECT_THROW(balance(table(s, FrequencyKind::Global, {{2, 1.0}}),
                         table(s, FrequencyKind::Source, {{2, 1.0}, {3, 1.0}}),
                         table(s, FrequencyKind::Target, {{2, 1.0}})),
                 DataError);
}

TEST(Balance, IsTheLeastSquaresMinimizer) {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> noise(0.0, 0.05);
    for (int trial = 0; trial < 20; ++trial) {
        const auto c = count_events(random_corpus(rng, 300), CountingScheme::Distinct);
        const auto g = normalize_global(c), s = normalize_source(c), t = normalize_target(c);
        const auto b = balance(g, s, t);
        const double best = balance_objective(b, g, s, t);
        for (int k = 0; k < 50; ++k) {
            auto perturbed = b;
            bool moved = false;
            for (auto& [code, v] : perturbed.values) {
                const double d = noise(rng);
                v += d;
                moved = moved || d != 0;
            }
            if (moved) EXPECT_GT(balance_objective(perturbed, g, s, t), best);
        }
    }
}

TEST(WeightsFrom, Examples) {
    const auto s = CountingScheme::Distinct;
    const auto w = weights_from(table(s, FrequencyKind::Balanced, {{1, 1.9137}, {8, 100.0}, {15, 0.0153}}));
    EXPECT_NEAR(w.omega.at(1), 0.522548, 5e-7);
    EXPECT_DOUBLE_EQ(w.omega_star.at(1), 0.52);
    EXPECT_DOUBLE_EQ(w.omega.at(8), 0.01);
    EXPECT_NEAR(w.omega.at(15), 65.36, 5e-3);
}

TEST(WeightsFrom, ZeroFrequencyInDomainIsAnError) {
    try {
        weights_from(table(CountingScheme::Distinct, FrequencyKind::Balanced, {{7, 0.0}}));
        FAIL();
    } catch (const DataError& e) {
        EXPECT_NE(std::string(e.what()).find("unobserved pattern 0111"), std::string::npos);
        EXPECT_NE(std::string(e.what()).find("exclude or supply prior"), std::string::npos);
    }
}

TEST(WeightsFrom, StrictlyDecreasingInFrequency) {
    std::map<unsigned, double> v;
    for (unsigned code = 1; code <= 15; ++code) v[code] = 0.001 * code * code + 0.0001;
    const auto w = weights_from({CountingScheme::Distinct, FrequencyKind::Balanced, v});
    for (unsigned code = 2; code <= 15; ++code) EXPECT_LT(w.omega.at(code), w.omega.at(code - 1));
}

TEST(RoundHalfAway, DecimalHalves) {
    EXPECT_DOUBLE_EQ(round_half_away(0.125, 2), 0.13);
    EXPECT_DOUBLE_EQ(round_half_away(-0.125, 2), -0.13);
    EXPECT_DOUBLE_EQ(round_half_away(2.675, 2), 2.68);
    EXPECT_DOUBLE_EQ(round_half_away(0.5225, 2), 0.52);
    EXPECT_DOUBLE_EQ(round_half_away(22.392, 2), 22.39);
    EXPECT_DOUBLE_EQ(round_half_away(0.0139, 2), 0.01);
}

TEST(Nested, EqualsSupersetSumOfDistinctOnRandomCorpora) {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 100; ++trial) {
        const auto corpus = random_corpus(rng, 1000);
        const auto d = count_events(corpus, CountingScheme::Distinct);
        const auto n = count_events(corpus, CountingScheme::Nested);
        ASSERT_EQ(d.total_events, n.total_events);
        for (unsigned x = 1; x <= 15; ++x) {
            std::uint64_t sum = 0;
            for (unsigned y = 1; y <= 15; ++y) {
                if ((y & x) == x) sum += d.global[y];
            }
            EXPECT_EQ(n.global[x], sum);
        }
        EXPECT_EQ(n.global[15], d.global[15]);
    }
}

TEST(Nested, PublishedDistinctColumnSupersetSumForLike) {
    // distinct global column of the published weight table, by pattern code
    const std::map<unsigned, double> distinct{
        {0b0001, 2.2560}, {0b0010, 7.9125}, {0b0011, 0.3272}, {0b0100, 6.0684}, {0b0101, 0.0687},
        {0b0110, 0.0860}, {0b0111, 0.0018}, {0b1000, 72.3500}, {0b1001, 0.3707}, {0b1010, 1.0871},
        {0b1011, 0.0154}, {0b1100, 9.3286}, {0b1101, 0.1410}, {0b1110, 0.2730}, {0b1111, 0.0084}};
    double sum = 0;
    for (const auto& [y, v] : distinct) {
        if ((y & 0b1000) == 0b1000) sum += v;
    }
    EXPECT_NEAR(sum, 83.574, 0.01);
    double total = 0;
    for (const auto& [y, v] : distinct) total += v;
    EXPECT_NEAR(total, 100.0, 0.5);
}

TEST(Calibrate, InvariantUnderCorpusDuplication) {
    std::mt19937_64 rng(5);
    for (auto scheme : {CountingScheme::Distinct, CountingScheme::Nested, CountingScheme::AudienceFacing}) {
        const auto base = random_corpus(rng, 200);
        auto tripled = base;
        for (int k = 0; k < 2; ++k) tripled.insert(tripled.end(), base.begin(), base.end());
        const auto a = calibrate(count_events(base, scheme));
        const auto b = calibrate(count_events(tripled, scheme));
        ASSERT_EQ(a.balanced.values.size(), b.balanced.values.size());
        for (const auto& [code, v] : a.balanced.values) {
            EXPECT_NEAR(v, b.balanced.at(code), 1e-9);
            EXPECT_NEAR(a.global.at(code), b.global.at(code), 1e-9);
            EXPECT_NEAR(a.source.at(code), b.source.at(code), 1e-9);
            EXPECT_NEAR(a.target.at(code), b.target.at(code), 1e-9);
            EXPECT_EQ(a.weights.omega_star.at(code), b.weights.omega_star.at(code));
        }
    }
}

TEST(Calibrate, DistinctGlobalSumsToHundred) {
    std::mt19937_64 rng(8);
    const auto cal = calibrate(count_events(random_corpus(rng, 500), CountingScheme::Distinct));
    EXPECT_NEAR(cal.global.sum(), 100.0, 1e-9);
}

TEST(CalibrationCsv, RoundTrip) {
    const auto cal = calibrate(count_events(fixture(), CountingScheme::Nested));
    std::stringstream ss;
    write_calibration_csv(ss, cal);
    const auto back = read_calibration_csv(ss);
    EXPECT_EQ(back.weights.scheme, CountingScheme::Nested);
    EXPECT_EQ(back.balanced.values, cal.balanced.values);
    EXPECT_EQ(back.weights.omega, cal.weights.omega);
    EXPECT_EQ(back.weights.omega_star, cal.weights.omega_star);
    EXPECT_EQ(back.source.values.size(), cal.balanced.values.size());
}

TEST(CalibrationCsv, LoadedValuesAreAuthoritative) {
    const auto cal = read_calibration_file(SNOWBALL_DATA_DIR "/weights_distinct.csv");
    EXPECT_EQ(cal.weights.scheme, CountingScheme::Distinct);
    EXPECT_EQ(cal.balanced.values.size(), 15u);
    EXPECT_DOUBLE_EQ(cal.weights.omega_star.at(0b0111), 360.1);
    EXPECT_DOUBLE_EQ(cal.weights.omega_star.at(0b1111), 65.2);
    EXPECT_DOUBLE_EQ(cal.weights.omega_star.at(0b1000), 0.014);
    const auto af = read_calibration_file(SNOWBALL_DATA_DIR "/weights_audience_facing.csv");
    EXPECT_EQ(af.weights.scheme, CountingScheme::AudienceFacing);
    EXPECT_EQ(af.balanced.values.size(), 6u);
    EXPECT_FALSE(af.weights.lookup(0b011));
}

TEST(CalibrationCsv, RejectsMalformedInput) {
    const std::string header = "scheme,pattern,eta_global,eta_source,eta_target,eta_star,omega,omega_star\n";
    auto parse = [](const std::string& s) {
        std::istringstream in(s);
        return read_calibration_csv(in);
    };
    EXPECT_THROW(parse("pattern,omega\n"), DataError);
    EXPECT_THROW(parse(header), DataError);
    EXPECT_THROW(parse(header + "distinct,0001,1,1,1,1,1\n"), DataError);
    EXPECT_THROW(parse(header + "distinct,0001,1,1,1,1,1,-1\n"), DataError);
    EXPECT_THROW(parse(header + "distinct,001,1,1,1,1,1,1\n"), DataError);
    EXPECT_THROW(parse(header + "distinct,0001,1,1,1,1,1,1\nnested,0010,1,1,1,1,1,1\n"), DataError);
    EXPECT_THROW(parse(header + "weird,0001,1,1,1,1,1,1\n"), DataError);
}
