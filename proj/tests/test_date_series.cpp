#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "wwmon/date.hpp"
#include "wwmon/series.hpp"

#include <random>

using namespace wwmon;

TEST_CASE("date parsing") {
    CHECK(Date::parse("2023-01-19") == Date{2023, 1, 19});
    CHECK(Date::parse("2023-07-22T08:15:00") == Date{2023, 7, 22});
    CHECK(Date::parse("2023-07-22 08:15") == Date{2023, 7, 22});
    CHECK_FALSE(Date::parse("2023-02-30"));
    CHECK_FALSE(Date::parse("22/07/2023"));
    CHECK_FALSE(Date::parse(""));
    CHECK(Date{2024, 2, 29}.iso() == "2024-02-29");
}

TEST_CASE("date arithmetic") {
    const Date a{2023, 12, 30};
    CHECK((a + 3).iso() == "2024-01-02");
    CHECK((a + 3) - a == 3);
    CHECK(Date{2023, 1, 19}.iso_weekday() == 4);  // Thursday
}

TEST_CASE("iso weeks around the new year") {
    CHECK(iso_week(Date{2023, 1, 1}) == IsoWeek{2022, 52});
    CHECK(iso_week(Date{2023, 1, 2}) == IsoWeek{2023, 1});
    CHECK(iso_week(Date{2024, 12, 30}) == IsoWeek{2025, 1});
    CHECK(iso_week(Date{2020, 12, 31}) == IsoWeek{2020, 53});
}

TEST_CASE("quantile rule matches the order-statistic oracle") {
    CHECK(stats::quantile({0, 10, 20, 30}, 0.25) == doctest::Approx(7.5));
    CHECK(stats::quantile({0, 10, 20, 30}, 0.75) == doctest::Approx(22.5));
    CHECK(stats::quantile({10, 20, 30}, 0.5) == 20.0);
    std::mt19937_64 rng(3);
    std::normal_distribution<double> z;
    for (int rep = 0; rep < 200; ++rep) {
        std::vector<double> x(1 + rep % 17);
        for (auto& v : x) v = z(rng);
        const double q = (rep % 11) / 10.0;
        CHECK(stats::quantile(x, q) == doctest::Approx(oracle::quantile7(x, q)).epsilon(1e-14));
    }
}

TEST_CASE("series slicing and equality") {
    DailySeries s{Date{2023, 1, 1}, {1, kMissing, 3, 4}, "s"};
    CHECK(s.count_present() == 3);
    CHECK(s.end_date() == Date{2023, 1, 4});
    auto sl = s.slice(Date{2022, 12, 1}, Date{2023, 1, 2});
    CHECK(sl.size() == 2);
    CHECK(sl.start_date == s.start_date);
    CHECK(s == s);  // NaN slots compare equal
    CHECK(stats::sample_sd(std::vector<double>{2, 4, 4, 4, 5, 5, 7, 9}) == doctest::Approx(2.138089935));
}
