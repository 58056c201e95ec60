#pragma once

#include <chrono>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace wwmon {

/// Calendar date at daily resolution. Arithmetic is in whole days.
class Date {
public:
    constexpr Date() = default;
    constexpr explicit Date(std::chrono::sys_days days) : days_(days) {}
    constexpr Date(int year, unsigned month, unsigned day)
        : days_(std::chrono::year{year} / std::chrono::month{month} / std::chrono::day{day}) {}

    /// Parses "YYYY-MM-DD". Anything after the date part that starts with 'T'
    /// or a space (a time of day) is discarded.
    static std::optional<Date> parse(std::string_view text);

    [[nodiscard]] std::string iso() const;
    [[nodiscard]] constexpr std::chrono::sys_days sys_days() const { return days_; }
    [[nodiscard]] std::chrono::year_month_day ymd() const { return {days_}; }

    /// ISO-8601 weekday, Monday = 1 ... Sunday = 7.
    [[nodiscard]] unsigned iso_weekday() const {
        return std::chrono::weekday{days_}.iso_encoding();
    }

    constexpr Date operator+(std::int64_t n) const { return Date{days_ + std::chrono::days{n}}; }
    constexpr Date operator-(std::int64_t n) const { return Date{days_ - std::chrono::days{n}}; }
    constexpr std::int64_t operator-(Date other) const { return (days_ - other.days_).count(); }

    constexpr auto operator<=>(const Date&) const = default;

private:
    std::chrono::sys_days days_{};
};

struct IsoWeek {
    int year = 0;
    unsigned week = 0;
    auto operator<=>(const IsoWeek&) const = default;
};

IsoWeek iso_week(Date d);

}  // namespace wwmon
