#pragma once

#include "tarlev/error.hpp"
#include "tarlev/format.hpp"
#include "tarlev/io/csv.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace tarlev::io {

using Date = std::chrono::sys_days;

/// Parses YYYY-MM-DD.
inline Date parse_date(const std::string& s) {
    int y = 0;
    unsigned m = 0;
    unsigned d = 0;
    int consumed = 0;
    if (s.size() != 10 || std::sscanf(s.c_str(), "%4d-%2u-%2u%n", &y, &m, &d, &consumed) != 3 || consumed != 10)
        throw Error(ErrorCode::MalformedCsv, "invalid ISO date '" + s + "'");
    const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
    if (!ymd.ok()) throw Error(ErrorCode::MalformedCsv, "invalid calendar date '" + s + "'");
    return Date{ymd};
}

inline std::string format_date(Date d) {
    const std::chrono::year_month_day ymd{d};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                  static_cast<unsigned>(ymd.day()));
    return buf;
}

inline bool is_weekday(Date d) {
    const std::chrono::weekday w{d};
    return w != std::chrono::Saturday && w != std::chrono::Sunday;
}

struct PriceSeries {
    std::vector<Date> dates;
    std::vector<double> prices;
};

/// Reads a `date,price` CSV. Dates must be strictly increasing; prices finite and positive.
inline PriceSeries parse_price_csv(std::string_view text, const std::string& source = "<input>") {
    const auto rows = parse_csv(text);
    if (rows.empty()) throw Error(ErrorCode::EmptySeries, source + ": no header");
    auto lower = [](std::string s) {
        for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        return s;
    };
    if (rows[0].size() != 2 || lower(rows[0][0]) != "date" || lower(rows[0][1]) != "price")
        throw Error(ErrorCode::MalformedCsv, source + ": header must be `date,price`");
    PriceSeries out;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& r = rows[i];
        const std::string where = source + ": row " + std::to_string(i + 1);
        if (r.size() != 2) throw Error(ErrorCode::MalformedCsv, where + " does not have two fields");
        const Date d = parse_date(r[0]);
        double p = 0.0;
        const auto* first = r[1].data();
        const auto* last = first + r[1].size();
        const auto res = std::from_chars(first, last, p);
        if (res.ec != std::errc{} || res.ptr != last || !std::isfinite(p))
            throw Error(ErrorCode::MalformedCsv, where + ": price '" + r[1] + "' is not a number");
        if (!(p > 0.0)) throw Error(ErrorCode::NonPositivePrice, where + ": price must be positive");
        if (!out.dates.empty() && !(d > out.dates.back()))
            throw Error(ErrorCode::MalformedCsv, where + ": dates must be strictly increasing");
        out.dates.push_back(d);
        out.prices.push_back(p);
    }
    if (out.prices.empty()) throw Error(ErrorCode::EmptySeries, source + ": no prices");
    return out;
}

inline PriceSeries read_price_csv(const std::string& path) { return parse_price_csv(read_file(path), path); }

enum class CalendarPolicy {
    UnionObserved,  // weekdays on which at least one series has a price
    AllWeekdays,    // every Monday-Friday in the common span
};

enum class PointSource { Observed, Interpolated };

struct ReturnSeries {
    std::vector<Date> dates;          // dates[t] is the date of returns[t]
    std::vector<double> returns;      // ln P_t - ln P_{t-1}
    std::vector<PointSource> source;  // interpolated when either endpoint price was filled
    Date first_price_date{};          // the price with no return
    std::vector<double> prices;       // aligned prices, prices.size() == returns.size() + 1
    std::vector<PointSource> price_source;

    [[nodiscard]] std::size_t interpolated_count() const {
        return static_cast<std::size_t>(std::count(source.begin(), source.end(), PointSource::Interpolated));
    }
};

/// Aligns price series on a common business-day calendar over their overlapping span and
/// converts them to log returns. Missing log prices are linearly interpolated in calendar
/// position and flagged.
inline std::vector<ReturnSeries> align_prices(const std::vector<PriceSeries>& series,
                                              CalendarPolicy policy = CalendarPolicy::UnionObserved) {
    if (series.empty()) throw Error(ErrorCode::EmptySeries, "no series to align");
    Date start = series[0].dates.front();
    Date stop = series[0].dates.back();
    for (const auto& s : series) {
        if (s.dates.empty()) throw Error(ErrorCode::EmptySeries, "empty price series");
        start = std::max(start, s.dates.front());
        stop = std::min(stop, s.dates.back());
    }
    if (start > stop) throw Error(ErrorCode::EmptySeries, "price series do not overlap");

    std::set<Date> calendar;
    if (policy == CalendarPolicy::AllWeekdays) {
        for (Date d = start; d <= stop; d += std::chrono::days{1})
            if (is_weekday(d)) calendar.insert(d);
    } else {
        for (const auto& s : series)
            for (Date d : s.dates)
                if (d >= start && d <= stop && is_weekday(d)) calendar.insert(d);
    }
    const std::vector<Date> days(calendar.begin(), calendar.end());
    if (days.size() < 2) throw Error(ErrorCode::EmptySeries, "fewer than two aligned dates");

    std::vector<ReturnSeries> out;
    for (const auto& s : series) {
        std::map<Date, double> observed;
        for (std::size_t i = 0; i < s.dates.size(); ++i) observed.emplace(s.dates[i], s.prices[i]);
        std::vector<double> logp(days.size(), 0.0);
        std::vector<PointSource> src(days.size(), PointSource::Observed);
        std::vector<std::size_t> known;
        for (std::size_t i = 0; i < days.size(); ++i) {
            const auto it = observed.find(days[i]);
            if (it != observed.end()) {
                logp[i] = std::log(it->second);
                known.push_back(i);
            } else {
                src[i] = PointSource::Interpolated;
            }
        }
        if (known.empty()) throw Error(ErrorCode::EmptySeries, "series has no price on the aligned calendar");
        // Gaps before the first or after the last observation in the span are filled flat.
        for (std::size_t i = 0; i < days.size(); ++i) {
            if (src[i] == PointSource::Observed) continue;
            const auto hi = std::upper_bound(known.begin(), known.end(), i);
            if (hi == known.begin()) {
                logp[i] = logp[known.front()];
            } else if (hi == known.end()) {
                logp[i] = logp[known.back()];
            } else {
                const std::size_t a = *(hi - 1);
                const std::size_t b = *hi;
                const double w = static_cast<double>(i - a) / static_cast<double>(b - a);
                logp[i] = (1.0 - w) * logp[a] + w * logp[b];
            }
        }
        ReturnSeries r;
        r.first_price_date = days.front();
        r.price_source = src;
        r.prices.resize(days.size());
        for (std::size_t i = 0; i < days.size(); ++i)
            r.prices[i] = src[i] == PointSource::Observed ? observed.at(days[i]) : std::exp(logp[i]);
        for (std::size_t i = 1; i < days.size(); ++i) {
            r.dates.push_back(days[i]);
            r.returns.push_back(std::log(r.prices[i]) - std::log(r.prices[i - 1]));
            r.source.push_back(src[i] == PointSource::Interpolated || src[i - 1] == PointSource::Interpolated
                                   ? PointSource::Interpolated
                                   : PointSource::Observed);
        }
        out.push_back(std::move(r));
    }
    return out;
}

/// Reads and aligns `date,price` files (the first is conventionally the target series).
inline std::vector<ReturnSeries> ingest_prices(const std::vector<std::string>& paths,
                                               CalendarPolicy policy = CalendarPolicy::UnionObserved) {
    std::vector<PriceSeries> ps;
    for (const auto& p : paths) ps.push_back(read_price_csv(p));
    return align_prices(ps, policy);
}

/// The aligned prices as a `date,price` CSV; re-ingesting it reproduces the returns exactly.
inline std::string prices_csv(const ReturnSeries& r) {
    std::ostringstream os;
    os << "date,price\n";
    os << format_date(r.first_price_date) << ',' << format_double(r.prices[0]) << '\n';
    for (std::size_t i = 0; i < r.dates.size(); ++i)
        os << format_date(r.dates[i]) << ',' << format_double(r.prices[i + 1]) << '\n';
    return os.str();
}

/// date,return,source
inline std::string returns_csv(const ReturnSeries& r) {
    std::ostringstream os;
    os << "date,return,source\n";
    for (std::size_t i = 0; i < r.returns.size(); ++i)
        os << format_date(r.dates[i]) << ',' << format_double(r.returns[i]) << ','
           << (r.source[i] == PointSource::Observed ? "observed" : "interpolated") << '\n';
    return os.str();
}

}  // namespace tarlev::io
