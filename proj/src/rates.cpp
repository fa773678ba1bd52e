#include <ransomtrace/rates.hpp>

#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace ransomtrace {

ClosePrice ClosePrice::parse(std::string_view s)
{
    auto bad = [&] { return Error("ParseError", "bad decimal '" + std::string(s) + "'"); };
    std::size_t i = 0;
    bool neg = false;
    if (i < s.size() && s[i] == '-') { neg = true; ++i; }
    if (i == s.size()) throw bad();

    std::int64_t whole = 0;
    std::size_t int_digits = 0;
    while (i < s.size() && s[i] >= '0' && s[i] <= '9') {
        if (whole > (std::numeric_limits<std::int64_t>::max() / kScale) / 10) throw bad();
        whole = whole * 10 + (s[i] - '0');
        ++i;
        ++int_digits;
    }
    std::int64_t frac = 0;
    int frac_digits = 0;
    if (i < s.size() && s[i] == '.') {
        ++i;
        while (i < s.size() && s[i] >= '0' && s[i] <= '9') {
            if (frac_digits == 8) throw bad();
            frac = frac * 10 + (s[i] - '0');
            ++frac_digits;
            ++i;
        }
        if (frac_digits == 0) throw bad();
    }
    if (i != s.size() || int_digits == 0) throw bad();
    for (int k = frac_digits; k < 8; ++k) frac *= 10;
    const std::int64_t v = whole * kScale + frac;
    return ClosePrice(neg ? -v : v);
}

std::string ClosePrice::to_string() const
{
    const bool neg = scaled_ < 0;
    const auto mag = neg ? -static_cast<unsigned long long>(scaled_)
                         : static_cast<unsigned long long>(scaled_);
    char buf[48];
    std::snprintf(buf, sizeof buf, "%s%llu.%08llu", neg ? "-" : "", mag / kScale, mag % kScale);
    std::string out(buf);
    // Trim to at least two fraction digits.
    while (out.size() > 3 && out.back() == '0' && out[out.size() - 3] != '.') out.pop_back();
    return out;
}

Date utc_date(UnixSeconds ts) noexcept
{
    using namespace std::chrono;
    return floor<days>(sys_seconds{seconds{ts}});
}

std::string format_date(Date d)
{
    const std::chrono::year_month_day ymd{d};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

Date parse_date(std::string_view s)
{
    auto bad = [&] { return Error("ParseError", "bad date '" + std::string(s) + "'"); };
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') throw bad();
    auto num = [&](std::size_t pos, std::size_t len) {
        int v = 0;
        for (std::size_t k = pos; k < pos + len; ++k) {
            if (s[k] < '0' || s[k] > '9') throw bad();
            v = v * 10 + (s[k] - '0');
        }
        return v;
    };
    using namespace std::chrono;
    const year_month_day ymd{year{num(0, 4)}, month{static_cast<unsigned>(num(5, 2))},
                             day{static_cast<unsigned>(num(8, 2))}};
    if (!ymd.ok()) throw bad();
    return sys_days{ymd};
}

RateTable RateTable::from_map(std::map<Date, ClosePrice> closes)
{
    for (const auto& [d, p] : closes)
        if (p.scaled() <= 0)
            throw RateError("NonPositivePrice", "non-positive close on " + format_date(d));

    std::vector<std::string> gaps;
    if (!closes.empty()) {
        const auto step = std::chrono::days{1};
        for (Date d = closes.begin()->first; d < closes.rbegin()->first; d += step)
            if (!closes.count(d)) gaps.push_back(format_date(d));
    }
    if (!gaps.empty()) {
        std::string msg = "missing dates:";
        for (const auto& g : gaps) msg += " " + g;
        throw RateError("MissingDates", msg);
    }
    return RateTable(std::move(closes));
}

ClosePrice RateTable::close_on(Date d) const
{
    auto it = closes_.find(d);
    if (it == closes_.end())
        throw RateError("DateOutOfRange", "no close price for " + format_date(d));
    return it->second;
}

RateTable parse_rate_table(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line))
        throw RateError("MalformedRow", "row 1: missing header");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "date,close")
        throw RateError("MalformedRow", "row 1: header must be 'date,close'");

    std::map<Date, ClosePrice> closes;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos)
            throw RateError("MalformedRow", "row " + std::to_string(row) + ": expected two columns");
        Date d;
        ClosePrice price;
        try {
            d = parse_date(std::string_view(line).substr(0, comma));
            price = ClosePrice::parse(std::string_view(line).substr(comma + 1));
        } catch (const Error& e) {
            throw RateError("MalformedRow", "row " + std::to_string(row) + ": " + e.what());
        }
        if (price.scaled() <= 0)
            throw RateError("NonPositivePrice", "row " + std::to_string(row) + ": close must be > 0");
        if (!closes.emplace(d, price).second)
            throw RateError("MalformedRow", "row " + std::to_string(row) + ": duplicate date");
    }
    return RateTable::from_map(std::move(closes));
}

RateTable load_rate_table(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw Error("IoError", "cannot open rate table " + path.string());
    return parse_rate_table(in);
}

void write_rate_table(std::ostream& out, const RateTable& table)
{
    out << "date,close\n";
    for (const auto& [d, p] : table.closes())
        out << format_date(d) << ',' << p.to_string() << '\n';
}

UsdCents convert_exact(SatoshiAmount amount, ClosePrice close)
{
    // cents = sat * scaled / 1e14
    using u128 = unsigned __int128;
    constexpr u128 kDivisor = static_cast<u128>(100'000'000'000'000ULL);
    const u128 num = static_cast<u128>(amount.sat()) * static_cast<u128>(close.scaled());
    u128 q = num / kDivisor;
    const u128 r = num % kDivisor;
    const u128 twice = r * 2;
    if (twice > kDivisor || (twice == kDivisor && (q & 1)))
        ++q;
    return UsdCents(static_cast<std::int64_t>(q));
}

UsdCents to_usd(SatoshiAmount amount, UnixSeconds ts, const RateTable& table)
{
    return convert_exact(amount, table.close_on(utc_date(ts)));
}

} // namespace ransomtrace
