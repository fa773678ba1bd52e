#pragma once

// Daily BTC-USD closing rates and satoshi -> USD conversion.

#include <ransomtrace/chain_model.hpp>
#include <ransomtrace/error.hpp>

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace ransomtrace {

class RateError : public Error {
public:
    RateError(std::string kind, const std::string& message)
        : Error(std::move(kind), message) {}
};

// USD per BTC as a fixed-point decimal with 8 fraction digits.
class ClosePrice {
public:
    static constexpr std::int64_t kScale = 100'000'000;

    constexpr ClosePrice() = default;
    constexpr explicit ClosePrice(std::int64_t scaled) : scaled_(scaled) {}

    // Strict decimal: optional '-', digits, optional '.' and up to 8 digits.
    static ClosePrice parse(std::string_view s);

    constexpr std::int64_t scaled() const noexcept { return scaled_; }
    std::string to_string() const;
    friend constexpr auto operator<=>(ClosePrice, ClosePrice) = default;

private:
    std::int64_t scaled_ = 0;
};

using Date = std::chrono::sys_days;

Date utc_date(UnixSeconds ts) noexcept;
std::string format_date(Date d);
Date parse_date(std::string_view s);   // YYYY-MM-DD, throws Error("ParseError")

class RateTable {
public:
    RateTable() = default;

    // Validates contiguity and positivity; throws RateError.
    static RateTable from_map(std::map<Date, ClosePrice> closes);

    bool empty() const noexcept { return closes_.empty(); }
    std::size_t size() const noexcept { return closes_.size(); }
    Date first_date() const { return closes_.begin()->first; }
    Date last_date() const { return closes_.rbegin()->first; }

    // Throws RateError("DateOutOfRange").
    ClosePrice close_on(Date d) const;

    const std::map<Date, ClosePrice>& closes() const noexcept { return closes_; }

private:
    explicit RateTable(std::map<Date, ClosePrice> closes) : closes_(std::move(closes)) {}
    std::map<Date, ClosePrice> closes_;
};

// CSV with header `date,close`. Errors: MissingDates (message lists each
// gap), MalformedRow (1-based line number), NonPositivePrice.
RateTable parse_rate_table(std::istream& in);
RateTable load_rate_table(const std::filesystem::path& path);
void write_rate_table(std::ostream& out, const RateTable& table);

// (amount / 1e8) * close(date(ts)), rounded half-even to cents.
UsdCents to_usd(SatoshiAmount amount, UnixSeconds ts, const RateTable& table);

// Exposed for tests: exact product in cents, half-even.
UsdCents convert_exact(SatoshiAmount amount, ClosePrice close);

} // namespace ransomtrace
