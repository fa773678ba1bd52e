#include <ransomtrace/chain_model.hpp>
#include <ransomtrace/error.hpp>

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <tuple>

namespace ransomtrace {

SatoshiAmount& SatoshiAmount::operator+=(SatoshiAmount other)
{
    if (sat_ > std::numeric_limits<std::uint64_t>::max() - other.sat_)
        throw std::overflow_error("satoshi amount overflow");
    sat_ += other.sat_;
    return *this;
}

SatoshiAmount& SatoshiAmount::operator-=(SatoshiAmount other)
{
    if (other.sat_ > sat_)
        throw std::underflow_error("satoshi amount would go negative");
    sat_ -= other.sat_;
    return *this;
}

std::string SatoshiAmount::to_btc_string() const
{
    char buf[48];
    std::snprintf(buf, sizeof buf, "%llu.%08llu",
                  static_cast<unsigned long long>(sat_ / kSatoshiPerBtc),
                  static_cast<unsigned long long>(sat_ % kSatoshiPerBtc));
    return buf;
}

std::string UsdCents::to_string() const
{
    const bool neg = cents_ < 0;
    const auto mag = neg ? -static_cast<unsigned long long>(cents_)
                         : static_cast<unsigned long long>(cents_);
    char buf[48];
    std::snprintf(buf, sizeof buf, "%s%llu.%02llu", neg ? "-" : "", mag / 100, mag % 100);
    return buf;
}

std::string_view to_string(ScriptType t) noexcept
{
    switch (t) {
    case ScriptType::P2PKH: return "p2pkh";
    case ScriptType::P2SH: return "p2sh";
    case ScriptType::P2WPKH: return "p2wpkh";
    case ScriptType::P2WSH: return "p2wsh";
    case ScriptType::Unknown: break;
    }
    return "unknown";
}

std::string_view to_string(ActorCategory c) noexcept
{
    return c == ActorCategory::RaaS ? "raas" : "commodity";
}

std::string_view to_string(EntityClass c) noexcept
{
    switch (c) {
    case EntityClass::AtmPaymentProvider: return "atm-payment-provider";
    case EntityClass::DarkMarketIllegalServices: return "dark-market-illegal-services";
    case EntityClass::FraudulentExchange: return "fraudulent-exchange";
    case EntityClass::Gambling: return "gambling";
    case EntityClass::LowModerateRiskExchange: return "low-moderate-risk-exchange";
    case EntityClass::Mixer: return "mixer";
    case EntityClass::HighRiskExchange: return "high-risk-exchange";
    case EntityClass::WalletService: return "wallet-service";
    case EntityClass::Unknown: break;
    }
    return "unknown";
}

std::string_view to_string(Direction d) noexcept
{
    return d == Direction::Payment ? "payment" : "transfer";
}

ScriptType parse_script_type(std::string_view s)
{
    for (auto t : {ScriptType::P2PKH, ScriptType::P2SH, ScriptType::P2WPKH,
                   ScriptType::P2WSH, ScriptType::Unknown})
        if (to_string(t) == s) return t;
    throw Error("ParseError", "unknown script type '" + std::string(s) + "'");
}

ActorCategory parse_actor_category(std::string_view s)
{
    if (s == "commodity") return ActorCategory::Commodity;
    if (s == "raas") return ActorCategory::RaaS;
    throw Error("ParseError", "unknown actor category '" + std::string(s) + "'");
}

EntityClass parse_entity_class(std::string_view s)
{
    for (auto c : kAllEntityClasses)
        if (to_string(c) == s) return c;
    throw Error("ParseError", "unknown entity class '" + std::string(s) + "'");
}

Direction parse_direction(std::string_view s)
{
    if (s == "payment") return Direction::Payment;
    if (s == "transfer") return Direction::Transfer;
    throw Error("ParseError", "unknown direction '" + std::string(s) + "'");
}

bool ledger_order(const LedgerEvent& a, const LedgerEvent& b) noexcept
{
    return std::tie(a.timestamp, a.txid, a.direction, a.output_index)
         < std::tie(b.timestamp, b.txid, b.direction, b.output_index);
}

std::string ascii_lower(std::string_view s)
{
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

CategoryRegistry::CategoryRegistry(const std::vector<std::string>& raas_families)
{
    for (const auto& f : raas_families)
        raas_.insert(ascii_lower(f));
}

CategoryRegistry CategoryRegistry::load(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error("IoError", "cannot open category registry " + path.string());
    std::vector<std::string> names;
    std::string line;
    while (std::getline(in, line)) {
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        auto last = line.find_last_not_of(" \t\r");
        names.push_back(line.substr(first, last - first + 1));
    }
    return CategoryRegistry(names);
}

bool CategoryRegistry::is_raas(std::string_view family) const
{
    return raas_.count(ascii_lower(family)) != 0;
}

ActorCategory family_to_category(std::string_view family, const CategoryRegistry& registry)
{
    return registry.is_raas(family) ? ActorCategory::RaaS : ActorCategory::Commodity;
}

std::string format_iso8601(UnixSeconds ts)
{
    using namespace std::chrono;
    const sys_seconds tp{seconds{ts}};
    const auto day = floor<days>(tp);
    const year_month_day ymd{day};
    const hh_mm_ss hms{tp - day};
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ",
                  static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                  static_cast<unsigned>(ymd.day()), static_cast<int>(hms.hours().count()),
                  static_cast<int>(hms.minutes().count()),
                  static_cast<int>(hms.seconds().count()));
    return buf;
}

UnixSeconds parse_iso8601(std::string_view s)
{
    int y = 0, mo = 0, d = 0, h = 0, mi = 0, sec = 0;
    char tail = 0;
    const std::string str(s);
    if (std::sscanf(str.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d%c", &y, &mo, &d, &h, &mi, &sec, &tail) != 7
        || tail != 'Z' || str.size() != 20)
        throw Error("ParseError", "bad ISO-8601 timestamp '" + str + "'");
    using namespace std::chrono;
    const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok() || h > 23 || mi > 59 || sec > 59)
        throw Error("ParseError", "bad ISO-8601 timestamp '" + str + "'");
    return sys_days{ymd}.time_since_epoch().count() * 86400LL + h * 3600 + mi * 60 + sec;
}

} // namespace ransomtrace
