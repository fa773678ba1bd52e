#pragma once

// Core value types shared by every module. No I/O beyond the category
// registry loader.

#include <compare>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace ransomtrace {

// Block time in UTC seconds since the epoch.
using UnixSeconds = std::int64_t;

inline constexpr std::uint64_t kSatoshiPerBtc = 100'000'000;

// Exact amount in satoshi. Arithmetic is checked: overflow and negative
// results throw std::overflow_error / std::underflow_error.
class SatoshiAmount {
public:
    constexpr SatoshiAmount() = default;
    constexpr explicit SatoshiAmount(std::uint64_t sat) : sat_(sat) {}

    constexpr std::uint64_t sat() const noexcept { return sat_; }

    SatoshiAmount& operator+=(SatoshiAmount other);
    SatoshiAmount& operator-=(SatoshiAmount other);
    friend SatoshiAmount operator+(SatoshiAmount a, SatoshiAmount b) { return a += b; }
    friend SatoshiAmount operator-(SatoshiAmount a, SatoshiAmount b) { return a -= b; }

    friend constexpr auto operator<=>(SatoshiAmount, SatoshiAmount) = default;

    // Decimal BTC string with 8 fraction digits, e.g. "0.50000000".
    std::string to_btc_string() const;

private:
    std::uint64_t sat_ = 0;
};

// Signed USD amount in whole cents.
class UsdCents {
public:
    constexpr UsdCents() = default;
    constexpr explicit UsdCents(std::int64_t cents) : cents_(cents) {}

    constexpr std::int64_t cents() const noexcept { return cents_; }
    constexpr double dollars() const noexcept { return static_cast<double>(cents_) / 100.0; }

    constexpr UsdCents& operator+=(UsdCents o) noexcept { cents_ += o.cents_; return *this; }
    constexpr UsdCents& operator-=(UsdCents o) noexcept { cents_ -= o.cents_; return *this; }
    friend constexpr UsdCents operator+(UsdCents a, UsdCents b) noexcept { return a += b; }
    friend constexpr UsdCents operator-(UsdCents a, UsdCents b) noexcept { return a -= b; }
    friend constexpr auto operator<=>(UsdCents, UsdCents) = default;

    // "1234.50", "-0.07"
    std::string to_string() const;

private:
    std::int64_t cents_ = 0;
};

enum class ScriptType { P2PKH, P2SH, P2WPKH, P2WSH, Unknown };

enum class ActorCategory { Commodity, RaaS };

// Laundering entity taxonomy for first-hop destinations.
enum class EntityClass {
    AtmPaymentProvider,
    DarkMarketIllegalServices,
    FraudulentExchange,
    Gambling,
    LowModerateRiskExchange,
    Mixer,
    HighRiskExchange,
    WalletService,
    Unknown,
};

inline constexpr EntityClass kAllEntityClasses[] = {
    EntityClass::AtmPaymentProvider, EntityClass::DarkMarketIllegalServices,
    EntityClass::FraudulentExchange, EntityClass::Gambling,
    EntityClass::LowModerateRiskExchange, EntityClass::Mixer,
    EntityClass::HighRiskExchange, EntityClass::WalletService,
    EntityClass::Unknown,
};

std::string_view to_string(ScriptType t) noexcept;
std::string_view to_string(ActorCategory c) noexcept;
std::string_view to_string(EntityClass c) noexcept;

// Inverse of to_string; throw Error("ParseError") on unknown names.
ScriptType parse_script_type(std::string_view s);
ActorCategory parse_actor_category(std::string_view s);
EntityClass parse_entity_class(std::string_view s);

struct TrackedAddress {
    std::string encoded;
    ScriptType script_type = ScriptType::Unknown;
    std::string family;
    ActorCategory category = ActorCategory::Commodity;
    UnixSeconds created_at = 0;
    std::optional<std::string> excluded;

    bool operator==(const TrackedAddress&) const = default;
};

struct TxInput {
    std::string prev_txid;
    std::uint32_t prev_vout = 0;
    std::optional<std::string> source_address;
    SatoshiAmount value;

    bool operator==(const TxInput&) const = default;
};

struct TxOutput {
    std::optional<std::string> address;
    SatoshiAmount value;

    bool operator==(const TxOutput&) const = default;
};

struct ChainTx {
    std::string txid;
    UnixSeconds timestamp = 0;
    std::vector<TxInput> inputs;
    std::vector<TxOutput> outputs;

    bool operator==(const ChainTx&) const = default;
};

enum class Direction { Payment, Transfer };

std::string_view to_string(Direction d) noexcept;
Direction parse_direction(std::string_view s);

struct LedgerEvent {
    std::string address;
    std::string txid;
    Direction direction = Direction::Payment;
    SatoshiAmount btc;
    UsdCents usd;
    UnixSeconds timestamp = 0;
    // Output index for payments; -1 for transfers (one per spending tx).
    std::int32_t output_index = -1;

    bool operator==(const LedgerEvent&) const = default;
};

// Ordering used for every ledger: timestamp, then txid, then direction
// (payments first), then output index.
bool ledger_order(const LedgerEvent& a, const LedgerEvent& b) noexcept;

// Set of family names treated as RaaS. Matching is case-insensitive.
class CategoryRegistry {
public:
    CategoryRegistry() = default;
    explicit CategoryRegistry(const std::vector<std::string>& raas_families);

    // One family per line; blank lines and lines starting with '#' ignored.
    static CategoryRegistry load(const std::filesystem::path& path);

    bool is_raas(std::string_view family) const;
    std::size_t size() const noexcept { return raas_.size(); }

private:
    std::set<std::string> raas_;
};

ActorCategory family_to_category(std::string_view family, const CategoryRegistry& registry);

// UTC helpers.
std::string format_iso8601(UnixSeconds ts);       // 2021-06-01T12:00:00Z
UnixSeconds parse_iso8601(std::string_view s);     // accepts the format above
std::string ascii_lower(std::string_view s);

} // namespace ransomtrace
