#pragma once

// Statistics over the payment/transfer ledger: revenue, per-address
// distributions, laundering time and destination mix, address formats.
//
// Unless noted, functions take the full event list plus an address book and
// ignore events whose address is excluded. Events for addresses absent from
// the book raise Error("UnknownAddress").

#include <ransomtrace/chain_model.hpp>
#include <ransomtrace/clustering.hpp>
#include <ransomtrace/error.hpp>

#include <compare>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace ransomtrace {

using AddressBook = std::map<std::string, TrackedAddress>;
AddressBook make_address_book(const std::vector<TrackedAddress>& addresses);

struct PaymentSummary {
    std::size_t count = 0;
    UsdCents total_usd;
    UsdCents min_usd;
    UsdCents max_usd;
    // Mean of the two middle values for even counts, hence not whole cents.
    double median_usd = 0.0;
};

// Over the Payment events in `events`; throws Error("EmptyInput") if none.
PaymentSummary payment_summary(const std::vector<LedgerEvent>& events);

// Step function: fraction of samples <= values[i] is fractions[i].
class Ecdf {
public:
    // Throws Error("EmptyInput") on an empty sample.
    static Ecdf from_samples(std::vector<double> samples);

    const std::vector<double>& values() const noexcept { return values_; }
    const std::vector<double>& fractions() const noexcept { return fractions_; }
    std::size_t sample_count() const noexcept { return n_; }

    // Right-continuous evaluation; 0 below the first step.
    double operator()(double x) const;

private:
    std::vector<double> values_;
    std::vector<double> fractions_;
    std::size_t n_ = 0;
};

struct YearMonth {
    int year = 1970;
    unsigned month = 1;

    static YearMonth of(UnixSeconds ts);
    YearMonth next() const;
    std::string to_string() const;   // "2020-04"
    auto operator<=>(const YearMonth&) const = default;
};

// Contiguous months with one value per category. Revenue series hold cents,
// address series hold counts.
struct MonthlySeries {
    std::vector<YearMonth> months;
    std::vector<std::int64_t> commodity;
    std::vector<std::int64_t> raas;

    std::int64_t total(ActorCategory c) const;
};

struct RevenueByActor {
    std::map<std::string, UsdCents> by_family;
    std::map<ActorCategory, UsdCents> by_category;

    // Families by descending revenue, ties by name.
    std::vector<std::pair<std::string, UsdCents>> ranked() const;
};

RevenueByActor revenue_by_actor(const std::vector<LedgerEvent>& events, const AddressBook& book);
MonthlySeries monthly_revenue(const std::vector<LedgerEvent>& events, const AddressBook& book);
// Addresses counted in the month of their first payment.
MonthlySeries unique_addresses_per_month(const std::vector<LedgerEvent>& events, const AddressBook& book);

// One sample per non-excluded address of `category` in the book.
std::vector<double> payment_counts(const std::vector<LedgerEvent>& events, const AddressBook& book,
                                   ActorCategory category);
std::vector<double> transfer_counts(const std::vector<LedgerEvent>& events, const AddressBook& book,
                                    ActorCategory category);
Ecdf payments_per_address(const std::vector<LedgerEvent>& events, const AddressBook& book,
                          ActorCategory category);
Ecdf transfers_per_address(const std::vector<LedgerEvent>& events, const AddressBook& book,
                           ActorCategory category);

// Last transfer minus first payment, in days, for one address's events.
// Nothing when there is no transfer or no payment.
std::optional<double> collect_to_laundry(const std::vector<LedgerEvent>& address_events);

// Per-address collect-to-laundry samples for a category (addresses without
// transfers contribute nothing).
std::vector<double> collect_to_laundry_samples(const std::vector<LedgerEvent>& events, const AddressBook& book,
                                               ActorCategory category);

// (Σ payment sat − Σ transfer sat) / Σ payment sat, clamped to [0, 1].
// Works on any event set (one address or a whole family).
// Throws Error("EmptyInput") when there are no payments.
double remaining_fraction(const std::vector<LedgerEvent>& events);

// Events of every non-excluded address whose family matches (case-insensitive).
std::vector<LedgerEvent> family_events(const std::vector<LedgerEvent>& events, const AddressBook& book,
                                       const std::string& family);

struct AttributedTransfer {
    std::string address;
    ActorCategory category = ActorCategory::Commodity;
    UsdCents usd;
    Attribution attribution;
};

// Attributes every Transfer of a non-excluded address. Transfers whose
// spending tx is missing are logged and skipped.
std::vector<AttributedTransfer> attribute_transfers(const std::vector<LedgerEvent>& events,
                                                    const AddressBook& book, const std::vector<ChainTx>& txs,
                                                    LabelStore labels);

struct LaunderingMix {
    // Share of attributed (non-Unknown) USD per class; sums to 1 when any.
    std::map<EntityClass, double> fractions;
    std::map<EntityClass, UsdCents> usd;
    UsdCents attributed_usd;
    UsdCents unknown_usd;
};

LaunderingMix laundering_mix(const std::vector<AttributedTransfer>& attributions, ActorCategory category);

struct CensusRow {
    std::size_t count = 0;
    std::set<std::string> families;

    bool operator==(const CensusRow&) const = default;
};

std::map<ScriptType, CensusRow> address_format_census(const std::vector<TrackedAddress>& addresses);

// Commodity/RaaS dataset overview: actors, addresses, payments, transfers.
struct DatasetOverview {
    struct Column {
        std::size_t actors = 0;
        std::size_t addresses = 0;
        std::size_t payments = 0;
        std::size_t transfers = 0;
    };
    Column commodity;
    Column raas;
};

DatasetOverview dataset_overview(const std::vector<LedgerEvent>& events, const AddressBook& book);

struct StatsInput {
    std::vector<TrackedAddress> addresses;
    std::vector<LedgerEvent> events;
    std::vector<ChainTx> txs;
    LabelStore labels;
};

// Every stats export keyed by file name (e.g. "ecdf_payments_per_address_raas.csv",
// "monthly_revenue.csv", "revenue_by_family.csv", "laundering_mix_raas.csv",
// "payment_summary.json").
std::map<std::string, std::string> compute_stats(const StatsInput& input);

} // namespace ransomtrace
