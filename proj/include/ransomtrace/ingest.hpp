#pragma once

// Per-address transaction history -> payment/transfer ledger.

#include <ransomtrace/chain_model.hpp>
#include <ransomtrace/error.hpp>
#include <ransomtrace/rates.hpp>

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

namespace ransomtrace {

class Store;

class ChainSource {
public:
    virtual ~ChainSource() = default;

    // Every confirmed transaction with `address` among its inputs or outputs.
    // Throws SourceUnavailable on transient failures.
    virtual std::vector<ChainTx> fetch_txs(const std::string& address) = 0;
    virtual std::int64_t tip_height() = 0;
};

// Chain held in memory, loaded from the fixture-chain JSON format.
class FixtureSource final : public ChainSource {
public:
    FixtureSource() = default;
    explicit FixtureSource(std::vector<ChainTx> txs);
    static FixtureSource load(const std::filesystem::path& path);

    std::vector<ChainTx> fetch_txs(const std::string& address) override;
    std::int64_t tip_height() override { return static_cast<std::int64_t>(txs_.size()); }

    // Sum of outputs paying `address` that no input in the chain spends.
    SatoshiAmount balance(const std::string& address) const;

    const std::vector<ChainTx>& txs() const noexcept { return txs_; }
    const ChainTx* find(const std::string& txid) const;

private:
    std::vector<ChainTx> txs_;
    std::unordered_map<std::string, std::vector<std::size_t>> by_address_;
    std::unordered_map<std::string, std::size_t> by_txid_;
};

class LedgerError : public Error {
public:
    LedgerError(std::string kind, const std::string& message) : Error(std::move(kind), message) {}
};

// Drops later duplicates of a txid, keeping the first occurrence.
std::vector<ChainTx> dedupe_by_txid(std::vector<ChainTx> txs);

// Payments per output paying `address`; one Transfer per spending tx for
// the net outflow (inputs from `address` minus outputs back to it). A tx
// that spends from `address` and pays it back more than it spent yields a
// single Payment for the net inflow. USD fields are left at zero.
//
// Throws LedgerError("InconsistentSpend") when an input attributed to
// `address` does not spend an output seen paying it, or spends one twice.
std::vector<LedgerEvent> build_ledger(const std::string& address, const std::vector<ChainTx>& txs);

// Fills usd on every event from the rate table.
void price_ledger(std::vector<LedgerEvent>& events, const RateTable& rates);

// txid and prev_txid must be 64 hex chars; timestamp positive.
bool is_well_formed(const ChainTx& tx);

class ExclusionList {
public:
    ExclusionList() = default;
    explicit ExclusionList(std::map<std::string, std::string> reasons) : reasons_(std::move(reasons)) {}

    std::optional<std::string> reason(const std::string& address) const;
    void add(std::string address, std::string reason) { reasons_[std::move(address)] = std::move(reason); }
    const std::map<std::string, std::string>& entries() const noexcept { return reasons_; }

private:
    std::map<std::string, std::string> reasons_;
};

inline constexpr std::string_view kNoPaymentReason = "no-payment";

struct FilterResult {
    std::vector<TrackedAddress> kept;
    std::vector<TrackedAddress> discarded_no_payment;
    std::vector<TrackedAddress> excluded;   // `excluded` field carries the reason
};

// Zero-payment addresses are discarded first; remaining addresses on the
// exclusion list are excluded. Addresses missing from `ledgers` count as
// having no events.
FilterResult apply_dataset_filters(const std::vector<TrackedAddress>& addrs,
                                   const std::map<std::string, std::vector<LedgerEvent>>& ledgers,
                                   const ExclusionList& exclusions);

struct RetryPolicy {
    int attempts = 5;
    std::chrono::milliseconds initial_delay{250};
    double multiplier = 2.0;
    std::function<void(std::chrono::milliseconds)> sleep =
        [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
};

// Calls `fn` until it returns without SourceUnavailable, backing off
// exponentially. The last SourceUnavailable propagates after `attempts`.
template <typename Fn>
auto with_retry(Fn&& fn, const RetryPolicy& policy = {})
{
    auto delay = policy.initial_delay;
    for (int attempt = 1;; ++attempt) {
        try {
            return fn();
        } catch (const SourceUnavailable&) {
            if (attempt >= policy.attempts) throw;
            policy.sleep(delay);
            delay = std::chrono::milliseconds(
                static_cast<std::int64_t>(static_cast<double>(delay.count()) * policy.multiplier));
        }
    }
}

struct IngestCheckpoint {
    std::string address;
    std::string last_seen_txid;
    UnixSeconds last_sync_time = 0;
    std::int64_t event_count = 0;

    bool operator==(const IngestCheckpoint&) const = default;
};

struct SyncOptions {
    RetryPolicy retry;
    std::function<UnixSeconds()> clock;   // defaults to system clock
};

// Fetches, validates (malformed txs are skipped and logged), builds and
// prices the ledger, appends new events and raw txs to the store, and
// refreshes the checkpoint. Returns the address's full stored ledger.
std::vector<LedgerEvent> sync_address(const TrackedAddress& addr, ChainSource& source, Store& store,
                                      const RateTable& rates, const SyncOptions& options = {});

} // namespace ransomtrace
