#pragma once

// Embedded single-file store (SQLite). Holds append-only per-address event
// logs, ingest checkpoints, raw transactions, the dataset and reports.
// All methods are thread-safe; writes are serialized on one connection.

#include <ransomtrace/chain_model.hpp>
#include <ransomtrace/dataset.hpp>
#include <ransomtrace/ingest.hpp>

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

struct sqlite3;

namespace ransomtrace {

class Store {
public:
    // ":memory:" opens a private in-memory database.
    explicit Store(const std::string& path);
    ~Store();
    Store(const Store&) = delete;
    Store& operator=(const Store&) = delete;

    // Inserts events not already present (keyed by address, txid, direction,
    // output index). Returns the number inserted. Never deletes.
    std::size_t append_events(const std::vector<LedgerEvent>& events);
    std::vector<LedgerEvent> events_for(const std::string& address) const;
    std::map<std::string, std::vector<LedgerEvent>> all_events() const;

    void put_checkpoint(const IngestCheckpoint& cp);
    std::optional<IngestCheckpoint> checkpoint(const std::string& address) const;

    void put_txs(const std::vector<ChainTx>& txs);
    std::vector<ChainTx> all_txs() const;

    void upsert_dataset_entry(const DatasetEntry& entry);
    std::optional<DatasetEntry> dataset_entry(const std::string& address) const;
    std::vector<DatasetEntry> dataset() const;

    void put_report_json(const std::string& id, const std::string& json);
    std::vector<std::string> all_report_json() const;

private:
    void exec(const char* sql);

    sqlite3* db_ = nullptr;
    mutable std::mutex mu_;
};

} // namespace ransomtrace
