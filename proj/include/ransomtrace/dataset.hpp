#pragma once

// Public dataset document and the JSON file formats shared across modules.

#include <ransomtrace/chain_model.hpp>
#include <ransomtrace/ingest.hpp>

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace ransomtrace {

struct DatasetEntry {
    TrackedAddress address;
    SatoshiAmount total_received;
    SatoshiAmount balance;

    bool operator==(const DatasetEntry&) const = default;
};

// Sort key for export: created_at, then address string.
void sort_for_export(std::vector<DatasetEntry>& entries);

// {"addresses": [{"address", "family", "category", "script_type",
// "created_at", "total_received_sat", "balance_sat"}]}, keys in that order,
// two-space indent, trailing newline. Excluded entries are skipped.
std::string export_dataset_json(std::vector<DatasetEntry> entries);

// Inverse of export. `category` and `script_type` are optional on input:
// missing values are derived from `registry` and the address codec. Missing
// `created_at` defaults to 0, missing amounts to 0.
std::vector<DatasetEntry> parse_dataset_json(const std::string& text, const CategoryRegistry& registry);
std::vector<DatasetEntry> load_dataset(const std::filesystem::path& path, const CategoryRegistry& registry);

// Totals derived from a ledger: Σ payments and Σ payments − Σ transfers.
void refresh_balances(DatasetEntry& entry, const std::vector<LedgerEvent>& ledger);

// Fixture-chain JSON: {"txs": [{"txid", "time", "inputs": [{"prev_txid",
// "vout", "address", "value_sat"}], "outputs": [{"address", "value_sat"}]}]}
std::vector<ChainTx> parse_fixture_chain(const std::string& text);
std::string write_fixture_chain(const std::vector<ChainTx>& txs);
std::string tx_to_json(const ChainTx& tx);
ChainTx tx_from_json(const std::string& text);

// {"exclusions": [{"address", "reason"}]}
ExclusionList parse_exclusions(const std::string& text);
ExclusionList load_exclusions(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& content);

} // namespace ransomtrace
