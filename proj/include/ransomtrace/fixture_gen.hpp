#pragma once

// Deterministic synthetic chains for tests, acceptance runs and the
// example data under data/. All addresses are valid mainnet encodings.

#include <ransomtrace/chain_model.hpp>
#include <ransomtrace/clustering.hpp>
#include <ransomtrace/dataset.hpp>
#include <ransomtrace/rates.hpp>

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace ransomtrace::fixture {

using Rng = std::mt19937_64;

std::string random_txid(Rng& rng);
std::string random_address(Rng& rng, ScriptType type);
std::string random_address(Rng& rng);   // type drawn uniformly

struct GeneratedChain {
    std::vector<TrackedAddress> tracked;
    std::vector<ChainTx> txs;
};

// UTXO-consistent chain: external payments into tracked addresses, spends
// that co-spend several tracked UTXOs, self-change, multi-output payments
// to one address and spends that pay the spender back more than it spent.
// Every tracked address receives at least one payment.
GeneratedChain random_ledger_chain(std::uint64_t seed, std::size_t tracked = 120, std::size_t txs = 1200);

// Loose transactions over a small address pool for clustering: 1-4 inputs
// (some without a known source address) and 1-3 outputs each. No UTXO
// consistency.
std::vector<ChainTx> random_cospend_txs(std::uint64_t seed, std::size_t txs = 200, std::size_t pool = 150);

struct BehavioralFixture {
    std::vector<TrackedAddress> addresses;
    std::vector<ChainTx> txs;
    RateTable rates;
    LabelStore labels;
    std::vector<std::string> raas_families;
};

// Commodity families: one reused address, dozens of payments spread over
// months, each spent by its own small transfer days to weeks later.
// RaaS families: one address per victim, one payment, swept in a single
// transfer minutes to hours later to a mixer or fraudulent exchange.
BehavioralFixture behavioral_fixture(std::uint64_t seed, std::size_t commodity_families = 4,
                                     std::size_t raas_families = 4);

// Dataset entries (with totals and balances from the chain) for `addresses`.
std::vector<DatasetEntry> dataset_entries(const std::vector<TrackedAddress>& addresses,
                                          const std::vector<ChainTx>& txs);

// chain.json, dataset.json, rates.csv, labels.json, raas_families.txt.
void write_fixture_dir(const BehavioralFixture& fx, const std::filesystem::path& dir);

} // namespace ransomtrace::fixture
