#pragma once

// Address clustering (common-input-ownership, one-time change) and
// first-hop attribution of transfers to laundering entity classes.

#include <ransomtrace/chain_model.hpp>
#include <ransomtrace/error.hpp>

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace ransomtrace {

// Disjoint sets over address strings (union by size, no path compression,
// so lookups are const and safe to share once construction is done).
class ClusterPartition {
public:
    // Adds `address` as a singleton if unseen.
    void add(const std::string& address);
    void unite(const std::string& a, const std::string& b);

    bool contains(const std::string& address) const;
    bool same_cluster(const std::string& a, const std::string& b) const;

    // Lexicographically smallest member of the address's cluster. An address
    // never added is its own singleton cluster.
    std::string cluster_id(const std::string& address) const;

    // Every cluster as a sorted member list; clusters ordered by first member.
    std::vector<std::vector<std::string>> clusters() const;

    std::size_t address_count() const noexcept { return names_.size(); }

private:
    std::size_t root(std::size_t i) const;

    std::unordered_map<std::string, std::size_t> index_;
    std::vector<std::string> names_;
    std::vector<std::size_t> parent_;
    std::vector<std::size_t> size_;
    std::vector<std::size_t> min_member_;   // valid at roots
};

// Every address in `txs` (inputs and outputs) is a member; addresses that
// co-spend in one transaction are united.
ClusterPartition common_input_ownership(const std::vector<ChainTx>& txs);

// Where each address appears, ordered by (timestamp, txid).
class AddressUsageIndex {
public:
    AddressUsageIndex() = default;
    explicit AddressUsageIndex(const std::vector<ChainTx>& txs);

    // Appears as input or output in a tx ordered strictly before `tx`.
    bool seen_before(const std::string& address, const ChainTx& tx) const;
    // Appears as an output of any transaction other than `tx`.
    bool paid_elsewhere(const std::string& address, const ChainTx& tx) const;

private:
    struct Use {
        UnixSeconds ts;
        std::string txid;
        bool as_output;
    };
    std::unordered_map<std::string, std::vector<Use>> uses_;
};

// The unique output whose address is fresh, never paid again and not among
// the inputs. Nothing when zero or several outputs qualify, or the tx has
// fewer than two outputs.
std::optional<std::size_t> detect_change_output(const ChainTx& tx, const AddressUsageIndex& history);

struct EntityLabel {
    std::string entity;
    EntityClass cls = EntityClass::Unknown;

    bool operator==(const EntityLabel&) const = default;
};

class LabelStore {
public:
    void add(std::string address, EntityLabel label);

    // {"labels": [{"address", "entity", "class"}]}; class in kebab-case.
    static LabelStore parse_json(const std::string& text);
    static LabelStore load(const std::filesystem::path& path);
    std::string to_json() const;

    // Derives per-cluster labels: a cluster takes the label of its smallest
    // labeled member.
    void bind(const ClusterPartition& partition);

    // Direct label, then the cluster's label, then {"", Unknown}.
    EntityLabel lookup(const std::string& address, const ClusterPartition& partition) const;

    std::size_t size() const noexcept { return by_address_.size(); }

private:
    std::map<std::string, EntityLabel> by_address_;
    std::unordered_map<std::string, EntityLabel> by_cluster_;
};

using TxIndex = std::unordered_map<std::string, ChainTx>;
TxIndex index_txs(const std::vector<ChainTx>& txs);

struct Attribution {
    EntityClass dominant = EntityClass::Unknown;
    UsdCents dominant_usd;
    // Per-class USD shares; sum to the transfer's USD exactly.
    std::map<EntityClass, UsdCents> shares;
};

// Errors: Error("MissingTx") when the spending tx is not indexed,
// Error("NotATransfer") for payment events.
Attribution attribute_first_hop(const LedgerEvent& transfer, const TxIndex& txs,
                                const AddressUsageIndex& history, const ClusterPartition& partition,
                                const LabelStore& labels);

// Splits a non-negative `total` across `weights` pro rata using largest
// remainders (ties go to the lower index), so parts sum to `total` exactly.
std::vector<std::int64_t> apportion(std::int64_t total, const std::vector<std::uint64_t>& weights);

} // namespace ransomtrace
