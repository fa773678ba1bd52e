#include <ransomtrace/clustering.hpp>
#include <ransomtrace/dataset.hpp>

#include <json.hpp>

#include <algorithm>
#include <numeric>
#include <set>
#include <tuple>

namespace ransomtrace {

void ClusterPartition::add(const std::string& address)
{
    if (index_.count(address)) return;
    const auto i = names_.size();
    index_.emplace(address, i);
    names_.push_back(address);
    parent_.push_back(i);
    size_.push_back(1);
    min_member_.push_back(i);
}

std::size_t ClusterPartition::root(std::size_t i) const
{
    while (parent_[i] != i) i = parent_[i];
    return i;
}

void ClusterPartition::unite(const std::string& a, const std::string& b)
{
    add(a);
    add(b);
    auto ra = root(index_.at(a));
    auto rb = root(index_.at(b));
    if (ra == rb) return;
    if (size_[ra] < size_[rb]) std::swap(ra, rb);
    parent_[rb] = ra;
    size_[ra] += size_[rb];
    if (names_[min_member_[rb]] < names_[min_member_[ra]]) min_member_[ra] = min_member_[rb];
}

bool ClusterPartition::contains(const std::string& address) const
{
    return index_.count(address) != 0;
}

bool ClusterPartition::same_cluster(const std::string& a, const std::string& b) const
{
    if (a == b) return true;
    auto ia = index_.find(a);
    auto ib = index_.find(b);
    if (ia == index_.end() || ib == index_.end()) return false;
    return root(ia->second) == root(ib->second);
}

std::string ClusterPartition::cluster_id(const std::string& address) const
{
    auto it = index_.find(address);
    if (it == index_.end()) return address;
    return names_[min_member_[root(it->second)]];
}

std::vector<std::vector<std::string>> ClusterPartition::clusters() const
{
    std::map<std::size_t, std::vector<std::string>> by_root;
    for (std::size_t i = 0; i < names_.size(); ++i) by_root[root(i)].push_back(names_[i]);
    std::vector<std::vector<std::string>> out;
    out.reserve(by_root.size());
    for (auto& [_, members] : by_root) {
        std::sort(members.begin(), members.end());
        out.push_back(std::move(members));
    }
    std::sort(out.begin(), out.end());
    return out;
}

ClusterPartition common_input_ownership(const std::vector<ChainTx>& txs)
{
    ClusterPartition p;
    for (const auto& tx : txs) {
        const std::string* first = nullptr;
        for (const auto& in : tx.inputs) {
            if (!in.source_address) continue;
            p.add(*in.source_address);
            if (first) p.unite(*first, *in.source_address);
            else first = &*in.source_address;
        }
        for (const auto& out : tx.outputs)
            if (out.address) p.add(*out.address);
    }
    return p;
}

AddressUsageIndex::AddressUsageIndex(const std::vector<ChainTx>& txs)
{
    for (const auto& tx : txs) {
        for (const auto& in : tx.inputs)
            if (in.source_address) uses_[*in.source_address].push_back({tx.timestamp, tx.txid, false});
        for (const auto& out : tx.outputs)
            if (out.address) uses_[*out.address].push_back({tx.timestamp, tx.txid, true});
    }
}

bool AddressUsageIndex::seen_before(const std::string& address, const ChainTx& tx) const
{
    auto it = uses_.find(address);
    if (it == uses_.end()) return false;
    return std::any_of(it->second.begin(), it->second.end(), [&](const Use& u) {
        return std::tie(u.ts, u.txid) < std::tie(tx.timestamp, tx.txid);
    });
}

bool AddressUsageIndex::paid_elsewhere(const std::string& address, const ChainTx& tx) const
{
    auto it = uses_.find(address);
    if (it == uses_.end()) return false;
    return std::any_of(it->second.begin(), it->second.end(),
                       [&](const Use& u) { return u.as_output && u.txid != tx.txid; });
}

std::optional<std::size_t> detect_change_output(const ChainTx& tx, const AddressUsageIndex& history)
{
    if (tx.outputs.size() < 2) return std::nullopt;

    std::set<std::string> inputs;
    for (const auto& in : tx.inputs)
        if (in.source_address) inputs.insert(*in.source_address);
    std::map<std::string, int> occurrences;
    for (const auto& out : tx.outputs)
        if (out.address) ++occurrences[*out.address];

    std::optional<std::size_t> found;
    for (std::size_t v = 0; v < tx.outputs.size(); ++v) {
        const auto& addr = tx.outputs[v].address;
        if (!addr || inputs.count(*addr) || occurrences[*addr] != 1) continue;
        if (history.seen_before(*addr, tx) || history.paid_elsewhere(*addr, tx)) continue;
        if (found) return std::nullopt;
        found = v;
    }
    return found;
}

void LabelStore::add(std::string address, EntityLabel label)
{
    by_address_[std::move(address)] = std::move(label);
}

LabelStore LabelStore::parse_json(const std::string& text)
{
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error("ParseError", std::string("invalid label JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("labels") || !doc["labels"].is_array())
        throw Error("ParseError", "label store must be an object with a 'labels' array");
    LabelStore store;
    try {
        for (const auto& j : doc["labels"])
            store.add(j.at("address").get<std::string>(),
                      {j.at("entity").get<std::string>(), parse_entity_class(j.at("class").get<std::string>())});
    } catch (const nlohmann::json::exception& e) {
        throw Error("ParseError", std::string("bad label entry: ") + e.what());
    }
    return store;
}

LabelStore LabelStore::load(const std::filesystem::path& path)
{
    return parse_json(read_file(path));
}

std::string LabelStore::to_json() const
{
    nlohmann::ordered_json doc;
    auto& arr = doc["labels"] = nlohmann::ordered_json::array();
    for (const auto& [address, label] : by_address_) {
        nlohmann::ordered_json j;
        j["address"] = address;
        j["entity"] = label.entity;
        j["class"] = std::string(to_string(label.cls));
        arr.push_back(std::move(j));
    }
    return doc.dump(2) + "\n";
}

void LabelStore::bind(const ClusterPartition& partition)
{
    by_cluster_.clear();
    // by_address_ is ordered, so the first label seen per cluster is the
    // smallest labeled member's.
    for (const auto& [addr, label] : by_address_)
        by_cluster_.try_emplace(partition.cluster_id(addr), label);
}

EntityLabel LabelStore::lookup(const std::string& address, const ClusterPartition& partition) const
{
    if (auto it = by_address_.find(address); it != by_address_.end()) return it->second;
    if (auto it = by_cluster_.find(partition.cluster_id(address)); it != by_cluster_.end()) return it->second;
    return {};
}

TxIndex index_txs(const std::vector<ChainTx>& txs)
{
    TxIndex idx;
    idx.reserve(txs.size());
    for (const auto& tx : txs) idx.emplace(tx.txid, tx);
    return idx;
}

std::vector<std::int64_t> apportion(std::int64_t total, const std::vector<std::uint64_t>& weights)
{
    using i128 = __int128;
    std::vector<std::int64_t> parts(weights.size(), 0);
    i128 wsum = 0;
    for (auto w : weights) wsum += w;
    if (wsum == 0 || weights.empty()) return parts;

    std::vector<i128> remainders(weights.size());
    i128 assigned = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        const i128 num = static_cast<i128>(total) * weights[i];
        parts[i] = static_cast<std::int64_t>(num / wsum);
        remainders[i] = num % wsum;
        assigned += parts[i];
    }
    std::vector<std::size_t> order(weights.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return remainders[a] > remainders[b]; });
    // Fewer than weights.size() cents remain after flooring.
    auto left = static_cast<std::size_t>(total - assigned);
    for (std::size_t k = 0; k < left; ++k) ++parts[order[k]];
    return parts;
}

Attribution attribute_first_hop(const LedgerEvent& transfer, const TxIndex& txs,
                                const AddressUsageIndex& history, const ClusterPartition& partition,
                                const LabelStore& labels)
{
    if (transfer.direction != Direction::Transfer)
        throw Error("NotATransfer", "event " + transfer.txid + " is a payment");
    auto it = txs.find(transfer.txid);
    if (it == txs.end())
        throw Error("MissingTx", "spending tx " + transfer.txid + " not indexed");
    const ChainTx& tx = it->second;
    auto change = detect_change_output(tx, history);
    // A fresh deposit address of a labeled service is a destination, not change.
    if (change && labels.lookup(*tx.outputs[*change].address, partition).cls != EntityClass::Unknown) change.reset();
    const std::size_t change_index = change.value_or(tx.outputs.size());

    std::map<EntityClass, std::uint64_t> weight_by_class;
    for (std::size_t v = 0; v < tx.outputs.size(); ++v) {
        const auto& out = tx.outputs[v];
        if (v == change_index) continue;
        if (out.address == transfer.address) continue;   // self-change, already netted
        const EntityClass cls = out.address ? labels.lookup(*out.address, partition).cls : EntityClass::Unknown;
        weight_by_class[cls] += out.value.sat();
    }

    Attribution result;
    std::uint64_t total_weight = 0;
    for (const auto& [_, w] : weight_by_class) total_weight += w;
    if (total_weight == 0) {
        result.dominant = EntityClass::Unknown;
        result.dominant_usd = transfer.usd;
        result.shares[EntityClass::Unknown] = transfer.usd;
        return result;
    }

    std::vector<EntityClass> classes;
    std::vector<std::uint64_t> weights;
    for (const auto& [cls, w] : weight_by_class) {
        classes.push_back(cls);
        weights.push_back(w);
    }
    const auto parts = apportion(transfer.usd.cents(), weights);
    for (std::size_t i = 0; i < classes.size(); ++i) result.shares[classes[i]] = UsdCents(parts[i]);

    // Dominant by USD, then by satoshi weight; enum order breaks exact ties.
    std::size_t best = 0;
    for (std::size_t i = 1; i < classes.size(); ++i)
        if (std::tie(parts[i], weights[i]) > std::tie(parts[best], weights[best])) best = i;
    result.dominant = classes[best];
    result.dominant_usd = UsdCents(parts[best]);
    return result;
}

} // namespace ransomtrace
