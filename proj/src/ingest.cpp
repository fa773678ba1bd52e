#include <ransomtrace/dataset.hpp>
#include <ransomtrace/ingest.hpp>
#include <ransomtrace/log.hpp>
#include <ransomtrace/store.hpp>

#include <algorithm>
#include <chrono>
#include <map>
#include <numeric>
#include <set>
#include <tuple>
#include <unordered_set>
#include <utility>

namespace ransomtrace {
namespace {

bool is_hex64(const std::string& s)
{
    return s.size() == 64 && std::all_of(s.begin(), s.end(), [](char c) {
        return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f') || (c >= 'A' && c <= 'F');
    });
}

using Outpoint = std::pair<std::string, std::uint32_t>;

} // namespace

FixtureSource::FixtureSource(std::vector<ChainTx> txs) : txs_(std::move(txs))
{
    for (std::size_t i = 0; i < txs_.size(); ++i) {
        const auto& tx = txs_[i];
        by_txid_.emplace(tx.txid, i);
        std::set<std::string> touched;
        for (const auto& in : tx.inputs)
            if (in.source_address) touched.insert(*in.source_address);
        for (const auto& out : tx.outputs)
            if (out.address) touched.insert(*out.address);
        for (const auto& a : touched) by_address_[a].push_back(i);
    }
}

FixtureSource FixtureSource::load(const std::filesystem::path& path)
{
    return FixtureSource(parse_fixture_chain(read_file(path)));
}

std::vector<ChainTx> FixtureSource::fetch_txs(const std::string& address)
{
    std::vector<ChainTx> out;
    auto it = by_address_.find(address);
    if (it == by_address_.end()) return out;
    out.reserve(it->second.size());
    for (auto i : it->second) out.push_back(txs_[i]);
    return out;
}

SatoshiAmount FixtureSource::balance(const std::string& address) const
{
    std::set<Outpoint> spent;
    for (const auto& tx : txs_)
        for (const auto& in : tx.inputs) spent.emplace(in.prev_txid, in.prev_vout);
    SatoshiAmount total;
    auto it = by_address_.find(address);
    if (it == by_address_.end()) return total;
    for (auto i : it->second) {
        const auto& tx = txs_[i];
        for (std::uint32_t v = 0; v < tx.outputs.size(); ++v)
            if (tx.outputs[v].address == address && !spent.count({tx.txid, v}))
                total += tx.outputs[v].value;
    }
    return total;
}

const ChainTx* FixtureSource::find(const std::string& txid) const
{
    auto it = by_txid_.find(txid);
    return it == by_txid_.end() ? nullptr : &txs_[it->second];
}

std::vector<ChainTx> dedupe_by_txid(std::vector<ChainTx> txs)
{
    std::unordered_set<std::string> seen;
    std::vector<ChainTx> out;
    out.reserve(txs.size());
    for (auto& tx : txs)
        if (seen.insert(tx.txid).second) out.push_back(std::move(tx));
    return out;
}

std::vector<LedgerEvent> build_ledger(const std::string& address, const std::vector<ChainTx>& txs)
{
    std::map<Outpoint, SatoshiAmount> owned;
    for (const auto& tx : txs)
        for (std::uint32_t v = 0; v < tx.outputs.size(); ++v)
            if (tx.outputs[v].address == address) owned.emplace(Outpoint{tx.txid, v}, tx.outputs[v].value);

    std::set<Outpoint> consumed;
    std::vector<LedgerEvent> events;
    for (const auto& tx : txs) {
        SatoshiAmount spent;
        for (const auto& in : tx.inputs) {
            const Outpoint op{in.prev_txid, in.prev_vout};
            auto it = owned.find(op);
            const bool claims = in.source_address == address;
            if (!claims && it == owned.end()) continue;
            if (it == owned.end() || it->second != in.value)
                throw LedgerError("InconsistentSpend",
                                  "tx " + tx.txid + " spends " + op.first + ":" + std::to_string(op.second)
                                      + " which was never seen paying " + address);
            if (!consumed.insert(op).second)
                throw LedgerError("InconsistentSpend",
                                  "tx " + tx.txid + " double-spends " + op.first + ":" + std::to_string(op.second));
            spent += in.value;
        }

        SatoshiAmount received;
        std::int32_t first_self = -1;
        for (std::uint32_t v = 0; v < tx.outputs.size(); ++v) {
            if (tx.outputs[v].address != address) continue;
            if (first_self < 0) first_self = static_cast<std::int32_t>(v);
            received += tx.outputs[v].value;
        }

        auto make = [&](Direction dir, SatoshiAmount btc, std::int32_t idx) {
            LedgerEvent e;
            e.address = address;
            e.txid = tx.txid;
            e.direction = dir;
            e.btc = btc;
            e.timestamp = tx.timestamp;
            e.output_index = idx;
            return e;
        };

        if (spent.sat() == 0) {
            for (std::uint32_t v = 0; v < tx.outputs.size(); ++v)
                if (tx.outputs[v].address == address)
                    events.push_back(make(Direction::Payment, tx.outputs[v].value, static_cast<std::int32_t>(v)));
        } else if (spent > received) {
            events.push_back(make(Direction::Transfer, spent - received, -1));
        } else if (received > spent) {
            events.push_back(make(Direction::Payment, received - spent, first_self));
        }
    }
    std::sort(events.begin(), events.end(), ledger_order);
    return events;
}

void price_ledger(std::vector<LedgerEvent>& events, const RateTable& rates)
{
    for (auto& e : events) e.usd = to_usd(e.btc, e.timestamp, rates);
}

bool is_well_formed(const ChainTx& tx)
{
    if (!is_hex64(tx.txid) || tx.timestamp <= 0) return false;
    return std::all_of(tx.inputs.begin(), tx.inputs.end(),
                       [](const TxInput& in) { return is_hex64(in.prev_txid); });
}

std::optional<std::string> ExclusionList::reason(const std::string& address) const
{
    auto it = reasons_.find(address);
    if (it == reasons_.end()) return std::nullopt;
    return it->second;
}

FilterResult apply_dataset_filters(const std::vector<TrackedAddress>& addrs,
                                   const std::map<std::string, std::vector<LedgerEvent>>& ledgers,
                                   const ExclusionList& exclusions)
{
    FilterResult result;
    for (const auto& a : addrs) {
        auto it = ledgers.find(a.encoded);
        const bool paid = it != ledgers.end()
            && std::any_of(it->second.begin(), it->second.end(),
                           [](const LedgerEvent& e) { return e.direction == Direction::Payment; });
        if (!paid) {
            auto d = a;
            d.excluded = std::string(kNoPaymentReason);
            result.discarded_no_payment.push_back(std::move(d));
        } else if (auto why = exclusions.reason(a.encoded)) {
            auto x = a;
            x.excluded = *why;
            result.excluded.push_back(std::move(x));
        } else {
            auto k = a;
            k.excluded.reset();
            result.kept.push_back(std::move(k));
        }
    }
    return result;
}

std::vector<LedgerEvent> sync_address(const TrackedAddress& addr, ChainSource& source, Store& store,
                                      const RateTable& rates, const SyncOptions& options)
{
    auto fetched = with_retry([&] { return source.fetch_txs(addr.encoded); }, options.retry);

    std::vector<ChainTx> txs;
    txs.reserve(fetched.size());
    for (auto& tx : fetched) {
        if (is_well_formed(tx))
            txs.push_back(std::move(tx));
        else
            log::warn("CorruptTx: skipping malformed transaction '" + tx.txid + "' for " + addr.encoded);
    }
    txs = dedupe_by_txid(std::move(txs));

    auto events = build_ledger(addr.encoded, txs);
    price_ledger(events, rates);
    store.append_events(events);
    store.put_txs(txs);

    auto stored = store.events_for(addr.encoded);

    IngestCheckpoint cp;
    cp.address = addr.encoded;
    if (!txs.empty()) {
        const auto latest = std::max_element(txs.begin(), txs.end(), [](const ChainTx& a, const ChainTx& b) {
            return std::tie(a.timestamp, a.txid) < std::tie(b.timestamp, b.txid);
        });
        cp.last_seen_txid = latest->txid;
    } else if (auto prev = store.checkpoint(addr.encoded)) {
        cp.last_seen_txid = prev->last_seen_txid;
    }
    cp.last_sync_time = options.clock
        ? options.clock()
        : std::chrono::duration_cast<std::chrono::seconds>(
              std::chrono::system_clock::now().time_since_epoch()).count();
    cp.event_count = static_cast<std::int64_t>(stored.size());
    store.put_checkpoint(cp);
    return stored;
}

} // namespace ransomtrace
