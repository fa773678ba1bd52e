#include <ransomtrace/address_codec.hpp>
#include <ransomtrace/fixture_gen.hpp>
#include <ransomtrace/ingest.hpp>

#include <algorithm>
#include <array>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

namespace ransomtrace::fixture {
namespace {

constexpr UnixSeconds kStart = 1577836800;   // 2020-01-01
constexpr UnixSeconds kMinute = 60;
constexpr UnixSeconds kHour = 3600;
constexpr UnixSeconds kDay = 86400;

std::uint64_t uniform(Rng& rng, std::uint64_t lo, std::uint64_t hi)
{
    return std::uniform_int_distribution<std::uint64_t>(lo, hi)(rng);
}

bool chance(Rng& rng, double p) { return std::bernoulli_distribution(p)(rng); }

template <typename T>
const T& pick(Rng& rng, const std::vector<T>& v)
{
    return v[uniform(rng, 0, v.size() - 1)];
}

struct Utxo {
    std::string txid;
    std::uint32_t vout;
    std::string address;
    std::uint64_t value;
};

TxInput external_input(Rng& rng, const std::string& from, std::uint64_t value)
{
    return {random_txid(rng), static_cast<std::uint32_t>(uniform(rng, 0, 3)), from, SatoshiAmount(value)};
}

TxInput spend(const Utxo& u) { return {u.txid, u.vout, u.address, SatoshiAmount(u.value)}; }

// Splits `total` into `n` positive parts (total >= n).
std::vector<std::uint64_t> split(Rng& rng, std::uint64_t total, std::size_t n)
{
    std::vector<std::uint64_t> cuts{0, total};
    while (cuts.size() < n + 1) {
        auto c = uniform(rng, 1, total - 1);
        if (std::find(cuts.begin(), cuts.end(), c) == cuts.end()) cuts.push_back(c);
    }
    std::sort(cuts.begin(), cuts.end());
    std::vector<std::uint64_t> parts;
    for (std::size_t i = 1; i < cuts.size(); ++i) parts.push_back(cuts[i] - cuts[i - 1]);
    return parts;
}

void collect_utxos(const ChainTx& tx, const std::set<std::string>& tracked, std::vector<Utxo>& pool)
{
    for (std::uint32_t v = 0; v < tx.outputs.size(); ++v)
        if (tx.outputs[v].address && tracked.count(*tx.outputs[v].address))
            pool.push_back({tx.txid, v, *tx.outputs[v].address, tx.outputs[v].value.sat()});
}

Utxo take(Rng& rng, std::vector<Utxo>& pool)
{
    const auto i = uniform(rng, 0, pool.size() - 1);
    Utxo u = pool[i];
    pool[i] = pool.back();
    pool.pop_back();
    return u;
}

} // namespace

std::string random_txid(Rng& rng)
{
    static constexpr char kHex[] = "0123456789abcdef";
    std::string s(64, '0');
    for (auto& c : s) c = kHex[uniform(rng, 0, 15)];
    return s;
}

std::string random_address(Rng& rng, ScriptType type)
{
    std::vector<std::uint8_t> payload(type == ScriptType::P2WSH ? 32 : 20);
    for (auto& b : payload) b = static_cast<std::uint8_t>(uniform(rng, 0, 255));
    switch (type) {
    case ScriptType::P2PKH: return codec::base58check_encode(0x00, payload);
    case ScriptType::P2SH: return codec::base58check_encode(0x05, payload);
    case ScriptType::P2WPKH:
    case ScriptType::P2WSH: return codec::encode_segwit("bc", 0, payload);
    case ScriptType::Unknown: break;
    }
    throw Error("InvalidArgument", "cannot generate an address of unknown type");
}

std::string random_address(Rng& rng)
{
    static constexpr std::array kTypes{ScriptType::P2PKH, ScriptType::P2SH, ScriptType::P2WPKH, ScriptType::P2WSH};
    return random_address(rng, kTypes[uniform(rng, 0, kTypes.size() - 1)]);
}

GeneratedChain random_ledger_chain(std::uint64_t seed, std::size_t n_tracked, std::size_t n_txs)
{
    Rng rng(seed);
    GeneratedChain out;
    std::set<std::string> tracked_set;
    std::vector<std::string> tracked;
    while (tracked.size() < n_tracked) {
        auto a = random_address(rng);
        if (!tracked_set.insert(a).second) continue;
        tracked.push_back(a);
        TrackedAddress t;
        t.encoded = a;
        t.script_type = codec::classify(a);
        t.family = "Family" + std::to_string(tracked.size() % 17);
        t.category = tracked.size() % 2 ? ActorCategory::Commodity : ActorCategory::RaaS;
        t.created_at = kStart;
        out.tracked.push_back(std::move(t));
    }
    std::vector<std::string> external;
    for (int i = 0; i < 200; ++i) external.push_back(random_address(rng));

    std::vector<Utxo> pool;
    UnixSeconds ts = kStart;
    for (std::size_t i = 0; i < std::max(n_txs, n_tracked); ++i) {
        ts += static_cast<UnixSeconds>(uniform(rng, kMinute, 2 * kHour));
        ChainTx tx;
        tx.txid = random_txid(rng);
        tx.timestamp = ts;
        const std::uint64_t fee = uniform(rng, 200, 5000);
        const double roll = std::uniform_real_distribution<double>(0, 1)(rng);

        if (i < n_tracked || pool.empty() || roll < 0.45) {
            // External payment to one or more tracked addresses.
            std::uint64_t total = 0;
            const auto first = i < n_tracked ? tracked[i] : pick(rng, tracked);
            const std::size_t n_out = uniform(rng, 1, 3);
            for (std::size_t k = 0; k < n_out; ++k) {
                const auto v = uniform(rng, 10'000, 200'000'000);
                tx.outputs.push_back({k == 0 || chance(rng, 0.3) ? first : pick(rng, tracked), SatoshiAmount(v)});
                total += v;
            }
            if (chance(rng, 0.3)) {
                const auto v = uniform(rng, 1000, 50'000'000);
                tx.outputs.insert(tx.outputs.begin() + uniform(rng, 0, tx.outputs.size()),
                                  TxOutput{pick(rng, external), SatoshiAmount(v)});
                total += v;
            }
            for (auto part : split(rng, total + fee, uniform(rng, 1, 2)))
                tx.inputs.push_back(external_input(rng, pick(rng, external), part));
        } else if (roll < 0.50) {
            // Spend paying the spender back more than it spent.
            const Utxo u = take(rng, pool);
            const auto extra = uniform(rng, 100'000, 100'000'000);
            tx.inputs.push_back(spend(u));
            tx.inputs.push_back(external_input(rng, pick(rng, external), extra + fee));
            tx.outputs.push_back({u.address, SatoshiAmount(u.value + extra / 2)});
            tx.outputs.push_back({pick(rng, external), SatoshiAmount(extra - extra / 2)});
        } else {
            // Spend of 1-3 tracked UTXOs, possibly from different addresses.
            std::vector<Utxo> used;
            const std::size_t k = std::min<std::size_t>(pool.size(), uniform(rng, 1, 3));
            std::uint64_t total = 0;
            for (std::size_t j = 0; j < k; ++j) {
                used.push_back(take(rng, pool));
                tx.inputs.push_back(spend(used.back()));
                total += used.back().value;
            }
            if (chance(rng, 0.1)) {
                const auto v = uniform(rng, 10'000, 10'000'000);
                tx.inputs.push_back(external_input(rng, pick(rng, external), v));
                total += v;
            }
            std::shuffle(tx.inputs.begin(), tx.inputs.end(), rng);
            if (total <= fee) {
                tx.outputs.push_back({pick(rng, external), SatoshiAmount(total)});
            } else {
                const std::uint64_t available = total - fee;
                std::vector<std::optional<std::string>> dests{pick(rng, external)};
                if (chance(rng, 0.3)) dests.push_back(pick(rng, external));
                if (chance(rng, 0.4)) dests.push_back(pick(rng, used).address);   // self-change
                if (chance(rng, 0.2)) dests.push_back(pick(rng, tracked));
                if (chance(rng, 0.05)) dests.push_back(std::nullopt);              // non-standard output
                if (available < dests.size() * 10) dests.resize(1);
                std::shuffle(dests.begin(), dests.end(), rng);
                const auto parts = split(rng, available, dests.size());
                for (std::size_t j = 0; j < dests.size(); ++j) tx.outputs.push_back({dests[j], SatoshiAmount(parts[j])});
            }
        }
        collect_utxos(tx, tracked_set, pool);
        out.txs.push_back(std::move(tx));
    }
    return out;
}

std::vector<ChainTx> random_cospend_txs(std::uint64_t seed, std::size_t n_txs, std::size_t pool_size)
{
    Rng rng(seed);
    std::vector<std::string> pool;
    for (std::size_t i = 0; i < pool_size; ++i) pool.push_back(random_address(rng));
    std::vector<ChainTx> txs;
    for (std::size_t i = 0; i < n_txs; ++i) {
        ChainTx tx;
        tx.txid = random_txid(rng);
        tx.timestamp = kStart + static_cast<UnixSeconds>(i) * kMinute;
        const std::size_t n_in = uniform(rng, 1, 4);
        for (std::size_t k = 0; k < n_in; ++k) {
            std::optional<std::string> from;
            if (!chance(rng, 0.1)) from = pick(rng, pool);
            tx.inputs.push_back({random_txid(rng), 0, from, SatoshiAmount(uniform(rng, 1000, 1'000'000))});
        }
        const std::size_t n_out = uniform(rng, 1, 3);
        for (std::size_t k = 0; k < n_out; ++k) {
            std::optional<std::string> to;
            if (!chance(rng, 0.1)) to = pick(rng, pool);
            tx.outputs.push_back({to, SatoshiAmount(uniform(rng, 1000, 1'000'000))});
        }
        txs.push_back(std::move(tx));
    }
    return txs;
}

BehavioralFixture behavioral_fixture(std::uint64_t seed, std::size_t commodity_families, std::size_t raas_families)
{
    Rng rng(seed);
    BehavioralFixture fx;

    // Labeled first-hop destinations.
    struct Dest {
        std::string address;
        EntityClass cls;
    };
    std::vector<Dest> cash_out, sweep_to;
    auto add_entity = [&](const std::string& entity, EntityClass cls, std::vector<Dest>& into) {
        const auto a = random_address(rng);
        fx.labels.add(a, {entity, cls});
        into.push_back({a, cls});
    };
    add_entity("exchange-1", EntityClass::LowModerateRiskExchange, cash_out);
    add_entity("exchange-2", EntityClass::LowModerateRiskExchange, cash_out);
    add_entity("exchange-3", EntityClass::HighRiskExchange, cash_out);
    add_entity("casino-1", EntityClass::Gambling, cash_out);
    add_entity("wallet-1", EntityClass::WalletService, cash_out);
    add_entity("mixer-1", EntityClass::Mixer, sweep_to);
    add_entity("mixer-2", EntityClass::Mixer, sweep_to);
    add_entity("exchange-4", EntityClass::FraudulentExchange, sweep_to);
    std::vector<std::string> victims;
    for (int i = 0; i < 300; ++i) victims.push_back(random_address(rng));

    auto payment = [&](const std::string& to, std::uint64_t value, UnixSeconds ts) {
        ChainTx tx;
        tx.txid = random_txid(rng);
        tx.timestamp = ts;
        const auto fee = uniform(rng, 500, 5000);
        std::uint64_t in = value + fee;
        tx.outputs.push_back({to, SatoshiAmount(value)});
        if (chance(rng, 0.5)) {
            const auto change = uniform(rng, 10'000, 5'000'000);
            tx.outputs.push_back({pick(rng, victims), SatoshiAmount(change)});
            in += change;
        }
        tx.inputs.push_back(external_input(rng, pick(rng, victims), in));
        fx.txs.push_back(tx);
        return Utxo{tx.txid, 0, to, value};
    };
    auto transfer = [&](const std::vector<Utxo>& inputs, const std::vector<Dest>& dests, UnixSeconds ts) {
        ChainTx tx;
        tx.txid = random_txid(rng);
        tx.timestamp = ts;
        std::uint64_t total = 0;
        for (const auto& u : inputs) {
            tx.inputs.push_back(spend(u));
            total += u.value;
        }
        const auto parts = split(rng, total - 1000, dests.size());
        for (std::size_t i = 0; i < dests.size(); ++i) tx.outputs.push_back({dests[i].address, SatoshiAmount(parts[i])});
        fx.txs.push_back(std::move(tx));
    };

    for (std::size_t f = 0; f < commodity_families; ++f) {
        TrackedAddress t;
        t.encoded = random_address(rng, f % 2 ? ScriptType::P2SH : ScriptType::P2PKH);
        t.script_type = codec::classify(t.encoded);
        t.family = "Commodity" + std::string(1, static_cast<char>('A' + f));
        t.category = ActorCategory::Commodity;
        UnixSeconds ts = kStart + static_cast<UnixSeconds>(f * 10 * kDay + uniform(rng, 0, kDay));
        t.created_at = ts;
        const std::size_t n = uniform(rng, 30, 60);
        for (std::size_t i = 0; i < n; ++i) {
            const auto u = payment(t.encoded, uniform(rng, 5'000'000, 50'000'000), ts);
            if (chance(rng, 0.9))
                transfer({u}, {pick(rng, cash_out)}, ts + static_cast<UnixSeconds>(uniform(rng, 2 * kDay, 30 * kDay)));
            ts += static_cast<UnixSeconds>(uniform(rng, kDay, 6 * kDay));
        }
        fx.addresses.push_back(std::move(t));
    }

    for (std::size_t f = 0; f < raas_families; ++f) {
        const std::string family = "Raas" + std::string(1, static_cast<char>('A' + f));
        fx.raas_families.push_back(family);
        const std::size_t victims_n = uniform(rng, 8, 16);
        for (std::size_t v = 0; v < victims_n; ++v) {
            TrackedAddress t;
            t.encoded = random_address(rng);
            t.script_type = codec::classify(t.encoded);
            t.family = family;
            t.category = ActorCategory::RaaS;
            const auto ts = kStart + static_cast<UnixSeconds>(uniform(rng, 0, 400 * kDay));
            t.created_at = ts;
            const auto u = payment(t.encoded, uniform(rng, 100'000'000, 2'000'000'000), ts);
            std::vector<Dest> dests{pick(rng, sweep_to)};
            if (chance(rng, 0.3)) dests.push_back(pick(rng, sweep_to));
            transfer({u}, dests, ts + static_cast<UnixSeconds>(uniform(rng, 10 * kMinute, 6 * kHour)));
            fx.addresses.push_back(std::move(t));
        }
    }

    std::map<Date, ClosePrice> closes;
    std::int64_t cents = 7'200'00;
    for (Date d = utc_date(kStart) - std::chrono::days(1); d <= utc_date(kStart + 600 * kDay); d += std::chrono::days(1)) {
        closes.emplace(d, ClosePrice(cents * (ClosePrice::kScale / 100)));
        cents = std::max<std::int64_t>(1'000'00, cents + static_cast<std::int64_t>(uniform(rng, 0, 40'000)) - 19'000);
    }
    fx.rates = RateTable::from_map(std::move(closes));

    std::sort(fx.txs.begin(), fx.txs.end(),
              [](const ChainTx& a, const ChainTx& b) { return std::tie(a.timestamp, a.txid) < std::tie(b.timestamp, b.txid); });
    return fx;
}

std::vector<DatasetEntry> dataset_entries(const std::vector<TrackedAddress>& addresses, const std::vector<ChainTx>& txs)
{
    FixtureSource source(txs);
    std::vector<DatasetEntry> out;
    for (const auto& a : addresses) {
        DatasetEntry e{a, {}, {}};
        refresh_balances(e, build_ledger(a.encoded, source.fetch_txs(a.encoded)));
        out.push_back(std::move(e));
    }
    return out;
}

void write_fixture_dir(const BehavioralFixture& fx, const std::filesystem::path& dir)
{
    std::filesystem::create_directories(dir);
    write_file(dir / "chain.json", write_fixture_chain(fx.txs));
    write_file(dir / "dataset.json", export_dataset_json(dataset_entries(fx.addresses, fx.txs)));
    std::ostringstream rates;
    write_rate_table(rates, fx.rates);
    write_file(dir / "rates.csv", rates.str());
    write_file(dir / "labels.json", fx.labels.to_json());
    std::string registry = "# synthetic RaaS families\n";
    for (const auto& f : fx.raas_families) registry += f + "\n";
    write_file(dir / "raas_families.txt", registry);
}

} // namespace ransomtrace::fixture
