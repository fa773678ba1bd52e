#include <ransomtrace/address_codec.hpp>
#include <ransomtrace/dataset.hpp>

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <sstream>
#include <tuple>

namespace ransomtrace {

using ojson = nlohmann::ordered_json;

namespace {

std::uint64_t as_sat(const ojson& v, const char* field)
{
    if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<std::int64_t>() < 0))
        throw Error("ParseError", std::string(field) + " must be a non-negative integer");
    return v.get<std::uint64_t>();
}

ojson parse_json(const std::string& text)
{
    try {
        return ojson::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error("ParseError", std::string("invalid JSON: ") + e.what());
    }
}

ojson tx_json(const ChainTx& tx)
{
    ojson j;
    j["txid"] = tx.txid;
    j["time"] = tx.timestamp;
    auto& ins = j["inputs"] = ojson::array();
    for (const auto& in : tx.inputs) {
        ojson i;
        i["prev_txid"] = in.prev_txid;
        i["vout"] = in.prev_vout;
        i["address"] = in.source_address ? ojson(*in.source_address) : ojson(nullptr);
        i["value_sat"] = in.value.sat();
        ins.push_back(std::move(i));
    }
    auto& outs = j["outputs"] = ojson::array();
    for (const auto& out : tx.outputs) {
        ojson o;
        o["address"] = out.address ? ojson(*out.address) : ojson(nullptr);
        o["value_sat"] = out.value.sat();
        outs.push_back(std::move(o));
    }
    return j;
}

ChainTx tx_from(const ojson& j)
{
    try {
        ChainTx tx;
        tx.txid = j.at("txid").get<std::string>();
        tx.timestamp = j.at("time").get<std::int64_t>();
        for (const auto& i : j.at("inputs")) {
            TxInput in;
            in.prev_txid = i.at("prev_txid").get<std::string>();
            in.prev_vout = i.at("vout").get<std::uint32_t>();
            if (!i.at("address").is_null()) in.source_address = i.at("address").get<std::string>();
            in.value = SatoshiAmount(as_sat(i.at("value_sat"), "value_sat"));
            tx.inputs.push_back(std::move(in));
        }
        for (const auto& o : j.at("outputs")) {
            TxOutput out;
            if (!o.at("address").is_null()) out.address = o.at("address").get<std::string>();
            out.value = SatoshiAmount(as_sat(o.at("value_sat"), "value_sat"));
            tx.outputs.push_back(std::move(out));
        }
        return tx;
    } catch (const nlohmann::json::exception& e) {
        throw Error("ParseError", std::string("bad transaction: ") + e.what());
    }
}

} // namespace

void sort_for_export(std::vector<DatasetEntry>& entries)
{
    std::sort(entries.begin(), entries.end(), [](const DatasetEntry& a, const DatasetEntry& b) {
        return std::tie(a.address.created_at, a.address.encoded)
             < std::tie(b.address.created_at, b.address.encoded);
    });
}

std::string export_dataset_json(std::vector<DatasetEntry> entries)
{
    std::erase_if(entries, [](const DatasetEntry& e) { return e.address.excluded.has_value(); });
    sort_for_export(entries);
    ojson doc;
    auto& arr = doc["addresses"] = ojson::array();
    for (const auto& e : entries) {
        ojson j;
        j["address"] = e.address.encoded;
        j["family"] = e.address.family;
        j["category"] = std::string(to_string(e.address.category));
        j["script_type"] = std::string(to_string(e.address.script_type));
        j["created_at"] = format_iso8601(e.address.created_at);
        j["total_received_sat"] = e.total_received.sat();
        j["balance_sat"] = e.balance.sat();
        arr.push_back(std::move(j));
    }
    return doc.dump(2) + "\n";
}

std::vector<DatasetEntry> parse_dataset_json(const std::string& text, const CategoryRegistry& registry)
{
    const auto doc = parse_json(text);
    if (!doc.is_object() || !doc.contains("addresses") || !doc["addresses"].is_array())
        throw Error("ParseError", "dataset must be an object with an 'addresses' array");
    std::vector<DatasetEntry> out;
    try {
        for (const auto& j : doc["addresses"]) {
            DatasetEntry e;
            e.address.encoded = j.at("address").get<std::string>();
            e.address.family = j.at("family").get<std::string>();
            if (e.address.family.empty())
                throw Error("ParseError", "empty family for " + e.address.encoded);
            e.address.category = j.contains("category")
                ? parse_actor_category(j["category"].get<std::string>())
                : family_to_category(e.address.family, registry);
            e.address.script_type = j.contains("script_type")
                ? parse_script_type(j["script_type"].get<std::string>())
                : codec::classify(e.address.encoded);
            if (j.contains("created_at"))
                e.address.created_at = parse_iso8601(j["created_at"].get<std::string>());
            if (j.contains("total_received_sat"))
                e.total_received = SatoshiAmount(as_sat(j["total_received_sat"], "total_received_sat"));
            if (j.contains("balance_sat"))
                e.balance = SatoshiAmount(as_sat(j["balance_sat"], "balance_sat"));
            out.push_back(std::move(e));
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error("ParseError", std::string("bad dataset entry: ") + e.what());
    }
    return out;
}

std::vector<DatasetEntry> load_dataset(const std::filesystem::path& path, const CategoryRegistry& registry)
{
    return parse_dataset_json(read_file(path), registry);
}

void refresh_balances(DatasetEntry& entry, const std::vector<LedgerEvent>& ledger)
{
    SatoshiAmount in, out;
    for (const auto& e : ledger) {
        if (e.address != entry.address.encoded) continue;
        (e.direction == Direction::Payment ? in : out) += e.btc;
    }
    entry.total_received = in;
    entry.balance = in >= out ? in - out : SatoshiAmount{};
}

std::vector<ChainTx> parse_fixture_chain(const std::string& text)
{
    const auto doc = parse_json(text);
    if (!doc.is_object() || !doc.contains("txs") || !doc["txs"].is_array())
        throw Error("ParseError", "fixture chain must be an object with a 'txs' array");
    std::vector<ChainTx> txs;
    txs.reserve(doc["txs"].size());
    for (const auto& j : doc["txs"]) txs.push_back(tx_from(j));
    return txs;
}

std::string write_fixture_chain(const std::vector<ChainTx>& txs)
{
    ojson doc;
    auto& arr = doc["txs"] = ojson::array();
    for (const auto& tx : txs) arr.push_back(tx_json(tx));
    return doc.dump() + "\n";
}

std::string tx_to_json(const ChainTx& tx) { return tx_json(tx).dump(); }

ChainTx tx_from_json(const std::string& text) { return tx_from(parse_json(text)); }

ExclusionList parse_exclusions(const std::string& text)
{
    const auto doc = parse_json(text);
    if (!doc.is_object() || !doc.contains("exclusions") || !doc["exclusions"].is_array())
        throw Error("ParseError", "exclusion list must be an object with an 'exclusions' array");
    ExclusionList list;
    try {
        for (const auto& j : doc["exclusions"])
            list.add(j.at("address").get<std::string>(), j.at("reason").get<std::string>());
    } catch (const nlohmann::json::exception& e) {
        throw Error("ParseError", std::string("bad exclusion entry: ") + e.what());
    }
    return list;
}

ExclusionList load_exclusions(const std::filesystem::path& path)
{
    return parse_exclusions(read_file(path));
}

std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("IoError", "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& content)
{
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("IoError", "cannot write " + path.string());
    out << content;
}

} // namespace ransomtrace
