#include <ransomtrace/node_rpc.hpp>

#include <httplib.h>
#include <json.hpp>

#include <cmath>
#include <regex>

namespace ransomtrace {
namespace {

using json = nlohmann::json;

constexpr int kNoInfoForAddress = -5;

SatoshiAmount btc_to_sat(const json& v)
{
    const double btc = v.get<double>();
    if (!(btc >= 0.0)) throw Error("RpcError", "negative or invalid BTC value");
    return SatoshiAmount(static_cast<std::uint64_t>(std::llround(btc * 1e8)));
}

std::optional<std::string> script_address(const json& spk)
{
    if (spk.contains("address") && spk["address"].is_string()) return spk["address"].get<std::string>();
    if (spk.contains("addresses") && spk["addresses"].is_array() && spk["addresses"].size() == 1)
        return spk["addresses"][0].get<std::string>();
    return std::nullopt;
}

ChainTx parse_tx(const json& j)
{
    ChainTx tx;
    if (!j.contains("blocktime") || j["blocktime"].is_null()) return tx;
    tx.txid = j.at("txid").get<std::string>();
    tx.timestamp = j["blocktime"].get<std::int64_t>();
    for (const auto& vin : j.at("vin")) {
        if (vin.contains("coinbase")) continue;
        TxInput in;
        in.prev_txid = vin.at("txid").get<std::string>();
        in.prev_vout = vin.at("vout").get<std::uint32_t>();
        if (vin.contains("prevOut")) {
            const auto& prev = vin["prevOut"];
            if (prev.contains("addresses") && prev["addresses"].is_array() && prev["addresses"].size() == 1)
                in.source_address = prev["addresses"][0].get<std::string>();
            if (prev.contains("value")) in.value = btc_to_sat(prev["value"]);
        }
        tx.inputs.push_back(std::move(in));
    }
    for (const auto& vout : j.at("vout")) {
        TxOutput out;
        out.value = btc_to_sat(vout.at("value"));
        if (vout.contains("scriptPubKey")) out.address = script_address(vout["scriptPubKey"]);
        tx.outputs.push_back(std::move(out));
    }
    return tx;
}

} // namespace

ChainTx parse_rpc_tx(const std::string& tx_json)
{
    try {
        return parse_tx(json::parse(tx_json));
    } catch (const json::exception& e) {
        throw Error("RpcError", std::string("malformed transaction: ") + e.what());
    }
}

NodeRpcSource::NodeRpcSource(std::string url, int page_size) : page_size_(page_size)
{
    static const std::regex re(R"(^(https?)://(?:([^:@/]*)(?::([^@/]*))?@)?([^/:]+)(?::(\d+))?(/.*)?$)");
    std::smatch m;
    if (!std::regex_match(url, m, re)) throw Error("ConfigError", "bad node URL '" + url + "'");
    scheme_host_port_ = m[1].str() + "://" + m[4].str() + (m[5].matched ? ":" + m[5].str() : "");
    user_ = m[2].str();
    password_ = m[3].str();
    path_ = m[6].matched ? m[6].str() : "/";
}

std::string NodeRpcSource::call(const std::string& method, const std::string& params_json)
{
    httplib::Client cli(scheme_host_port_);
    cli.set_connection_timeout(10);
    cli.set_read_timeout(60);
    if (!user_.empty()) cli.set_basic_auth(user_, password_);

    const std::string body =
        R"({"jsonrpc":"1.0","id":"ransomtrace","method":")" + method + R"(","params":)" + params_json + "}";
    auto res = cli.Post(path_, body, "application/json");
    if (!res)
        throw SourceUnavailable("node RPC " + method + ": " + httplib::to_string(res.error()));
    if (res->status >= 500 && res->body.empty())
        throw SourceUnavailable("node RPC " + method + ": HTTP " + std::to_string(res->status));
    if (res->status == 401 || res->status == 403)
        throw Error("RpcError", "node RPC authentication failed");

    json reply;
    try {
        reply = json::parse(res->body);
    } catch (const json::exception&) {
        if (res->status >= 500) throw SourceUnavailable("node RPC " + method + ": HTTP " + std::to_string(res->status));
        throw Error("RpcError", "node RPC " + method + ": non-JSON reply");
    }
    if (reply.contains("error") && !reply["error"].is_null()) {
        const auto& err = reply["error"];
        const int code = err.value("code", 0);
        if (code == kNoInfoForAddress) return "[]";
        if (code == -28) throw SourceUnavailable("node warming up: " + err.value("message", ""));
        throw Error("RpcError", "node RPC " + method + " error " + std::to_string(code) + ": " + err.value("message", ""));
    }
    return reply["result"].dump();
}

std::vector<ChainTx> NodeRpcSource::fetch_txs(const std::string& address)
{
    std::vector<ChainTx> out;
    for (int skip = 0;; skip += page_size_) {
        const json params = {address, 1, skip, page_size_, 1, false};
        const auto page = json::parse(call("searchrawtransactions", params.dump()));
        if (!page.is_array()) throw Error("RpcError", "searchrawtransactions returned a non-array");
        for (const auto& j : page) {
            try {
                auto tx = parse_tx(j);
                if (!tx.txid.empty()) out.push_back(std::move(tx));
            } catch (const json::exception& e) {
                throw Error("RpcError", std::string("malformed transaction: ") + e.what());
            }
        }
        if (static_cast<int>(page.size()) < page_size_) break;
    }
    return out;
}

std::int64_t NodeRpcSource::tip_height()
{
    return json::parse(call("getblockcount", "[]")).get<std::int64_t>();
}

} // namespace ransomtrace
