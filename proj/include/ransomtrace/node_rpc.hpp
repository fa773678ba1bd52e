#pragma once

#include <ransomtrace/ingest.hpp>

#include <string>

namespace ransomtrace {

// Chain source backed by a node's JSON-RPC interface over HTTP. Address
// history comes from `searchrawtransactions` (address-indexing nodes such
// as btcd with --addrindex), with `vinextra` so inputs carry their previous
// output's address and value. Tip height from `getblockcount`.
//
// URL form: http://[user:pass@]host[:port][/path]
class NodeRpcSource final : public ChainSource {
public:
    explicit NodeRpcSource(std::string url, int page_size = 100);

    std::vector<ChainTx> fetch_txs(const std::string& address) override;
    std::int64_t tip_height() override;

private:
    // Throws SourceUnavailable on transport/5xx failures, Error("RpcError")
    // for JSON-RPC errors other than "no information for address" (-5).
    std::string call(const std::string& method, const std::string& params_json);

    std::string scheme_host_port_;
    std::string path_;
    std::string user_;
    std::string password_;
    int page_size_;
};

// Parses one verbose `searchrawtransactions` entry. Unconfirmed entries
// (no blocktime) yield an empty txid and should be skipped.
ChainTx parse_rpc_tx(const std::string& tx_json);

} // namespace ransomtrace
