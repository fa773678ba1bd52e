#pragma once

#include <ransomtrace/config.hpp>
#include <ransomtrace/report_service.hpp>

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace ransomtrace {

// Transport-independent request/response so routing can be exercised
// without sockets. HttpServer adapts these to httplib.
struct ApiRequest {
    std::string method;
    std::string path;
    std::map<std::string, std::string> query;
    std::string moderator_token;   // X-Moderator-Token
    std::string client;            // remote address, for rate limiting
    std::string body;
};

struct ApiResponse {
    int status = 200;
    std::string content_type = "application/json";
    std::string body;
    std::map<std::string, std::string> headers;
};

// Produces the stats exports keyed by file name. Called per request.
using StatsProvider = std::function<std::map<std::string, std::string>()>;

struct ApiOptions {
    std::vector<ModeratorToken> moderator_tokens;
    StatsProvider stats;
    UnixSeconds retry_after_seconds = 60;
    // Called after a successful submission, e.g. to wake the verifier.
    std::function<void()> on_submit;
};

//   POST /api/reports                    submit (public, rate limited)
//   GET  /api/reports?state=pending      queue (moderator)
//   GET  /api/reports/{id}               detail (moderator)
//   POST /api/reports/{id}/decision      decide (moderator)
//   GET  /api/dataset                    export (public)
//   GET  /api/stats, /api/stats/{name}   analytics (public)
//
// Errors are {"error": <kind>, "message": ..., ["fields": {...}]}.
class Api {
public:
    Api(ReportService& service, ApiOptions options);
    ApiResponse handle(const ApiRequest& req) const;

private:
    ApiResponse submit(const ApiRequest& req) const;
    ApiResponse list(const ApiRequest& req) const;
    ApiResponse detail(const std::string& id) const;
    ApiResponse decide(const std::string& id, const std::string& reviewer, const ApiRequest& req) const;
    ApiResponse stats(const std::string& name) const;
    std::optional<std::string> moderator(const ApiRequest& req) const;

    ReportService& service_;
    ApiOptions options_;
};

// httplib server over an Api. handle() runs on httplib's worker pool.
class HttpServer {
public:
    explicit HttpServer(const Api& api);
    ~HttpServer();
    HttpServer(const HttpServer&) = delete;
    HttpServer& operator=(const HttpServer&) = delete;

    // Binds; port 0 picks a free port. Returns the bound port. Throws on failure.
    int bind(const std::string& host, int port);
    // Blocks until stop().
    void run();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// "host:port" -> pair. Throws Error("UsageError").
std::pair<std::string, int> parse_listen_address(const std::string& s);

} // namespace ransomtrace
