#include <ransomtrace/http_api.hpp>
#include <ransomtrace/log.hpp>

#include <httplib.h>
#include <json.hpp>

#include <mutex>
#include <regex>

namespace ransomtrace {
namespace {

using json = nlohmann::ordered_json;

ApiResponse json_response(int status, const std::string& body)
{
    ApiResponse r;
    r.status = status;
    r.body = body;
    return r;
}

ApiResponse error_response(int status, const std::string& kind, const std::string& message)
{
    json j;
    j["error"] = kind;
    j["message"] = message;
    return json_response(status, j.dump());
}

int status_for(const std::string& kind)
{
    if (kind == "NotFound") return 404;
    if (kind == "InvalidTransition" || kind == "VerificationIncomplete") return 409;
    if (kind == "RateLimited") return 429;
    if (kind == "SourceUnavailable") return 503;
    if (kind == "ValidationFailed" || kind == "ParseError") return 400;
    return 500;
}

std::string content_type_for(const std::string& name)
{
    if (name.ends_with(".csv")) return "text/csv";
    if (name.ends_with(".json")) return "application/json";
    return "text/plain";
}

} // namespace

Api::Api(ReportService& service, ApiOptions options) : service_(service), options_(std::move(options)) {}

std::optional<std::string> Api::moderator(const ApiRequest& req) const
{
    if (req.moderator_token.empty()) return std::nullopt;
    for (const auto& t : options_.moderator_tokens)
        if (t.token == req.moderator_token) return t.name;
    return std::nullopt;
}

ApiResponse Api::handle(const ApiRequest& req) const
{
    static const std::regex report_re(R"(^/api/reports/([A-Za-z0-9_-]+)$)");
    static const std::regex decision_re(R"(^/api/reports/([A-Za-z0-9_-]+)/decision$)");
    static const std::regex stats_re(R"(^/api/stats/([A-Za-z0-9_.-]+)$)");

    try {
        std::smatch m;
        if (req.path == "/api/reports") {
            if (req.method == "POST") return submit(req);
            if (req.method == "GET") {
                if (!moderator(req)) return error_response(401, "Unauthorized", "moderator token required");
                return list(req);
            }
        } else if (std::regex_match(req.path, m, decision_re)) {
            if (req.method == "POST") {
                const auto who = moderator(req);
                if (!who) return error_response(401, "Unauthorized", "moderator token required");
                return decide(m[1].str(), *who, req);
            }
        } else if (std::regex_match(req.path, m, report_re)) {
            if (req.method == "GET") {
                if (!moderator(req)) return error_response(401, "Unauthorized", "moderator token required");
                return detail(m[1].str());
            }
        } else if (req.path == "/api/dataset") {
            if (req.method == "GET") return json_response(200, service_.export_dataset());
        } else if (req.path == "/api/stats") {
            if (req.method == "GET") return stats("");
        } else if (std::regex_match(req.path, m, stats_re)) {
            if (req.method == "GET") return stats(m[1].str());
        } else {
            return error_response(404, "NotFound", "no route " + req.path);
        }
        return error_response(405, "MethodNotAllowed", req.method + " not allowed on " + req.path);
    } catch (const ValidationFailed& e) {
        json j;
        j["error"] = e.kind();
        j["message"] = e.what();
        j["fields"] = e.fields();
        return json_response(400, j.dump());
    } catch (const Error& e) {
        auto r = error_response(status_for(e.kind()), e.kind(), e.what());
        if (r.status == 429) r.headers["Retry-After"] = std::to_string(options_.retry_after_seconds);
        if (r.status >= 500) log::warn("api " + req.method + " " + req.path + ": " + e.what());
        return r;
    } catch (const std::exception& e) {
        log::error("api " + req.method + " " + req.path + ": " + e.what());
        return error_response(500, "InternalError", e.what());
    }
}

ApiResponse Api::submit(const ApiRequest& req) const
{
    const auto report = service_.submit_report(parse_submit_payload(req.body), req.client);
    if (options_.on_submit) options_.on_submit();
    return json_response(201, report_to_json(report));
}

ApiResponse Api::list(const ApiRequest& req) const
{
    std::optional<ReportState> state;
    if (auto it = req.query.find("state"); it != req.query.end() && !it->second.empty())
        state = parse_report_state(it->second);
    std::string body = "{\"reports\":[";
    bool first = true;
    for (const auto& r : service_.list(state)) {
        body += (first ? "" : ",") + report_to_json(r);
        first = false;
    }
    body += "]}";
    return json_response(200, body);
}

ApiResponse Api::detail(const std::string& id) const
{
    const auto r = service_.get(id);
    if (!r) return error_response(404, "NotFound", "no report " + id);
    return json_response(200, report_to_json(*r));
}

ApiResponse Api::decide(const std::string& id, const std::string& reviewer, const ApiRequest& req) const
{
    json body;
    try {
        body = json::parse(req.body);
    } catch (const json::exception&) {
        throw ValidationFailed(std::map<std::string, std::string>{{"body", "invalid JSON"}});
    }
    std::map<std::string, std::string> errors;
    Decision decision = Decision::Rejected;
    const std::string d = body.is_object() && body.contains("decision") && body["decision"].is_string()
                              ? body["decision"].get<std::string>()
                              : "";
    if (d == "approved")
        decision = Decision::Approved;
    else if (d != "rejected")
        errors["decision"] = "decision must be \"approved\" or \"rejected\"";
    std::string note;
    if (body.is_object() && body.contains("note")) {
        if (body["note"].is_string())
            note = body["note"].get<std::string>();
        else if (!body["note"].is_null())
            errors["note"] = "note must be a string";
    }
    if (!errors.empty()) throw ValidationFailed(errors);
    return json_response(200, report_to_json(service_.decide(id, decision, reviewer, note)));
}

ApiResponse Api::stats(const std::string& name) const
{
    if (!options_.stats) return error_response(404, "NotFound", "stats not configured");
    const auto files = options_.stats();
    if (name.empty()) {
        json j;
        j["stats"] = json::array();
        for (const auto& [file, _] : files) j["stats"].push_back(file);
        return json_response(200, j.dump());
    }
    auto it = files.find(name);
    if (it == files.end()) {
        // Allow the extension to be omitted when unambiguous.
        auto match = files.end();
        for (auto f = files.begin(); f != files.end(); ++f) {
            if (f->first.rfind(name + ".", 0) != 0) continue;
            if (match != files.end()) return error_response(404, "NotFound", "ambiguous stats name " + name);
            match = f;
        }
        it = match;
    }
    if (it == files.end()) return error_response(404, "NotFound", "no stats export " + name);
    ApiResponse r;
    r.content_type = content_type_for(it->first);
    r.body = it->second;
    return r;
}

struct HttpServer::Impl {
    httplib::Server server;
    std::mutex mu;
    bool started = false;
    bool stopped = false;
};

HttpServer::HttpServer(const Api& api) : impl_(std::make_unique<Impl>())
{
    auto handler = [&api](const httplib::Request& req, httplib::Response& res) {
        ApiRequest a;
        a.method = req.method;
        a.path = req.path;
        for (const auto& [k, v] : req.params) a.query.emplace(k, v);
        a.moderator_token = req.get_header_value("X-Moderator-Token");
        a.client = req.remote_addr;
        a.body = req.body;
        const auto out = api.handle(a);
        res.status = out.status;
        for (const auto& [k, v] : out.headers) res.set_header(k, v);
        res.set_content(out.body, out.content_type);
        log::debug(req.method + " " + req.path + " -> " + std::to_string(out.status));
    };
    const std::string any = R"(/api(/.*)?)";
    impl_->server.Get(any, handler);
    impl_->server.Post(any, handler);
    impl_->server.Put(any, handler);
    impl_->server.Delete(any, handler);
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port)
{
    int bound = port;
    if (port == 0) {
        bound = impl_->server.bind_to_any_port(host);
    } else if (!impl_->server.bind_to_port(host, port)) {
        bound = -1;
    }
    if (bound <= 0) throw Error("BindFailed", "cannot listen on " + host + ":" + std::to_string(port));
    return bound;
}

void HttpServer::run()
{
    {
        std::lock_guard lock(impl_->mu);
        if (impl_->stopped) return;
        impl_->started = true;
    }
    impl_->server.listen_after_bind();
}

void HttpServer::stop()
{
    std::lock_guard lock(impl_->mu);
    impl_->stopped = true;
    // httplib ignores stop() until the accept loop is up.
    if (!impl_->started) return;
    impl_->server.wait_until_ready();
    impl_->server.stop();
}

std::pair<std::string, int> parse_listen_address(const std::string& s)
{
    const auto colon = s.rfind(':');
    if (colon == std::string::npos || colon + 1 == s.size())
        throw Error("UsageError", "listen address must be host:port, got '" + s + "'");
    std::string host = s.substr(0, colon);
    if (host.size() >= 2 && host.front() == '[' && host.back() == ']') host = host.substr(1, host.size() - 2);
    if (host.empty()) host = "0.0.0.0";
    int port = 0;
    try {
        std::size_t used = 0;
        port = std::stoi(s.substr(colon + 1), &used);
        if (used != s.size() - colon - 1) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
        throw Error("UsageError", "bad port in '" + s + "'");
    }
    if (port < 0 || port > 65535) throw Error("UsageError", "port out of range in '" + s + "'");
    return {host, port};
}

} // namespace ransomtrace
