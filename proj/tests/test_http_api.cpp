#include "test_util.hpp"

#include <ransomtrace/http_api.hpp>

#include <gtest/gtest.h>
#include <httplib.h>
#include <json.hpp>

#include <thread>

using namespace ransomtrace;
using json = nlohmann::json;

namespace {

const std::string kPaid = "1A1zP1eP5QGefi2DMPTfTL5SLmv7DivfNa";
const std::string kToken = "s3cret";

struct Harness {
    FixtureSource source{{test::tx(test::txid(1), 1'600'000'000, {test::in(test::txid(9), 0, "v", 500)},
                                   {test::out(kPaid, 500)})}};
    ReportService service;
    Api api;
    int submits = 0;

    explicit Harness(std::size_t per_window = 100)
        : service(source, nullptr, make_options(per_window)),
          api(service, ApiOptions{{{"alice", kToken}},
                                  [] {
                                      return std::map<std::string, std::string>{
                                          {"monthly_revenue.csv", "month,commodity_usd,raas_usd\n"},
                                          {"payment_summary.json", "{\"count\":0}\n"},
                                          {"plots.gp", "# x\n"},
                                      };
                                  },
                                  60,
                                  [this] { ++submits; }})
    {
    }

    static ServiceOptions make_options(std::size_t per_window)
    {
        ServiceOptions o;
        o.submissions_per_window = per_window;
        o.clock = [] { return UnixSeconds{1'700'000'000}; };
        o.retry.sleep = [](std::chrono::milliseconds) {};
        return o;
    }

    ApiResponse call(std::string method, std::string path, std::string body = "", std::string token = "",
                     std::map<std::string, std::string> query = {})
    {
        return api.handle({std::move(method), std::move(path), std::move(query), std::move(token), "10.0.0.1",
                           std::move(body)});
    }
};

const std::string kSubmit =
    R"({"addresses":[")" + kPaid + R"(","xyz"],"family":"Conti","evidence":["https://example.org/a"]})";

} // namespace

TEST(Api, SubmitIsPublicAndReturns201)
{
    Harness h;
    const auto r = h.call("POST", "/api/reports", kSubmit);
    EXPECT_EQ(r.status, 201);
    EXPECT_EQ(r.content_type, "application/json");
    const auto j = json::parse(r.body);
    EXPECT_EQ(j["id"], "R000001");
    EXPECT_EQ(j["state"], "pending");
    EXPECT_TRUE(j["verification"].is_null());
    EXPECT_EQ(h.submits, 1);
}

TEST(Api, SubmitValidationIs400WithFields)
{
    Harness h;
    const auto r = h.call("POST", "/api/reports", R"({"addresses":["1A"],"family":"Conti","evidence":[]})");
    EXPECT_EQ(r.status, 400);
    const auto j = json::parse(r.body);
    EXPECT_EQ(j["error"], "ValidationFailed");
    EXPECT_EQ(j["fields"]["evidence"], "evidence required");
    EXPECT_EQ(h.call("POST", "/api/reports", "not json").status, 400);
    EXPECT_EQ(h.submits, 0);
}

TEST(Api, ModeratorRoutesNeedToken)
{
    Harness h;
    h.call("POST", "/api/reports", kSubmit);
    EXPECT_EQ(h.call("GET", "/api/reports").status, 401);
    EXPECT_EQ(h.call("GET", "/api/reports", "", "wrong").status, 401);
    EXPECT_EQ(h.call("GET", "/api/reports/R000001").status, 401);
    EXPECT_EQ(h.call("POST", "/api/reports/R000001/decision", R"({"decision":"approved"})").status, 401);
    EXPECT_EQ(json::parse(h.call("GET", "/api/reports").body)["error"], "Unauthorized");

    const auto q = h.call("GET", "/api/reports", "", kToken, {{"state", "pending"}});
    EXPECT_EQ(q.status, 200);
    EXPECT_EQ(json::parse(q.body)["reports"].size(), 1u);
    EXPECT_EQ(json::parse(h.call("GET", "/api/reports", "", kToken, {{"state", "approved"}}).body)["reports"].size(),
              0u);
    EXPECT_EQ(h.call("GET", "/api/reports", "", kToken, {{"state", "bogus"}}).status, 400);
    EXPECT_EQ(h.call("GET", "/api/reports/R000001", "", kToken).status, 200);
    EXPECT_EQ(h.call("GET", "/api/reports/R000404", "", kToken).status, 404);
}

TEST(Api, DecisionFlow)
{
    Harness h;
    h.call("POST", "/api/reports", kSubmit);
    auto r = h.call("POST", "/api/reports/R000001/decision", R"({"decision":"approved"})", kToken);
    EXPECT_EQ(r.status, 409);
    EXPECT_EQ(json::parse(r.body)["error"], "VerificationIncomplete");

    h.service.verify_pending();
    r = h.call("POST", "/api/reports/R000001/decision", R"({"decision":"maybe"})", kToken);
    EXPECT_EQ(r.status, 400);
    EXPECT_TRUE(json::parse(r.body)["fields"].contains("decision"));

    r = h.call("POST", "/api/reports/R000001/decision", R"({"decision":"approved","note":"ok"})", kToken);
    ASSERT_EQ(r.status, 200);
    const auto j = json::parse(r.body);
    EXPECT_EQ(j["state"], "approved");
    EXPECT_EQ(j["reviewer"], "alice");
    EXPECT_EQ(j["decision_note"], "ok");

    r = h.call("POST", "/api/reports/R000001/decision", R"({"decision":"rejected"})", kToken);
    EXPECT_EQ(r.status, 409);
    EXPECT_EQ(json::parse(r.body)["error"], "InvalidTransition");
    EXPECT_EQ(h.call("POST", "/api/reports/R000404/decision", R"({"decision":"rejected"})", kToken).status, 404);

    const auto ds = json::parse(h.call("GET", "/api/dataset").body);
    ASSERT_EQ(ds["addresses"].size(), 1u);
    EXPECT_EQ(ds["addresses"][0]["address"], kPaid);
}

TEST(Api, RateLimitedIs429WithRetryAfter)
{
    Harness h(2);
    EXPECT_EQ(h.call("POST", "/api/reports", kSubmit).status, 201);
    EXPECT_EQ(h.call("POST", "/api/reports", kSubmit).status, 201);
    const auto r = h.call("POST", "/api/reports", kSubmit);
    EXPECT_EQ(r.status, 429);
    EXPECT_EQ(r.headers.at("Retry-After"), "60");
}

TEST(Api, DatasetAndStats)
{
    Harness h;
    EXPECT_EQ(h.call("GET", "/api/dataset").body, "{\n  \"addresses\": []\n}\n");
    const auto list = json::parse(h.call("GET", "/api/stats").body);
    EXPECT_EQ(list["stats"].size(), 3u);
    auto r = h.call("GET", "/api/stats/monthly_revenue.csv");
    EXPECT_EQ(r.status, 200);
    EXPECT_EQ(r.content_type, "text/csv");
    EXPECT_EQ(r.body, "month,commodity_usd,raas_usd\n");
    r = h.call("GET", "/api/stats/payment_summary");
    EXPECT_EQ(r.content_type, "application/json");
    EXPECT_EQ(h.call("GET", "/api/stats/nope").status, 404);
}

TEST(Api, UnknownRouteAndMethod)
{
    Harness h;
    EXPECT_EQ(h.call("GET", "/api/nothing").status, 404);
    EXPECT_EQ(h.call("DELETE", "/api/dataset").status, 405);
    EXPECT_EQ(h.call("PUT", "/api/reports").status, 405);
    EXPECT_EQ(json::parse(h.call("DELETE", "/api/dataset").body)["error"], "MethodNotAllowed");
}

TEST(ListenAddress, Parse)
{
    EXPECT_EQ(parse_listen_address("127.0.0.1:8080"), (std::pair<std::string, int>{"127.0.0.1", 8080}));
    EXPECT_EQ(parse_listen_address(":9000"), (std::pair<std::string, int>{"0.0.0.0", 9000}));
    EXPECT_EQ(parse_listen_address("[::1]:80"), (std::pair<std::string, int>{"::1", 80}));
    for (const char* bad : {"localhost", "h:", "h:x", "h:70000", "h:80a"}) EXPECT_THROW(parse_listen_address(bad), Error);
}

TEST(HttpServer, ServesOverLoopback)
{
    Harness h;
    HttpServer server(h.api);
    const int port = server.bind("127.0.0.1", 0);
    ASSERT_GT(port, 0);
    std::thread t([&] { server.run(); });

    httplib::Client cli("127.0.0.1", port);
    auto res = cli.Post("/api/reports", kSubmit, "application/json");
    ASSERT_TRUE(res);
    EXPECT_EQ(res->status, 201);

    res = cli.Get("/api/reports?state=pending");
    ASSERT_TRUE(res);
    EXPECT_EQ(res->status, 401);

    res = cli.Get("/api/reports?state=pending", {{"X-Moderator-Token", kToken}});
    ASSERT_TRUE(res);
    EXPECT_EQ(res->status, 200);
    EXPECT_EQ(json::parse(res->body)["reports"][0]["id"], "R000001");

    res = cli.Get("/api/stats/monthly_revenue.csv");
    ASSERT_TRUE(res);
    EXPECT_EQ(res->get_header_value("Content-Type"), "text/csv");

    server.stop();
    t.join();
}

TEST(HttpServer, StopBeforeRunDoesNotHang)
{
    Harness h;
    HttpServer server(h.api);
    server.bind("127.0.0.1", 0);
    server.stop();
    server.run();
}
