#include <ransomtrace/address_codec.hpp>
#include <ransomtrace/analytics.hpp>
#include <ransomtrace/cli.hpp>
#include <ransomtrace/config.hpp>
#include <ransomtrace/dataset.hpp>
#include <ransomtrace/http_api.hpp>
#include <ransomtrace/ingest.hpp>
#include <ransomtrace/log.hpp>
#include <ransomtrace/node_rpc.hpp>
#include <ransomtrace/report_service.hpp>
#include <ransomtrace/store.hpp>

#include <CLI11.hpp>

#include <atomic>
#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <mutex>
#include <ostream>
#include <thread>

namespace ransomtrace::cli {
namespace {

namespace fs = std::filesystem;

// Flags shared by several subcommands; empty means "not given".
struct Flags {
    std::string config;
    std::string node_url;
    std::string fixture;
    std::string rates;
    std::string labels;
    std::string exclusions;
    std::string registry;
    std::string db;
};

Config resolve(const Flags& f)
{
    Config c = f.config.empty() ? Config{} : load_config(f.config);
    if (const char* env = std::getenv(kNodeUrlEnv); env && *env) c.node_url = env;
    auto over = [](std::string& dst, const std::string& src) {
        if (!src.empty()) dst = src;
    };
    over(c.node_url, f.node_url);
    over(c.fixture, f.fixture);
    over(c.rates, f.rates);
    over(c.labels, f.labels);
    over(c.exclusions, f.exclusions);
    over(c.registry, f.registry);
    over(c.db, f.db);
    // An explicit fixture beats a node URL inherited from config or env.
    if (!f.fixture.empty() && f.node_url.empty()) c.node_url.clear();
    return c;
}

std::unique_ptr<ChainSource> make_source(const Config& c)
{
    if (!c.node_url.empty() && !c.fixture.empty())
        throw Error("UsageError", "give either a node URL or a fixture chain, not both");
    if (!c.node_url.empty()) return std::make_unique<NodeRpcSource>(c.node_url);
    if (!c.fixture.empty()) return std::make_unique<FixtureSource>(FixtureSource::load(c.fixture));
    throw Error("UsageError", "no chain source: pass --node-url, --fixture, set " + std::string(kNodeUrlEnv)
                                  + " or configure one");
}

CategoryRegistry registry_of(const Config& c)
{
    return c.registry.empty() ? CategoryRegistry{} : CategoryRegistry::load(c.registry);
}

ExclusionList exclusions_of(const Config& c)
{
    return c.exclusions.empty() ? ExclusionList{} : load_exclusions(c.exclusions);
}

LabelStore labels_of(const Config& c)
{
    return c.labels.empty() ? LabelStore{} : LabelStore::load(c.labels);
}

void add_common(CLI::App* cmd, Flags& f)
{
    cmd->add_option("--config", f.config, "JSON config file")->check(CLI::ExistingFile);
    cmd->add_option("--db", f.db, "SQLite store path (default ransomtrace.db)");
}

void add_source(CLI::App* cmd, Flags& f)
{
    auto* node = cmd->add_option("--node-url", f.node_url, "node JSON-RPC URL (or RANSOMTRACE_NODE_URL)");
    auto* fixture = cmd->add_option("--fixture", f.fixture, "fixture chain JSON file")->check(CLI::ExistingFile);
    node->excludes(fixture);
}

int cmd_ingest(const Flags& f, const std::string& dataset_path, unsigned jobs, std::ostream& out)
{
    const Config c = resolve(f);
    if (c.rates.empty()) throw Error("UsageError", "ingest needs a rate table (--rates or config 'rates')");
    const auto rates = load_rate_table(c.rates);
    const auto registry = registry_of(c);
    const auto exclusions = exclusions_of(c);
    auto source = make_source(c);
    Store store(c.db);

    std::vector<TrackedAddress> addrs;
    for (auto& e : load_dataset(dataset_path, registry)) addrs.push_back(std::move(e.address));

    std::map<std::string, std::vector<LedgerEvent>> ledgers;
    std::vector<std::string> failures;
    std::mutex mu;
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < addrs.size();) {
            const auto& a = addrs[i];
            try {
                auto ledger = sync_address(a, *source, store, rates);
                std::lock_guard lock(mu);
                ledgers.emplace(a.encoded, std::move(ledger));
            } catch (const Error& e) {
                log::error(a.encoded + ": " + e.kind() + ": " + e.what());
                std::lock_guard lock(mu);
                failures.push_back(a.encoded);
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned j = 1; j < std::max(1u, jobs); ++j) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    if (!failures.empty())
        throw Error("IngestIncomplete", std::to_string(failures.size()) + " of " + std::to_string(addrs.size())
                                            + " addresses failed to sync; first: " + failures.front());

    const auto filtered = apply_dataset_filters(addrs, ledgers, exclusions);
    auto save = [&](const std::vector<TrackedAddress>& group) {
        for (const auto& a : group) {
            DatasetEntry e{a, {}, {}};
            refresh_balances(e, ledgers[a.encoded]);
            store.upsert_dataset_entry(e);
        }
    };
    save(filtered.kept);
    save(filtered.discarded_no_payment);
    save(filtered.excluded);

    std::size_t events = 0;
    for (const auto& [_, l] : ledgers) events += l.size();
    log::info("ingested " + std::to_string(addrs.size()) + " addresses (" + std::to_string(filtered.kept.size())
              + " kept, " + std::to_string(filtered.discarded_no_payment.size()) + " without payments, "
              + std::to_string(filtered.excluded.size()) + " excluded), " + std::to_string(events) + " events");
    (void)out;
    return 0;
}

StatsInput stats_input(Store& store, const Config& c)
{
    StatsInput in;
    for (auto& e : store.dataset()) in.addresses.push_back(std::move(e.address));
    for (auto& [_, evs] : store.all_events())
        in.events.insert(in.events.end(), std::make_move_iterator(evs.begin()), std::make_move_iterator(evs.end()));
    in.txs = store.all_txs();
    in.labels = labels_of(c);
    return in;
}

int cmd_stats(const Flags& f, const std::string& out_dir)
{
    const Config c = resolve(f);
    if (!fs::exists(c.db)) throw Error("NotFound", "store " + c.db + " does not exist; run ingest first");
    Store store(c.db);
    const auto files = compute_stats(stats_input(store, c));
    fs::create_directories(out_dir);
    for (const auto& [name, content] : files) write_file(fs::path(out_dir) / name, content);
    log::info("wrote " + std::to_string(files.size()) + " files to " + out_dir);
    return 0;
}

int cmd_export(const Flags& f, const std::string& out_file)
{
    const Config c = resolve(f);
    if (!fs::exists(c.db)) throw Error("NotFound", "store " + c.db + " does not exist");
    Store store(c.db);
    write_file(out_file, export_dataset_json(store.dataset()));
    return 0;
}

ServiceOptions service_options(const Config& c)
{
    ServiceOptions o;
    o.registry = registry_of(c);
    o.exclusions = exclusions_of(c);
    o.submissions_per_window = c.submissions_per_minute;
    o.rate_window_seconds = 60;
    return o;
}

int cmd_verify_pending(const Flags& f)
{
    const Config c = resolve(f);
    auto source = make_source(c);
    Store store(c.db);
    ReportService service(*source, &store, service_options(c));
    const auto n = service.verify_pending();
    log::info("verified " + std::to_string(n) + " pending reports");
    return 0;
}

int cmd_serve(const Flags& f, const std::string& listen)
{
    const auto [host, port] = parse_listen_address(listen);
    const Config c = resolve(f);
    if (c.moderator_tokens.empty()) log::warn("no moderator tokens configured; moderation endpoints will reject all calls");
    auto source = make_source(c);
    Store store(c.db);
    ReportService service(*source, &store, service_options(c));
    VerificationWorker worker(service, std::chrono::seconds(30));

    ApiOptions api_opts;
    api_opts.moderator_tokens = c.moderator_tokens;
    api_opts.retry_after_seconds = 60;
    api_opts.on_submit = [&worker] { worker.notify(); };
    api_opts.stats = [&store, &c] { return compute_stats(stats_input(store, c)); };
    Api api(service, api_opts);
    HttpServer server(api);

    // Signals are taken synchronously by a dedicated thread so stop() never
    // runs inside a handler.
    sigset_t set;
    sigemptyset(&set);
    sigaddset(&set, SIGINT);
    sigaddset(&set, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &set, nullptr);

    const int bound = server.bind(host, port);
    log::info("listening on " + host + ":" + std::to_string(bound));
    std::thread waiter([&] {
        int sig = 0;
        sigwait(&set, &sig);
        log::info("signal " + std::to_string(sig) + ", shutting down");
        server.stop();
    });
    server.run();
    // run() also returns if the server fails; make the waiter exit.
    pthread_kill(waiter.native_handle(), SIGTERM);
    waiter.join();
    worker.stop();
    return 0;
}

} // namespace

std::string error_line(const std::string& kind, const std::string& message)
{
    std::string esc;
    for (char ch : message) {
        if (ch == '"' || ch == '\\') esc += '\\';
        if (ch == '\n') {
            esc += "\\n";
            continue;
        }
        esc += ch;
    }
    return "error kind=" + kind + " message=\"" + esc + "\"";
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Ransomware payment tracker", "ransomtrace"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "ransomtrace 1.0.0");

    Flags f;
    std::string dataset, out_dir, out_file, listen;
    unsigned jobs = 1;

    auto* ingest = app.add_subcommand("ingest", "sync ledgers for every address in a dataset file");
    ingest->add_option("--dataset", dataset, "dataset JSON")->required()->check(CLI::ExistingFile);
    add_source(ingest, f);
    ingest->add_option("--rates", f.rates, "daily close CSV (date,close)")->check(CLI::ExistingFile);
    ingest->add_option("--exclusions", f.exclusions, "exclusion list JSON")->check(CLI::ExistingFile);
    ingest->add_option("--registry", f.registry, "RaaS family list")->check(CLI::ExistingFile);
    ingest->add_option("--jobs", jobs, "parallel address syncs")->check(CLI::Range(1u, 64u));
    add_common(ingest, f);

    auto* stats = app.add_subcommand("stats", "write analytics CSV/JSON exports from the store");
    stats->add_option("--out", out_dir, "output directory")->required();
    stats->add_option("--labels", f.labels, "entity label JSON")->check(CLI::ExistingFile);
    add_common(stats, f);

    auto* exp = app.add_subcommand("export", "write the dataset JSON");
    exp->add_option("--out", out_file, "output file")->required();
    add_common(exp, f);

    auto* serve = app.add_subcommand("serve", "run the report HTTP API");
    serve->add_option("--listen", listen, "host:port")->required();
    add_source(serve, f);
    add_common(serve, f);
    serve->get_option("--config")->required();

    auto* verify = app.add_subcommand("verify-pending", "verify pending reports once and exit");
    add_source(verify, f);
    add_common(verify, f);
    verify->get_option("--config")->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::CallForVersion&) {
        out << app.version() << "\n";
        return 0;
    } catch (const CLI::ParseError& e) {
        err << error_line("UsageError", e.what()) << "\n";
        const CLI::App* sub = nullptr;
        for (const auto* s : app.get_subcommands()) sub = s;
        err << (sub ? sub->help() : app.help());
        return 2;
    }

    try {
        if (ingest->parsed()) return cmd_ingest(f, dataset, jobs, out);
        if (stats->parsed()) return cmd_stats(f, out_dir);
        if (exp->parsed()) return cmd_export(f, out_file);
        if (serve->parsed()) return cmd_serve(f, listen);
        if (verify->parsed()) return cmd_verify_pending(f);
    } catch (const Error& e) {
        err << error_line(e.kind(), e.what()) << "\n";
        return e.kind() == "UsageError" ? 2 : 1;
    } catch (const std::exception& e) {
        err << error_line("InternalError", e.what()) << "\n";
        return 1;
    }
    return 2;
}

} // namespace ransomtrace::cli
