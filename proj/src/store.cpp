#include <ransomtrace/store.hpp>

#include <sqlite3.h>

#include <algorithm>
#include <utility>

namespace ransomtrace {
namespace {

class Stmt {
public:
    Stmt(sqlite3* db, const char* sql) : db_(db)
    {
        if (sqlite3_prepare_v2(db, sql, -1, &stmt_, nullptr) != SQLITE_OK)
            throw Error("StoreError", std::string("prepare failed: ") + sqlite3_errmsg(db));
    }
    ~Stmt() { sqlite3_finalize(stmt_); }
    Stmt(const Stmt&) = delete;
    Stmt& operator=(const Stmt&) = delete;

    Stmt& bind(int i, const std::string& s)
    {
        check(sqlite3_bind_text(stmt_, i, s.c_str(), static_cast<int>(s.size()), SQLITE_TRANSIENT));
        return *this;
    }
    Stmt& bind(int i, std::int64_t v)
    {
        check(sqlite3_bind_int64(stmt_, i, v));
        return *this;
    }
    Stmt& bind_null(int i)
    {
        check(sqlite3_bind_null(stmt_, i));
        return *this;
    }

    // true while rows remain
    bool step()
    {
        const int rc = sqlite3_step(stmt_);
        if (rc == SQLITE_ROW) return true;
        if (rc == SQLITE_DONE) return false;
        throw Error("StoreError", std::string("step failed: ") + sqlite3_errmsg(db_));
    }
    void reset()
    {
        sqlite3_reset(stmt_);
        sqlite3_clear_bindings(stmt_);
    }

    std::string text(int col) const
    {
        const auto* p = sqlite3_column_text(stmt_, col);
        return p ? std::string(reinterpret_cast<const char*>(p)) : std::string();
    }
    bool is_null(int col) const { return sqlite3_column_type(stmt_, col) == SQLITE_NULL; }
    std::int64_t i64(int col) const { return sqlite3_column_int64(stmt_, col); }

private:
    void check(int rc)
    {
        if (rc != SQLITE_OK) throw Error("StoreError", std::string("bind failed: ") + sqlite3_errmsg(db_));
    }

    sqlite3* db_;
    sqlite3_stmt* stmt_ = nullptr;
};

constexpr const char* kSchema = R"sql(
CREATE TABLE IF NOT EXISTS events (
    address TEXT NOT NULL, txid TEXT NOT NULL, direction TEXT NOT NULL,
    output_index INTEGER NOT NULL, sat INTEGER NOT NULL, usd_cents INTEGER NOT NULL,
    ts INTEGER NOT NULL,
    PRIMARY KEY (address, txid, direction, output_index));
CREATE TABLE IF NOT EXISTS checkpoints (
    address TEXT PRIMARY KEY, last_seen_txid TEXT NOT NULL,
    last_sync_time INTEGER NOT NULL, event_count INTEGER NOT NULL);
CREATE TABLE IF NOT EXISTS txs (txid TEXT PRIMARY KEY, body TEXT NOT NULL);
CREATE TABLE IF NOT EXISTS dataset (
    address TEXT PRIMARY KEY, family TEXT NOT NULL, category TEXT NOT NULL,
    script_type TEXT NOT NULL, created_at INTEGER NOT NULL, excluded TEXT,
    total_received_sat INTEGER NOT NULL, balance_sat INTEGER NOT NULL);
CREATE TABLE IF NOT EXISTS reports (id TEXT PRIMARY KEY, body TEXT NOT NULL);
)sql";

LedgerEvent event_row(const Stmt& s)
{
    LedgerEvent e;
    e.address = s.text(0);
    e.txid = s.text(1);
    e.direction = parse_direction(s.text(2));
    e.output_index = static_cast<std::int32_t>(s.i64(3));
    e.btc = SatoshiAmount(static_cast<std::uint64_t>(s.i64(4)));
    e.usd = UsdCents(s.i64(5));
    e.timestamp = s.i64(6);
    return e;
}

DatasetEntry dataset_row(const Stmt& s)
{
    DatasetEntry d;
    d.address.encoded = s.text(0);
    d.address.family = s.text(1);
    d.address.category = parse_actor_category(s.text(2));
    d.address.script_type = parse_script_type(s.text(3));
    d.address.created_at = s.i64(4);
    if (!s.is_null(5)) d.address.excluded = s.text(5);
    d.total_received = SatoshiAmount(static_cast<std::uint64_t>(s.i64(6)));
    d.balance = SatoshiAmount(static_cast<std::uint64_t>(s.i64(7)));
    return d;
}

constexpr const char* kEventCols = "address, txid, direction, output_index, sat, usd_cents, ts";
constexpr const char* kDatasetCols =
    "address, family, category, script_type, created_at, excluded, total_received_sat, balance_sat";

} // namespace

Store::Store(const std::string& path)
{
    if (sqlite3_open(path.c_str(), &db_) != SQLITE_OK) {
        std::string msg = db_ ? sqlite3_errmsg(db_) : "out of memory";
        sqlite3_close(db_);
        throw Error("StoreError", "cannot open store " + path + ": " + msg);
    }
    sqlite3_busy_timeout(db_, 5000);
    exec("PRAGMA journal_mode=WAL;");
    exec(kSchema);
}

Store::~Store() { sqlite3_close(db_); }

void Store::exec(const char* sql)
{
    char* err = nullptr;
    if (sqlite3_exec(db_, sql, nullptr, nullptr, &err) != SQLITE_OK) {
        std::string msg = err ? err : "unknown";
        sqlite3_free(err);
        throw Error("StoreError", msg);
    }
}

std::size_t Store::append_events(const std::vector<LedgerEvent>& events)
{
    std::lock_guard lock(mu_);
    exec("BEGIN");
    std::size_t inserted = 0;
    try {
        Stmt s(db_, "INSERT OR IGNORE INTO events VALUES (?,?,?,?,?,?,?)");
        for (const auto& e : events) {
            s.bind(1, e.address).bind(2, e.txid).bind(3, std::string(to_string(e.direction)))
                .bind(4, std::int64_t{e.output_index}).bind(5, static_cast<std::int64_t>(e.btc.sat()))
                .bind(6, e.usd.cents()).bind(7, e.timestamp);
            s.step();
            inserted += static_cast<std::size_t>(sqlite3_changes(db_));
            s.reset();
        }
        exec("COMMIT");
    } catch (...) {
        exec("ROLLBACK");
        throw;
    }
    return inserted;
}

std::vector<LedgerEvent> Store::events_for(const std::string& address) const
{
    std::lock_guard lock(mu_);
    Stmt s(db_, (std::string("SELECT ") + kEventCols
                 + " FROM events WHERE address = ? ORDER BY ts, txid, direction, output_index").c_str());
    s.bind(1, address);
    std::vector<LedgerEvent> out;
    while (s.step()) out.push_back(event_row(s));
    std::sort(out.begin(), out.end(), ledger_order);
    return out;
}

std::map<std::string, std::vector<LedgerEvent>> Store::all_events() const
{
    std::lock_guard lock(mu_);
    Stmt s(db_, (std::string("SELECT ") + kEventCols + " FROM events").c_str());
    std::map<std::string, std::vector<LedgerEvent>> out;
    while (s.step()) {
        auto e = event_row(s);
        out[e.address].push_back(std::move(e));
    }
    for (auto& [_, evs] : out) std::sort(evs.begin(), evs.end(), ledger_order);
    return out;
}

void Store::put_checkpoint(const IngestCheckpoint& cp)
{
    std::lock_guard lock(mu_);
    Stmt s(db_, "INSERT OR REPLACE INTO checkpoints VALUES (?,?,?,?)");
    s.bind(1, cp.address).bind(2, cp.last_seen_txid).bind(3, cp.last_sync_time).bind(4, cp.event_count);
    s.step();
}

std::optional<IngestCheckpoint> Store::checkpoint(const std::string& address) const
{
    std::lock_guard lock(mu_);
    Stmt s(db_, "SELECT address, last_seen_txid, last_sync_time, event_count FROM checkpoints WHERE address = ?");
    s.bind(1, address);
    if (!s.step()) return std::nullopt;
    return IngestCheckpoint{s.text(0), s.text(1), s.i64(2), s.i64(3)};
}

void Store::put_txs(const std::vector<ChainTx>& txs)
{
    std::lock_guard lock(mu_);
    exec("BEGIN");
    try {
        Stmt s(db_, "INSERT OR IGNORE INTO txs VALUES (?,?)");
        for (const auto& tx : txs) {
            s.bind(1, tx.txid).bind(2, tx_to_json(tx));
            s.step();
            s.reset();
        }
        exec("COMMIT");
    } catch (...) {
        exec("ROLLBACK");
        throw;
    }
}

std::vector<ChainTx> Store::all_txs() const
{
    std::lock_guard lock(mu_);
    Stmt s(db_, "SELECT body FROM txs ORDER BY txid");
    std::vector<ChainTx> out;
    while (s.step()) out.push_back(tx_from_json(s.text(0)));
    return out;
}

void Store::upsert_dataset_entry(const DatasetEntry& d)
{
    std::lock_guard lock(mu_);
    Stmt s(db_, "INSERT OR REPLACE INTO dataset VALUES (?,?,?,?,?,?,?,?)");
    s.bind(1, d.address.encoded).bind(2, d.address.family)
        .bind(3, std::string(to_string(d.address.category)))
        .bind(4, std::string(to_string(d.address.script_type))).bind(5, d.address.created_at);
    if (d.address.excluded) s.bind(6, *d.address.excluded);
    else s.bind_null(6);
    s.bind(7, static_cast<std::int64_t>(d.total_received.sat()))
        .bind(8, static_cast<std::int64_t>(d.balance.sat()));
    s.step();
}

std::optional<DatasetEntry> Store::dataset_entry(const std::string& address) const
{
    std::lock_guard lock(mu_);
    Stmt s(db_, (std::string("SELECT ") + kDatasetCols + " FROM dataset WHERE address = ?").c_str());
    s.bind(1, address);
    if (!s.step()) return std::nullopt;
    return dataset_row(s);
}

std::vector<DatasetEntry> Store::dataset() const
{
    std::lock_guard lock(mu_);
    Stmt s(db_, (std::string("SELECT ") + kDatasetCols + " FROM dataset ORDER BY created_at, address").c_str());
    std::vector<DatasetEntry> out;
    while (s.step()) out.push_back(dataset_row(s));
    return out;
}

void Store::put_report_json(const std::string& id, const std::string& json)
{
    std::lock_guard lock(mu_);
    Stmt s(db_, "INSERT OR REPLACE INTO reports VALUES (?,?)");
    s.bind(1, id).bind(2, json);
    s.step();
}

std::vector<std::string> Store::all_report_json() const
{
    std::lock_guard lock(mu_);
    Stmt s(db_, "SELECT body FROM reports ORDER BY id");
    std::vector<std::string> out;
    while (s.step()) out.push_back(s.text(0));
    return out;
}

} // namespace ransomtrace
