#include <ransomtrace/address_codec.hpp>
#include <ransomtrace/log.hpp>
#include <ransomtrace/report_service.hpp>
#include <ransomtrace/store.hpp>

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <set>

namespace ransomtrace {

using ojson = nlohmann::ordered_json;

namespace {

ojson opt_json(const std::optional<std::string>& v) { return v ? ojson(*v) : ojson(nullptr); }

std::optional<std::string> opt_string(const ojson& j, const char* key)
{
    if (!j.contains(key) || j[key].is_null()) return std::nullopt;
    return j[key].get<std::string>();
}

std::string make_id(std::uint64_t n)
{
    char buf[24];
    std::snprintf(buf, sizeof buf, "R%06llu", static_cast<unsigned long long>(n));
    return buf;
}

bool is_url(const std::string& s)
{
    return s.rfind("https://", 0) == 0 || s.rfind("http://", 0) == 0;
}

} // namespace

std::string_view to_string(ReportState s) noexcept
{
    switch (s) {
    case ReportState::Pending: return "pending";
    case ReportState::Approved: return "approved";
    case ReportState::Rejected: break;
    }
    return "rejected";
}

ReportState parse_report_state(std::string_view s)
{
    if (s == "pending") return ReportState::Pending;
    if (s == "approved") return ReportState::Approved;
    if (s == "rejected") return ReportState::Rejected;
    throw Error("ParseError", "unknown report state '" + std::string(s) + "'");
}

std::string report_to_json(const Report& r)
{
    ojson j;
    j["id"] = r.id;
    j["addresses"] = r.addresses;
    j["family"] = r.family;
    auto& ev = j["evidence"] = ojson::array();
    for (const auto& e : r.evidence) {
        ojson item;
        if (!e.url.empty()) item["url"] = e.url;
        if (!e.digest.empty()) item["digest"] = e.digest;
        if (!e.media_type.empty()) item["media_type"] = e.media_type;
        ev.push_back(std::move(item));
    }
    j["submitted_at"] = format_iso8601(r.submitted_at);
    j["state"] = std::string(to_string(r.state));
    j["decision_note"] = opt_json(r.decision_note);
    j["reviewer"] = opt_json(r.reviewer);
    if (r.verification) {
        auto& checks = j["verification"]["checks"] = ojson::array();
        for (const auto& c : r.verification->checks) {
            ojson cj;
            cj["address"] = c.address;
            cj["codec_valid"] = c.codec_valid;
            cj["has_payment"] = c.has_payment;
            cj["excluded"] = opt_json(c.excluded);
            cj["duplicate_of"] = opt_json(c.duplicate_of);
            checks.push_back(std::move(cj));
        }
    } else {
        j["verification"] = nullptr;
    }
    j["annotations"] = r.annotations;
    return j.dump();
}

Report report_from_json(const std::string& text)
{
    try {
        const auto j = ojson::parse(text);
        Report r;
        r.id = j.at("id").get<std::string>();
        r.addresses = j.at("addresses").get<std::vector<std::string>>();
        r.family = j.at("family").get<std::string>();
        for (const auto& item : j.at("evidence")) {
            Evidence e;
            e.url = item.value("url", "");
            e.digest = item.value("digest", "");
            e.media_type = item.value("media_type", "");
            r.evidence.push_back(std::move(e));
        }
        r.submitted_at = parse_iso8601(j.at("submitted_at").get<std::string>());
        r.state = parse_report_state(j.at("state").get<std::string>());
        r.decision_note = opt_string(j, "decision_note");
        r.reviewer = opt_string(j, "reviewer");
        if (j.contains("verification") && !j["verification"].is_null()) {
            VerificationResult v;
            for (const auto& cj : j["verification"].at("checks")) {
                AddressCheck c;
                c.address = cj.at("address").get<std::string>();
                c.codec_valid = cj.at("codec_valid").get<bool>();
                c.has_payment = cj.at("has_payment").get<bool>();
                c.excluded = opt_string(cj, "excluded");
                c.duplicate_of = opt_string(cj, "duplicate_of");
                v.checks.push_back(std::move(c));
            }
            r.verification = std::move(v);
        }
        if (j.contains("annotations")) r.annotations = j["annotations"].get<std::vector<std::string>>();
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw Error("ParseError", std::string("bad report JSON: ") + e.what());
    }
}

ValidationFailed::ValidationFailed(std::map<std::string, std::string> fields)
    : Error("ValidationFailed",
            [&] {
                std::string msg;
                for (const auto& [k, v] : fields) msg += (msg.empty() ? "" : "; ") + k + ": " + v;
                return msg;
            }()),
      fields_(std::move(fields))
{
}

void validate(const SubmitPayload& p)
{
    std::map<std::string, std::string> errors;
    if (p.addresses.empty())
        errors["addresses"] = "at least one address required";
    else if (std::any_of(p.addresses.begin(), p.addresses.end(), [](const std::string& a) { return a.empty(); }))
        errors["addresses"] = "addresses must be non-empty strings";
    if (p.family.empty()) errors["family"] = "family required";
    if (p.evidence.empty()) {
        errors["evidence"] = "evidence required";
    } else {
        for (const auto& e : p.evidence) {
            const bool url_ok = !e.url.empty() && is_url(e.url);
            const bool file_ok = !e.digest.empty() && !e.media_type.empty();
            if (!url_ok && !file_ok) {
                errors["evidence"] = "each evidence item needs an http(s) url or a digest with media_type";
                break;
            }
        }
    }
    if (!errors.empty()) throw ValidationFailed(std::move(errors));
}

SubmitPayload parse_submit_payload(const std::string& body)
{
    ojson j;
    try {
        j = ojson::parse(body);
    } catch (const nlohmann::json::exception&) {
        throw ValidationFailed(std::map<std::string, std::string>{{"body", "invalid JSON"}});
    }
    if (!j.is_object()) throw ValidationFailed(std::map<std::string, std::string>{{"body", "expected a JSON object"}});

    std::map<std::string, std::string> errors;
    SubmitPayload p;
    if (j.contains("addresses")) {
        if (!j["addresses"].is_array()) errors["addresses"] = "must be an array of strings";
        else
            for (const auto& a : j["addresses"]) {
                if (!a.is_string()) { errors["addresses"] = "must be an array of strings"; break; }
                p.addresses.push_back(a.get<std::string>());
            }
    }
    if (j.contains("family")) {
        if (j["family"].is_string()) p.family = j["family"].get<std::string>();
        else errors["family"] = "must be a string";
    }
    if (j.contains("evidence")) {
        if (!j["evidence"].is_array()) errors["evidence"] = "must be an array";
        else
            for (const auto& item : j["evidence"]) {
                Evidence e;
                if (item.is_string()) {
                    e.url = item.get<std::string>();
                } else if (item.is_object()) {
                    auto str = [&](const char* k) {
                        return item.contains(k) && item[k].is_string() ? item[k].get<std::string>() : std::string();
                    };
                    e.url = str("url");
                    e.digest = str("digest");
                    e.media_type = str("media_type");
                }
                p.evidence.push_back(std::move(e));
            }
    }
    if (!errors.empty()) throw ValidationFailed(std::move(errors));
    validate(p);
    return p;
}

bool RateLimiter::allow(const std::string& client, UnixSeconds now)
{
    std::lock_guard lock(mu_);
    auto& [start, count] = windows_[client];
    if (count == 0 || now - start >= window_) {
        start = now;
        count = 0;
    }
    if (count >= limit_) return false;
    ++count;
    return true;
}

ReportService::ReportService(ChainSource& source, Store* store, ServiceOptions options)
    : source_(source),
      store_(store),
      options_(std::move(options)),
      limiter_(options_.submissions_per_window, options_.rate_window_seconds)
{
    if (!store_) return;
    for (const auto& json : store_->all_report_json()) {
        auto r = report_from_json(json);
        auto s = std::make_shared<Slot>();
        unsigned long long n = 0;
        if (std::sscanf(r.id.c_str(), "R%llu", &n) == 1) next_id_ = std::max<std::uint64_t>(next_id_, n + 1);
        s->report = std::move(r);
        reports_.emplace(s->report.id, std::move(s));
    }
    for (auto& e : store_->dataset()) dataset_.emplace(e.address.encoded, std::move(e));
}

UnixSeconds ReportService::now() const
{
    if (options_.clock) return options_.clock();
    return std::chrono::duration_cast<std::chrono::seconds>(std::chrono::system_clock::now().time_since_epoch())
        .count();
}

void ReportService::persist(const Report& r)
{
    if (store_) store_->put_report_json(r.id, report_to_json(r));
}

std::shared_ptr<ReportService::Slot> ReportService::slot(const std::string& id) const
{
    std::lock_guard lock(reports_mu_);
    auto it = reports_.find(id);
    if (it == reports_.end()) throw Error("NotFound", "no report " + id);
    return it->second;
}

void ReportService::on_submit(std::function<void()> hook)
{
    std::lock_guard lock(hook_mu_);
    submit_hook_ = std::move(hook);
}

Report ReportService::submit_report(const SubmitPayload& payload, const std::string& client)
{
    validate(payload);
    if (!limiter_.allow(client, now())) throw Error("RateLimited", "too many submissions; retry later");

    auto s = std::make_shared<Slot>();
    Report& r = s->report;
    std::set<std::string> seen;
    for (const auto& a : payload.addresses)
        if (seen.insert(a).second) r.addresses.push_back(a);
    r.family = payload.family;
    r.evidence = payload.evidence;
    r.submitted_at = now();
    {
        std::lock_guard lock(reports_mu_);
        r.id = make_id(next_id_++);
        persist(r);
        reports_.emplace(r.id, s);
    }
    Report copy = r;
    std::function<void()> hook;
    {
        std::lock_guard lock(hook_mu_);
        hook = submit_hook_;
    }
    if (hook) hook();
    return copy;
}

VerificationResult ReportService::verify_report(const std::string& id)
{
    auto s = slot(id);
    std::lock_guard lock(s->mu);
    if (s->report.state != ReportState::Pending)
        throw Error("InvalidTransition", "report " + id + " is already " + std::string(to_string(s->report.state)));

    VerificationResult result;
    std::map<std::string, std::vector<LedgerEvent>> ledgers;
    for (const auto& addr : s->report.addresses) {
        AddressCheck c;
        c.address = addr;
        c.codec_valid = codec::classify(addr) != ScriptType::Unknown;
        if (c.codec_valid) {
            auto txs = with_retry([&] { return source_.fetch_txs(addr); }, options_.retry);
            std::erase_if(txs, [](const ChainTx& tx) { return !is_well_formed(tx); });
            try {
                auto ledger = build_ledger(addr, dedupe_by_txid(std::move(txs)));
                c.has_payment = std::any_of(ledger.begin(), ledger.end(),
                                            [](const LedgerEvent& e) { return e.direction == Direction::Payment; });
                ledgers[addr] = std::move(ledger);
            } catch (const LedgerError& e) {
                log::warn("report " + id + ": ledger for " + addr + " rejected: " + e.what());
            }
        }
        c.excluded = options_.exclusions.reason(addr);
        {
            std::lock_guard dlock(dataset_mu_);
            if (auto it = dataset_.find(addr); it != dataset_.end()) c.duplicate_of = it->second.address.family;
        }
        result.checks.push_back(std::move(c));
    }
    s->report.verification = result;
    s->ledgers = std::move(ledgers);
    persist(s->report);
    return result;
}

Report ReportService::decide(const std::string& id, Decision decision, const std::string& reviewer,
                             const std::string& note)
{
    auto s = slot(id);
    std::lock_guard lock(s->mu);
    Report& r = s->report;
    if (r.state != ReportState::Pending)
        throw Error("InvalidTransition", "report " + id + " is already " + std::string(to_string(r.state)));
    if (!r.verification)
        throw Error("VerificationIncomplete", "report " + id + " has not been verified");

    if (decision == Decision::Approved) {
        const UnixSeconds created = now();
        std::lock_guard dlock(dataset_mu_);
        for (const auto& c : r.verification->checks) {
            if (!c.codec_valid || !c.has_payment || c.excluded) continue;
            if (auto it = dataset_.find(c.address); it != dataset_.end()) {
                const auto& existing = it->second.address.family;
                r.annotations.push_back(ascii_lower(existing) == ascii_lower(r.family)
                                            ? "duplicate " + c.address + " already in dataset"
                                            : "conflicting family claim for " + c.address + ": dataset has '"
                                                  + existing + "', report claims '" + r.family + "'");
                continue;
            }
            DatasetEntry e;
            e.address.encoded = c.address;
            e.address.script_type = codec::classify(c.address);
            e.address.family = r.family;
            e.address.category = family_to_category(r.family, options_.registry);
            e.address.created_at = created;
            if (auto lit = s->ledgers.find(c.address); lit != s->ledgers.end()) {
                refresh_balances(e, lit->second);
            } else {
                // Verified before a restart; ledgers are not persisted.
                try {
                    auto txs = with_retry([&] { return source_.fetch_txs(c.address); }, options_.retry);
                    std::erase_if(txs, [](const ChainTx& tx) { return !is_well_formed(tx); });
                    refresh_balances(e, build_ledger(c.address, dedupe_by_txid(std::move(txs))));
                } catch (const Error& err) {
                    log::warn("balances for " + c.address + " left at zero: " + err.what());
                }
            }
            if (store_) store_->upsert_dataset_entry(e);
            dataset_.emplace(c.address, std::move(e));
        }
        r.state = ReportState::Approved;
    } else {
        r.state = ReportState::Rejected;
    }
    r.reviewer = reviewer;
    r.decision_note = note;
    persist(r);
    return r;
}

std::optional<Report> ReportService::get(const std::string& id) const
{
    std::shared_ptr<Slot> s;
    {
        std::lock_guard lock(reports_mu_);
        auto it = reports_.find(id);
        if (it == reports_.end()) return std::nullopt;
        s = it->second;
    }
    std::lock_guard lock(s->mu);
    return s->report;
}

std::vector<Report> ReportService::list(std::optional<ReportState> state) const
{
    std::vector<std::shared_ptr<Slot>> slots;
    {
        std::lock_guard lock(reports_mu_);
        for (const auto& [_, s] : reports_) slots.push_back(s);
    }
    std::vector<Report> out;
    for (const auto& s : slots) {
        std::lock_guard lock(s->mu);
        if (!state || s->report.state == *state) out.push_back(s->report);
    }
    return out;
}

std::size_t ReportService::verify_pending()
{
    std::size_t verified = 0;
    for (const auto& r : list(ReportState::Pending)) {
        if (r.verification) continue;
        try {
            verify_report(r.id);
            ++verified;
        } catch (const SourceUnavailable& e) {
            log::warn("verification of " + r.id + " deferred: " + e.what());
        } catch (const Error& e) {
            if (e.kind() != "InvalidTransition") throw;
        }
    }
    return verified;
}

std::vector<DatasetEntry> ReportService::dataset_snapshot() const
{
    std::lock_guard lock(dataset_mu_);
    std::vector<DatasetEntry> out;
    out.reserve(dataset_.size());
    for (const auto& [_, e] : dataset_) out.push_back(e);
    return out;
}

std::string ReportService::export_dataset() const
{
    return export_dataset_json(dataset_snapshot());
}

std::size_t ReportService::import_dataset(const std::vector<DatasetEntry>& entries)
{
    std::lock_guard lock(dataset_mu_);
    std::size_t added = 0;
    for (const auto& e : entries) {
        if (!dataset_.emplace(e.address.encoded, e).second) continue;
        if (store_) store_->upsert_dataset_entry(e);
        ++added;
    }
    return added;
}

VerificationWorker::VerificationWorker(ReportService& service, std::chrono::milliseconds interval)
    : service_(service), interval_(interval), thread_([this] { run(); })
{
}

VerificationWorker::~VerificationWorker() { stop(); }

void VerificationWorker::notify()
{
    {
        std::lock_guard lock(mu_);
        wake_ = true;
    }
    cv_.notify_one();
}

void VerificationWorker::stop()
{
    {
        std::lock_guard lock(mu_);
        stop_ = true;
    }
    cv_.notify_one();
    if (thread_.joinable()) thread_.join();
}

void VerificationWorker::run()
{
    for (;;) {
        {
            std::unique_lock lock(mu_);
            cv_.wait_for(lock, interval_, [this] { return wake_ || stop_; });
            if (stop_) return;
            wake_ = false;
        }
        try {
            service_.verify_pending();
        } catch (const std::exception& e) {
            log::error(std::string("verification worker: ") + e.what());
        }
    }
}

} // namespace ransomtrace
