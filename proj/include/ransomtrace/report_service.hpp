#pragma once

// Crowdsourced report intake, automated verification and manual
// moderation. State transitions of one report are serialized by a
// per-report mutex; dataset mutations take the dataset mutex.

#include <ransomtrace/chain_model.hpp>
#include <ransomtrace/dataset.hpp>
#include <ransomtrace/error.hpp>
#include <ransomtrace/ingest.hpp>

#include <condition_variable>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace ransomtrace {

class Store;

enum class ReportState { Pending, Approved, Rejected };
std::string_view to_string(ReportState s) noexcept;
ReportState parse_report_state(std::string_view s);

// A URL, or an uploaded file's digest plus media type. Files themselves
// are never stored.
struct Evidence {
    std::string url;
    std::string digest;
    std::string media_type;

    bool operator==(const Evidence&) const = default;
};

struct AddressCheck {
    std::string address;
    bool codec_valid = false;
    bool has_payment = false;
    std::optional<std::string> excluded;
    // Family of the existing dataset entry for this address.
    std::optional<std::string> duplicate_of;

    bool passes() const noexcept { return codec_valid && has_payment && !excluded && !duplicate_of; }
    bool operator==(const AddressCheck&) const = default;
};

struct VerificationResult {
    std::vector<AddressCheck> checks;

    bool operator==(const VerificationResult&) const = default;
};

struct Report {
    std::string id;
    std::vector<std::string> addresses;
    std::string family;
    std::vector<Evidence> evidence;
    UnixSeconds submitted_at = 0;
    ReportState state = ReportState::Pending;
    std::optional<std::string> decision_note;
    std::optional<std::string> reviewer;
    std::optional<VerificationResult> verification;
    // Conflicting family claims and skipped duplicates, recorded at decision.
    std::vector<std::string> annotations;

    bool operator==(const Report&) const = default;
};

std::string report_to_json(const Report& r);
Report report_from_json(const std::string& text);

struct SubmitPayload {
    std::vector<std::string> addresses;
    std::string family;
    std::vector<Evidence> evidence;
};

class ValidationFailed : public Error {
public:
    explicit ValidationFailed(std::map<std::string, std::string> fields);
    const std::map<std::string, std::string>& fields() const noexcept { return fields_; }

private:
    std::map<std::string, std::string> fields_;
};

// Parses and validates a submission body. Throws ValidationFailed with
// per-field messages (e.g. {"evidence": "evidence required"}).
SubmitPayload parse_submit_payload(const std::string& body);
void validate(const SubmitPayload& payload);

enum class Decision { Approved, Rejected };

// Fixed-window limiter: at most `limit` submissions per client per window.
class RateLimiter {
public:
    RateLimiter(std::size_t limit, UnixSeconds window_seconds) : limit_(limit), window_(window_seconds) {}
    // false when the client is over its budget.
    bool allow(const std::string& client, UnixSeconds now);

private:
    std::size_t limit_;
    UnixSeconds window_;
    std::mutex mu_;
    std::map<std::string, std::pair<UnixSeconds, std::size_t>> windows_;
};

struct ServiceOptions {
    CategoryRegistry registry;
    ExclusionList exclusions;
    RetryPolicy retry;
    std::function<UnixSeconds()> clock;   // defaults to system clock
    std::size_t submissions_per_window = 30;
    UnixSeconds rate_window_seconds = 60;
};

class ReportService {
public:
    // `source` must outlive the service. `store` may be null (memory only);
    // when set, reports and the dataset are loaded from and written to it.
    ReportService(ChainSource& source, Store* store, ServiceOptions options);

    // Throws ValidationFailed or Error("RateLimited").
    Report submit_report(const SubmitPayload& payload, const std::string& client = "");

    // Throws Error("NotFound"), Error("InvalidTransition") if not pending,
    // SourceUnavailable after retries (the report stays pending).
    VerificationResult verify_report(const std::string& id);

    // Throws Error("NotFound"), Error("InvalidTransition") when already
    // decided, Error("VerificationIncomplete") when not yet verified.
    Report decide(const std::string& id, Decision decision, const std::string& reviewer, const std::string& note);

    std::optional<Report> get(const std::string& id) const;
    std::vector<Report> list(std::optional<ReportState> state = std::nullopt) const;

    // Pending reports without a verification result, verified in id order.
    // SourceUnavailable failures are logged and left for the next pass.
    // Returns the number verified.
    std::size_t verify_pending();

    std::string export_dataset() const;
    std::vector<DatasetEntry> dataset_snapshot() const;
    // Adds entries for addresses not yet in the dataset; returns count added.
    std::size_t import_dataset(const std::vector<DatasetEntry>& entries);

    // Called after each successful submission (used to wake the worker).
    void on_submit(std::function<void()> hook);

private:
    struct Slot {
        mutable std::mutex mu;
        Report report;
        std::map<std::string, std::vector<LedgerEvent>> ledgers;   // from verification
    };

    std::shared_ptr<Slot> slot(const std::string& id) const;
    void persist(const Report& r);
    UnixSeconds now() const;

    ChainSource& source_;
    Store* store_;
    ServiceOptions options_;
    RateLimiter limiter_;

    mutable std::mutex reports_mu_;
    std::map<std::string, std::shared_ptr<Slot>> reports_;
    std::uint64_t next_id_ = 1;

    mutable std::mutex dataset_mu_;
    std::map<std::string, DatasetEntry> dataset_;

    std::mutex hook_mu_;
    std::function<void()> submit_hook_;
};

// Background verifier: wakes on notify() or every `interval`, then runs
// verify_pending().
class VerificationWorker {
public:
    VerificationWorker(ReportService& service, std::chrono::milliseconds interval);
    ~VerificationWorker();
    VerificationWorker(const VerificationWorker&) = delete;
    VerificationWorker& operator=(const VerificationWorker&) = delete;

    void notify();
    void stop();

private:
    void run();

    ReportService& service_;
    std::chrono::milliseconds interval_;
    std::mutex mu_;
    std::condition_variable cv_;
    bool wake_ = false;
    bool stop_ = false;
    std::thread thread_;
};

} // namespace ransomtrace
