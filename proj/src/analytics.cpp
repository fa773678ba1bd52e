#include <ransomtrace/analytics.hpp>
#include <ransomtrace/log.hpp>

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <sstream>

namespace ransomtrace {
namespace {

constexpr ActorCategory kCategories[] = {ActorCategory::Commodity, ActorCategory::RaaS};

// Book entry for an event, or nullptr when its address is excluded.
const TrackedAddress* lookup_included(const AddressBook& book, const std::string& address)
{
    auto it = book.find(address);
    if (it == book.end())
        throw Error("UnknownAddress", "event for address " + address + " missing from address book");
    return it->second.excluded ? nullptr : &it->second;
}

std::map<std::string, std::vector<const LedgerEvent*>> group_by_address(const std::vector<LedgerEvent>& events,
                                                                        const AddressBook& book)
{
    std::map<std::string, std::vector<const LedgerEvent*>> out;
    for (const auto& e : events)
        if (lookup_included(book, e.address)) out[e.address].push_back(&e);
    return out;
}

std::string fmt_double(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

MonthlySeries make_series(const std::map<YearMonth, std::pair<std::int64_t, std::int64_t>>& buckets)
{
    MonthlySeries s;
    if (buckets.empty()) return s;
    for (auto m = buckets.begin()->first; m <= buckets.rbegin()->first; m = m.next()) {
        s.months.push_back(m);
        auto it = buckets.find(m);
        s.commodity.push_back(it == buckets.end() ? 0 : it->second.first);
        s.raas.push_back(it == buckets.end() ? 0 : it->second.second);
    }
    return s;
}

void add_to_bucket(std::map<YearMonth, std::pair<std::int64_t, std::int64_t>>& buckets, UnixSeconds ts,
                   ActorCategory c, std::int64_t v)
{
    auto& slot = buckets[YearMonth::of(ts)];
    (c == ActorCategory::RaaS ? slot.second : slot.first) += v;
}

std::string ecdf_csv(const std::vector<double>& samples)
{
    std::string out = "value,fraction\n";
    if (samples.empty()) return out;
    const auto e = Ecdf::from_samples(samples);
    for (std::size_t i = 0; i < e.values().size(); ++i)
        out += fmt_double(e.values()[i]) + "," + fmt_double(e.fractions()[i]) + "\n";
    return out;
}

std::string monthly_csv(const MonthlySeries& s, bool cents, const std::string& unit)
{
    std::string out = "month,commodity_" + unit + ",raas_" + unit + "\n";
    for (std::size_t i = 0; i < s.months.size(); ++i) {
        auto cell = [&](std::int64_t v) { return cents ? UsdCents(v).to_string() : std::to_string(v); };
        out += s.months[i].to_string() + "," + cell(s.commodity[i]) + "," + cell(s.raas[i]) + "\n";
    }
    return out;
}

} // namespace

AddressBook make_address_book(const std::vector<TrackedAddress>& addresses)
{
    AddressBook book;
    for (const auto& a : addresses) book.emplace(a.encoded, a);
    return book;
}

PaymentSummary payment_summary(const std::vector<LedgerEvent>& events)
{
    std::vector<std::int64_t> cents;
    for (const auto& e : events)
        if (e.direction == Direction::Payment) cents.push_back(e.usd.cents());
    if (cents.empty()) throw Error("EmptyInput", "payment summary needs at least one payment");
    std::sort(cents.begin(), cents.end());

    PaymentSummary s;
    s.count = cents.size();
    for (auto c : cents) s.total_usd += UsdCents(c);
    s.min_usd = UsdCents(cents.front());
    s.max_usd = UsdCents(cents.back());
    const auto mid = cents.size() / 2;
    s.median_usd = cents.size() % 2
        ? static_cast<double>(cents[mid]) / 100.0
        : static_cast<double>(cents[mid - 1] + cents[mid]) / 200.0;
    return s;
}

Ecdf Ecdf::from_samples(std::vector<double> samples)
{
    if (samples.empty()) throw Error("EmptyInput", "ECDF needs at least one sample");
    std::sort(samples.begin(), samples.end());
    Ecdf e;
    e.n_ = samples.size();
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (i + 1 < samples.size() && samples[i + 1] == samples[i]) continue;
        e.values_.push_back(samples[i]);
        e.fractions_.push_back(static_cast<double>(i + 1) / static_cast<double>(e.n_));
    }
    return e;
}

double Ecdf::operator()(double x) const
{
    auto it = std::upper_bound(values_.begin(), values_.end(), x);
    if (it == values_.begin()) return 0.0;
    return fractions_[static_cast<std::size_t>(it - values_.begin()) - 1];
}

YearMonth YearMonth::of(UnixSeconds ts)
{
    using namespace std::chrono;
    const year_month_day ymd{floor<days>(sys_seconds{seconds{ts}})};
    return {static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month())};
}

YearMonth YearMonth::next() const
{
    return month == 12 ? YearMonth{year + 1, 1} : YearMonth{year, month + 1};
}

std::string YearMonth::to_string() const
{
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u", year, month);
    return buf;
}

std::int64_t MonthlySeries::total(ActorCategory c) const
{
    const auto& v = c == ActorCategory::RaaS ? raas : commodity;
    std::int64_t sum = 0;
    for (auto x : v) sum += x;
    return sum;
}

std::vector<std::pair<std::string, UsdCents>> RevenueByActor::ranked() const
{
    std::vector<std::pair<std::string, UsdCents>> out(by_family.begin(), by_family.end());
    std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    return out;
}

RevenueByActor revenue_by_actor(const std::vector<LedgerEvent>& events, const AddressBook& book)
{
    RevenueByActor r;
    for (const auto& e : events) {
        const auto* a = lookup_included(book, e.address);
        if (!a || e.direction != Direction::Payment) continue;
        r.by_family[a->family] += e.usd;
        r.by_category[a->category] += e.usd;
    }
    return r;
}

MonthlySeries monthly_revenue(const std::vector<LedgerEvent>& events, const AddressBook& book)
{
    std::map<YearMonth, std::pair<std::int64_t, std::int64_t>> buckets;
    for (const auto& e : events) {
        const auto* a = lookup_included(book, e.address);
        if (a && e.direction == Direction::Payment) add_to_bucket(buckets, e.timestamp, a->category, e.usd.cents());
    }
    return make_series(buckets);
}

MonthlySeries unique_addresses_per_month(const std::vector<LedgerEvent>& events, const AddressBook& book)
{
    std::map<std::string, UnixSeconds> first_payment;
    for (const auto& e : events) {
        if (!lookup_included(book, e.address) || e.direction != Direction::Payment) continue;
        auto [it, fresh] = first_payment.emplace(e.address, e.timestamp);
        if (!fresh) it->second = std::min(it->second, e.timestamp);
    }
    std::map<YearMonth, std::pair<std::int64_t, std::int64_t>> buckets;
    for (const auto& [addr, ts] : first_payment) add_to_bucket(buckets, ts, book.at(addr).category, 1);
    return make_series(buckets);
}

namespace {

std::vector<double> direction_counts(const std::vector<LedgerEvent>& events, const AddressBook& book,
                                     ActorCategory category, Direction dir)
{
    std::map<std::string, std::size_t> counts;
    for (const auto& [addr, a] : book)
        if (!a.excluded && a.category == category) counts[addr] = 0;
    for (const auto& e : events) {
        const auto* a = lookup_included(book, e.address);
        if (a && a->category == category && e.direction == dir) ++counts[e.address];
    }
    std::vector<double> out;
    out.reserve(counts.size());
    for (const auto& [_, n] : counts) out.push_back(static_cast<double>(n));
    return out;
}

} // namespace

std::vector<double> payment_counts(const std::vector<LedgerEvent>& events, const AddressBook& book,
                                   ActorCategory category)
{
    return direction_counts(events, book, category, Direction::Payment);
}

std::vector<double> transfer_counts(const std::vector<LedgerEvent>& events, const AddressBook& book,
                                    ActorCategory category)
{
    return direction_counts(events, book, category, Direction::Transfer);
}

Ecdf payments_per_address(const std::vector<LedgerEvent>& events, const AddressBook& book, ActorCategory category)
{
    return Ecdf::from_samples(payment_counts(events, book, category));
}

Ecdf transfers_per_address(const std::vector<LedgerEvent>& events, const AddressBook& book, ActorCategory category)
{
    return Ecdf::from_samples(transfer_counts(events, book, category));
}

std::optional<double> collect_to_laundry(const std::vector<LedgerEvent>& address_events)
{
    std::optional<UnixSeconds> first_payment, last_transfer;
    for (const auto& e : address_events) {
        if (e.direction == Direction::Payment)
            first_payment = first_payment ? std::min(*first_payment, e.timestamp) : e.timestamp;
        else
            last_transfer = last_transfer ? std::max(*last_transfer, e.timestamp) : e.timestamp;
    }
    if (!first_payment || !last_transfer) return std::nullopt;
    return static_cast<double>(*last_transfer - *first_payment) / 86400.0;
}

std::vector<double> collect_to_laundry_samples(const std::vector<LedgerEvent>& events, const AddressBook& book,
                                               ActorCategory category)
{
    std::vector<double> out;
    for (const auto& [addr, evs] : group_by_address(events, book)) {
        if (book.at(addr).category != category) continue;
        std::vector<LedgerEvent> own;
        own.reserve(evs.size());
        for (const auto* e : evs) own.push_back(*e);
        if (auto d = collect_to_laundry(own)) out.push_back(*d);
    }
    return out;
}

double remaining_fraction(const std::vector<LedgerEvent>& events)
{
    unsigned __int128 in = 0, out = 0;
    for (const auto& e : events) (e.direction == Direction::Payment ? in : out) += e.btc.sat();
    if (in == 0) throw Error("EmptyInput", "remaining fraction needs at least one payment");
    if (out >= in) return 0.0;
    return static_cast<double>(in - out) / static_cast<double>(in);
}

std::vector<LedgerEvent> family_events(const std::vector<LedgerEvent>& events, const AddressBook& book,
                                       const std::string& family)
{
    const auto key = ascii_lower(family);
    std::vector<LedgerEvent> out;
    for (const auto& e : events) {
        const auto* a = lookup_included(book, e.address);
        if (a && ascii_lower(a->family) == key) out.push_back(e);
    }
    return out;
}

std::vector<AttributedTransfer> attribute_transfers(const std::vector<LedgerEvent>& events, const AddressBook& book,
                                                    const std::vector<ChainTx>& txs, LabelStore labels)
{
    const auto partition = common_input_ownership(txs);
    labels.bind(partition);
    const AddressUsageIndex history(txs);
    const auto index = index_txs(txs);

    std::vector<AttributedTransfer> out;
    for (const auto& e : events) {
        const auto* a = lookup_included(book, e.address);
        if (!a || e.direction != Direction::Transfer) continue;
        try {
            out.push_back({e.address, a->category, e.usd, attribute_first_hop(e, index, history, partition, labels)});
        } catch (const Error& err) {
            if (err.kind() != "MissingTx") throw;
            log::warn(std::string("MissingTx: ") + err.what());
        }
    }
    return out;
}

LaunderingMix laundering_mix(const std::vector<AttributedTransfer>& attributions, ActorCategory category)
{
    LaunderingMix mix;
    for (const auto& t : attributions) {
        if (t.category != category) continue;
        for (const auto& [cls, usd] : t.attribution.shares) {
            if (cls == EntityClass::Unknown) {
                mix.unknown_usd += usd;
            } else {
                mix.usd[cls] += usd;
                mix.attributed_usd += usd;
            }
        }
    }
    if (mix.attributed_usd.cents() > 0)
        for (const auto& [cls, usd] : mix.usd)
            mix.fractions[cls] = static_cast<double>(usd.cents()) / static_cast<double>(mix.attributed_usd.cents());
    return mix;
}

std::map<ScriptType, CensusRow> address_format_census(const std::vector<TrackedAddress>& addresses)
{
    std::map<ScriptType, CensusRow> out;
    for (const auto& a : addresses) {
        if (a.excluded) continue;
        auto& row = out[a.script_type];
        ++row.count;
        row.families.insert(a.family);
    }
    return out;
}

DatasetOverview dataset_overview(const std::vector<LedgerEvent>& events, const AddressBook& book)
{
    DatasetOverview o;
    std::set<std::string> families[2];
    for (const auto& [addr, a] : book) {
        if (a.excluded) continue;
        auto& col = a.category == ActorCategory::RaaS ? o.raas : o.commodity;
        ++col.addresses;
        families[a.category == ActorCategory::RaaS].insert(ascii_lower(a.family));
    }
    o.commodity.actors = families[0].size();
    o.raas.actors = families[1].size();
    for (const auto& e : events) {
        const auto* a = lookup_included(book, e.address);
        if (!a) continue;
        auto& col = a->category == ActorCategory::RaaS ? o.raas : o.commodity;
        ++(e.direction == Direction::Payment ? col.payments : col.transfers);
    }
    return o;
}

std::map<std::string, std::string> compute_stats(const StatsInput& input)
{
    const auto book = make_address_book(input.addresses);
    std::map<std::string, std::string> files;

    for (auto c : kCategories) {
        const std::string cat(to_string(c));
        files["ecdf_payments_per_address_" + cat + ".csv"] = ecdf_csv(payment_counts(input.events, book, c));
        files["ecdf_transfers_per_address_" + cat + ".csv"] = ecdf_csv(transfer_counts(input.events, book, c));
        files["ecdf_collect_to_laundry_" + cat + ".csv"] =
            ecdf_csv(collect_to_laundry_samples(input.events, book, c));
    }

    files["monthly_revenue.csv"] = monthly_csv(monthly_revenue(input.events, book), true, "usd");
    files["monthly_unique_addresses.csv"] =
        monthly_csv(unique_addresses_per_month(input.events, book), false, "addresses");

    const auto revenue = revenue_by_actor(input.events, book);
    {
        std::map<std::string, ActorCategory> cat_of;
        for (const auto& [_, a] : book) cat_of.emplace(a.family, a.category);
        std::string csv = "family,category,usd\n";
        for (const auto& [family, usd] : revenue.ranked())
            csv += family + "," + std::string(to_string(cat_of.at(family))) + "," + usd.to_string() + "\n";
        files["revenue_by_family.csv"] = csv;
    }

    const auto attributed = attribute_transfers(input.events, book, input.txs, input.labels);
    for (auto c : kCategories) {
        const auto mix = laundering_mix(attributed, c);
        std::string csv = "class,usd,fraction\n";
        for (const auto& [cls, frac] : mix.fractions)
            csv += std::string(to_string(cls)) + "," + mix.usd.at(cls).to_string() + "," + fmt_double(frac) + "\n";
        csv += "unknown," + mix.unknown_usd.to_string() + ",\n";
        files["laundering_mix_" + std::string(to_string(c)) + ".csv"] = csv;
    }

    {
        std::string csv = "family,remaining_fraction\n";
        std::set<std::string> fams;
        for (const auto& [_, a] : book)
            if (!a.excluded) fams.insert(a.family);
        for (const auto& f : fams) {
            const auto evs = family_events(input.events, book, f);
            const bool paid = std::any_of(evs.begin(), evs.end(),
                                          [](const LedgerEvent& e) { return e.direction == Direction::Payment; });
            if (paid) csv += f + "," + fmt_double(remaining_fraction(evs)) + "\n";
        }
        files["remaining_by_family.csv"] = csv;
    }

    {
        std::string csv = "script_type,count,families\n";
        for (const auto& [type, row] : address_format_census(input.addresses)) {
            std::string fams;
            for (const auto& f : row.families) fams += (fams.empty() ? "" : ";") + f;
            csv += std::string(to_string(type)) + "," + std::to_string(row.count) + ",\"" + fams + "\"\n";
        }
        files["address_census.csv"] = csv;
    }

    nlohmann::ordered_json summary;
    std::vector<LedgerEvent> included;
    for (const auto& e : input.events)
        if (lookup_included(book, e.address)) included.push_back(e);
    const bool any_payment = std::any_of(included.begin(), included.end(),
                                         [](const LedgerEvent& e) { return e.direction == Direction::Payment; });
    if (any_payment) {
        const auto s = payment_summary(included);
        summary["count"] = s.count;
        summary["total_usd"] = s.total_usd.to_string();
        summary["min_usd"] = s.min_usd.to_string();
        summary["max_usd"] = s.max_usd.to_string();
        summary["median_usd"] = s.median_usd;
    } else {
        summary["count"] = 0;
    }
    const auto overview = dataset_overview(input.events, book);
    for (auto c : kCategories) {
        const auto& col = c == ActorCategory::RaaS ? overview.raas : overview.commodity;
        auto& j = summary["overview"][std::string(to_string(c))];
        j["actors"] = col.actors;
        j["addresses"] = col.addresses;
        j["payments"] = col.payments;
        j["transfers"] = col.transfers;
        j["revenue_usd"] = revenue.by_category.count(c) ? revenue.by_category.at(c).to_string() : "0.00";
    }
    files["payment_summary.json"] = summary.dump(2) + "\n";

    files["plots.gp"] =
        "# gnuplot -c plots.gp  (run inside the stats directory)\n"
        "set datafile separator ','\nset terminal pngcairo size 900,500\nset key top left\n"
        "set output 'monthly_revenue.png'\nset xdata time\nset timefmt '%Y-%m'\n"
        "plot 'monthly_revenue.csv' every ::1 using 1:2 with lines title 'commodity', "
        "'' every ::1 using 1:3 with lines title 'raas'\n"
        "unset xdata\nset output 'ecdf_payments_per_address.png'\n"
        "plot 'ecdf_payments_per_address_commodity.csv' every ::1 using 1:2 with steps title 'commodity', "
        "'ecdf_payments_per_address_raas.csv' every ::1 using 1:2 with steps title 'raas'\n"
        "set output 'ecdf_transfers_per_address.png'\n"
        "plot 'ecdf_transfers_per_address_commodity.csv' every ::1 using 1:2 with steps title 'commodity', "
        "'ecdf_transfers_per_address_raas.csv' every ::1 using 1:2 with steps title 'raas'\n"
        "set output 'ecdf_collect_to_laundry.png'\n"
        "plot 'ecdf_collect_to_laundry_commodity.csv' every ::1 using 1:2 with steps title 'commodity', "
        "'ecdf_collect_to_laundry_raas.csv' every ::1 using 1:2 with steps title 'raas'\n";
    return files;
}

} // namespace ransomtrace
